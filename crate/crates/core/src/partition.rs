//! Integer partitions and the two partial orders on them.
//!
//! A partition of `n` lists the sizes of the mutually separable subsystems of
//! an `n`-partite system. Partitions are stored canonically as weakly
//! decreasing vectors of positive parts. Two orders are provided:
//!
//! * refinement (`υ ⪯ ξ`): `ξ` is obtained from `υ` by grouping parts and
//!   summing each group;
//! * dominance (majorization, `υ ≤ ξ`): every prefix sum of `υ` is at most
//!   the matching prefix sum of `ξ`.
//!
//! Refinement implies dominance, but not the other way round; `{2,2}` and
//! `{3,1}` are the smallest incomparable-under-refinement pair.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by the enumeration routines unless a caller opts
/// into a different cap. `p(40) = 37338`.
pub const DEFAULT_MAX_N: u32 = 40;

/// An integer partition in canonical (weakly decreasing) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
    n: u32,
}

impl Partition {
    /// Builds a partition from parts in any order. Zero parts and empty input
    /// are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let n = parts
            .iter()
            .try_fold(0u32, |acc, &x| acc.checked_add(x))
            .ok_or_else(|| Error::InvalidPartition("sum overflows".into()))?;
        Ok(Self { parts, n })
    }

    // Caller guarantees canonical order and positivity.
    fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&x| x > 0));
        let n = parts.iter().sum();
        Self { parts, n }
    }

    /// The trivial partition `{n}` (no separability).
    pub fn top(n: u32) -> Self {
        assert!(n > 0, "partition of zero");
        Self::from_sorted(vec![n])
    }

    /// The finest partition `{1,…,1}` (full separability).
    pub fn bottom(n: u32) -> Self {
        assert!(n > 0, "partition of zero");
        Self::from_sorted(vec![1; n as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts, `|ξ|`.
    pub fn height(&self) -> u32 {
        self.parts.len() as u32
    }

    /// Largest part.
    pub fn width(&self) -> u32 {
        self.parts[0]
    }

    /// Smallest part.
    pub fn toughness(&self) -> u32 {
        *self.parts.last().unwrap()
    }

    /// Dyson rank, `width − height`.
    pub fn rank(&self) -> i64 {
        i64::from(self.width()) - i64::from(self.height())
    }

    /// Sum of squared parts.
    pub fn squareability(&self) -> u64 {
        self.parts.iter().map(|&x| u64::from(x) * u64::from(x)).sum()
    }

    pub fn is_top(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_bottom(&self) -> bool {
        self.parts[0] == 1
    }

    /// Column lengths of the Young diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = (1..=self.width())
            .map(|c| self.parts.iter().take_while(|&&x| x >= c).count() as u32)
            .collect();
        Self::from_sorted(cols)
    }

    /// Label used in graph exports, e.g. `3+2+1`.
    pub fn label(&self) -> String {
        let v: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        v.join("+")
    }

    /// Partitions obtained by splitting one part into two, i.e. the lower
    /// covers under refinement.
    pub fn refinement_lower_covers(&self) -> Vec<Partition> {
        let mut out = BTreeSet::new();
        for (i, &x) in self.parts.iter().enumerate() {
            if i > 0 && self.parts[i - 1] == x {
                continue;
            }
            for a in 1..=x / 2 {
                let mut v = self.parts.clone();
                v.remove(i);
                v.push(a);
                v.push(x - a);
                out.insert(Partition::new(v).expect("positive parts"));
            }
        }
        sort_canonical(out.into_iter().collect())
    }

    /// Partitions obtained by merging two parts, i.e. the upper covers under
    /// refinement.
    pub fn refinement_upper_covers(&self) -> Vec<Partition> {
        let p = &self.parts;
        let mut out = BTreeSet::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let mut v: Vec<u32> = p
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != i && t != j)
                    .map(|(_, &x)| x)
                    .collect();
                v.push(p[i] + p[j]);
                out.insert(Partition::new(v).expect("positive parts"));
            }
        }
        sort_canonical(out.into_iter().collect())
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `3,2,1`, `3+2+1`, `{3,2,1}`, `[3, 2, 1]` or space separated parts.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_matches(|c| matches!(c, '{' | '}' | '[' | ']'));
        let parts = inner
            .split(|c: char| c == ',' || c == '+' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Sorts partitions of the same `n` in reverse-lexicographic order (`⊤` first,
/// `⊥` last).
pub fn sort_canonical(mut v: Vec<Partition>) -> Vec<Partition> {
    v.sort_by(|a, b| b.parts.cmp(&a.parts));
    v
}

fn check_n(n: u32, max: u32) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::Limit { n, max });
    }
    Ok(())
}

/// All partitions of `n` in reverse-lexicographic order, `1 ≤ n ≤ 40`.
pub fn enumerate_partitions(n: u32) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_MAX_N)
}

/// As [`enumerate_partitions`] with an explicit cap on `n`.
pub fn enumerate_partitions_capped(n: u32, max: u32) -> Result<Vec<Partition>> {
    check_n(n, max)?;
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n as usize);
    fill(n, n, &mut stack, &mut out);
    Ok(out)
}

fn fill(rest: u32, bound: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition::from_sorted(stack.clone()));
        return;
    }
    for x in (1..=rest.min(bound)).rev() {
        stack.push(x);
        fill(rest - x, x, stack, out);
        stack.pop();
    }
}

fn same_n(a: &Partition, b: &Partition) -> Result<()> {
    if a.n != b.n {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    Ok(())
}

/// Dominance (majorization): `lower ≤ upper` iff every prefix sum of `lower`
/// is at most the corresponding prefix sum of `upper`.
pub fn dominated_by(lower: &Partition, upper: &Partition) -> Result<bool> {
    same_n(lower, upper)?;
    Ok(dominated_unchecked(&lower.parts, &upper.parts))
}

fn dominated_unchecked(lower: &[u32], upper: &[u32]) -> bool {
    let (mut sl, mut su) = (0u32, 0u32);
    for i in 0..lower.len().max(upper.len()) {
        sl += lower.get(i).copied().unwrap_or(0);
        su += upper.get(i).copied().unwrap_or(0);
        if sl > su {
            return false;
        }
    }
    true
}

/// Refinement: `finer ⪯ coarser` iff the parts of `finer` can be grouped so
/// that the group sums are exactly the parts of `coarser`.
///
/// Backtracking over assignments of parts (largest first) to bins, with
/// symmetric-bin skipping, dead-capacity pruning and memoisation of failed
/// bin states.
pub fn refines(finer: &Partition, coarser: &Partition) -> Result<bool> {
    same_n(finer, coarser)?;
    if finer.parts.len() < coarser.parts.len()
        || finer.width() > coarser.width()
        || !dominated_unchecked(&finer.parts, &coarser.parts)
    {
        return Ok(false);
    }
    if finer.parts.len() == coarser.parts.len() {
        return Ok(finer == coarser);
    }
    let mut caps = coarser.parts.clone();
    let mut failed = HashSet::new();
    Ok(pack(&finer.parts, 0, &mut caps, &mut failed))
}

fn pack(items: &[u32], idx: usize, caps: &mut [u32], failed: &mut HashSet<(usize, Vec<u32>)>) -> bool {
    if idx == items.len() {
        return caps.iter().all(|&c| c == 0);
    }
    let smallest = *items.last().unwrap();
    if caps.iter().any(|&c| c > 0 && c < smallest) {
        return false;
    }
    let mut key = caps.to_vec();
    key.sort_unstable();
    let key = (idx, key);
    if failed.contains(&key) {
        return false;
    }
    let x = items[idx];
    let mut tried: Vec<u32> = Vec::new();
    for b in 0..caps.len() {
        let c = caps[b];
        if c < x || tried.contains(&c) {
            continue;
        }
        tried.push(c);
        caps[b] -= x;
        if pack(items, idx + 1, caps, failed) {
            return true;
        }
        caps[b] += x;
    }
    failed.insert(key);
    false
}

/// All refinement covering pairs `(finer, coarser)` of `P_I(n)`: `coarser`
/// arises from `finer` by adding exactly two of its parts. Pairs are ordered
/// by the canonical position of `finer`, then of `coarser`.
pub fn refinement_covers(n: u32) -> Result<Vec<(Partition, Partition)>> {
    let all = enumerate_partitions(n)?;
    let mut out = Vec::new();
    for p in &all {
        for q in p.refinement_upper_covers() {
            out.push((p.clone(), q));
        }
    }
    Ok(out)
}

/// Upper covers of `xi` in the dominance lattice.
///
/// A cover moves the last box of row `j` to row `i < j`, allowed when
/// `j = i + 1` or rows `i` and `j` have equal length, provided the result is
/// still a partition.
pub fn dominance_covers(xi: &Partition) -> Vec<Partition> {
    let p = &xi.parts;
    let h = p.len();
    let row = |t: usize| if t < h { p[t] } else { 0 };
    let mut out = BTreeSet::new();
    for j in 1..h {
        for i in 0..j {
            if !(j == i + 1 || p[i] == p[j]) {
                continue;
            }
            if i > 0 && p[i - 1] < p[i] + 1 {
                continue;
            }
            if p[j] - 1 < row(j + 1) {
                continue;
            }
            let mut v = p.clone();
            v[i] += 1;
            v[j] -= 1;
            v.retain(|&x| x > 0);
            out.insert(Partition::from_sorted(v));
        }
    }
    sort_canonical(out.into_iter().collect())
}

/// All dominance covering pairs `(lower, upper)` of `P_I(n)`.
pub fn dominance_cover_pairs(n: u32) -> Result<Vec<(Partition, Partition)>> {
    let all = enumerate_partitions(n)?;
    let mut out = Vec::new();
    for p in &all {
        for q in dominance_covers(p) {
            out.push((p.clone(), q));
        }
    }
    Ok(out)
}
