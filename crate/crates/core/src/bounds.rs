//! Quantum Fisher information bounds `b_f(k)`.
//!
//! For collective operators of unit spectral width per particle, the QFI of
//! a pure state with finest separating type `ξ` is at most `s₂(ξ)`, so the
//! best bound for `(k,f)`-separable states is the maximum of `s₂` over the
//! level's down-set. Brute force over `P_I(n)` is the reference; the closed
//! forms of [`ClosedForm`] are checked against it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::{pure_depth, Ensemble};
use crate::error::{Error, Result};
use crate::genfun::{same_level, values_of, Direction, Family, GenFun, QParam};
use crate::partition::{dominance_covers, dominated_by, enumerate_partitions_capped, Partition};

/// Default cap on `n` for brute-force tables (`p(30) = 5604`).
pub const DEFAULT_BRUTEFORCE_CAP: u32 = 30;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: f64,
    pub b: u64,
    pub witnesses: Vec<Partition>,
}

/// `b_f(k)` for every attained level, rows ordered from `f(⊥)` to `f(⊤)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub f: GenFun,
    pub n: u32,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn row(&self, k: f64) -> Result<&BoundRow> {
        self.rows
            .iter()
            .find(|r| same_level(r.k, k))
            .ok_or(Error::Level(k))
    }

    pub fn bound(&self, k: f64) -> Result<u64> {
        Ok(self.row(k)?.b)
    }

    /// `b_f∘f` as a generator function (always increasing).
    pub fn as_genfun(&self) -> Result<GenFun> {
        GenFun::lookup(
            self.f.clone(),
            self.rows.iter().map(|r| (r.k, r.b as f64)).collect(),
        )
    }
}

/// Brute-force bound curve of `f` on `P_I(n)`, `n ≤ 30`.
pub fn bound_curve(f: &GenFun, n: u32) -> Result<BoundTable> {
    bound_curve_capped(f, n, DEFAULT_BRUTEFORCE_CAP)
}

pub fn bound_curve_capped(f: &GenFun, n: u32, cap: u32) -> Result<BoundTable> {
    let all = enumerate_partitions_capped(n, cap)?;
    let mut levels = values_of(f, &all);
    if f.direction() == Direction::Decreasing {
        levels.reverse();
    }
    // Per-level maximum of s₂ and its argmax set.
    let mut best: Vec<(u64, Vec<Partition>)> = vec![(0, Vec::new()); levels.len()];
    for p in all {
        let v = f.evaluate(&p);
        let i = levels
            .iter()
            .position(|&k| same_level(k, v))
            .expect("value in range");
        let s2 = p.squareability();
        let slot = &mut best[i];
        if s2 > slot.0 {
            *slot = (s2, vec![p]);
        } else if s2 == slot.0 {
            slot.1.push(p);
        }
    }
    let mut rows: Vec<BoundRow> = Vec::with_capacity(levels.len());
    for (k, (s2, ws)) in levels.into_iter().zip(best) {
        let row = match rows.last() {
            Some(prev) if prev.b > s2 => BoundRow { k, b: prev.b, witnesses: prev.witnesses.clone() },
            Some(prev) if prev.b == s2 => {
                let mut w: BTreeSet<Partition> = prev.witnesses.iter().cloned().collect();
                w.extend(ws);
                BoundRow { k, b: s2, witnesses: crate::partition::sort_canonical(w.into_iter().collect()) }
            }
            _ => BoundRow { k, b: s2, witnesses: crate::partition::sort_canonical(ws) },
        };
        rows.push(row);
    }
    Ok(BoundTable { f: f.clone(), n, rows })
}

/// `b_f(k)` with all maximizing partitions.
pub fn bound_bruteforce(f: &GenFun, k: f64, n: u32) -> Result<(u64, Vec<Partition>)> {
    let table = bound_curve(f, n)?;
    let row = table.row(k)?;
    Ok((row.b, row.witnesses.clone()))
}

/// Maximum of `s₂` over the members of the level's down-set that admit no
/// dominance upper cover inside the down-set. Moving a box up a row raises
/// `s₂`, so this must agree with [`bound_bruteforce`].
pub fn bound_by_moves(f: &GenFun, k: f64, n: u32) -> Result<u64> {
    let set = crate::genfun::sublevel_downset(f, k, n)?;
    let best = set
        .members()
        .iter()
        .filter(|p| !dominance_covers(p).iter().any(|q| set.contains(q)))
        .map(Partition::squareability)
        .max()
        .expect("nonempty down-set");
    Ok(best)
}

// ==== closed forms =========================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// k-producibility (width)
    Prod,
    /// `n·k`, attained only when `k | n`
    ProdWeak,
    /// k-partitionability (height)
    Part,
    /// k-stretchability (rank)
    Str,
    /// toughness
    Tgh,
    /// squareability
    Sq,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 6] = [
        Self::Prod,
        Self::ProdWeak,
        Self::Part,
        Self::Str,
        Self::Tgh,
        Self::Sq,
    ];

    /// The closed form whose levels are those of `f`, if any. `ProdWeak`
    /// is never matched since it is not attained.
    pub fn for_genfun(f: &GenFun) -> Option<Self> {
        match f.family() {
            Family::Width => Some(Self::Prod),
            Family::Height => Some(Self::Part),
            Family::Rank => Some(Self::Str),
            Family::Toughness => Some(Self::Tgh),
            Family::Squareability => Some(Self::Sq),
            Family::PowerSum(QParam::Finite(q)) if *q == 2.0 => Some(Self::Sq),
            _ => None,
        }
    }

    pub fn genfun(self) -> GenFun {
        match self {
            Self::Prod | Self::ProdWeak => GenFun::width(),
            Self::Part => GenFun::height(),
            Self::Str => GenFun::rank(),
            Self::Tgh => GenFun::toughness(),
            Self::Sq => GenFun::squareability(),
        }
    }

    /// Closed-form bound at level `k` for `n` parties.
    pub fn evaluate(self, k: i64, n: u32) -> Result<i64> {
        if n == 0 {
            return Err(Error::Limit { n, max: u32::MAX });
        }
        let n = i64::from(n);
        let out_of_range = || Error::Argument(format!("level {k} is outside the range of {self} for n = {n}"));
        match self {
            Self::Prod | Self::ProdWeak | Self::Part if !(1..=n).contains(&k) => Err(out_of_range()),
            Self::Prod => {
                let q = n / k;
                let r = n - q * k;
                Ok(q * k * k + r * r)
            }
            Self::ProdWeak => Ok(n * k),
            Self::Part => Ok(k * k - (2 * n + 1) * k + n * (n + 2)),
            Self::Str => {
                if k.abs() > n - 1 || (n >= 2 && k.abs() == n - 2) {
                    return Err(out_of_range());
                }
                let s = n + k;
                Ok(if s == 10 && n >= 8 {
                    n + 24
                } else if s == 16 && n >= 12 {
                    n + 60
                } else if s % 2 == 0 {
                    s * s / 4 + (n - k) / 2 + 2
                } else {
                    (s + 1) * (s + 1) / 4 + (n - k - 1) / 2
                })
            }
            Self::Tgh => {
                if k == n {
                    Ok(n * n)
                } else if k >= 1 && k <= n / 2 {
                    Ok(n * n - 2 * n + 2)
                } else {
                    Err(out_of_range())
                }
            }
            Self::Sq => {
                if k >= 0 && squareability_attained(n as u32, k as u64) {
                    Ok(k)
                } else {
                    Err(out_of_range())
                }
            }
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Prod => "prod",
            Self::ProdWeak => "prod_weak",
            Self::Part => "part",
            Self::Str => "str",
            Self::Tgh => "tgh",
            Self::Sq => "sq",
        })
    }
}

impl FromStr for ClosedForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown closed form {s:?}")))
    }
}

/// Whether some partition of `n` has `s₂ = value`.
pub fn squareability_attained(n: u32, value: u64) -> bool {
    let n = n as usize;
    let max = n * n;
    if value as usize > max {
        return false;
    }
    // reach[m][s]: a partition of m with s₂ = s exists.
    let mut reach = vec![vec![false; max + 1]; n + 1];
    reach[0][0] = true;
    for part in 1..=n {
        let sq = part * part;
        for m in part..=n {
            for s in sq..=max {
                if reach[m - part][s - sq] {
                    reach[m][s] = true;
                }
            }
        }
    }
    reach[n][value as usize]
}

// ==== usefulness ===========================================================

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UsefulnessRow {
    pub k: f64,
    pub b: u64,
    /// `b` at this level is strictly below `b` at the next level toward `⊤`.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UsefulnessReport {
    pub f: GenFun,
    pub n: u32,
    pub rows: Vec<UsefulnessRow>,
    pub step_count: usize,
    pub all_strict: bool,
}

pub fn usefulness_report(f: &GenFun, n: u32) -> Result<UsefulnessReport> {
    Ok(usefulness_of(&bound_curve(f, n)?))
}

pub fn usefulness_of(table: &BoundTable) -> UsefulnessReport {
    let rows: Vec<UsefulnessRow> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| UsefulnessRow {
            k: r.k,
            b: r.b,
            strict: table.rows.get(i + 1).is_none_or(|next| r.b < next.b),
        })
        .collect();
    let step_count = rows.iter().map(|r| r.b).collect::<BTreeSet<_>>().len();
    let all_strict = rows.iter().all(|r| r.strict);
    UsefulnessReport {
        f: table.f.clone(),
        n: table.n,
        rows,
        step_count,
        all_strict,
    }
}

/// Consecutive level pairs where a witness of the upper level strictly
/// dominates a witness of the lower level yet `b` does not increase.
pub fn dominance_strictness_violations(table: &BoundTable) -> Vec<(f64, f64)> {
    table
        .rows
        .windows(2)
        .filter(|w| {
            let comparable = w[1].witnesses.iter().any(|hi| {
                w[0].witnesses
                    .iter()
                    .any(|lo| lo != hi && dominated_by(lo, hi).unwrap_or(false))
            });
            comparable && w[0].b >= w[1].b
        })
        .map(|w| (w[0].k, w[1].k))
        .collect()
}

// ==== using the bounds =====================================================

/// `B_f = b_f(D_f)` for a pure type.
pub fn induced_depth_bound(f: &GenFun, finest: &Partition) -> Result<u64> {
    bound_curve(f, finest.n())?.bound(pure_depth(f, finest))
}

/// Levels `k` with `b_f(k) < F_Q`: states in those down-sets cannot reach
/// the measured QFI. Returned in `⊥ → ⊤` order.
pub fn criteria_exclude(f: &GenFun, n: u32, fq: f64) -> Result<Vec<f64>> {
    let max = f64::from(n) * f64::from(n);
    if !(fq >= 0.0) || fq > max * (1.0 + 1e-12) {
        return Err(Error::Inconsistent(format!(
            "F_Q = {fq} is outside [0, n²] = [0, {max}]"
        )));
    }
    Ok(exclude_from_table(&bound_curve(f, n)?, fq))
}

pub fn exclude_from_table(table: &BoundTable, fq: f64) -> Vec<f64> {
    let tol = 1e-9 * fq.abs().max(1.0);
    table
        .rows
        .iter()
        .filter(|r| (r.b as f64) < fq - tol)
        .map(|r| r.k)
        .collect()
}

/// Average size of entangled subsystems certified by a decomposition,
/// `Σ p_j s₂(ξ_j)/n`.
pub fn ases(e: &Ensemble) -> f64 {
    let n = f64::from(e.n());
    e.members()
        .iter()
        .map(|m| m.p * m.parts.squareability() as f64 / n)
        .sum()
}
