//! Generator functions `f: P_I(n) → ℝ`.
//!
//! A generator function is monotone under refinement. Its sublevel sets
//! (superlevel sets for decreasing `f`) are down-sets and define the
//! one-parameter properties `(k,f)`-separability. [`GenFun`] is a closed
//! descriptor; checked constructors reject parameters outside the range where
//! monotonicity is proven, and [`GenFun::unchecked`] exists to reproduce
//! counterexamples.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::{enumerate_partitions, refines, Partition};
use crate::transform::MonotoneTransform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Self::Increasing => Self::Decreasing,
            Self::Decreasing => Self::Increasing,
        }
    }

    /// `a` lies on the `⊥` side of `b` (non-strictly, with tolerance).
    pub fn respects(self, lower: f64, upper: f64) -> bool {
        let tol = level_tolerance(lower, upper);
        match self {
            Self::Increasing => lower <= upper + tol,
            Self::Decreasing => lower + tol >= upper,
        }
    }
}

/// Order parameter `q` (or its infinite limits).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QParam {
    Finite(f64),
    PosInf,
    NegInf,
}

impl QParam {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl From<f64> for QParam {
    fn from(q: f64) -> Self {
        if q == f64::INFINITY {
            Self::PosInf
        } else if q == f64::NEG_INFINITY {
            Self::NegInf
        } else {
            Self::Finite(q)
        }
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::PosInf => write!(f, "inf"),
            Self::NegInf => write!(f, "-inf"),
        }
    }
}

impl FromStr for QParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Self::PosInf),
            "-inf" | "-infinity" => Ok(Self::NegInf),
            t => {
                let q: f64 = t.parse().map_err(|_| Error::Parse(format!("bad q value {t:?}")))?;
                if !q.is_finite() {
                    return Err(Error::Parse(format!("bad q value {t:?}")));
                }
                Ok(Self::Finite(q))
            }
        }
    }
}

/// The catalogued families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Height,
    Width,
    /// Dyson rank `w − h`.
    Rank,
    Toughness,
    /// Sum of the `m` largest parts.
    WM(u32),
    /// Sum of the `m` smallest parts.
    TM(u32),
    /// `s_q = Σ x^q`
    PowerSum(QParam),
    /// `N_q = s_q^{1/q}`
    QSum(QParam),
    /// `M_q = (s_q/h)^{1/q}`
    QMean(QParam),
    Tsallis(QParam),
    Renyi(QParam),
    Shannon,
    /// `P_q = exp(R_q)`
    Pq(QParam),
    /// `Dim_b = Σ b^x`
    Dim(f64),
    /// `Dim′_b = Dim_b − h + 1`
    DimP(f64),
    /// `log_b Dim_b`
    DoF(f64),
    /// `log_b Dim′_b`
    DoFP(f64),
    Squareability,
    /// `s₂/n`, the average size of the entangled subsystem.
    Avg,
    Composed { g: MonotoneTransform, inner: Box<GenFun> },
    /// `b∘f` where `b` is tabulated on the values of `f`.
    Lookup { table: Vec<(f64, f64)>, inner: Box<GenFun> },
}

/// A generator function with its monotonicity metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct GenFun {
    family: Family,
    direction: Direction,
    dominance_monotone: bool,
    exact_integer: bool,
    checked: bool,
}

struct Meta {
    direction: Direction,
    dominance_monotone: bool,
    exact_integer: bool,
}

fn range_err(family: &'static str, param: String) -> Error {
    Error::Range { family, param }
}

fn is_int(x: f64) -> bool {
    x.fract() == 0.0
}

fn dir(increasing: bool) -> Direction {
    if increasing {
        Direction::Increasing
    } else {
        Direction::Decreasing
    }
}

// Monotonicity metadata. `Err` from the outer result means the function is
// undefined; `in_range == false` means it is defined but not proven monotone.
fn meta_of(family: &Family) -> Result<(Meta, bool)> {
    use Direction::*;
    use QParam::*;
    let m = |direction, dominance_monotone, exact_integer| Meta {
        direction,
        dominance_monotone,
        exact_integer,
    };
    let out = match family {
        Family::Height => (m(Decreasing, true, true), true),
        Family::Width => (m(Increasing, true, true), true),
        Family::Rank => (m(Increasing, true, true), true),
        Family::Toughness => (m(Increasing, false, true), true),
        Family::WM(k) | Family::TM(k) if *k == 0 => {
            return Err(range_err(family.name(), format!("m={k}")));
        }
        Family::WM(_) => (m(Increasing, true, true), true),
        Family::TM(_) => (m(Increasing, false, true), true),
        Family::PowerSum(q) => match *q {
            PosInf => return Err(range_err("s_q", "q=inf".into())),
            NegInf => (m(Decreasing, false, true), true),
            Finite(q) => (m(dir(q >= 1.0), q >= 0.0, q >= 0.0 && is_int(q)), true),
        },
        Family::QSum(q) => match *q {
            PosInf => (m(Increasing, true, true), true),
            NegInf => (m(Increasing, false, true), true),
            Finite(q) if q == 0.0 => return Err(range_err("n_q", "q=0".into())),
            Finite(q) => (m(dir(!(0.0..=1.0).contains(&q)), q > 0.0, false), true),
        },
        Family::QMean(q) => match *q {
            PosInf => (m(Increasing, true, true), true),
            NegInf => (m(Increasing, false, true), true),
            Finite(q) => (m(Increasing, q >= 1.0, false), q >= 1.0),
        },
        Family::Tsallis(q) => match *q {
            NegInf => return Err(range_err("tsallis", "q=-inf".into())),
            PosInf => (m(Decreasing, true, true), true),
            Finite(q) => (m(Decreasing, q >= 0.0, false), true),
        },
        Family::Renyi(q) | Family::Pq(q) => match *q {
            PosInf => (m(Decreasing, true, false), true),
            NegInf => (m(Decreasing, false, false), true),
            Finite(q) => (m(Decreasing, q >= 0.0, false), true),
        },
        Family::Shannon => (m(Decreasing, true, false), true),
        Family::Dim(b) => {
            let b = *b;
            if !(b > 0.0 && b.is_finite()) {
                return Err(range_err("dim", format!("b={b}")));
            }
            let exact = is_int(b);
            if b >= 2.0 {
                (m(Increasing, true, exact), true)
            } else if b <= 1.0 {
                (m(Decreasing, false, exact), true)
            } else {
                (m(Increasing, false, false), false)
            }
        }
        Family::DimP(b) => {
            let b = *b;
            if !(b > 0.0 && b.is_finite()) {
                return Err(range_err("dimp", format!("b={b}")));
            }
            (m(Increasing, true, is_int(b)), true)
        }
        Family::DoF(b) => {
            let b = *b;
            if !(b > 0.0 && b.is_finite()) || b == 1.0 {
                return Err(range_err("dof", format!("b={b}")));
            }
            (m(Increasing, b >= 2.0, false), !(1.0..2.0).contains(&b))
        }
        Family::DoFP(b) => {
            let b = *b;
            if !(b > 0.0 && b.is_finite()) || b == 1.0 {
                return Err(range_err("dofp", format!("b={b}")));
            }
            (m(Increasing, true, false), b > 1.0)
        }
        Family::Squareability => (m(Increasing, true, true), true),
        Family::Avg => (m(Increasing, true, false), true),
        Family::Composed { g, inner } => {
            g.validate()?;
            let direction = match g.direction() {
                Increasing => inner.direction,
                Decreasing => inner.direction.flip(),
            };
            let exact = inner.exact_integer && g.preserves_integers();
            (m(direction, inner.dominance_monotone, exact), inner.checked)
        }
        Family::Lookup { inner, .. } => (m(Increasing, inner.dominance_monotone, true), inner.checked),
    };
    Ok(out)
}

impl Family {
    /// Family identifier used in text specs.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Height => "height",
            Self::Width => "width",
            Self::Rank => "rank",
            Self::Toughness => "toughness",
            Self::WM(_) => "w_m",
            Self::TM(_) => "t_m",
            Self::PowerSum(_) => "s_q",
            Self::QSum(_) => "n_q",
            Self::QMean(_) => "m_q",
            Self::Tsallis(_) => "tsallis",
            Self::Renyi(_) => "renyi",
            Self::Shannon => "shannon",
            Self::Pq(_) => "p_q",
            Self::Dim(_) => "dim",
            Self::DimP(_) => "dimp",
            Self::DoF(_) => "dof",
            Self::DoFP(_) => "dofp",
            Self::Squareability => "squareability",
            Self::Avg => "avg",
            Self::Composed { .. } => "compose",
            Self::Lookup { .. } => "lookup",
        }
    }
}

impl GenFun {
    /// Builds a generator function, rejecting parameters outside the range
    /// where refinement monotonicity holds.
    pub fn new(family: Family) -> Result<Self> {
        let (meta, in_range) = meta_of(&family)?;
        if !in_range {
            let param = match &family {
                Family::QMean(q) => format!("q={q}"),
                Family::Dim(b) | Family::DoF(b) | Family::DoFP(b) => format!("b={b}"),
                _ => String::new(),
            };
            return Err(range_err(family.name(), param));
        }
        Ok(Self::with_meta(family, meta, true))
    }

    /// Builds a generator function without the monotonicity range guard. Only
    /// meant for reproducing violations; parameters where the function is
    /// undefined are still rejected.
    pub fn unchecked(family: Family) -> Result<Self> {
        let (meta, in_range) = meta_of(&family)?;
        Ok(Self::with_meta(family, meta, in_range))
    }

    fn with_meta(family: Family, meta: Meta, checked: bool) -> Self {
        Self {
            family,
            direction: meta.direction,
            dominance_monotone: meta.dominance_monotone && checked,
            exact_integer: meta.exact_integer,
            checked,
        }
    }

    pub fn height() -> Self {
        Self::new(Family::Height).unwrap()
    }
    pub fn width() -> Self {
        Self::new(Family::Width).unwrap()
    }
    pub fn rank() -> Self {
        Self::new(Family::Rank).unwrap()
    }
    pub fn toughness() -> Self {
        Self::new(Family::Toughness).unwrap()
    }
    pub fn squareability() -> Self {
        Self::new(Family::Squareability).unwrap()
    }
    pub fn shannon() -> Self {
        Self::new(Family::Shannon).unwrap()
    }
    pub fn avg() -> Self {
        Self::new(Family::Avg).unwrap()
    }
    pub fn w_m(m: u32) -> Result<Self> {
        Self::new(Family::WM(m))
    }
    pub fn t_m(m: u32) -> Result<Self> {
        Self::new(Family::TM(m))
    }
    pub fn power_sum(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::PowerSum(q.into()))
    }
    pub fn q_sum(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::QSum(q.into()))
    }
    pub fn q_mean(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::QMean(q.into()))
    }
    pub fn tsallis(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::Tsallis(q.into()))
    }
    pub fn renyi(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::Renyi(q.into()))
    }
    pub fn p_q(q: impl Into<QParam>) -> Result<Self> {
        Self::new(Family::Pq(q.into()))
    }
    pub fn dim(b: f64) -> Result<Self> {
        Self::new(Family::Dim(b))
    }
    pub fn dimp(b: f64) -> Result<Self> {
        Self::new(Family::DimP(b))
    }
    pub fn dof(b: f64) -> Result<Self> {
        Self::new(Family::DoF(b))
    }
    pub fn dofp(b: f64) -> Result<Self> {
        Self::new(Family::DoFP(b))
    }

    /// `g∘f`; the direction flips when `g` is decreasing.
    pub fn compose(g: MonotoneTransform, f: GenFun) -> Result<Self> {
        let checked = f.checked;
        let family = Family::Composed { g, inner: Box::new(f) };
        let (meta, _) = meta_of(&family)?;
        Ok(Self::with_meta(family, meta, checked))
    }

    /// `b∘f` for a table `(f value, b value)`; the result is increasing.
    /// The table must be non-decreasing along the `⊥ → ⊤` direction of `f`.
    pub fn lookup(f: GenFun, mut table: Vec<(f64, f64)>) -> Result<Self> {
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ordered = table.windows(2).all(|w| match f.direction {
            Direction::Increasing => w[0].1 <= w[1].1,
            Direction::Decreasing => w[0].1 >= w[1].1,
        });
        if !ordered {
            return Err(Error::NonMonotone(format!("lookup table over {f}")));
        }
        let checked = f.checked;
        let family = Family::Lookup { table, inner: Box::new(f) };
        let (meta, _) = meta_of(&family)?;
        Ok(Self::with_meta(family, meta, checked))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
    pub fn direction(&self) -> Direction {
        self.direction
    }
    pub fn dominance_monotone(&self) -> bool {
        self.dominance_monotone
    }
    pub fn exact_integer(&self) -> bool {
        self.exact_integer
    }
    /// Whether the parameter lies in the proven monotonicity range.
    pub fn is_checked(&self) -> bool {
        self.checked
    }

    /// Integer value when the family is integral and the result fits in `i128`.
    pub fn evaluate_exact(&self, xi: &Partition) -> Option<i128> {
        if !self.exact_integer {
            return None;
        }
        let parts = xi.parts();
        let h = parts.len() as i128;
        match &self.family {
            Family::Height => Some(h),
            Family::Width => Some(i128::from(xi.width())),
            Family::Rank => Some(i128::from(xi.rank())),
            Family::Toughness => Some(i128::from(xi.toughness())),
            Family::WM(m) => Some(parts.iter().take(*m as usize).map(|&x| i128::from(x)).sum()),
            Family::TM(m) => Some(parts.iter().rev().take(*m as usize).map(|&x| i128::from(x)).sum()),
            Family::Squareability => Some(i128::from(xi.squareability())),
            Family::PowerSum(QParam::NegInf) => Some(parts.iter().filter(|&&x| x == 1).count() as i128),
            Family::PowerSum(QParam::Finite(q)) => int_power_sum(parts, *q as u32),
            Family::QSum(QParam::PosInf) | Family::QMean(QParam::PosInf) => Some(i128::from(xi.width())),
            Family::QSum(QParam::NegInf) | Family::QMean(QParam::NegInf) => {
                Some(i128::from(xi.toughness()))
            }
            Family::Tsallis(QParam::PosInf) => Some(0),
            Family::Dim(b) => base_power_sum(parts, *b),
            Family::DimP(b) => base_power_sum(parts, *b).and_then(|d| d.checked_sub(h - 1)),
            Family::Composed { g, inner } => {
                let u = inner.evaluate_exact(xi)?;
                let v = g.apply(u as f64);
                (v.is_finite() && v.abs() < 2f64.powi(53)).then_some(v as i128)
            }
            Family::Lookup { table, inner } => {
                let v = lookup(table, inner.evaluate(xi));
                (v.is_finite() && v.fract() == 0.0).then_some(v as i128)
            }
            _ => None,
        }
    }

    /// Value of `f` at `xi`.
    pub fn evaluate(&self, xi: &Partition) -> f64 {
        if let Some(v) = self.evaluate_exact(xi) {
            return v as f64;
        }
        let parts = xi.parts();
        let n = f64::from(xi.n());
        let h = parts.len() as f64;
        let max = f64::from(xi.width());
        let min = f64::from(xi.toughness());
        match &self.family {
            Family::PowerSum(QParam::Finite(q)) => log_power_sum(parts, *q).exp(),
            Family::QSum(q) => match *q {
                QParam::Finite(q) => (log_power_sum(parts, q) / q).exp(),
                QParam::PosInf => max,
                QParam::NegInf => min,
            },
            Family::QMean(q) => match *q {
                QParam::Finite(q) if q == 0.0 => {
                    (parts.iter().map(|&x| f64::from(x).ln()).sum::<f64>() / h).exp()
                }
                QParam::Finite(q) => ((log_power_sum(parts, q) - h.ln()) / q).exp(),
                QParam::PosInf => max,
                QParam::NegInf => min,
            },
            Family::Tsallis(q) => match *q {
                QParam::Finite(q) if q == 1.0 => shannon(parts, n),
                QParam::Finite(q) => {
                    let lps = log_power_sum(parts, q) - q * n.ln();
                    lps.exp_m1() / (1.0 - q)
                }
                _ => 0.0,
            },
            Family::Renyi(q) => renyi(parts, n, *q),
            Family::Pq(q) => renyi(parts, n, *q).exp(),
            Family::Shannon => shannon(parts, n),
            Family::Dim(b) => dim(parts, *b),
            Family::DimP(b) => dim(parts, *b) - h + 1.0,
            Family::DoF(b) => dim(parts, *b).ln() / b.ln(),
            Family::DoFP(b) => (dim(parts, *b) - h + 1.0).ln() / b.ln(),
            Family::Avg => xi.squareability() as f64 / n,
            Family::Composed { g, inner } => g.apply(inner.evaluate(xi)),
            Family::Lookup { table, inner } => lookup(table, inner.evaluate(xi)),
            // Integer families whose exact value overflowed.
            Family::PowerSum(QParam::NegInf) => parts.iter().filter(|&&x| x == 1).count() as f64,
            Family::Height
            | Family::Width
            | Family::Rank
            | Family::Toughness
            | Family::WM(_)
            | Family::TM(_)
            | Family::Squareability
            | Family::PowerSum(QParam::PosInf) => unreachable!("integer family without exact value"),
        }
    }

    /// The extremal values `f(⊥)` and `f(⊤)`.
    pub fn bottom_value(&self, n: u32) -> f64 {
        self.evaluate(&Partition::bottom(n))
    }
    pub fn top_value(&self, n: u32) -> f64 {
        self.evaluate(&Partition::top(n))
    }

    /// Text spec accepted by [`FromStr`].
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

fn int_power_sum(parts: &[u32], q: u32) -> Option<i128> {
    parts
        .iter()
        .try_fold(0i128, |acc, &x| acc.checked_add(i128::from(x).checked_pow(q)?))
}

fn base_power_sum(parts: &[u32], b: f64) -> Option<i128> {
    if b.fract() != 0.0 || b > 1e12 {
        return None;
    }
    let b = b as i128;
    parts.iter().try_fold(0i128, |acc, &x| acc.checked_add(b.checked_pow(x)?))
}

/// `ln Σ x^q`, evaluated with the largest (q > 0) or smallest (q < 0) part
/// factored out so that large `|q|` neither overflows nor underflows.
pub(crate) fn log_power_sum(parts: &[u32], q: f64) -> f64 {
    if q == 0.0 {
        return (parts.len() as f64).ln();
    }
    let pivot = if q > 0.0 {
        f64::from(parts[0])
    } else {
        f64::from(*parts.last().unwrap())
    };
    let rest: f64 = parts.iter().map(|&x| (f64::from(x) / pivot).powf(q)).sum();
    q * pivot.ln() + rest.ln()
}

fn shannon(parts: &[u32], n: f64) -> f64 {
    let s: f64 = parts.iter().map(|&x| f64::from(x) * f64::from(x).ln()).sum();
    n.ln() - s / n
}

fn renyi(parts: &[u32], n: f64, q: QParam) -> f64 {
    match q {
        QParam::Finite(q) if q == 1.0 => shannon(parts, n),
        QParam::Finite(q) => (log_power_sum(parts, q) - q * n.ln()) / (1.0 - q),
        QParam::PosInf => n.ln() - f64::from(parts[0]).ln(),
        QParam::NegInf => n.ln() - f64::from(*parts.last().unwrap()).ln(),
    }
}

fn lookup(table: &[(f64, f64)], u: f64) -> f64 {
    table
        .iter()
        .find(|(k, _)| same_level(*k, u))
        .map_or(f64::NAN, |&(_, b)| b)
}

fn dim(parts: &[u32], b: f64) -> f64 {
    parts.iter().map(|&x| b.powf(f64::from(x))).sum()
}

impl fmt::Display for GenFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.family.name();
        match &self.family {
            Family::WM(m) | Family::TM(m) => write!(f, "{name}:m={m}"),
            Family::PowerSum(q)
            | Family::QSum(q)
            | Family::QMean(q)
            | Family::Tsallis(q)
            | Family::Renyi(q)
            | Family::Pq(q) => write!(f, "{name}:q={q}"),
            Family::Dim(b) | Family::DimP(b) | Family::DoF(b) | Family::DoFP(b) => {
                write!(f, "{name}:b={b}")
            }
            Family::Composed { g, inner } => write!(f, "compose:{g}:{inner}"),
            Family::Lookup { inner, .. } => write!(f, "lookup:{inner}"),
            _ => write!(f, "{name}"),
        }
    }
}

impl Serialize for GenFun {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for GenFun {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_genfun(s, true)
    }
}

/// Parses a text spec such as `width`, `s_q:q=2`, `renyi:q=inf`, `dim:b=2`,
/// `w_m:m=2` or `compose:neglog2:s_q:q=2`. With `checked == false` the
/// monotonicity range guard is skipped.
pub fn parse_genfun(spec: &str, checked: bool) -> Result<GenFun> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("compose:") {
        let (g, inner) = split_transform(rest)?;
        let g: MonotoneTransform = g.parse()?;
        return GenFun::compose(g, parse_genfun(inner, checked)?);
    }
    let (name, param) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let kv = |key: &str| -> Result<&str> {
        let p = param.ok_or_else(|| Error::Parse(format!("{name} needs a {key}= parameter")))?;
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected {key}=<value>, got {p:?}")))?;
        if k.trim() != key {
            return Err(Error::Parse(format!("expected {key}=<value>, got {p:?}")));
        }
        Ok(v.trim())
    };
    let q = || -> Result<QParam> { kv("q")?.parse() };
    let b = || -> Result<f64> {
        let v = kv("b")?;
        v.parse().map_err(|_| Error::Parse(format!("bad b value {v:?}")))
    };
    let m = || -> Result<u32> {
        let v = kv("m")?;
        v.parse().map_err(|_| Error::Parse(format!("bad m value {v:?}")))
    };
    let no_param = |fam: Family| -> Result<Family> {
        match param {
            None => Ok(fam),
            Some(p) => Err(Error::Parse(format!("{name} takes no parameter, got {p:?}"))),
        }
    };
    let family = match name.to_ascii_lowercase().as_str() {
        "height" | "h" => no_param(Family::Height)?,
        "width" | "w" => no_param(Family::Width)?,
        "rank" | "r" => no_param(Family::Rank)?,
        "toughness" | "t" => no_param(Family::Toughness)?,
        "squareability" | "s2" => no_param(Family::Squareability)?,
        "shannon" => no_param(Family::Shannon)?,
        "avg" => no_param(Family::Avg)?,
        "w_m" => Family::WM(m()?),
        "t_m" => Family::TM(m()?),
        "s_q" | "power_sum" => Family::PowerSum(q()?),
        "n_q" | "q_sum" => Family::QSum(q()?),
        "m_q" | "q_mean" => Family::QMean(q()?),
        "tsallis" | "t_q" => Family::Tsallis(q()?),
        "renyi" | "r_q" => Family::Renyi(q()?),
        "p_q" => Family::Pq(q()?),
        "dim" => Family::Dim(b()?),
        "dimp" => Family::DimP(b()?),
        "dof" => Family::DoF(b()?),
        "dofp" => Family::DoFP(b()?),
        other => return Err(Error::Parse(format!("unknown generator function {other:?}"))),
    };
    if checked {
        GenFun::new(family)
    } else {
        GenFun::unchecked(family)
    }
}

// Splits `g:rest` where `g` may contain parentheses with commas.
fn split_transform(s: &str) -> Result<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ':' if depth == 0 => return Ok((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Parse(format!("compose needs <transform>:<generator>, got {s:?}")))
}

// ==== levels ===============================================================

/// Tolerance for treating two real levels as equal: relative `1e-9` with an
/// absolute floor of `1e-9` near zero.
pub fn level_tolerance(a: f64, b: f64) -> f64 {
    1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= level_tolerance(a, b)
}

/// Distinct values of `f` on `P_I(n)`, ascending.
pub fn value_range(f: &GenFun, n: u32) -> Result<Vec<f64>> {
    let all = enumerate_partitions(n)?;
    Ok(values_of(f, &all))
}

pub(crate) fn values_of(f: &GenFun, all: &[Partition]) -> Vec<f64> {
    let exact: Option<BTreeSet<i128>> = all.iter().map(|p| f.evaluate_exact(p)).collect();
    if let Some(set) = exact {
        return set.into_iter().map(|v| v as f64).collect();
    }
    let mut vals: Vec<f64> = all.iter().map(|p| f.evaluate(p)).collect();
    vals.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(vals.len());
    for v in vals {
        match out.last() {
            Some(&last) if same_level(last, v) => {}
            _ => out.push(v),
        }
    }
    out
}

/// Returns the attained level matching `k`.
pub fn attained_level(f: &GenFun, n: u32, k: f64) -> Result<f64> {
    value_range(f, n)?
        .into_iter()
        .find(|&v| same_level(v, k))
        .ok_or(Error::Level(k))
}

/// `k₋` for increasing `f`, `k₊` for decreasing `f`: the attained level next
/// to `k` on the side of `⊥`.
pub fn neighbor_level(f: &GenFun, n: u32, k: f64) -> Result<f64> {
    let range = value_range(f, n)?;
    let i = range.iter().position(|&v| same_level(v, k)).ok_or(Error::Level(k))?;
    match f.direction() {
        Direction::Increasing if i > 0 => Ok(range[i - 1]),
        Direction::Decreasing if i + 1 < range.len() => Ok(range[i + 1]),
        _ => Err(Error::NoNeighbor(k)),
    }
}

/// Level classes `{ξ : f(ξ) = k}` for every attained `k`, ascending in `k`.
pub fn level_classes(f: &GenFun, n: u32) -> Result<Vec<(f64, Vec<Partition>)>> {
    let all = enumerate_partitions(n)?;
    let levels = values_of(f, &all);
    let mut classes: Vec<(f64, Vec<Partition>)> = levels.iter().map(|&k| (k, Vec::new())).collect();
    for p in all {
        let v = f.evaluate(&p);
        let i = classes
            .iter()
            .position(|(k, _)| same_level(*k, v))
            .expect("value present in its own range");
        classes[i].1.push(p);
    }
    Ok(classes)
}

// ==== down-sets ============================================================

/// A nonempty set of partitions of `n` closed downward under refinement,
/// kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownSet {
    n: u32,
    members: Vec<Partition>,
}

impl DownSet {
    /// Validates closure: every refinement lower cover of a member is a member.
    pub fn new(members: Vec<Partition>) -> Result<Self> {
        let set: BTreeSet<Partition> = members.into_iter().collect();
        let n = set
            .iter()
            .next()
            .ok_or_else(|| Error::Argument("empty down-set".into()))?
            .n();
        for p in &set {
            if p.n() != n {
                return Err(Error::SizeMismatch(n, p.n()));
            }
            if let Some(missing) = p.refinement_lower_covers().into_iter().find(|q| !set.contains(q)) {
                return Err(Error::Argument(format!(
                    "not a down-set: {p} is present but {missing} is not"
                )));
            }
        }
        Ok(Self {
            n,
            members: crate::partition::sort_canonical(set.into_iter().collect()),
        })
    }

    /// `{υ : υ ⪯ ξ}`
    pub fn principal(xi: &Partition) -> Self {
        Self::down_closure(std::slice::from_ref(xi)).expect("single generator")
    }

    /// Smallest down-set containing all `generators`.
    pub fn down_closure(generators: &[Partition]) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Argument("empty generator list".into()))?;
        let n = first.n();
        let mut seen: BTreeSet<Partition> = BTreeSet::new();
        let mut stack: Vec<Partition> = Vec::new();
        for g in generators {
            if g.n() != n {
                return Err(Error::SizeMismatch(n, g.n()));
            }
            if seen.insert(g.clone()) {
                stack.push(g.clone());
            }
        }
        while let Some(p) = stack.pop() {
            for q in p.refinement_lower_covers() {
                if seen.insert(q.clone()) {
                    stack.push(q);
                }
            }
        }
        Ok(Self {
            n,
            members: crate::partition::sort_canonical(seen.into_iter().collect()),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn members(&self) -> &[Partition] {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn contains(&self, xi: &Partition) -> bool {
        self.members.binary_search_by(|p| xi.parts().cmp(p.parts())).is_ok()
    }
    pub fn is_subset(&self, other: &DownSet) -> bool {
        self.members.iter().all(|p| other.contains(p))
    }

    /// Maximal members (the antichain generating the down-set).
    pub fn maximal(&self) -> Vec<Partition> {
        self.members
            .iter()
            .filter(|p| {
                !self
                    .members
                    .iter()
                    .any(|q| q != *p && refines(p, q).unwrap_or(false))
            })
            .cloned()
            .collect()
    }
}

/// `f` extended to down-sets: the maximum over members for increasing `f`,
/// the minimum for decreasing `f`.
pub fn extend_to_downset(f: &GenFun, set: &DownSet) -> Result<f64> {
    let vals = set.members().iter().map(|p| f.evaluate(p));
    let out = match f.direction() {
        Direction::Increasing => vals.fold(f64::NEG_INFINITY, f64::max),
        Direction::Decreasing => vals.fold(f64::INFINITY, f64::min),
    };
    if out.is_infinite() {
        return Err(Error::Argument("empty down-set".into()));
    }
    Ok(out)
}

/// `{ξ : f(ξ) ≤ k}` for increasing `f`, `{ξ : f(ξ) ≥ k}` for decreasing `f`.
pub fn sublevel_downset(f: &GenFun, k: f64, n: u32) -> Result<DownSet> {
    let all = enumerate_partitions(n)?;
    let k = values_of(f, &all)
        .into_iter()
        .find(|&v| same_level(v, k))
        .ok_or(Error::Level(k))?;
    let members: Vec<Partition> = all
        .into_iter()
        .filter(|p| {
            let v = f.evaluate(p);
            same_level(v, k) || f.direction().respects(v, k)
        })
        .collect();
    Ok(DownSet { n, members })
}

// ==== monotonicity checks ==================================================

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub lower: Partition,
    pub upper: Partition,
    pub f_lower: f64,
    pub f_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub f: GenFun,
    pub n: u32,
    pub ok: bool,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

fn check_pairs(f: &GenFun, n: u32, pairs: Vec<(Partition, Partition)>) -> MonotonicityReport {
    let mut violations = Vec::new();
    let pairs_checked = pairs.len();
    for (lower, upper) in pairs {
        let (a, b) = (f.evaluate(&lower), f.evaluate(&upper));
        if !f.direction().respects(a, b) || a.is_nan() || b.is_nan() {
            violations.push(Violation { lower, upper, f_lower: a, f_upper: b });
        }
    }
    MonotonicityReport {
        f: f.clone(),
        n,
        ok: violations.is_empty(),
        pairs_checked,
        violations,
    }
}

/// Checks `f` on every refinement covering pair of `P_I(n)`.
pub fn verify_refinement_monotone(f: &GenFun, n: u32) -> Result<MonotonicityReport> {
    Ok(check_pairs(f, n, crate::partition::refinement_covers(n)?))
}

/// Checks `f` on every dominance covering pair of `P_I(n)`.
pub fn verify_dominance_monotone(f: &GenFun, n: u32) -> Result<MonotonicityReport> {
    Ok(check_pairs(f, n, crate::partition::dominance_cover_pairs(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn squareability_values() {
        let s2 = GenFun::squareability();
        assert_eq!(s2.evaluate(&p(&[2, 2, 2])), 12.0);
        assert_eq!(s2.evaluate(&p(&[3, 1, 1, 1])), 12.0);
        assert_eq!(s2.evaluate(&p(&[4, 3, 2, 1])), 30.0);
        assert_eq!(s2.evaluate(&p(&[5, 1, 1, 1, 1, 1])), 30.0);
        let sq = GenFun::power_sum(2.0).unwrap();
        assert_eq!(sq.evaluate_exact(&p(&[4, 3, 2, 1])), Some(30));
    }

    #[test]
    fn extremes() {
        let n = 7;
        for q in [-2.0, 0.5, 2.0, 3.0] {
            let f = GenFun::power_sum(q).unwrap();
            assert!((f.bottom_value(n) - 7.0).abs() < 1e-12);
            assert!((f.top_value(n) - 7f64.powf(q)).abs() < 1e-9 * 7f64.powf(q));
            let r = GenFun::renyi(q).unwrap();
            assert!((r.bottom_value(n) - 7f64.ln()).abs() < 1e-12);
            assert!(r.top_value(n).abs() < 1e-12);
        }
        let d = GenFun::dim(2.0).unwrap();
        assert_eq!(d.bottom_value(n), 14.0);
        assert_eq!(d.top_value(n), 128.0);
    }

    #[test]
    fn toughness_values() {
        let t = GenFun::toughness();
        assert_eq!(t.evaluate(&p(&[2, 1, 1])), 1.0);
        assert_eq!(t.evaluate(&p(&[2, 2])), 2.0);
        assert_eq!(t.evaluate(&p(&[3, 1])), 1.0);
        assert_eq!(value_range(&t, 8).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 8.0]);
    }

    #[test]
    fn ranges() {
        assert_eq!(value_range(&GenFun::width(), 5).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let r = value_range(&GenFun::rank(), 5).unwrap();
        assert_eq!(r.len(), 7);
        assert!(r.contains(&4.0) && r.contains(&-4.0));
        assert!(!r.contains(&3.0) && !r.contains(&-3.0));
    }

    #[test]
    fn range_guards() {
        assert!(matches!(GenFun::q_mean(0.5), Err(Error::Range { .. })));
        assert!(GenFun::unchecked(Family::QMean(QParam::Finite(0.5))).is_ok());
        assert!(matches!(GenFun::q_sum(0.0), Err(Error::Range { .. })));
        assert!(GenFun::unchecked(Family::QSum(QParam::Finite(0.0))).is_err());
        assert!(matches!(GenFun::dim(1.5), Err(Error::Range { .. })));
        assert!(matches!(GenFun::dofp(0.5), Err(Error::Range { .. })));
        assert!(matches!(GenFun::power_sum(QParam::PosInf), Err(Error::Range { .. })));
        assert!(matches!(GenFun::tsallis(QParam::NegInf), Err(Error::Range { .. })));
        assert!(matches!(GenFun::w_m(0), Err(Error::Range { .. })));
    }

    #[test]
    fn metadata_flags() {
        assert!(GenFun::power_sum(0.0).unwrap().dominance_monotone());
        assert!(!GenFun::power_sum(-1.0).unwrap().dominance_monotone());
        assert!(!GenFun::toughness().dominance_monotone());
        assert_eq!(GenFun::power_sum(0.5).unwrap().direction(), Direction::Decreasing);
        assert_eq!(GenFun::q_sum(-1.0).unwrap().direction(), Direction::Increasing);
        assert_eq!(GenFun::q_sum(0.5).unwrap().direction(), Direction::Decreasing);
        assert_eq!(GenFun::dim(0.5).unwrap().direction(), Direction::Decreasing);
        assert!(GenFun::dim(3.0).unwrap().exact_integer());
    }

    #[test]
    fn parse_specs() {
        for s in ["width", "s_q:q=2", "renyi:q=2", "dim:b=2", "w_m:m=2", "compose:neglog2:s_q:q=2", "renyi:q=inf"] {
            let f: GenFun = s.parse().unwrap();
            assert_eq!(f.spec(), s);
        }
        let f: GenFun = "compose:neglog2:s_q:q=2".parse().unwrap();
        assert_eq!(f.direction(), Direction::Decreasing);
        assert!(matches!("m_q:q=0.5".parse::<GenFun>(), Err(Error::Range { .. })));
        assert!(parse_genfun("m_q:q=0.5", false).is_ok());
        assert!(matches!("foo".parse::<GenFun>(), Err(Error::Parse(_))));
        assert!(matches!("width:q=2".parse::<GenFun>(), Err(Error::Parse(_))));
        assert!(matches!("s_q".parse::<GenFun>(), Err(Error::Parse(_))));
        let g: GenFun = "compose:affine(2,1):width".parse().unwrap();
        assert_eq!(g.evaluate(&p(&[3, 1])), 7.0);
    }

    #[test]
    fn downset_examples() {
        let w = GenFun::width();
        let d = sublevel_downset(&w, 3.0, 4).unwrap();
        assert_eq!(d.members(), &[p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]);
        assert_eq!(sublevel_downset(&w, 6.0, 6).unwrap().len(), 11);
        assert!(matches!(sublevel_downset(&w, 2.5, 4), Err(Error::Level(_))));

        let gens = [p(&[2, 2, 1]), p(&[3, 1, 1])];
        let d = DownSet::down_closure(&gens).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(extend_to_downset(&GenFun::height(), &d).unwrap(), 3.0);
        assert!(DownSet::new(vec![p(&[2, 2])]).is_err());
        assert!(DownSet::new(vec![]).is_err());
        assert_eq!(d.maximal(), gens.to_vec().into_iter().rev().collect::<Vec<_>>());
    }

    #[test]
    fn neighbours() {
        let w = GenFun::width();
        assert_eq!(neighbor_level(&w, 6, 4.0).unwrap(), 3.0);
        assert!(matches!(neighbor_level(&w, 6, 1.0), Err(Error::NoNeighbor(_))));
        assert_eq!(neighbor_level(&GenFun::squareability(), 10, 32.0).unwrap(), 30.0);
        assert_eq!(neighbor_level(&GenFun::rank(), 5, 4.0).unwrap(), 2.0);
        assert_eq!(neighbor_level(&GenFun::height(), 5, 2.0).unwrap(), 3.0);
    }

    #[test]
    fn monotonicity_reports() {
        assert!(verify_refinement_monotone(&GenFun::width(), 8).unwrap().ok);
        let t = verify_dominance_monotone(&GenFun::toughness(), 4).unwrap();
        assert!(!t.ok);
        assert!(t
            .violations
            .iter()
            .any(|v| v.lower == p(&[2, 2]) && v.upper == p(&[3, 1])));
    }

    #[test]
    fn large_q_is_stable() {
        let xi = p(&[7, 1]);
        let n = GenFun::q_sum(1e8).unwrap();
        assert!((n.evaluate(&xi) - 7.0).abs() < 1e-6);
        let m = GenFun::q_mean(-1e8);
        assert!(m.is_err());
        let r = GenFun::renyi(-1e8).unwrap();
        assert!((r.evaluate(&xi) - 8f64.ln()).abs() < 1e-6);
        assert!(GenFun::tsallis(1e8).unwrap().evaluate(&xi).abs() < 1e-6);
    }
}
