//! Exhaustive verification suites over small `n`.
//!
//! Each suite runs a list of named checks and reports them individually, so
//! a failure names the property and the first counterexample.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{bound_by_moves, bound_curve, dominance_strictness_violations, usefulness_of, ClosedForm};
use crate::classify::{
    depth_relation_report, ensemble_avg_depth, ensemble_depth, ensemble_depth_relation_report, Ensemble,
};
use crate::error::{Error, Result};
use crate::genfun::{verify_dominance_monotone, verify_refinement_monotone, Family, GenFun, QParam};
use crate::partition::{
    dominance_covers, dominated_by, enumerate_partitions, refinement_covers, refines, Partition,
};
use crate::qstate::{
    ghz_product_state, qfi, qfi_pure, random_block_product_state, random_decomposition, variance,
    CollectiveOp, DensityMatrix, QuantumState, StateVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Orders,
    Monotonicity,
    Limits,
    Bounds,
    Qfi,
    Depth,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        Self::Orders,
        Self::Monotonicity,
        Self::Limits,
        Self::Bounds,
        Self::Qfi,
        Self::Depth,
    ];

    /// `n_max` used when none is given.
    pub fn default_n_max(self) -> u32 {
        match self {
            Self::Orders => 10,
            Self::Monotonicity => 10,
            Self::Limits => 8,
            Self::Bounds => 24,
            Self::Qfi => 10,
            Self::Depth => 12,
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orders" => Ok(Self::Orders),
            "monotonicity" => Ok(Self::Monotonicity),
            "limits" => Ok(Self::Limits),
            "bounds" => Ok(Self::Bounds),
            "qfi" => Ok(Self::Qfi),
            "depth" => Ok(Self::Depth),
            other => Err(Error::Argument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub n_max: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyConfig {
    pub n_max: Option<u32>,
    pub seed: u64,
    /// Additional generator functions for the monotonicity suite, possibly
    /// built without the range guard.
    pub extra: Vec<GenFun>,
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records the first failure of `cases`, or a pass with the case count.
    fn all<T>(&mut self, name: impl Into<String>, cases: impl IntoIterator<Item = T>, mut ok: impl FnMut(&T) -> Option<String>) {
        let mut count = 0usize;
        for c in cases {
            count += 1;
            if let Some(why) = ok(&c) {
                self.add(name, false, why);
                return;
            }
        }
        self.add(name, true, format!("{count} cases"));
    }

    /// Like [`Checks::all`], with errors counted as failures.
    fn all_try<T>(&mut self, name: impl Into<String>, cases: impl IntoIterator<Item = T>, mut ok: impl FnMut(&T) -> Result<Option<String>>) {
        self.all(name, cases, |c| ok(c).unwrap_or_else(|e| Some(format!("error: {e}"))));
    }
}

pub fn run_suite(suite: SuiteName, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let n_max = cfg.n_max.unwrap_or(suite.default_n_max());
    if n_max == 0 {
        return Err(Error::Argument("n_max must be positive".into()));
    }
    let mut c = Checks(Vec::new());
    match suite {
        SuiteName::Orders => orders(&mut c, n_max)?,
        SuiteName::Monotonicity => monotonicity(&mut c, n_max, &cfg.extra)?,
        SuiteName::Limits => limits(&mut c, n_max)?,
        SuiteName::Bounds => bounds(&mut c, n_max)?,
        SuiteName::Qfi => qfi_suite(&mut c, n_max, cfg.seed)?,
        SuiteName::Depth => depth(&mut c, n_max, cfg.seed)?,
    }
    let passed = c.0.iter().all(|r| r.passed);
    Ok(SuiteReport {
        suite,
        n_max,
        seed: cfg.seed,
        passed,
        checks: c.0,
    })
}

// ==== orders ===============================================================

fn orders(c: &mut Checks, n_max: u32) -> Result<()> {
    let p = |v: &[u32]| Partition::new(v.to_vec()).expect("valid");
    let (a, b) = (p(&[2, 2]), p(&[3, 1]));
    c.add(
        "{2,2} and {3,1}: dominance-comparable, refinement-incomparable",
        dominated_by(&a, &b)? && !refines(&a, &b)? && !refines(&b, &a)?,
        "",
    );
    for n in 1..=n_max {
        let all = enumerate_partitions(n)?;
        let pairs: Vec<(&Partition, &Partition)> =
            all.iter().flat_map(|u| all.iter().map(move |x| (u, x))).collect();
        let mut rel = Vec::with_capacity(pairs.len());
        for (u, x) in &pairs {
            rel.push((refines(u, x)?, dominated_by(u, x)?));
        }
        let idx = |i: usize, j: usize| i * all.len() + j;

        c.all(format!("n={n}: refinement implies dominance"), 0..pairs.len(), |&k| {
            (rel[k].0 && !rel[k].1).then(|| format!("{} ⪯ {} but not dominated", pairs[k].0, pairs[k].1))
        });
        c.all(format!("n={n}: antisymmetry"), 0..pairs.len(), |&k| {
            let (i, j) = (k / all.len(), k % all.len());
            let back = rel[idx(j, i)];
            ((rel[k].0 && back.0 || rel[k].1 && back.1) && i != j)
                .then(|| format!("{} and {}", all[i], all[j]))
        });
        if n <= 7 {
            let len = all.len();
            c.all(format!("n={n}: transitivity"), 0..len * len * len, |&t| {
                let (i, j, k) = (t / (len * len), (t / len) % len, t % len);
                let r = |a, b| rel[idx(a, b)];
                let bad_ref = r(i, j).0 && r(j, k).0 && !r(i, k).0;
                let bad_dom = r(i, j).1 && r(j, k).1 && !r(i, k).1;
                (bad_ref || bad_dom).then(|| format!("{} {} {}", all[i], all[j], all[k]))
            });
        }
        c.all(format!("n={n}: conjugation reverses dominance"), 0..pairs.len(), |&k| {
            let (u, x) = pairs[k];
            let flipped = dominated_by(&x.conjugate(), &u.conjugate()).unwrap_or(false);
            (rel[k].1 != flipped).then(|| format!("{u} vs {x}"))
        });
        // Covers: a pair is a cover iff related, distinct and nothing lies
        // strictly between.
        let covers_of = |which: fn(&(bool, bool)) -> bool| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for i in 0..all.len() {
                for j in 0..all.len() {
                    if i == j || !which(&rel[idx(i, j)]) {
                        continue;
                    }
                    let between = (0..all.len())
                        .any(|m| m != i && m != j && which(&rel[idx(i, m)]) && which(&rel[idx(m, j)]));
                    if !between {
                        out.push((i, j));
                    }
                }
            }
            out
        };
        let index = |q: &Partition| all.iter().position(|x| x == q).expect("enumerated");
        let mut ref_covers: Vec<(usize, usize)> = refinement_covers(n)?
            .iter()
            .map(|(u, x)| (index(u), index(x)))
            .collect();
        ref_covers.sort_unstable();
        let mut dom_covers: Vec<(usize, usize)> = all
            .iter()
            .enumerate()
            .flat_map(|(i, u)| dominance_covers(u).into_iter().map(move |x| (i, x)))
            .map(|(i, x)| (i, index(&x)))
            .collect();
        dom_covers.sort_unstable();
        c.add(
            format!("n={n}: refinement covers match brute force"),
            ref_covers == covers_of(|r| r.0),
            format!("{} edges", ref_covers.len()),
        );
        c.add(
            format!("n={n}: dominance covers match brute force"),
            dom_covers == covers_of(|r| r.1),
            format!("{} edges", dom_covers.len()),
        );
        // Closure of the cover relation reproduces the order.
        let graph = crate::hasse::HasseGraph::build(n, crate::hasse::OrderKind::Dominance)?;
        let reach = graph.reachability();
        c.all(format!("n={n}: dominance closure of covers"), 0..pairs.len(), |&k| {
            let (i, j) = (k / all.len(), k % all.len());
            (reach[i][j] != rel[k].1).then(|| format!("{} vs {}", all[i], all[j]))
        });
        let rgraph = crate::hasse::HasseGraph::build(n, crate::hasse::OrderKind::Refinement)?;
        let rreach = rgraph.reachability();
        c.all(format!("n={n}: refinement closure of covers"), 0..pairs.len(), |&k| {
            let (i, j) = (k / all.len(), k % all.len());
            (rreach[i][j] != rel[k].0).then(|| format!("{} vs {}", all[i], all[j]))
        });
    }
    Ok(())
}

// ==== monotonicity =========================================================

fn grid(values: &[f64]) -> impl Iterator<Item = QParam> + '_ {
    values.iter().map(|&q| QParam::Finite(q))
}

/// Every family with a parameter grid of at least eight points on each
/// branch of its monotonicity range.
pub fn monotone_catalog() -> Vec<GenFun> {
    let mut out = vec![
        GenFun::height(),
        GenFun::width(),
        GenFun::rank(),
        GenFun::toughness(),
        GenFun::squareability(),
        GenFun::avg(),
        GenFun::shannon(),
    ];
    for m in 1..=8 {
        out.push(GenFun::w_m(m).expect("m ≥ 1"));
        out.push(GenFun::t_m(m).expect("m ≥ 1"));
    }
    let q_ge1 = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0];
    let q_le1 = [-5.0, -2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0];
    let q_neg = [-5.0, -3.0, -2.0, -1.5, -1.0, -0.5, -0.25, -0.1];
    let q_01 = [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0];
    let q_all = [-5.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0];
    let infs = [QParam::PosInf, QParam::NegInf];
    let push = |out: &mut Vec<GenFun>, f: Result<GenFun>| out.push(f.expect("in range"));
    for q in grid(&q_ge1).chain(grid(&q_le1)).chain([QParam::NegInf]) {
        push(&mut out, GenFun::power_sum(q));
    }
    for q in grid(&q_neg).chain(grid(&q_01)).chain(grid(&q_ge1)).chain(infs) {
        push(&mut out, GenFun::q_sum(q));
    }
    for q in grid(&q_ge1).chain(infs) {
        push(&mut out, GenFun::q_mean(q));
    }
    for q in grid(&q_all).chain([QParam::PosInf]) {
        push(&mut out, GenFun::tsallis(q));
    }
    for q in grid(&q_all).chain(infs) {
        push(&mut out, GenFun::renyi(q));
        push(&mut out, GenFun::p_q(q));
    }
    for b in [2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0] {
        push(&mut out, GenFun::dim(b));
        push(&mut out, GenFun::dof(b));
    }
    for b in [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0] {
        push(&mut out, GenFun::dim(b));
    }
    for b in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9] {
        push(&mut out, GenFun::dof(b));
    }
    for b in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0] {
        push(&mut out, GenFun::dimp(b));
    }
    for b in [1.1, 1.25, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0] {
        push(&mut out, GenFun::dofp(b));
    }
    out
}

/// The members of [`monotone_catalog`] flagged as dominance-monotone.
pub fn dominance_catalog() -> Vec<GenFun> {
    monotone_catalog()
        .into_iter()
        .filter(GenFun::dominance_monotone)
        .collect()
}

fn monotonicity(c: &mut Checks, n_max: u32, extra: &[GenFun]) -> Result<()> {
    for f in monotone_catalog() {
        let mut first = None;
        for n in 1..=n_max {
            let r = verify_refinement_monotone(&f, n)?;
            if let Some(v) = r.violations.first() {
                first = Some(format!("n={n}: {} -> {}: {} vs {}", v.lower, v.upper, v.f_lower, v.f_upper));
                break;
            }
        }
        c.add(format!("refinement-monotone {f}"), first.is_none(), first.unwrap_or_default());
    }
    for f in dominance_catalog() {
        let mut first = None;
        for n in 1..=n_max {
            let r = verify_dominance_monotone(&f, n)?;
            if let Some(v) = r.violations.first() {
                first = Some(format!("n={n}: {} -> {}: {} vs {}", v.lower, v.upper, v.f_lower, v.f_upper));
                break;
            }
        }
        c.add(format!("dominance-monotone {f}"), first.is_none(), first.unwrap_or_default());
    }
    if n_max >= 4 {
        let t = verify_dominance_monotone(&GenFun::toughness(), 4)?;
        let p = |v: &[u32]| Partition::new(v.to_vec()).expect("valid");
        let witnessed = t.violations.iter().any(|v| v.lower == p(&[2, 2]) && v.upper == p(&[3, 1]));
        c.add(
            "toughness is not dominance-monotone ({2,1,1} <= {2,2} <= {3,1})",
            witnessed,
            "",
        );
    }
    for f in extra {
        for (label, check) in [
            ("refinement", verify_refinement_monotone as fn(&GenFun, u32) -> Result<_>),
            ("dominance", verify_dominance_monotone),
        ] {
            if label == "dominance" && !f.dominance_monotone() && !f.is_checked() {
                continue;
            }
            let mut first = None;
            for n in 1..=n_max {
                let r = check(f, n)?;
                if let Some(v) = r.violations.first() {
                    first = Some(format!("n={n}: {} -> {}: {} vs {}", v.lower, v.upper, v.f_lower, v.f_upper));
                    break;
                }
            }
            c.add(format!("{label}-monotone {f} (requested)"), first.is_none(), first.unwrap_or_default());
        }
    }
    Ok(())
}

// ==== q-limits and q-monotonicity ==========================================

/// Large `|q|` at which the infinite limits are checked to `1e-6`. Convergence
/// is only `O(ln h / q)` for the norm-like families.
pub const LIMIT_Q: f64 = 1e8;

/// A function of `q` with its closed-form `q → ±∞` limit.
pub struct LimitCase {
    pub name: &'static str,
    pub sign: f64,
    pub at: fn(f64) -> GenFun,
    pub limit: fn(&Partition) -> f64,
}

fn unchecked(f: Family) -> GenFun {
    GenFun::unchecked(f).expect("defined")
}

pub fn limit_cases() -> Vec<LimitCase> {
    vec![
        LimitCase { name: "N_q -> max", sign: 1.0, at: |q| unchecked(Family::QSum(QParam::Finite(q))), limit: |x| f64::from(x.width()) },
        LimitCase { name: "N_q -> min", sign: -1.0, at: |q| unchecked(Family::QSum(QParam::Finite(q))), limit: |x| f64::from(x.toughness()) },
        LimitCase { name: "M_q -> max", sign: 1.0, at: |q| unchecked(Family::QMean(QParam::Finite(q))), limit: |x| f64::from(x.width()) },
        LimitCase { name: "M_q -> min", sign: -1.0, at: |q| unchecked(Family::QMean(QParam::Finite(q))), limit: |x| f64::from(x.toughness()) },
        LimitCase { name: "R_q -> ln n - ln max", sign: 1.0, at: |q| unchecked(Family::Renyi(QParam::Finite(q))), limit: |x| f64::from(x.n()).ln() - f64::from(x.width()).ln() },
        LimitCase { name: "R_q -> ln n - ln min", sign: -1.0, at: |q| unchecked(Family::Renyi(QParam::Finite(q))), limit: |x| f64::from(x.n()).ln() - f64::from(x.toughness()).ln() },
        LimitCase { name: "P_q -> n/max", sign: 1.0, at: |q| unchecked(Family::Pq(QParam::Finite(q))), limit: |x| f64::from(x.n()) / f64::from(x.width()) },
        LimitCase { name: "P_q -> n/min", sign: -1.0, at: |q| unchecked(Family::Pq(QParam::Finite(q))), limit: |x| f64::from(x.n()) / f64::from(x.toughness()) },
        LimitCase { name: "T_q -> 0", sign: 1.0, at: |q| unchecked(Family::Tsallis(QParam::Finite(q))), limit: |_| 0.0 },
        LimitCase { name: "s_q -> number of ones", sign: -1.0, at: |q| unchecked(Family::PowerSum(QParam::Finite(q))), limit: |x| x.parts().iter().filter(|&&p| p == 1).count() as f64 },
    ]
}

/// Largest `|f_q(ξ) − f_lim(ξ)|` over `P_I(n)` at `q = sign·|q|`.
pub fn limit_error(case: &LimitCase, n: u32, q: f64) -> Result<f64> {
    let f = (case.at)(case.sign * q.abs());
    Ok(enumerate_partitions(n)?
        .iter()
        .map(|x| (f.evaluate(x) - (case.limit)(x)).abs())
        .fold(0.0, f64::max))
}

fn limits(c: &mut Checks, n_max: u32) -> Result<()> {
    let n = n_max;
    for case in limit_cases() {
        let err = limit_error(&case, n, LIMIT_Q)?;
        c.add(
            format!("{} at |q| = {LIMIT_Q:e}, n={n}", case.name),
            err < 1e-6,
            format!("max error {err:e}"),
        );
        let ladder = [50.0, 500.0, 5e3, 5e4, 5e5, LIMIT_Q];
        let errs: Vec<f64> = ladder
            .iter()
            .map(|&q| limit_error(&case, n, q))
            .collect::<Result<_>>()?;
        let shrinking = errs.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        c.add(
            format!("{} error shrinks with |q|", case.name),
            shrinking,
            format!("{errs:?}"),
        );
    }

    // Finite special points approached from both sides.
    let all = enumerate_partitions(n)?;
    let eps = 1e-7;
    type Finite = (&'static str, fn(f64) -> GenFun, f64, fn(&Partition) -> f64);
    let cases: [Finite; 7] = [
        ("s_q -> h at q=0", |q| unchecked(Family::PowerSum(QParam::Finite(q))), 0.0, |x| f64::from(x.height())),
        ("M_q -> geometric mean at q=0", |q| unchecked(Family::QMean(QParam::Finite(q))), 0.0, |x| {
            (x.parts().iter().map(|&p| f64::from(p).ln()).sum::<f64>() / f64::from(x.height())).exp()
        }),
        ("T_q -> h-1 at q=0", |q| unchecked(Family::Tsallis(QParam::Finite(q))), 0.0, |x| f64::from(x.height()) - 1.0),
        ("R_q -> ln h at q=0", |q| unchecked(Family::Renyi(QParam::Finite(q))), 0.0, |x| f64::from(x.height()).ln()),
        ("P_q -> h at q=0", |q| unchecked(Family::Pq(QParam::Finite(q))), 0.0, |x| f64::from(x.height())),
        ("T_q -> S at q=1", |q| unchecked(Family::Tsallis(QParam::Finite(q))), 1.0, |x| GenFun::shannon().evaluate(x)),
        ("R_q -> S at q=1", |q| unchecked(Family::Renyi(QParam::Finite(q))), 1.0, |x| GenFun::shannon().evaluate(x)),
    ];
    for (name, at, q0, lim) in cases {
        let mut worst = 0.0f64;
        for q in [q0 - eps, q0 + eps] {
            let f = at(q);
            for x in &all {
                worst = worst.max((f.evaluate(x) - lim(x)).abs());
            }
        }
        c.add(format!("{name}, n={n}"), worst < 1e-5, format!("max error {worst:e}"));
    }
    let m1 = unchecked(Family::QMean(QParam::Finite(1.0)));
    c.all(format!("M_1 = n/h, n={n}"), all.iter(), |x| {
        let want = f64::from(x.n()) / f64::from(x.height());
        ((m1.evaluate(x) - want).abs() > 1e-12).then(|| format!("{x}"))
    });

    // Monotonicity in q on a fixed grid.
    let grid = [-5.0, -2.0, -1.0, -0.5, 0.5, 2.0, 3.0, 5.0];
    type Family1 = fn(f64) -> GenFun;
    let increasing: [(&str, Family1); 2] = [
        ("s_q", |q| unchecked(Family::PowerSum(QParam::Finite(q)))),
        ("M_q", |q| unchecked(Family::QMean(QParam::Finite(q)))),
    ];
    let decreasing: [(&str, Family1); 3] = [
        ("T_q", |q| unchecked(Family::Tsallis(QParam::Finite(q)))),
        ("R_q", |q| unchecked(Family::Renyi(QParam::Finite(q)))),
        ("P_q", |q| unchecked(Family::Pq(QParam::Finite(q)))),
    ];
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs()).max(1.0);
    for (name, at) in increasing {
        c.all(format!("{name} increases with q, n={n}"), all.iter(), |x| {
            let v: Vec<f64> = grid.iter().map(|&q| at(q).evaluate(x)).collect();
            v.windows(2).any(|w| w[0] > w[1] + tol(w[0], w[1])).then(|| format!("{x}: {v:?}"))
        });
    }
    for (name, at) in decreasing {
        c.all(format!("{name} decreases with q, n={n}"), all.iter(), |x| {
            let v: Vec<f64> = grid.iter().map(|&q| at(q).evaluate(x)).collect();
            v.windows(2).any(|w| w[0] + tol(w[0], w[1]) < w[1]).then(|| format!("{x}: {v:?}"))
        });
    }
    let nq = |q: f64| unchecked(Family::QSum(QParam::Finite(q)));
    c.all(format!("N_q decreases on each sign branch, n={n}"), all.iter(), |x| {
        let neg: Vec<f64> = grid[..4].iter().map(|&q| nq(q).evaluate(x)).collect();
        let pos: Vec<f64> = grid[4..].iter().map(|&q| nq(q).evaluate(x)).collect();
        let dec = |v: &[f64]| v.windows(2).all(|w| w[0] + tol(w[0], w[1]) >= w[1]);
        (!dec(&neg) || !dec(&pos)).then(|| format!("{x}: {neg:?} {pos:?}"))
    });
    c.all(format!("N_q at q<0 is below N_q at q>0, n={n}"), all.iter(), |x| {
        let hi_neg = grid[..4].iter().map(|&q| nq(q).evaluate(x)).fold(f64::NEG_INFINITY, f64::max);
        let lo_pos = grid[4..].iter().map(|&q| nq(q).evaluate(x)).fold(f64::INFINITY, f64::min);
        (hi_neg > lo_pos + tol(hi_neg, lo_pos)).then(|| format!("{x}: {hi_neg} > {lo_pos}"))
    });
    Ok(())
}

// ==== bounds ===============================================================

fn bounds(c: &mut Checks, n_max: u32) -> Result<()> {
    let forms = [ClosedForm::Prod, ClosedForm::Part, ClosedForm::Str, ClosedForm::Tgh, ClosedForm::Sq];
    for n in 2..=n_max {
        for form in forms {
            let table = bound_curve(&form.genfun(), n)?;
            c.all(format!("n={n}: brute force = closed form {form}"), table.rows.iter(), |r| {
                match form.evaluate(r.k as i64, n) {
                    Ok(v) if v == r.b as i64 => None,
                    Ok(v) => Some(format!("k={}: brute force {} vs closed form {v}", r.k, r.b)),
                    Err(e) => Some(format!("k={}: {e}", r.k)),
                }
            });
        }
        let prod = bound_curve(&GenFun::width(), n)?;
        c.all(format!("n={n}: nk >= b_prod(k), equality iff k | n"), prod.rows.iter(), |r| {
            let k = r.k as u64;
            let weak = u64::from(n) * k;
            let ok = weak >= r.b && ((weak == r.b) == (u64::from(n) % k == 0));
            (!ok).then(|| format!("k={k}: nk={weak}, b={}", r.b))
        });
        if n <= 20 {
            let p = |v: Vec<u32>| Partition::new(v).expect("valid");
            c.all(format!("n={n}: producibility witness {{k,..,k,r}}"), prod.rows.iter(), |r| {
                let k = r.k as u32;
                let mut parts = vec![k; (n / k) as usize];
                if n % k > 0 {
                    parts.push(n % k);
                }
                (r.witnesses != vec![p(parts)]).then(|| format!("k={k}: {:?}", r.witnesses))
            });
            let part = bound_curve(&GenFun::height(), n)?;
            c.all(format!("n={n}: partitionability witness {{n-k+1,1,..,1}}"), part.rows.iter(), |r| {
                let k = r.k as u32;
                let mut parts = vec![n - k + 1];
                parts.extend(std::iter::repeat_n(1, (k - 1) as usize));
                (r.witnesses != vec![p(parts)]).then(|| format!("k={k}: {:?}", r.witnesses))
            });
            let tgh = bound_curve(&GenFun::toughness(), n)?;
            c.all(format!("n={n}: toughness witness {{n-1,1}}"), tgh.rows.iter(), |r| {
                let ok = if r.k as u32 == n {
                    r.witnesses == vec![Partition::top(n)]
                } else {
                    r.witnesses == vec![p(vec![n - 1, 1])]
                };
                (!ok).then(|| format!("k={}: {:?}", r.k, r.witnesses))
            });
        }
        let catalog: Vec<GenFun> = if n <= 12 { monotone_catalog() } else { forms.iter().map(|f| f.genfun()).collect() };
        let before = c.0.len();
        for f in &catalog {
            let table = bound_curve(f, n)?;
            let last = table.rows.last().expect("nonempty");
            let monotone = table.rows.windows(2).all(|w| w[0].b <= w[1].b);
            let top_ok = last.b == u64::from(n * n) && last.witnesses == vec![Partition::top(n)];
            if !(monotone && top_ok) {
                c.add(format!("n={n}: bound table of {f} monotone, top row n²"), false, format!("{:?}", table.rows.iter().map(|r| r.b).collect::<Vec<_>>()));
            }
            let useful = usefulness_of(&table);
            if table.rows.len() >= 2 && useful.step_count < 2 {
                c.add(format!("n={n}: {f} is non-constant but has one bound value"), false, "");
            }
            if f.dominance_monotone() {
                let bad = dominance_strictness_violations(&table);
                if !bad.is_empty() {
                    c.add(format!("n={n}: dominance strictness of {f}"), false, format!("{bad:?}"));
                }
            }
        }
        if c.0.len() == before {
            c.add(format!("n={n}: bound tables of the catalogue"), true, format!("{} functions", catalog.len()));
        }
        for f in [GenFun::width(), GenFun::height(), GenFun::rank()] {
            let u = usefulness_of(&bound_curve(&f, n)?);
            c.add(format!("n={n}: {f} strictly useful at every level"), u.all_strict, "");
        }
        if n <= 14 {
            for form in forms {
                let f = form.genfun();
                let table = bound_curve(&f, n)?;
                c.all(format!("n={n}: move-maximal cross-check for {f}"), table.rows.iter(), |r| {
                    match bound_by_moves(&f, r.k, n) {
                        Ok(b) if b == r.b => None,
                        Ok(b) => Some(format!("k={}: {b} vs {}", r.k, r.b)),
                        Err(e) => Some(e.to_string()),
                    }
                });
            }
        }
    }
    Ok(())
}

// ==== quantum states =======================================================

fn qfi_suite(c: &mut Checks, n_max: u32, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=n_max.min(10) {
        let jz = CollectiveOp::jz(n)?;
        let all = enumerate_partitions(n)?;
        c.all_try(format!("n={n}: QFI of GHZ products equals s2"), all.iter(), |x| {
            let f = qfi_pure(&ghz_product_state(x)?, &jz)?;
            Ok(((f - x.squareability() as f64).abs() > 1e-9).then(|| format!("{x}: {f}")))
        });
        c.all_try(format!("n={n}: variance adds over blocks"), 0..20, |_| {
            let x = &all[rng.random_range(0..all.len())];
            let s: u64 = rng.random();
            let psi = random_block_product_state(x, s)?;
            let total = variance(&QuantumState::Pure(psi), &jz)?;
            let mut parts = 0.0;
            for (i, &b) in x.parts().iter().enumerate() {
                let block = StateVector::random(b, s.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64))?;
                parts += variance(&QuantumState::Pure(block), &CollectiveOp::jz(b)?)?;
            }
            Ok(((total - parts).abs() > 1e-9).then(|| format!("{x}: {total} vs {parts}")))
        });
    }
    for n in 1..=n_max.min(5) {
        let jz = CollectiveOp::jz(n)?;
        c.all_try(format!("n={n}: mixed-state QFI of pure inputs is 4 Var"), 0..20, |_| {
            let psi = StateVector::random(n, rng.random())?;
            let rho = DensityMatrix::from_pure(&psi)?;
            let a = qfi(&rho, &jz)?;
            let b = qfi_pure(&psi, &jz)?;
            Ok(((a - b).abs() > 1e-9).then(|| format!("{a} vs {b}")))
        });
        let mixed = qfi(&DensityMatrix::maximally_mixed(n)?, &jz)?;
        c.add(format!("n={n}: QFI of the maximally mixed state is 0"), mixed.abs() <= 1e-12, format!("{mixed:e}"));
        c.all_try(format!("n={n}: QFI is convex"), 0..20, |_| {
            let a = DensityMatrix::random(n, rng.random_range(1..=3), rng.random())?;
            let b = DensityMatrix::random(n, rng.random_range(1..=3), rng.random())?;
            let w: f64 = rng.random_range(0.05..0.95);
            let mix = DensityMatrix::mixture(&[(w, a.clone()), (1.0 - w, b.clone())])?;
            let lhs = qfi(&mix, &jz)?;
            let rhs = w * qfi(&a, &jz)? + (1.0 - w) * qfi(&b, &jz)?;
            Ok((lhs > rhs + 1e-9).then(|| format!("{lhs} > {rhs}")))
        });
        c.all_try(format!("n={n}: QFI below decomposition average of 4 Var, and below 4 Var"), 0..10, |_| {
            let rank = rng.random_range(1..=4);
            let rho = DensityMatrix::random(n, rank, rng.random())?;
            let f = qfi(&rho, &jz)?;
            let var = variance(&QuantumState::Mixed(rho.clone()), &jz)?;
            if f > 4.0 * var + 1e-9 {
                return Ok(Some(format!("F={f} > 4Var={}", 4.0 * var)));
            }
            for _ in 0..10 {
                let m = rank + rng.random_range(0..4);
                let dec = random_decomposition(&rho, m, rng.random())?;
                let avg: f64 = dec
                    .iter()
                    .map(|(w, psi)| w * qfi_pure(psi, &jz).unwrap_or(f64::NAN))
                    .sum();
                if !(f <= avg + 1e-9) {
                    return Ok(Some(format!("F={f} > {avg}")));
                }
            }
            Ok(None)
        });
    }
    for n in 1..=n_max.min(6) {
        let jz = CollectiveOp::jz(n)?;
        let half_width_sq = jz.spectral_width().powi(2) / 4.0;
        c.all_try(format!("n={n}: Var <= (a_max-a_min)²/4"), 0..1000, |_| {
            let rho = DensityMatrix::random(n, rng.random_range(1..=4), rng.random())?;
            let v = variance(&QuantumState::Mixed(rho), &jz)?;
            Ok((v > half_width_sq + 1e-9).then(|| format!("{v}")))
        });
        for (label, c0) in [("c=0", Complex64::new(0.0, 0.0)), ("|c|=1", Complex64::from_polar(1.0, 0.7))] {
            let v = variance(&QuantumState::Mixed(DensityMatrix::bhatia_davis(n, c0)?), &jz)?;
            c.add(format!("n={n}: extremal state {label} attains the variance bound"), (v - half_width_sq).abs() <= 1e-9, format!("{v}"));
        }
    }
    Ok(())
}

// ==== depth relations ======================================================

fn depth(c: &mut Checks, n_max: u32, seed: u64) -> Result<()> {
    let width = GenFun::width();
    let s2 = GenFun::squareability();
    let rank = GenFun::rank();
    for n in 1..=n_max {
        let all = enumerate_partitions(n)?;
        c.all(format!("n={n}: relations among h, w, r"), all.iter(), |x| {
            let r = depth_relation_report(x);
            (!r.all_hold).then(|| format!("{x}: {:?}", r.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect::<Vec<_>>()))
        });
        c.all(format!("n={n}: D_sq <= n D"), all.iter(), |x| {
            (s2.evaluate(x) > f64::from(n) * width.evaluate(x)).then(|| format!("{x}"))
        });
        c.all(format!("n={n}: D_r <= D_w"), all.iter(), |x| {
            (rank.evaluate(x) > width.evaluate(x)).then(|| format!("{x}"))
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fams = [GenFun::width(), GenFun::height(), GenFun::rank(), GenFun::squareability(), GenFun::shannon()];
    c.all_try("random ensembles: min <= average depth <= max, relations hold for averages", 0..1000, |_| {
        let n = rng.random_range(1..=n_max.min(10));
        let e = Ensemble::random(n, rng.random_range(1..=6), rng.random())?;
        for f in &fams {
            let depths: Vec<f64> = e.members().iter().map(|m| f.evaluate(&m.parts)).collect();
            let lo = depths.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let avg = ensemble_avg_depth(f, &e);
            if avg < lo - 1e-9 || avg > hi + 1e-9 {
                return Ok(Some(format!("{f}: {avg} outside [{lo}, {hi}]")));
            }
            let worst = ensemble_depth(f, &e);
            let side_ok = match f.direction() {
                crate::genfun::Direction::Increasing => avg <= worst + 1e-9,
                crate::genfun::Direction::Decreasing => avg + 1e-9 >= worst,
            };
            if !side_ok {
                return Ok(Some(format!("{f}: average {avg} beyond certified depth {worst}")));
            }
        }
        let r = ensemble_depth_relation_report(&e);
        Ok((!r.all_hold).then(|| format!("{:?}", r.checks)))
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_n() {
        let cfg = VerifyConfig { n_max: Some(6), seed: 1, extra: vec![] };
        for suite in SuiteName::ALL {
            let cfg = if suite == SuiteName::Qfi {
                VerifyConfig { n_max: Some(3), ..cfg.clone() }
            } else {
                cfg.clone()
            };
            let r = run_suite(suite, &cfg).unwrap();
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
            assert!(r.passed, "{suite:?}: {failed:?}");
        }
    }

    #[test]
    fn extra_unchecked_function_fails() {
        let f = crate::genfun::parse_genfun("m_q:q=-2", false).unwrap();
        let cfg = VerifyConfig { n_max: Some(5), seed: 0, extra: vec![f] };
        let r = run_suite(SuiteName::Monotonicity, &cfg).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn catalog_has_eight_points_per_branch() {
        let cat = monotone_catalog();
        let count = |name: &str| cat.iter().filter(|f| f.family().name() == name).count();
        assert!(count("s_q") >= 16);
        assert!(count("n_q") >= 24);
        assert!(count("m_q") >= 8);
        assert!(count("dim") >= 16);
    }
}
