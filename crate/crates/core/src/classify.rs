//! f-entanglement depth of pure separability types and of decompositions.
//!
//! For a pure state whose finest separating partition is `ξ*`, the depth is
//! exactly `f(ξ*)`. For a mixed state only a decomposition `{(p_j, ξ*_j)}`
//! is known here, so [`ensemble_depth`] and [`ensemble_avg_depth`] certify
//! bounds for that particular decomposition, not the optimum over all.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::{neighbor_level, Direction, GenFun};
use crate::partition::{enumerate_partitions, Partition};
use crate::transform::MonotoneTransform;

pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub p: f64,
    pub parts: Partition,
}

#[derive(Deserialize)]
struct EnsembleDoc {
    n: u32,
    members: Vec<EnsembleMember>,
}

/// Weighted finest separating types of a pure-state decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleDoc")]
pub struct Ensemble {
    n: u32,
    members: Vec<EnsembleMember>,
}

impl TryFrom<EnsembleDoc> for Ensemble {
    type Error = Error;
    fn try_from(doc: EnsembleDoc) -> Result<Self> {
        let e = Ensemble::new(doc.members)?;
        if e.n != doc.n {
            return Err(Error::Inconsistent(format!(
                "declared n = {} but members have n = {}",
                doc.n, e.n
            )));
        }
        Ok(e)
    }
}

impl Ensemble {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let n = members
            .first()
            .ok_or_else(|| Error::Argument("empty ensemble".into()))?
            .parts
            .n();
        let mut total = 0.0;
        for m in &members {
            if m.parts.n() != n {
                return Err(Error::SizeMismatch(n, m.parts.n()));
            }
            if !(m.p > 0.0 && m.p <= 1.0) {
                return Err(Error::Argument(format!("weight {} outside (0, 1]", m.p)));
            }
            total += m.p;
        }
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Argument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n, members })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, Partition)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(p, parts)| EnsembleMember { p, parts })
                .collect(),
        )
    }

    pub fn pure(xi: Partition) -> Self {
        Self {
            n: xi.n(),
            members: vec![EnsembleMember { p: 1.0, parts: xi }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Random ensemble of `size` members drawn uniformly from `P_I(n)` with
    /// random positive weights.
    pub fn random(n: u32, size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::Argument("empty ensemble".into()));
        }
        let all = enumerate_partitions(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let members = raw
            .into_iter()
            .map(|w| EnsembleMember {
                p: w / total,
                parts: all[rng.random_range(0..all.len())].clone(),
            })
            .collect();
        Self::new(members)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn average(&self, g: impl Fn(&Partition) -> f64) -> f64 {
        self.members.iter().map(|m| m.p * g(&m.parts)).sum()
    }
}

/// Level and neighbouring level of the class containing a pure type.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassLabel {
    pub f: GenFun,
    pub k: f64,
    pub k_neighbor: Option<f64>,
}

/// `D_f(π) = f(ξ*)` for a pure state with finest separating type `ξ*`.
pub fn pure_depth(f: &GenFun, finest: &Partition) -> f64 {
    f.evaluate(finest)
}

pub fn class_of(f: &GenFun, finest: &Partition) -> Result<ClassLabel> {
    let k = pure_depth(f, finest);
    let k_neighbor = match neighbor_level(f, finest.n(), k) {
        Ok(v) => Some(v),
        Err(Error::NoNeighbor(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ClassLabel { f: f.clone(), k, k_neighbor })
}

/// Depth certified by this decomposition: the worst member depth. An upper
/// bound on `D_f(ρ)` for increasing `f`, a lower bound for decreasing `f`.
pub fn ensemble_depth(f: &GenFun, e: &Ensemble) -> f64 {
    let depths = e.members.iter().map(|m| pure_depth(f, &m.parts));
    match f.direction() {
        Direction::Increasing => depths.fold(f64::NEG_INFINITY, f64::max),
        Direction::Decreasing => depths.fold(f64::INFINITY, f64::min),
    }
}

/// Weighted mean member depth, bounding the depth of formation from the
/// same side as [`ensemble_depth`].
pub fn ensemble_avg_depth(f: &GenFun, e: &Ensemble) -> f64 {
    e.average(|xi| pure_depth(f, xi))
}

/// `D_{g∘f}(π) = g(D_f(π))`.
pub fn depth_transform(g: MonotoneTransform, f: &GenFun, finest: &Partition) -> Result<f64> {
    Ok(pure_depth(&GenFun::compose(g, f.clone())?, finest))
}

// ==== relations between h, w and r ========================================

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRelationReport {
    pub n: u32,
    pub h: f64,
    pub w: f64,
    pub r: f64,
    pub checks: Vec<InequalityCheck>,
    pub all_hold: bool,
}

const RELATION_TOL: f64 = 1e-9;

/// The two-sided bounds among partitionability `h`, producibility `w` and
/// stretchability `r`. They hold for every partition and, by convexity of
/// the outer bounds, for ensemble averages.
pub fn depth_relations(n: u32, h: f64, w: f64, r: f64) -> DepthRelationReport {
    let nf = f64::from(n);
    let root = (r * r + 4.0 * nf).sqrt();
    let check = |name, lower: f64, value: f64, upper: f64| InequalityCheck {
        name,
        lower,
        value,
        upper,
        holds: lower <= value + RELATION_TOL && value <= upper + RELATION_TOL,
    };
    let checks = vec![
        check("n/w <= h <= n+1-w", nf / w, h, nf + 1.0 - w),
        check("n/h <= w <= n+1-h", nf / h, w, nf + 1.0 - h),
        check("n/h-h <= r <= n+1-2h", nf / h - h, r, nf + 1.0 - 2.0 * h),
        check("2w-(n+1) <= r <= w-n/w", 2.0 * w - (nf + 1.0), r, w - nf / w),
        check("sqrt(r^2+4n)-r <= 2h <= n+1-r", root - r, 2.0 * h, nf + 1.0 - r),
        check("sqrt(r^2+4n)+r <= 2w <= n+1+r", root + r, 2.0 * w, nf + 1.0 + r),
    ];
    let all_hold = checks.iter().all(|c| c.holds);
    DepthRelationReport { n, h, w, r, checks, all_hold }
}

pub fn depth_relation_report(xi: &Partition) -> DepthRelationReport {
    depth_relations(
        xi.n(),
        f64::from(xi.height()),
        f64::from(xi.width()),
        xi.rank() as f64,
    )
}

/// The same relations between ensemble-averaged depths.
pub fn ensemble_depth_relation_report(e: &Ensemble) -> DepthRelationReport {
    depth_relations(
        e.n(),
        e.average(|xi| f64::from(xi.height())),
        e.average(|xi| f64::from(xi.width())),
        e.average(|xi| xi.rank() as f64),
    )
}
