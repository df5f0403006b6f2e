//! Monotone real transforms `g` used to build coarser or rescaled generator
//! functions `g∘f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::Direction;

/// Curvature of a transform on its domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Convex,
    Concave,
    Affine,
    None,
}

/// A closed set of monotone transforms. Logarithms, powers with `p < 0` and
/// the reciprocal are defined on `u > 0`; other inputs yield `NaN`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneTransform {
    /// `a·u + b`
    Affine { a: f64, b: f64 },
    Ln,
    Exp,
    /// `u^p` on `u ≥ 0`
    Power { p: f64 },
    Reciprocal,
    Negate,
    /// `−log_base(u)`
    NegLog { base: f64 },
    /// `step·⌊u/step⌋`, a non-strict coarsening
    FloorToGrid { step: f64 },
}

impl MonotoneTransform {
    pub fn identity() -> Self {
        Self::Affine { a: 1.0, b: 0.0 }
    }

    /// Rejects transforms that are constant or otherwise not monotone.
    pub fn validate(&self) -> Result<()> {
        let bad = match *self {
            Self::Affine { a, b } => a == 0.0 || !a.is_finite() || !b.is_finite(),
            Self::Power { p } => p == 0.0 || !p.is_finite(),
            Self::NegLog { base } => !(base > 0.0 && base != 1.0 && base.is_finite()),
            Self::FloorToGrid { step } => !(step > 0.0 && step.is_finite()),
            Self::Ln | Self::Exp | Self::Reciprocal | Self::Negate => false,
        };
        if bad {
            return Err(Error::NonMonotone(self.to_string()));
        }
        Ok(())
    }

    pub fn apply(&self, u: f64) -> f64 {
        match *self {
            Self::Affine { a, b } => a * u + b,
            Self::Ln => positive(u).ln(),
            Self::Exp => u.exp(),
            Self::Power { p } if p < 0.0 => positive(u).powf(p),
            Self::Power { p } => {
                if u < 0.0 {
                    f64::NAN
                } else {
                    u.powf(p)
                }
            }
            Self::Reciprocal => 1.0 / positive(u),
            Self::Negate => -u,
            Self::NegLog { base } => -positive(u).ln() / base.ln(),
            Self::FloorToGrid { step } => step * (u / step).floor(),
        }
    }

    pub fn direction(&self) -> Direction {
        let increasing = match *self {
            Self::Affine { a, .. } => a > 0.0,
            Self::Power { p } => p > 0.0,
            Self::NegLog { base } => base < 1.0,
            Self::Reciprocal | Self::Negate => false,
            Self::Ln | Self::Exp | Self::FloorToGrid { .. } => true,
        };
        if increasing {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }

    pub fn curvature(&self) -> Curvature {
        match *self {
            Self::Affine { .. } | Self::Negate => Curvature::Affine,
            Self::Ln => Curvature::Concave,
            Self::Exp | Self::Reciprocal => Curvature::Convex,
            Self::Power { p } if p == 1.0 => Curvature::Affine,
            Self::Power { p } if p > 0.0 && p < 1.0 => Curvature::Concave,
            Self::Power { .. } => Curvature::Convex,
            Self::NegLog { base } if base > 1.0 => Curvature::Convex,
            Self::NegLog { .. } => Curvature::Concave,
            Self::FloorToGrid { .. } => Curvature::None,
        }
    }

    /// Strict monotonicity keeps the classification unchanged.
    pub fn is_strict(&self) -> bool {
        !matches!(self, Self::FloorToGrid { .. })
    }

    /// Maps integers to integers.
    pub(crate) fn preserves_integers(&self) -> bool {
        match *self {
            Self::Negate => true,
            Self::Affine { a, b } => a.fract() == 0.0 && b.fract() == 0.0,
            Self::FloorToGrid { step } => step.fract() == 0.0,
            _ => false,
        }
    }
}

fn positive(u: f64) -> f64 {
    if u > 0.0 {
        u
    } else {
        f64::NAN
    }
}

impl fmt::Display for MonotoneTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Affine { a, b } => write!(f, "affine({a},{b})"),
            Self::Ln => write!(f, "ln"),
            Self::Exp => write!(f, "exp"),
            Self::Power { p } => write!(f, "pow({p})"),
            Self::Reciprocal => write!(f, "recip"),
            Self::Negate => write!(f, "neg"),
            Self::NegLog { base } if base == std::f64::consts::E => write!(f, "negln"),
            Self::NegLog { base } => write!(f, "neglog{base}"),
            Self::FloorToGrid { step } => write!(f, "floor({step})"),
        }
    }
}

impl FromStr for MonotoneTransform {
    type Err = Error;

    /// Tokens: `ln`, `exp`, `neg`, `recip`, `negln`, `neglog<base>`,
    /// `affine(a,b)`, `pow(p)`, `floor(step)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in transform {s:?}")))
        };
        let args = |name: &str| -> Option<&str> {
            s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
        };
        let g = match s {
            "ln" => Self::Ln,
            "exp" => Self::Exp,
            "neg" => Self::Negate,
            "recip" => Self::Reciprocal,
            "negln" => Self::NegLog { base: std::f64::consts::E },
            _ => {
                if let Some(base) = s.strip_prefix("neglog") {
                    Self::NegLog { base: num(base)? }
                } else if let Some(a) = args("affine") {
                    let (x, y) = a
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("affine needs two arguments: {s:?}")))?;
                    Self::Affine { a: num(x)?, b: num(y)? }
                } else if let Some(a) = args("pow") {
                    Self::Power { p: num(a)? }
                } else if let Some(a) = args("floor") {
                    Self::FloorToGrid { step: num(a)? }
                } else {
                    return Err(Error::Parse(format!("unknown transform {s:?}")));
                }
            }
        };
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["ln", "exp", "neg", "recip", "negln", "neglog2", "affine(2,-1)", "pow(0.5)", "floor(3)"] {
            let g: MonotoneTransform = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
    }

    #[test]
    fn constant_transforms_rejected() {
        for s in ["affine(0,3)", "pow(0)", "floor(0)", "neglog1"] {
            assert!(matches!(s.parse::<MonotoneTransform>(), Err(Error::NonMonotone(_))), "{s}");
        }
        assert!(matches!("sin".parse::<MonotoneTransform>(), Err(Error::Parse(_))));
    }

    #[test]
    fn directions_and_curvature() {
        use Direction::*;
        let neglog2 = MonotoneTransform::NegLog { base: 2.0 };
        assert_eq!(neglog2.direction(), Decreasing);
        assert_eq!(neglog2.curvature(), Curvature::Convex);
        assert!((neglog2.apply(8.0) + 3.0).abs() < 1e-15);
        assert_eq!(MonotoneTransform::Power { p: -1.0 }.direction(), Decreasing);
        assert_eq!(MonotoneTransform::Power { p: 2.0 }.curvature(), Curvature::Convex);
        assert_eq!(MonotoneTransform::Ln.curvature(), Curvature::Concave);
        assert!(MonotoneTransform::Ln.apply(-1.0).is_nan());
        assert_eq!(MonotoneTransform::FloorToGrid { step: 5.0 }.apply(12.0), 10.0);
    }
}
