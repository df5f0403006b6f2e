//! One-parameter classification of multipartite entanglement.
//!
//! Partial separability of an `n`-partite pure state is described by an
//! integer partition of `n`. A generator function `f` on partitions that is
//! monotone under refinement turns this into a single level `k`, the
//! f-entanglement depth. The crate provides:
//!
//! * [`partition`]: enumeration, refinement and dominance orders, covers;
//! * [`genfun`]: the catalogue of generator functions and their level sets;
//! * [`classify`]: pure-state depths, ensemble-certified depths and depth
//!   relations;
//! * [`bounds`]: quantum Fisher information bounds `b_f(k)` and usefulness;
//! * [`qstate`]: small dense qubit states, collective `Jᶻ`, variance and QFI;
//! * [`verify`]: exhaustive verification suites.

pub mod bounds;
pub mod classify;
pub mod error;
pub mod genfun;
pub mod hasse;
pub mod partition;
pub mod qstate;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use genfun::{Direction, DownSet, Family, GenFun, QParam};
pub use hasse::{GraphFormat, HasseGraph, OrderKind};
pub use partition::Partition;
pub use transform::{Curvature, MonotoneTransform};
