//! Trivariate partial information decomposition.
//!
//! Computes the three PIDs of a finite distribution `p(x, y, z)` with the
//! minimum-synergy measure of unique information, reduces them to the
//! minimal set of seven subatoms, splits each redundancy into source and
//! non-source parts, and decomposes the joint entropy. A closed-form path covers jointly Gaussian
//! systems.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`. All information
//! values are in bits.

pub mod catalog;
pub mod dist;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod subatoms;

pub use catalog::{SystemKind, SystemSpec};
pub use dist::{Alphabet, Role, ShannonSummary, Vars};
pub use error::{PidError, Result};
pub use scalar::Real;
pub use solver::{SolveStats, SolverConfig};
pub use subatoms::{IrsiLabel, PAIRS, SUBATOM_LABELS};

pub type JointDist3 = dist::JointDist3<f64>;
pub type PidAtoms = solver::PidAtoms<f64>;
pub type PidSolution = solver::PidSolution<f64>;
pub type ThreePids = subatoms::ThreePids<f64>;
pub type MinimalSet = subatoms::MinimalSet<f64>;
pub type RedundancySplit = subatoms::RedundancySplit<f64>;
pub type EntropyDecomposition = subatoms::EntropyDecomposition<f64>;
pub type ExtendedSystem = subatoms::ExtendedSystem<f64>;
pub type GaussianCov = gaussian::GaussianCov<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type JointDist3 = crate::dist::JointDist3<f32>;
    pub type PidAtoms = crate::solver::PidAtoms<f32>;
    pub type ThreePids = crate::subatoms::ThreePids<f32>;
    pub type MinimalSet = crate::subatoms::MinimalSet<f32>;
    pub type GaussianCov = crate::gaussian::GaussianCov<f32>;
}
