//! Computational companion to Bohr recurrence and density results for
//! non-lacunary multiplicative semigroups of the positive integers.
//!
//! * [`torus`]: exact and certified-interval arithmetic on `T^d`.
//! * [`semigroup`]: ordered enumeration, independence, ratio gaps and
//!   congruence sub-semigroups.
//! * [`recurrence`]: certified recurrence witnesses for `{P(k s)}`.
//! * [`rational_points`]: rational points in semigroup orbit closures.
//! * [`density`]: gap, discrepancy and occupancy diagnostics.

pub mod density;
pub mod error;
pub mod recurrence;
pub mod rational_points;
pub mod semigroup;
pub mod torus;
pub mod wire;

pub use error::{Error, Result};
pub use density::{DensityReport, GridOccupancy, Population, RealPolynomial};
pub use rational_points::{OrbitSpec, RationalCandidate};
pub use recurrence::{IntPolynomial, KFamily, SearchBudget, Witness};
pub use semigroup::{ExponentMode, SemigroupSpec, SemigroupStream};
pub use torus::{
    certify_dist, hom_norm, rational_reconstruct, torus_dist, vec_mul, Certainty, IntervalValue,
    TorusCoord, TorusPoint,
};
