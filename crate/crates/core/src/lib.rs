//! Separable-ball radii around the identity and separability certificates.
//!
//! The crate computes lower bounds on the radius of the largest Frobenius-norm
//! ball of separable (unentangled) matrices around the identity for a system
//! of `m` parties with local dimensions `d_1, ..., d_m`, uses those bounds to
//! certify concrete density matrices as separable, and checks the supporting
//! constructions numerically:
//!
//! - [`linalg`]: dense complex matrices, norms, eigensolver, tensor structure.
//! - [`bounds`]: the radius recursion, its closed form and weaker variants.
//! - [`certify`]: certificates for unnormalized, normalized and pseudopure states.
//! - [`schur`]: 2->inf induced norms of Schur-product maps via exact simplex QP.
//! - [`extremal`]: the extremal stochastic ball-positive map and norm-chain checks.
//! - [`geometry`]: coefficient-of-symmetry witnesses and John-ellipsoid figures.
//! - [`nmr`]: thermal and pseudopure NMR states and qubit-count thresholds.
//! - [`verify`]: the seeded property suite behind `sepball verify`.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod linalg;
pub mod nmr;
pub mod sampling;
pub mod schur;
pub mod verify;

pub use error::{Error, Result};
