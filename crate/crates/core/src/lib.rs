//! Chain-level symplectic pairings on `SL(n, R)` representation varieties of
//! surface groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`word_algebra`]: free-group words, the integral group ring, Fox
//!   derivatives, surface presentations and (relative) fundamental 2-chains.
//! * [`representation`]: numerical `SL(n, R)` representations, spectral data
//!   of loxodromic elements and the invariant functions `f_j` with their
//!   gradients `F_j`.
//! * [`cohomology`]: twisted 1-cocycles, parabolic potentials, the cup pairing
//!   against a 2-chain and the forms `omega_G` / `omega_K`.
//! * [`decomposition`]: cut systems, restriction to subsurfaces, bending flows
//!   and the numerical certificates for the decomposition formulas and the
//!   moment map.
//! * [`bonahon_dreyer`]: flag triple ratios, double ratios and the rotation
//!   condition.
//! * [`action_angle`]: Hamiltonian flows and Darboux completion on explicit
//!   low-dimensional symplectic charts.
//! * [`harness`]: seeded verification suites, reports and JSON I/O.

pub mod action_angle;
pub mod bonahon_dreyer;
pub mod cohomology;
pub mod decomposition;
mod error;
pub mod harness;
pub mod linalg;
pub mod representation;
pub mod word_algebra;

pub use error::{Error, Result};
