//! Twisted 1-cocycles with values in `sl_n`, parabolic potentials and the
//! chain-level pairings `omega_G`, `omega_K`.
//!
//! Conventions: `α(uv) = α(u) + Ad_{ρ(u)} α(v)` and `(dX)(γ) = Ad_{ρ(γ)} X − X`.
//! The tangent cocycle of a path `ρ_t` is `γ ↦ (d/dt ρ_t(γ)) ρ(γ)⁻¹`.

mod cocycle;
mod pairing;
mod spaces;

pub use cocycle::{coboundary, tangent_cocycle, Cocycle};
pub use pairing::{
    cup_pairing, gram_matrix, omega_g, omega_k, omega_k_with, parabolic_potentials,
    GramReport, ParabolicCertificate, PARABOLIC_TOL,
};
pub use spaces::{
    coboundary_space_basis, cocycle_space_basis, fox_matrix, parabolic_space_basis, CocycleSpace,
};
