use std::sync::Arc;

use nalgebra::DMatrix;

use super::cut::CutSystem;
use crate::cohomology::Cocycle;
use crate::linalg;
use crate::representation::Representation;
use crate::{Error, Result};

/// `‖Ad_{ρ(ξ)} X − X‖ ≤ INVARIANCE_TOL·‖X‖` is required of a bending direction.
pub const INVARIANCE_TOL: f64 = 1e-8;

/// How bending along a cut changes the ambient generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BendingRule {
    /// `s ↦ exp(tX) ρ(s) exp(−tX)` for the listed generators (one side of the cut).
    Conjugate(Vec<usize>),
    /// `s ↦ ρ(s) exp(tX)` for one generator (non-separating cut, `s = ξ^⊥`).
    RightMultiply(usize),
}

#[derive(Clone, Debug)]
pub struct BendingParameter {
    pub cut: usize,
    pub x: DMatrix<f64>,
    pub t: f64,
}

fn check_invariance(rep: &Representation, cs: &CutSystem, cut: usize, x: &DMatrix<f64>) -> Result<()> {
    let defect = (rep.adjoint(&cs.cuts[cut].word, x) - x).norm();
    if defect > INVARIANCE_TOL * x.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::InvariantViolation { defect });
    }
    Ok(())
}

/// The algebraic bending `Φ^t` along cut `bp.cut` by `bp.x`.
/// Inverses of the new images are formed in closed form rather than by inversion.
pub fn bending_flow(rep: &Representation, cs: &CutSystem, bp: &BendingParameter) -> Result<Representation> {
    check_invariance(rep, cs, bp.cut, &bp.x)?;
    let mut images = rep.images().to_vec();
    let mut inverses: Vec<DMatrix<f64>> = (0..rep.rank()).map(|s| rep.inverse_image(s).clone()).collect();
    match &cs.cuts[bp.cut].bending {
        BendingRule::Conjugate(gens) => {
            let e = linalg::expm(&(&bp.x * bp.t));
            let e_inv = linalg::expm(&(&bp.x * -bp.t));
            for &s in gens {
                images[s] = &e * &images[s] * &e_inv;
                inverses[s] = &e * &inverses[s] * &e_inv;
            }
        }
        BendingRule::RightMultiply(s) => {
            let e = linalg::expm(&(&bp.x * bp.t));
            let e_inv = linalg::expm(&(&bp.x * -bp.t));
            images[*s] = &images[*s] * &e;
            inverses[*s] = &e_inv * &inverses[*s];
        }
    }
    rep.with_images_and_inverses(images, inverses)
}

/// Tangent cocycle `d/dt|₀ Φ^t` of the bending along `cut` by `x`.
pub fn bending_cocycle(
    rep: &Arc<Representation>,
    cs: &CutSystem,
    cut: usize,
    x: &DMatrix<f64>,
) -> Result<Cocycle> {
    check_invariance(rep, cs, cut, x)?;
    let n = rep.n();
    let mut values = vec![DMatrix::zeros(n, n); rep.rank()];
    match &cs.cuts[cut].bending {
        BendingRule::Conjugate(gens) => {
            for &s in gens {
                values[s] = x - rep.image(s) * x * rep.inverse_image(s);
            }
        }
        BendingRule::RightMultiply(s) => {
            values[*s] = rep.image(*s) * x * rep.inverse_image(*s);
        }
    }
    Cocycle::new(rep.clone(), values)
}
