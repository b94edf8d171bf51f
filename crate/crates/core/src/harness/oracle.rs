//! A direct evaluation of the cup pairing used to cross-check the main path.
//!
//! Words are walked letter by letter on raw signed codes, with each cocycle value
//! accumulated along the running prefix product; nothing here goes through
//! [`crate::cohomology::Cocycle`] or the group-ring bar involution.

use nalgebra::DMatrix;
use num_traits::ToPrimitive;

use crate::representation::Representation;
use crate::word_algebra::TwoChain;

/// `c(w)` from generator values by the cocycle rule, with `c(s⁻¹) = −ρ(s)⁻¹ c(s) ρ(s)`.
pub fn dense_value(rep: &Representation, values: &[DMatrix<f64>], codes: &[i32]) -> DMatrix<f64> {
    let n = rep.n();
    let mut prefix = DMatrix::<f64>::identity(n, n);
    let mut prefix_inv = DMatrix::<f64>::identity(n, n);
    let mut out = DMatrix::<f64>::zeros(n, n);
    for &code in codes {
        let s = (code.unsigned_abs() - 1) as usize;
        let (g, g_inv) = (rep.image(s), rep.inverse_image(s));
        let local = if code > 0 {
            values[s].clone()
        } else {
            -(g_inv * &values[s] * g)
        };
        out += &prefix * local * &prefix_inv;
        if code > 0 {
            prefix = prefix * g;
            prefix_inv = g_inv * prefix_inv;
        } else {
            prefix = prefix * g_inv;
            prefix_inv = g * prefix_inv;
        }
    }
    out
}

/// `−Σ c_w Tr(α(w⁻¹) β(x))` over all terms `[Σ c_w w | x]` of the chain.
pub fn dense_cup_pairing(
    rep: &Representation,
    alpha: &[DMatrix<f64>],
    beta: &[DMatrix<f64>],
    chain: &TwoChain,
) -> f64 {
    dense_cup_pairing_with_scale(rep, alpha, beta, chain).0
}

/// The pairing together with `Σ |c_w| ‖α(w⁻¹)‖ ‖β(x)‖`, a bound on the summands
/// that roundoff is relative to.
pub fn dense_cup_pairing_with_scale(
    rep: &Representation,
    alpha: &[DMatrix<f64>],
    beta: &[DMatrix<f64>],
    chain: &TwoChain,
) -> (f64, f64) {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (a, x) in chain.terms() {
        let bx = dense_value(rep, beta, &x.codes());
        for (w, c) in a.terms() {
            let inv: Vec<i32> = w.codes().iter().rev().map(|c| -c).collect();
            let aw = dense_value(rep, alpha, &inv);
            let c = c.to_f64().expect("coefficient fits in f64");
            total += c * (aw.transpose().component_mul(&bx)).sum();
            scale += c.abs() * aw.norm() * bx.norm();
        }
    }
    (-total, scale)
}
