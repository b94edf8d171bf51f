use nalgebra::DMatrix;

use super::cocycle::Cocycle;
use crate::linalg::{self, RankReport, SlBasis};
use crate::word_algebra::{TwoChain, Word};
use crate::{Error, Result};

/// Residual accepted when solving for parabolic potentials, relative to `max(1, ‖α(p)‖)`.
pub const PARABOLIC_TOL: f64 = 1e-7;

/// Potentials `X_i` with `(Ad_{ρ(p_i)} − I) X_i = α(p_i)` and their residuals.
#[derive(Clone, Debug)]
pub struct ParabolicCertificate {
    pub potentials: Vec<DMatrix<f64>>,
    pub residuals: Vec<f64>,
}

/// Minimal-norm least-squares potentials for each peripheral word.
pub fn parabolic_potentials(alpha: &Cocycle, peripheral: &[Word]) -> Result<ParabolicCertificate> {
    let rep = alpha.base();
    let basis = SlBasis::new(rep.n());
    let d = basis.dim();
    let mut potentials = Vec::with_capacity(peripheral.len());
    let mut residuals = Vec::with_capacity(peripheral.len());
    for (index, p) in peripheral.iter().enumerate() {
        let g = rep.evaluate(p);
        let g_inv = rep.evaluate(&p.inverse());
        let a = basis.adjoint_matrix(&g, &g_inv) - DMatrix::<f64>::identity(d, d);
        let target = alpha.evaluate_word(p);
        let (x, residual) = linalg::lstsq_min_norm(&a, &basis.coords(&target));
        let tolerance = PARABOLIC_TOL * target.norm().max(1.0);
        if residual > tolerance {
            return Err(Error::NotParabolic {
                index,
                residual,
                tolerance,
            });
        }
        potentials.push(basis.from_coords(x.as_slice()));
        residuals.push(residual);
    }
    Ok(ParabolicCertificate {
        potentials,
        residuals,
    })
}

/// `−Σ_{[a|x] ∈ c} Tr(α(ā) β(x))`.
pub fn cup_pairing(alpha: &Cocycle, beta: &Cocycle, c: &TwoChain) -> f64 {
    -c.terms()
        .iter()
        .map(|(a, x)| linalg::trace_product(&alpha.evaluate(&a.bar()), &beta.evaluate_word(x)))
        .sum::<f64>()
}

/// The pairing against the fundamental class of a closed surface.
pub fn omega_g(alpha: &Cocycle, beta: &Cocycle) -> Result<f64> {
    let p = alpha.base().presentation();
    if !p.is_closed() {
        return Err(Error::NotClosedSurface {
            boundaries: p.boundaries,
        });
    }
    Ok(cup_pairing(alpha, beta, &p.fundamental_class(&Word::identity())))
}

/// `⟨α ⌣ β, c⟩ − Σ_i Tr(X_i β(p_i))` for caller-supplied chain and potentials.
pub fn omega_k_with(
    alpha: &Cocycle,
    beta: &Cocycle,
    peripheral: &[Word],
    chain: &TwoChain,
    potentials: &[DMatrix<f64>],
) -> f64 {
    let boundary: f64 = peripheral
        .iter()
        .zip(potentials)
        .map(|(p, x)| linalg::trace_product(x, &beta.evaluate_word(p)))
        .sum();
    cup_pairing(alpha, beta, chain) - boundary
}

/// The pairing on parabolic cocycles of a surface with boundary. For a closed
/// surface (no peripheral words) this is `omega_G`.
pub fn omega_k(alpha: &Cocycle, beta: &Cocycle, peripheral: &[Word]) -> Result<f64> {
    let cert = parabolic_potentials(alpha, peripheral)?;
    parabolic_potentials(beta, peripheral)?;
    let chain = alpha.base().presentation().fundamental_class(&Word::identity());
    Ok(omega_k_with(alpha, beta, peripheral, &chain, &cert.potentials))
}

/// Gram matrix of a bilinear form on a list of cocycles with its rank decision.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub gram: DMatrix<f64>,
    pub rank: RankReport,
}

pub fn gram_matrix<F>(basis: &[Cocycle], form: F) -> Result<GramReport>
where
    F: Fn(&Cocycle, &Cocycle) -> Result<f64>,
{
    let k = basis.len();
    let mut gram = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = form(&basis[i], &basis[j])?;
        }
    }
    let rank = linalg::rank(&gram);
    Ok(GramReport { gram, rank })
}
