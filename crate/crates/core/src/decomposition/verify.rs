use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::cut::{CutKind, CutSystem};
use super::flow::bending_cocycle;
use crate::cohomology::{
    coboundary, coboundary_space_basis, cocycle_space_basis, fox_matrix, omega_g, omega_k, parabolic_potentials,
    parabolic_space_basis, tangent_cocycle, Cocycle, PARABOLIC_TOL,
};
use crate::linalg::{self, SlBasis};
use crate::representation::{f_values, spectral_generators, Representation};
use crate::{Error, Result};

/// Empirical sign in `ω(δF_j, β) = MOMENT_SIGN · d f_j(β)` under the cocycle and
/// pairing conventions of [`crate::cohomology`].
pub const MOMENT_SIGN: f64 = -1.0;

/// The representation of piece `piece` obtained through its inclusion words.
pub fn restricted_rep(rep: &Representation, cs: &CutSystem, piece: usize) -> Result<Arc<Representation>> {
    let p = &cs.pieces[piece];
    Ok(Arc::new(Representation::new(
        p.presentation.clone(),
        p.inclusion.iter().map(|w| rep.evaluate(w)).collect(),
    )?))
}

fn restrict_onto(alpha: &Cocycle, base: &Arc<Representation>, cs: &CutSystem, piece: usize) -> Result<Cocycle> {
    let values = cs.pieces[piece]
        .inclusion
        .iter()
        .map(|w| alpha.evaluate_word(w))
        .collect();
    Cocycle::new(base.clone(), values)
}

/// `ι*α`: the values of `α` on the inclusion words of a piece.
pub fn restrict_cocycle(alpha: &Cocycle, cs: &CutSystem, piece: usize) -> Result<Cocycle> {
    let base = restricted_rep(alpha.base(), cs, piece)?;
    restrict_onto(alpha, &base, cs, piece)
}

/// Ambient pairing: `omega_G` when closed, otherwise `omega_K` on the boundary words.
fn ambient_form(alpha: &Cocycle, beta: &Cocycle) -> Result<f64> {
    let p = alpha.base().presentation();
    if p.is_closed() {
        omega_g(alpha, beta)
    } else {
        omega_k(alpha, beta, &p.peripheral_words())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub kind: CutKind,
    pub lhs: f64,
    pub rhs_terms: Vec<f64>,
    pub defect: f64,
}

/// Compares the ambient pairing with the sum of the piece pairings of the restrictions.
pub fn verify_decomposition(alpha: &Cocycle, beta: &Cocycle, cs: &CutSystem) -> Result<DecompositionReport> {
    let cuts = cs.peripheral_cut_words();
    parabolic_potentials(alpha, &cuts)?;
    parabolic_potentials(beta, &cuts)?;
    let lhs = ambient_form(alpha, beta)?;
    let mut rhs_terms = Vec::with_capacity(cs.pieces.len());
    for (i, piece) in cs.pieces.iter().enumerate() {
        let base = restricted_rep(alpha.base(), cs, i)?;
        let a = restrict_onto(alpha, &base, cs, i)?;
        let b = restrict_onto(beta, &base, cs, i)?;
        rhs_terms.push(omega_k(&a, &b, &piece.presentation.peripheral_words())?);
    }
    let defect = (lhs - rhs_terms.iter().sum::<f64>()).abs();
    Ok(DecompositionReport {
        kind: cs.kind,
        lhs,
        rhs_terms,
        defect,
    })
}

/// If `ι*α = dX` on a piece, returns `(α − dX, X)`; the shifted cocycle vanishes on
/// that piece's inclusion words.
pub fn normalize_on_piece(alpha: &Cocycle, cs: &CutSystem, piece: usize) -> Result<(Cocycle, DMatrix<f64>)> {
    let rep = alpha.base();
    let basis = SlBasis::new(rep.n());
    let d = basis.dim();
    let words = &cs.pieces[piece].inclusion;
    let mut a = DMatrix::zeros(d * words.len(), d);
    let mut b = DVector::zeros(d * words.len());
    for (k, w) in words.iter().enumerate() {
        let g = rep.evaluate(w);
        let g_inv = rep.evaluate(&w.inverse());
        let block = basis.adjoint_matrix(&g, &g_inv) - DMatrix::<f64>::identity(d, d);
        a.view_mut((k * d, 0), (d, d)).copy_from(&block);
        b.rows_mut(k * d, d).copy_from(&basis.coords(&alpha.evaluate_word(w)));
    }
    let (x, residual) = linalg::lstsq_min_norm(&a, &b);
    let tolerance = PARABOLIC_TOL * b.norm().max(1.0);
    if residual > tolerance {
        return Err(Error::NotParabolic {
            index: piece,
            residual,
            tolerance,
        });
    }
    let x = basis.from_coords(x.as_slice());
    Ok((alpha.minus(&coboundary(rep, &x)), x))
}

/// Rank data for the restriction map from parabolic classes to the pieces.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub parabolic_dim: usize,
    pub coboundary_dim: usize,
    pub h1_par_dim: usize,
    pub kernel_dim: usize,
    pub image_dims: Vec<usize>,
    pub min_gap: f64,
}

pub fn exactness_report(rep: &Arc<Representation>, cs: &CutSystem) -> Result<ExactnessReport> {
    let basis = SlBasis::new(rep.n());
    let d = basis.dim();
    let zpar = parabolic_space_basis(rep, &cs.peripheral_cut_words())?;
    let b1 = coboundary_space_basis(rep)?;
    let mut min_gap = zpar.report.sv_gap.min(b1.report.sv_gap);
    let mut image_dims = Vec::new();
    let mut stacked = DMatrix::zeros(0, zpar.dim());
    for (i, piece) in cs.pieces.iter().enumerate() {
        let prep = restricted_rep(rep, cs, i)?;
        let pb1 = coboundary_space_basis(&prep)?;
        min_gap = min_gap.min(pb1.report.sv_gap);
        let (quotient, qrep) = linalg::cokernel(&pb1.coords);
        min_gap = min_gap.min(qrep.sv_gap);
        let mut restriction = DMatrix::zeros(d * piece.inclusion.len(), rep.rank() * d);
        for (k, w) in piece.inclusion.iter().enumerate() {
            restriction
                .view_mut((k * d, 0), (d, rep.rank() * d))
                .copy_from(&fox_matrix(rep, &basis, w));
        }
        let c = quotient.transpose() * restriction * &zpar.coords;
        let r = linalg::rank(&c);
        min_gap = min_gap.min(r.sv_gap);
        image_dims.push(r.rank);
        let old = stacked.nrows();
        stacked = stacked.insert_rows(old, c.nrows(), 0.0);
        stacked.view_mut((old, 0), c.shape()).copy_from(&c);
    }
    let (ns, nrep) = linalg::nullspace(&stacked);
    min_gap = min_gap.min(nrep.sv_gap);
    Ok(ExactnessReport {
        parabolic_dim: zpar.dim(),
        coboundary_dim: b1.dim(),
        h1_par_dim: zpar.dim() - b1.dim(),
        kernel_dim: ns.ncols().saturating_sub(b1.dim()),
        image_dims,
        min_gap,
    })
}

#[derive(Clone, Debug)]
pub struct MomentOptions {
    /// Central-difference step `h` for the path's tangent cocycle; the reported
    /// pairing extrapolates from `h` and `h/2`.
    pub cocycle_step: f64,
    /// Same for `d/dt f_j`.
    pub derivative_step: f64,
    /// Coarsest step of the halving ladder used for the convergence ratio.
    pub ladder_step: f64,
    pub ladder_rungs: usize,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            cocycle_step: 2e-5,
            derivative_step: 2e-4,
            ladder_step: 3.2e-2,
            ladder_rungs: 12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub pairing: f64,
    pub derivative: f64,
    /// `|pairing − sign · derivative|`.
    pub defect: f64,
    pub sign: f64,
    /// `(E(h) − E(h/2)) / (E(h/2) − E(h/4))` for `E = pairing − sign·derivative`
    /// with both computed at step `h`; about 4 for second-order differences.
    /// NaN when every rung is at roundoff, i.e. the identity holds at all steps.
    pub convergence_ratio: f64,
    /// The `h` of the triple behind `convergence_ratio`.
    pub ratio_step: f64,
}

/// Relative size below which ladder differences count as roundoff.
const RATIO_FLOOR: f64 = 1e-6;

/// Checks that bending along cut `k` by `F_j` is Hamiltonian for `f_j` of that cut,
/// against the tangent of `path` at `t = 0`.
pub fn moment_check<P>(
    rep: &Arc<Representation>,
    cs: &CutSystem,
    k: usize,
    j: usize,
    path: P,
    opts: &MomentOptions,
) -> Result<MomentReport>
where
    P: Fn(f64) -> Result<Representation>,
{
    let xi = &cs.cuts[k].word;
    let f = spectral_generators(&rep.evaluate(xi))?;
    if j >= f.len() {
        return Err(Error::Config(format!("spectral index {j} out of range")));
    }
    let delta = bending_cocycle(rep, cs, k, &f[j])?;
    // The difference quotient misses the cocycle condition at O(h²), and the
    // pairing amplifies that residual badly on stretched points; project it out.
    let z1 = cocycle_space_basis(rep)?;
    let basis = SlBasis::new(rep.n());
    let pairing_at = |h: f64| -> Result<f64> {
        let raw = tangent_cocycle(rep, &path(h)?, &path(-h)?, h)?.coords(&basis);
        let projected = &z1.coords * (z1.coords.transpose() * raw);
        let beta = Cocycle::from_coords(rep.clone(), &basis, projected.as_slice());
        ambient_form(&delta, &beta)
    };
    let derivative_at = |h: f64| -> Result<f64> {
        let fp = f_values(&path(h)?.evaluate(xi))?[j];
        let fm = f_values(&path(-h)?.evaluate(xi))?[j];
        Ok((fp - fm) / (2.0 * h))
    };
    // One Richardson step on each central difference removes the h² term.
    let pairing = (4.0 * pairing_at(opts.cocycle_step / 2.0)? - pairing_at(opts.cocycle_step)?) / 3.0;
    let derivative = (4.0 * derivative_at(opts.derivative_step / 2.0)? - derivative_at(opts.derivative_step)?) / 3.0;
    let e = |h: f64| -> Result<f64> { Ok(pairing_at(h)? - MOMENT_SIGN * derivative_at(h)?) };
    // Walk the ladder upward from its finest rung and take the first triple whose
    // differences clear the roundoff floor of the pairing.
    let floor = RATIO_FLOOR * pairing.abs().max(1.0);
    let rungs = opts.ladder_rungs.max(3);
    let h = |k: usize| opts.ladder_step / 2f64.powi(k as i32);
    let mut values = vec![None; rungs];
    let mut at = |k: usize| -> Result<f64> {
        if values[k].is_none() {
            values[k] = Some(e(h(k))?);
        }
        Ok(values[k].unwrap())
    };
    let mut convergence_ratio = f64::NAN;
    let mut ratio_step = f64::NAN;
    for k in (0..rungs - 2).rev() {
        let (e0, e1, e2) = match (at(k), at(k + 1), at(k + 2)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => break,
        };
        if (e1 - e2).abs() >= floor {
            convergence_ratio = (e0 - e1) / (e1 - e2);
            ratio_step = h(k);
            break;
        }
    }
    Ok(MomentReport {
        pairing,
        derivative,
        defect: (pairing - MOMENT_SIGN * derivative).abs(),
        sign: MOMENT_SIGN,
        convergence_ratio,
        ratio_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::cocycle_space_basis;
    use crate::decomposition::{bending_flow, build_cut_system, BendingParameter};
    use crate::representation::{genus2_seed, random_traceless, ConstructionParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(seed: u64) -> Arc<Representation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Arc::new(genus2_seed(3, &mut rng, &ConstructionParams::default()).unwrap().representation().unwrap())
    }

    fn random_parabolic(rep: &Arc<Representation>, cs: &CutSystem, rng: &mut ChaCha8Rng) -> Cocycle {
        let space = parabolic_space_basis(rep, &cs.peripheral_cut_words()).unwrap();
        let c: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = space.combine(&c);
        a.scaled(1.0 / a.norm())
    }

    #[test]
    fn decomposition_defects_are_small() {
        let rep = point(5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for kind in CutKind::ALL {
            let cs = build_cut_system(kind);
            for _ in 0..5 {
                let a = random_parabolic(&rep, &cs, &mut rng);
                let b = random_parabolic(&rep, &cs, &mut rng);
                let r = verify_decomposition(&a, &b, &cs).unwrap();
                assert!(r.defect < 1e-7, "{kind}: {r:?}");
                let same = verify_decomposition(&a, &a, &cs).unwrap();
                assert!(same.lhs.abs() < 1e-9 && same.defect < 1e-9);
            }
        }
    }

    #[test]
    fn non_parabolic_input_rejected() {
        let rep = point(7);
        let cs = build_cut_system(CutKind::SeparatingGenus2);
        let z = cocycle_space_basis(&rep).unwrap();
        let a = z.basis[0].clone();
        assert!(matches!(verify_decomposition(&a, &a, &cs), Err(Error::NotParabolic { .. })));
    }

    #[test]
    fn exactness_separating() {
        let rep = point(8);
        let r = exactness_report(&rep, &build_cut_system(CutKind::SeparatingGenus2)).unwrap();
        assert_eq!(r.parabolic_dim, 22);
        assert_eq!(r.h1_par_dim, 14);
        assert_eq!(r.kernel_dim, 2);
        assert_eq!(r.image_dims, vec![6, 6]);
        assert!(r.min_gap > 1e4, "{}", r.min_gap);
    }

    #[test]
    fn normalization_kills_piece_values() {
        let rep = point(9);
        let cs = build_cut_system(CutKind::SeparatingGenus2);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = spectral_generators(&rep.evaluate(&cs.cuts[0].word)).unwrap();
        let bend = bending_cocycle(&rep, &cs, 0, &f[0]).unwrap();
        let alpha = bend.plus(&coboundary(&rep, &random_traceless(3, &mut rng, 0.3)));
        let alpha = alpha.scaled(1.0 / alpha.norm());
        for piece in 0..2 {
            let (shifted, _) = normalize_on_piece(&alpha, &cs, piece).unwrap();
            for w in &cs.pieces[piece].inclusion {
                assert!(shifted.evaluate_word(w).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn moment_trivial_paths() {
        let rep = point(11);
        let cs = build_cut_system(CutKind::PantsGenus2);
        let f2 = spectral_generators(&rep.evaluate(&cs.cuts[1].word)).unwrap();
        // Bending along the disjoint cut x2, measured on the cut x1.
        let path = |t: f64| bending_flow(&rep, &cs, &BendingParameter { cut: 1, x: f2[0].clone(), t });
        for j in 0..2 {
            let r = moment_check(&rep, &cs, 0, j, path, &MomentOptions::default()).unwrap();
            assert!(r.derivative.abs() < 1e-8 && r.pairing.abs() < 1e-6, "{r:?}");
        }
        // Bending along the cut itself.
        let f1 = spectral_generators(&rep.evaluate(&cs.cuts[0].word)).unwrap();
        let path = |t: f64| bending_flow(&rep, &cs, &BendingParameter { cut: 0, x: f1[1].clone(), t });
        let r = moment_check(&rep, &cs, 0, 0, path, &MomentOptions::default()).unwrap();
        assert!(r.derivative.abs() < 1e-8 && r.pairing.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn moment_random_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let seed = genus2_seed(3, &mut rng, &ConstructionParams::default()).unwrap();
        let rep = Arc::new(seed.representation().unwrap());
        let ya = random_traceless(3, &mut rng, 0.3);
        let yb = random_traceless(3, &mut rng, 0.3);
        let path = |t: f64| seed.deformed(&ya, &yb, t);
        for kind in CutKind::ALL {
            let cs = build_cut_system(kind);
            for k in 0..cs.cuts.len() {
                for j in 0..2 {
                    let r = moment_check(&rep, &cs, k, j, path, &MomentOptions::default()).unwrap();
                    eprintln!("{kind} cut {k} j {j}: {r:?}");
                    assert!(r.defect < 1e-5);
                }
            }
        }
    }
}
