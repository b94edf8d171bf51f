use std::sync::Arc;

use nalgebra::DMatrix;

use super::cocycle::{coboundary, Cocycle};
use crate::linalg::{self, RankReport, SlBasis, MIN_GAP};
use crate::representation::Representation;
use crate::word_algebra::{GroupRingElement, Word};
use crate::Result;

/// A basis of a space of cocycles with the rank decision that produced it.
#[derive(Clone, Debug)]
pub struct CocycleSpace {
    pub basis: Vec<Cocycle>,
    /// Stacked `sl_n` coordinates of the basis as orthonormal columns.
    pub coords: DMatrix<f64>,
    pub report: RankReport,
}

impl CocycleSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ c_i α_i` for the given coefficient vector.
    pub fn combine(&self, coeffs: &[f64]) -> Cocycle {
        let terms: Vec<(f64, &Cocycle)> = coeffs.iter().copied().zip(&self.basis).collect();
        let base = self.basis[0].base().clone();
        Cocycle::linear_combination(&base, &terms)
    }
}

/// Matrix of `α ↦ α(w)` on stacked coordinates, assembled from Fox derivatives of `w`.
pub fn fox_matrix(rep: &Representation, basis: &SlBasis, w: &Word) -> DMatrix<f64> {
    let d = basis.dim();
    let rank = rep.rank();
    let word = GroupRingElement::from_word(w.clone());
    let mut m = DMatrix::zeros(d, d * rank);
    for s in 0..rank {
        let deriv = word.fox_derivative(s);
        let mut block = DMatrix::zeros(d, d);
        for (u, c) in deriv.terms() {
            let c: f64 = num_traits::ToPrimitive::to_f64(c).expect("coefficient fits in f64");
            let g = rep.evaluate(u);
            let g_inv = rep.evaluate(&u.inverse());
            block += basis.adjoint_matrix(&g, &g_inv) * c;
        }
        m.view_mut((0, s * d), (d, d)).copy_from(&block);
    }
    m
}

fn space_from_nullspace(rep: &Arc<Representation>, basis: &SlBasis, m: &DMatrix<f64>) -> Result<CocycleSpace> {
    // Rows come from words of very different lengths; equilibrate so that each
    // constraint is met to its own precision rather than that of the largest block.
    let mut m = m.clone();
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let (ns, report) = linalg::nullspace(&m);
    report.require_gap(MIN_GAP)?;
    let cocycles = ns
        .column_iter()
        .map(|c| Cocycle::from_coords(rep.clone(), basis, c.as_slice()))
        .collect();
    Ok(CocycleSpace {
        basis: cocycles,
        coords: ns,
        report,
    })
}

/// Orthonormal basis of `Z¹`: the kernel of `α ↦ α(R)`.
pub fn cocycle_space_basis(rep: &Arc<Representation>) -> Result<CocycleSpace> {
    let basis = SlBasis::new(rep.n());
    let m = fox_matrix(rep, &basis, &rep.presentation().relator());
    space_from_nullspace(rep, &basis, &m)
}

/// Orthonormal basis of `B¹`, the image of `X ↦ dX`.
pub fn coboundary_space_basis(rep: &Arc<Representation>) -> Result<CocycleSpace> {
    let basis = SlBasis::new(rep.n());
    let d = basis.dim();
    let mut m = DMatrix::zeros(d * rep.rank(), d);
    for (k, e) in basis.elements().iter().enumerate() {
        m.set_column(k, &coboundary(rep, e).coords(&basis));
    }
    let (range, report) = linalg::range(&m);
    report.require_gap(MIN_GAP)?;
    let cocycles = range
        .column_iter()
        .map(|c| Cocycle::from_coords(rep.clone(), &basis, c.as_slice()))
        .collect();
    Ok(CocycleSpace {
        basis: cocycles,
        coords: range,
        report,
    })
}

/// Orthonormal basis of the cocycles whose value on every peripheral word lies in
/// the image of `Ad_{ρ(p)} − I`.
pub fn parabolic_space_basis(rep: &Arc<Representation>, peripheral: &[Word]) -> Result<CocycleSpace> {
    let basis = SlBasis::new(rep.n());
    let d = basis.dim();
    let mut rows = fox_matrix(rep, &basis, &rep.presentation().relator());
    for p in peripheral {
        let g = rep.evaluate(p);
        let g_inv = rep.evaluate(&p.inverse());
        let a = basis.adjoint_matrix(&g, &g_inv) - DMatrix::<f64>::identity(d, d);
        let (coker, report) = linalg::cokernel(&a);
        report.require_gap(MIN_GAP)?;
        let constraint = coker.transpose() * fox_matrix(rep, &basis, p);
        let old = rows.nrows();
        rows = rows.insert_rows(old, constraint.nrows(), 0.0);
        rows.view_mut((old, 0), constraint.shape()).copy_from(&constraint);
    }
    space_from_nullspace(rep, &basis, &rows)
}
