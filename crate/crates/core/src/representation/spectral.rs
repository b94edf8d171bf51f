use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

/// Minimal ratio `|λ_i| / |λ_{i+1}|` accepted as a loxodromic gap.
pub const GAP_GATE: f64 = 1.0 + 1e-8;

const IMAG_TOL: f64 = 1e-9;
const DET_TOL: f64 = 1e-8;

/// Eigen-decomposition of a purely loxodromic matrix.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Eigenvalues sorted by decreasing absolute value.
    pub eigenvalues: Vec<f64>,
    /// Right eigenvectors `u_i` as unit columns, same order.
    pub flag_basis: DMatrix<f64>,
    /// Left eigenvectors `v_i` as columns, normalized so `v_iᵀ u_i = 1`.
    pub dual_basis: DMatrix<f64>,
    /// `-1` when an even-dimensional lift had all eigenvalues negative.
    pub lift_sign: f64,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectral projector `P_i = u_i v_iᵀ`.
    pub fn projector(&self, i: usize) -> DMatrix<f64> {
        self.flag_basis.column(i) * self.dual_basis.column(i).transpose()
    }

    /// `‖Σ λ_i u_i v_iᵀ − g‖_F / ‖g‖_F`.
    pub fn reconstruction_error(&self, g: &DMatrix<f64>) -> f64 {
        let mut m = DMatrix::zeros(self.n(), self.n());
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            m += self.projector(i) * l;
        }
        (m - g).norm() / g.norm()
    }
}

fn not_lox(reason: impl Into<String>) -> Error {
    Error::NotLoxodromic {
        reason: reason.into(),
    }
}

/// Right null vector of `m − λI`: smallest right singular vector, then inverse iteration.
fn eigenvector(m: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = m.nrows();
    let shifted = m - DMatrix::<f64>::identity(n, n) * lambda;
    let svd = shifted.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let k = svd.singular_values.imin();
    let mut u: DVector<f64> = v_t.row(k).transpose();
    if let Some(lu) = Some(shifted.lu()) {
        for _ in 0..2 {
            match lu.solve(&u) {
                Some(next) if next.iter().all(|x| x.is_finite()) && next.norm() > 0.0 => {
                    u = &next / next.norm();
                }
                _ => break,
            }
        }
    }
    // Deterministic sign: largest-magnitude entry positive.
    let imax = u.iamax();
    if u[imax] < 0.0 {
        u = -u;
    }
    u
}

/// Sorted spectral data of a purely loxodromic `g`.
pub fn spectral(g: &DMatrix<f64>) -> Result<SpectralData> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n {
        return Err(Error::Dimension("spectral data needs a square matrix".into()));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(not_lox("non-finite entries"));
    }
    let eig = g.clone().complex_eigenvalues();
    let mut lambdas = Vec::with_capacity(n);
    for z in eig.iter() {
        if z.im.abs() > IMAG_TOL * z.norm().max(1.0) {
            return Err(not_lox(format!("complex eigenvalue {:.6}{:+.6}i", z.re, z.im)));
        }
        lambdas.push(z.re);
    }
    lambdas.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    for i in 0..n - 1 {
        let ratio = lambdas[i].abs() / lambdas[i + 1].abs();
        if ratio.is_nan() || ratio < GAP_GATE {
            return Err(not_lox(format!(
                "eigenvalue gap |λ{}|/|λ{}| = {ratio:.3e} below gate",
                i + 1,
                i + 2
            )));
        }
    }
    // Two-sided Rayleigh refinement against g itself.
    let gt = g.transpose();
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for (i, l) in lambdas.iter_mut().enumerate() {
        let mut ui = eigenvector(g, *l);
        let mut vi = eigenvector(&gt, *l);
        for _ in 0..2 {
            let pairing = vi.dot(&ui);
            *l = vi.dot(&(g * &ui)) / pairing;
            ui = eigenvector(g, *l);
            vi = eigenvector(&gt, *l);
        }
        let pairing = vi.dot(&ui);
        u.set_column(i, &ui);
        v.set_column(i, &(vi / pairing));
    }
    let mut lift_sign = 1.0;
    if lambdas.iter().all(|&l| l < 0.0) && n % 2 == 0 {
        lift_sign = -1.0;
    } else if lambdas.iter().any(|&l| l <= 0.0) {
        return Err(not_lox("eigenvalues are not all positive"));
    }
    // Consistency with the determinant as computed, which for long products can
    // itself sit visibly off 1.
    let prod: f64 = lambdas.iter().map(|l| l.abs()).product();
    let det = g.determinant().abs();
    if !((prod / det - 1.0).abs() <= DET_TOL) {
        return Err(not_lox(format!("product of |λ_i| is {prod}, determinant {det}")));
    }
    Ok(SpectralData {
        eigenvalues: lambdas.iter().map(|l| l * lift_sign).collect(),
        flag_basis: u,
        dual_basis: v,
        lift_sign,
    })
}

/// Length data of a loxodromic element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthInvariants {
    /// `log(|λ_i| / |λ_{i+1}|)` for `i = 1, …, n−1`.
    pub l: Vec<f64>,
    /// `log(|λ_1| / |λ_3|)`, only for `n = 3`.
    pub ell: Option<f64>,
    /// `3 log|λ_2|`, only for `n = 3`.
    pub m: Option<f64>,
}

pub fn length_invariants(g: &DMatrix<f64>) -> Result<LengthInvariants> {
    let sd = spectral(g)?;
    let l = f_values_from(&sd.eigenvalues);
    let (ell, m) = if sd.n() == 3 {
        let a: Vec<f64> = sd.eigenvalues.iter().map(|x| x.abs().ln()).collect();
        (Some(a[0] - a[2]), Some(3.0 * a[1]))
    } else {
        (None, None)
    };
    Ok(LengthInvariants { l, ell, m })
}

fn f_values_from(lambdas: &[f64]) -> Vec<f64> {
    lambdas
        .windows(2)
        .map(|w| (w[0].abs() / w[1].abs()).ln())
        .collect()
}

/// The invariant functions `f_j(g) = log(λ_j / λ_{j+1})`.
pub fn f_values(g: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(f_values_from(&spectral(g)?.eigenvalues))
}

/// `F_j = P_j − P_{j+1}`; `Tr(F_j X)` is the derivative of `f_j` along `g·exp(tX)`.
pub fn spectral_generators(g: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
    let sd = spectral(g)?;
    Ok((0..sd.n() - 1)
        .map(|j| sd.projector(j) - sd.projector(j + 1))
        .collect())
}
