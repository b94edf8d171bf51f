//! Dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

/// Relative singular-value cut used for every rank decision.
pub const RANK_CUT: f64 = 1e-8;

/// Smallest singular-value gap accepted before a rank decision is refused.
pub const MIN_GAP: f64 = 1e3;

/// Orthonormal basis of `sl_n` for the Frobenius inner product `Tr(XᵀY)`.
#[derive(Clone, Debug)]
pub struct SlBasis {
    n: usize,
    elements: Vec<DMatrix<f64>>,
}

impl SlBasis {
    pub fn new(n: usize) -> Self {
        let mut elements = Vec::with_capacity(n * n - 1);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut e = DMatrix::zeros(n, n);
                    e[(i, j)] = 1.0;
                    elements.push(e);
                }
            }
        }
        // Diagonal part: normalised (E_11 + … + E_kk − k E_{k+1,k+1}).
        for k in 1..n {
            let mut e = DMatrix::zeros(n, n);
            for i in 0..k {
                e[(i, i)] = 1.0;
            }
            e[(k, k)] = -(k as f64);
            let norm = ((k * k + k) as f64).sqrt();
            elements.push(e / norm);
        }
        Self { n, elements }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn coords(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.elements.iter().map(|e| e.dot(x)))
    }

    pub fn from_coords(&self, c: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (e, &ci) in self.elements.iter().zip(c) {
            out += e * ci;
        }
        out
    }

    /// Matrix of `X ↦ g X g⁻¹` in this basis.
    pub fn adjoint_matrix(&self, g: &DMatrix<f64>, g_inv: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, e) in self.elements.iter().enumerate() {
            let img = g * e * g_inv;
            m.set_column(k, &self.coords(&img));
        }
        m
    }
}

/// Result of an SVD rank decision.
#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values in decreasing order.
    pub singular_values: Vec<f64>,
    /// Ratio between the smallest kept and the largest discarded singular value.
    pub sv_gap: f64,
}

impl RankReport {
    pub fn require_gap(&self, required: f64) -> Result<()> {
        if self.sv_gap < required {
            Err(Error::IllConditioned {
                gap: self.sv_gap,
                required,
            })
        } else {
            Ok(())
        }
    }
}

fn rank_from_sorted(sv: &[f64], rel_cut: f64) -> (usize, f64) {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, f64::INFINITY);
    }
    let rank = sv.iter().take_while(|&&s| s > rel_cut * smax).count();
    let floor = f64::EPSILON * smax;
    let gap = match (rank.checked_sub(1).map(|i| sv[i]), sv.get(rank)) {
        (None, _) => f64::INFINITY,
        (Some(kept), Some(&dropped)) => kept / dropped.max(floor),
        (Some(kept), None) => kept / floor,
    };
    (rank, gap)
}

fn sorted_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    // Pad to at least as many rows as columns so V is complete.
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = DMatrix::zeros(c, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        v.set_column(k, &v_t.row(i).transpose());
    }
    (sv, v)
}

/// Rank of `a` with the relative cut [`RANK_CUT`].
pub fn rank(a: &DMatrix<f64>) -> RankReport {
    rank_with_cut(a, RANK_CUT)
}

pub fn rank_with_cut(a: &DMatrix<f64>, rel_cut: f64) -> RankReport {
    let sv: Vec<f64> = if a.nrows() == 0 || a.ncols() == 0 {
        Vec::new()
    } else {
        let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    };
    let (rank, sv_gap) = rank_from_sorted(&sv, RANK_CUT.max(rel_cut));
    RankReport {
        rank,
        singular_values: sv,
        sv_gap,
    }
}

/// Orthonormal basis (as columns) of the right nullspace of `a`.
pub fn nullspace(a: &DMatrix<f64>) -> (DMatrix<f64>, RankReport) {
    let c = a.ncols();
    if a.nrows() == 0 {
        return (
            DMatrix::identity(c, c),
            RankReport {
                rank: 0,
                singular_values: Vec::new(),
                sv_gap: f64::INFINITY,
            },
        );
    }
    let (sv, v) = sorted_svd(a);
    let (rank, sv_gap) = rank_from_sorted(&sv, RANK_CUT);
    let basis = v.columns(rank, c - rank).into_owned();
    (
        basis,
        RankReport {
            rank,
            singular_values: sv,
            sv_gap,
        },
    )
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn range(a: &DMatrix<f64>) -> (DMatrix<f64>, RankReport) {
    let (r, c) = a.shape();
    let (sv, u) = if r == 0 || c == 0 {
        (Vec::new(), DMatrix::zeros(r, 0))
    } else {
        let (sv, v) = sorted_svd(&a.transpose());
        (sv, v)
    };
    let (rank, sv_gap) = rank_from_sorted(&sv, RANK_CUT);
    let basis = u.columns(0, rank).into_owned();
    (
        basis,
        RankReport {
            rank,
            singular_values: sv,
            sv_gap,
        },
    )
}

/// Orthonormal basis of the orthogonal complement of the column space of `a`.
pub fn cokernel(a: &DMatrix<f64>) -> (DMatrix<f64>, RankReport) {
    nullspace(&a.transpose())
}

/// Minimal-norm least-squares solution of `a x = b` and its residual `‖a x − b‖`.
///
/// The SVD solve is followed by a few steps of iterative refinement; for the
/// badly scaled adjoint operators of long words the plain solve leaves residuals
/// several orders of magnitude above `ε‖a‖‖x‖`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let mut x = svd.solve(b, eps).expect("both factors computed");
    let mut residual = (a * &x - b).norm();
    for _ in 0..3 {
        let r = b - a * &x;
        let candidate = &x + svd.solve(&r, eps).expect("both factors computed");
        let next = (a * &candidate - b).norm();
        if next >= residual {
            break;
        }
        x = candidate;
        residual = next;
    }
    (x, residual)
}

pub fn frobenius(x: &DMatrix<f64>) -> f64 {
    x.norm()
}

/// `Tr(X Y)`.
pub fn trace_product(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    x.transpose().dot(y)
}

pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().exp()
}

pub fn inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.clone()
        .try_inverse()
        .ok_or_else(|| Error::Dimension("matrix is not invertible".into()))
}
