//! Flag invariants: triple ratios, double ratios and the rotation condition.
//!
//! A flag is stored as a full ordered basis; the `k`-plane is the span of its first
//! `k` columns. Every determinant is taken on unit-normalized columns, so the values
//! are independent of how the basis vectors are scaled.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::representation::spectral;
use crate::{Error, Result};

/// Smallest admissible `|det|` of a normalized stacked wedge.
pub const GENERICITY_GATE: f64 = 1e-10;

/// Flags with a basis condition number above this are rejected as rank deficient.
const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Flag {
    basis: DMatrix<f64>,
}

impl Flag {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.nrows() < 2 {
            return Err(Error::Dimension(format!(
                "a flag needs a square basis of size at least 2, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let flag = Flag { basis };
        let cond = flag.condition_number();
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::DegenerateConfiguration {
                value: 1.0 / cond,
                gate: 1.0 / MAX_CONDITION,
            });
        }
        Ok(flag)
    }

    /// Flag spanned by the columns given as vectors, first vector first.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("flag columns must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |r, c| columns[c][r]))
    }

    pub fn standard(n: usize) -> Self {
        Flag {
            basis: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// 2-norm condition number of the basis.
    pub fn condition_number(&self) -> f64 {
        let sv = self.basis.clone().svd(false, false).singular_values;
        sv.max() / sv.min()
    }

    /// Image flag `g·F`.
    pub fn transformed(&self, g: &DMatrix<f64>) -> Result<Self> {
        Self::new(g * &self.basis)
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        self.basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Flag {
    type Error = Error;

    fn try_from(columns: Vec<Vec<f64>>) -> Result<Self> {
        Flag::from_columns(&columns)
    }
}

impl From<Flag> for Vec<Vec<f64>> {
    fn from(f: Flag) -> Self {
        f.columns()
    }
}

/// Attracting flag of a loxodromic `g`: eigenvectors by decreasing `|λ|`.
pub fn flag_of(g: &DMatrix<f64>) -> Result<Flag> {
    Flag::new(spectral(g)?.flag_basis)
}

/// Determinant of the stacked leading columns `A^{(a)} ∧ B^{(b)} ∧ …`, with every
/// column normalized to unit length.
pub fn wedge(parts: &[(&Flag, usize)]) -> Result<f64> {
    let n = parts.first().map(|(f, _)| f.n()).unwrap_or(0);
    let total: usize = parts.iter().map(|(_, k)| k).sum();
    if parts.iter().any(|(f, k)| f.n() != n || *k > n) || total != n {
        return Err(Error::Dimension(format!(
            "wedge needs leading blocks summing to n = {n}, got {total}"
        )));
    }
    let mut m = DMatrix::zeros(n, n);
    let mut col = 0;
    for (flag, k) in parts {
        for j in 0..*k {
            let v = flag.basis.column(j);
            m.set_column(col, &(v / v.norm()));
            col += 1;
        }
    }
    Ok(m.determinant())
}

fn gated(parts: &[(&Flag, usize)]) -> Result<f64> {
    let d = wedge(parts)?;
    if !(d.abs() >= GENERICITY_GATE) {
        return Err(Error::DegenerateConfiguration {
            value: d.abs(),
            gate: GENERICITY_GATE,
        });
    }
    Ok(d)
}

fn same_n(flags: &[&Flag]) -> Result<usize> {
    let n = flags[0].n();
    if flags.iter().any(|f| f.n() != n) {
        return Err(Error::Dimension("flags of different dimensions".into()));
    }
    Ok(n)
}

/// Index triples `(i, j, k)` with positive entries summing to `n`.
pub fn admissible_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 1..n {
        for j in 1..n - i {
            out.push((i, j, n - i - j));
        }
    }
    out
}

/// Triple ratio `T_{i,j,k}(A, B, C)`.
pub fn triple_ratio(a: &Flag, b: &Flag, c: &Flag, i: usize, j: usize, k: usize) -> Result<f64> {
    let n = same_n(&[a, b, c])?;
    if i == 0 || j == 0 || k == 0 || i + j + k != n {
        return Err(Error::Dimension(format!(
            "triple ratio indices ({i}, {j}, {k}) must be positive with sum {n}"
        )));
    }
    let num = gated(&[(a, i + 1), (b, j), (c, k - 1)])?
        * gated(&[(a, i), (b, j - 1), (c, k + 1)])?
        * gated(&[(a, i - 1), (b, j + 1), (c, k)])?;
    let den = gated(&[(a, i - 1), (b, j), (c, k + 1)])?
        * gated(&[(a, i), (b, j + 1), (c, k - 1)])?
        * gated(&[(a, i + 1), (b, j - 1), (c, k)])?;
    Ok(num / den)
}

/// Double ratio `D_i(E, F, X, Y)`, including the leading minus sign.
pub fn double_ratio(e: &Flag, f: &Flag, x: &Flag, y: &Flag, i: usize) -> Result<f64> {
    let n = same_n(&[e, f, x, y])?;
    if i == 0 || i >= n {
        return Err(Error::Dimension(format!("double ratio index {i} outside 1..{n}")));
    }
    let first = gated(&[(e, i), (f, n - 1 - i), (x, 1)])? / gated(&[(e, i), (f, n - 1 - i), (y, 1)])?;
    let second = gated(&[(e, i - 1), (f, n - i), (y, 1)])? / gated(&[(e, i - 1), (f, n - i), (x, 1)])?;
    Ok(-first * second)
}

/// Largest `|log|T_{i,j,k}(A,B,C)| − log|T_{j,k,i}(B,C,A)||` (and the third rotation)
/// over admissible triples. A sign disagreement counts as an infinite deviation.
pub fn rotation_check(a: &Flag, b: &Flag, c: &Flag) -> Result<f64> {
    let n = same_n(&[a, b, c])?;
    let mut worst: f64 = 0.0;
    for (i, j, k) in admissible_triples(n) {
        let t1 = triple_ratio(a, b, c, i, j, k)?;
        let t2 = triple_ratio(b, c, a, j, k, i)?;
        let t3 = triple_ratio(c, a, b, k, i, j)?;
        for t in [t2, t3] {
            let dev = if t.signum() == t1.signum() {
                (t1.abs().ln() - t.abs().ln()).abs()
            } else {
                f64::INFINITY
            };
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// `τ_{i,j,k} = log T_{i,j,k}(A, B, C)` for every admissible triple.
pub fn triangle_invariants(a: &Flag, b: &Flag, c: &Flag) -> Result<Vec<((usize, usize, usize), f64)>> {
    let n = same_n(&[a, b, c])?;
    admissible_triples(n)
        .into_iter()
        .map(|(i, j, k)| Ok(((i, j, k), log_positive(triple_ratio(a, b, c, i, j, k)?)?)))
        .collect()
}

/// `σ_i = log D_i(E, F, X, Y)` for `i = 1, …, n−1`.
pub fn shear_invariants(e: &Flag, f: &Flag, x: &Flag, y: &Flag) -> Result<Vec<f64>> {
    let n = same_n(&[e, f, x, y])?;
    (1..n).map(|i| log_positive(double_ratio(e, f, x, y, i)?)).collect()
}

fn log_positive(v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::DegenerateConfiguration { value: v, gate: 0.0 })
    }
}

/// Flags bundled with their genericity certificate.
#[derive(Clone, Debug)]
pub struct FlagTuple {
    pub flags: Vec<Flag>,
    /// Smallest normalized wedge determinant among those the invariants use.
    pub min_wedge: f64,
}

impl FlagTuple {
    /// Certify a triple for every triangle invariant; the rotated invariants use the
    /// same wedges.
    pub fn triple(a: Flag, b: Flag, c: Flag) -> Result<Self> {
        let n = same_n(&[&a, &b, &c])?;
        let mut min_wedge = f64::INFINITY;
        for (i, j, k) in admissible_triples(n) {
            for (p, q, r) in [
                (i + 1, j, k - 1),
                (i, j - 1, k + 1),
                (i - 1, j + 1, k),
                (i - 1, j, k + 1),
                (i, j + 1, k - 1),
                (i + 1, j - 1, k),
            ] {
                min_wedge = min_wedge.min(gated(&[(&a, p), (&b, q), (&c, r)])?.abs());
            }
        }
        Ok(FlagTuple {
            flags: vec![a, b, c],
            min_wedge,
        })
    }

    /// Certify a quadruple `(E, F, X, Y)` for all double ratios.
    pub fn quadruple(e: Flag, f: Flag, x: Flag, y: Flag) -> Result<Self> {
        let n = same_n(&[&e, &f, &x, &y])?;
        let mut min_wedge = f64::INFINITY;
        for i in 1..n {
            for z in [&x, &y] {
                min_wedge = min_wedge
                    .min(gated(&[(&e, i), (&f, n - 1 - i), (z, 1)])?.abs())
                    .min(gated(&[(&e, i - 1), (&f, n - i), (z, 1)])?.abs());
            }
        }
        Ok(FlagTuple {
            flags: vec![e, f, x, y],
            min_wedge,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{irreducible_embed, random_sl, sl2_hyperbolic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_flag(n: usize, rng: &mut ChaCha8Rng) -> Flag {
        Flag::new(random_sl(n, rng, 0.8)).unwrap()
    }

    /// Osculating flag of the conic `t ↦ (1, t, t²)`; `None` is the point at infinity.
    fn conic_flag(t: Option<f64>) -> Flag {
        match t {
            Some(t) => Flag::from_columns(&[vec![1.0, t, t * t], vec![0.0, 1.0, 2.0 * t], vec![0.0, 0.0, 1.0]])
                .unwrap(),
            None => Flag::from_columns(&[vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap(),
        }
    }

    #[test]
    fn flag_of_diagonal_is_standard() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 0.5, 0.5]));
        assert!(flag_of(&g).is_err());
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0, 0.25]));
        let f = flag_of(&g).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((f.basis() - expected).norm() < 1e-12);
    }

    #[test]
    fn flag_of_square_matches() {
        let g = irreducible_embed(&sl2_hyperbolic(0.7, 0.4), 3);
        let f1 = flag_of(&g).unwrap();
        let f2 = flag_of(&(&g * &g)).unwrap();
        assert!((f1.basis() - f2.basis()).norm() < 1e-10);
    }

    #[test]
    fn conic_triple_ratio_is_one() {
        for (s, t, u) in [(0.0, 1.0, 3.0), (-1.2, 0.4, 2.5)] {
            let (a, b, c) = (conic_flag(Some(s)), conic_flag(Some(t)), conic_flag(Some(u)));
            let v = triple_ratio(&a, &b, &c, 1, 1, 1).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn interleaved_conic_quadruple_is_positive() {
        let (e, f, x, y) = (
            conic_flag(Some(0.0)),
            conic_flag(Some(1.5)),
            conic_flag(Some(0.7)),
            conic_flag(Some(2.3)),
        );
        for i in 1..3 {
            let d = double_ratio(&e, &f, &x, &y, i).unwrap();
            assert!(d > 0.0, "D_{i} = {d}");
            let swapped = double_ratio(&e, &f, &y, &x, i).unwrap();
            assert!((d * swapped - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_condition_on_random_flags() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [3, 4, 5] {
            let (a, b, c) = (random_flag(n, &mut rng), random_flag(n, &mut rng), random_flag(n, &mut rng));
            assert!(rotation_check(&a, &b, &c).unwrap() < 1e-10);
        }
    }

    #[test]
    fn scaling_and_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, c) = (random_flag(4, &mut rng), random_flag(4, &mut rng), random_flag(4, &mut rng));
        let t = triple_ratio(&a, &b, &c, 1, 2, 1).unwrap();
        let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -0.2, 7.0, 0.5]));
        let a2 = Flag::new(a.basis() * &scale).unwrap();
        assert!((triple_ratio(&a2, &b, &c, 1, 2, 1).unwrap() - t).abs() < 1e-10 * t.abs().max(1.0));
        let g = random_sl(4, &mut rng, 0.5);
        let moved: Vec<Flag> = [&a, &b, &c].iter().map(|f| f.transformed(&g).unwrap()).collect();
        let t2 = triple_ratio(&moved[0], &moved[1], &moved[2], 1, 2, 1).unwrap();
        assert!((t2 - t).abs() < 1e-8 * t.abs());
    }

    #[test]
    fn degenerate_triple_is_an_error() {
        let a = conic_flag(Some(0.5));
        let b = a.clone();
        let c = conic_flag(Some(2.0));
        assert!(matches!(
            rotation_check(&a, &b, &c),
            Err(Error::DegenerateConfiguration { .. })
        ));
        assert!(FlagTuple::triple(a, b, c).is_err());
    }

    #[test]
    fn flag_json_roundtrip() {
        let f = conic_flag(Some(0.3));
        let s = serde_json::to_string(&f).unwrap();
        let back: Flag = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<Flag>("[[1,0],[2,0]]").is_err());
    }
}
