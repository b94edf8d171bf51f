use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::linalg::SlBasis;
use crate::representation::Representation;
use crate::word_algebra::{GroupRingElement, Word};
use crate::{Error, Result};

/// A 1-cocycle given by its values on the generators of the base presentation.
#[derive(Clone, Debug)]
pub struct Cocycle {
    base: Arc<Representation>,
    values: Vec<DMatrix<f64>>,
}

impl Cocycle {
    pub fn new(base: Arc<Representation>, values: Vec<DMatrix<f64>>) -> Result<Self> {
        if values.len() != base.rank() {
            return Err(Error::Dimension(format!(
                "{} cocycle values for {} generators",
                values.len(),
                base.rank()
            )));
        }
        let n = base.n();
        if let Some(v) = values.iter().find(|v| v.shape() != (n, n)) {
            return Err(Error::Dimension(format!(
                "cocycle value is {}x{}, expected {n}x{n}",
                v.nrows(),
                v.ncols()
            )));
        }
        Ok(Self { base, values })
    }

    pub fn zero(base: Arc<Representation>) -> Self {
        let n = base.n();
        let values = vec![DMatrix::zeros(n, n); base.rank()];
        Self { base, values }
    }

    /// Builds the cocycle from stacked `sl_n` coordinates, one block per generator.
    pub fn from_coords(base: Arc<Representation>, basis: &SlBasis, coords: &[f64]) -> Self {
        let d = basis.dim();
        let values = (0..base.rank())
            .map(|s| basis.from_coords(&coords[s * d..(s + 1) * d]))
            .collect();
        Self { base, values }
    }

    pub fn coords(&self, basis: &SlBasis) -> DVector<f64> {
        let d = basis.dim();
        let mut out = DVector::zeros(d * self.values.len());
        for (s, v) in self.values.iter().enumerate() {
            out.rows_mut(s * d, d).copy_from(&basis.coords(v));
        }
        out
    }

    pub fn base(&self) -> &Arc<Representation> {
        &self.base
    }

    pub fn values(&self) -> &[DMatrix<f64>] {
        &self.values
    }

    pub fn value(&self, gen: usize) -> &DMatrix<f64> {
        &self.values[gen]
    }

    /// `α(w)` by the extension rule.
    pub fn evaluate_word(&self, w: &Word) -> DMatrix<f64> {
        let n = self.base.n();
        let mut acc = DMatrix::zeros(n, n);
        let mut prefix = DMatrix::<f64>::identity(n, n);
        let mut prefix_inv = DMatrix::<f64>::identity(n, n);
        for l in w.letters() {
            let s = l.generator();
            if l.is_inverse() {
                // α(s⁻¹) = −Ad_{ρ(s)⁻¹} α(s); fold it into the prefix update.
                prefix = prefix * self.base.inverse_image(s);
                prefix_inv = self.base.image(s) * prefix_inv;
                acc -= &prefix * &self.values[s] * &prefix_inv;
            } else {
                acc += &prefix * &self.values[s] * &prefix_inv;
                prefix = prefix * self.base.image(s);
                prefix_inv = self.base.inverse_image(s) * prefix_inv;
            }
        }
        acc
    }

    /// Linear extension of [`Cocycle::evaluate_word`] to the group ring.
    pub fn evaluate(&self, a: &GroupRingElement) -> DMatrix<f64> {
        let n = self.base.n();
        let mut out = DMatrix::zeros(n, n);
        for (w, c) in a.terms() {
            let c: f64 = num_traits::ToPrimitive::to_f64(c).expect("coefficient fits in f64");
            out += self.evaluate_word(w) * c;
        }
        out
    }

    /// `‖α(R)‖_F` for the relator `R` of the base presentation.
    pub fn relator_residual(&self) -> f64 {
        self.evaluate_word(&self.base.presentation().relator()).norm()
    }

    /// Frobenius norm of the stacked generator values.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }

    /// `Σ c_i α_i`; all cocycles must share the base (checked by pointer, then shape).
    pub fn linear_combination(base: &Arc<Representation>, terms: &[(f64, &Cocycle)]) -> Cocycle {
        let mut out = Cocycle::zero(base.clone());
        for (c, a) in terms {
            for (o, v) in out.values.iter_mut().zip(&a.values) {
                *o += v * *c;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Cocycle {
        Cocycle {
            base: self.base.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn plus(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            base: self.base.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn minus(&self, other: &Cocycle) -> Cocycle {
        self.plus(&other.scaled(-1.0))
    }

    /// The same values over a different (e.g. re-wrapped) base.
    pub fn rebase(&self, base: Arc<Representation>) -> Result<Cocycle> {
        Cocycle::new(base, self.values.clone())
    }
}

/// `dX`: `γ ↦ Ad_{ρ(γ)} X − X`.
pub fn coboundary(rep: &Arc<Representation>, x: &DMatrix<f64>) -> Cocycle {
    let values = (0..rep.rank())
        .map(|s| rep.image(s) * x * rep.inverse_image(s) - x)
        .collect();
    Cocycle {
        base: rep.clone(),
        values,
    }
}

/// Central-difference tangent cocycle `s ↦ (ρ_{+h}(s) − ρ_{−h}(s)) / 2h · ρ(s)⁻¹`.
pub fn tangent_cocycle(
    base: &Arc<Representation>,
    plus: &Representation,
    minus: &Representation,
    h: f64,
) -> Result<Cocycle> {
    if plus.rank() != base.rank() || minus.rank() != base.rank() {
        return Err(Error::Dimension("path representations have different ranks".into()));
    }
    let values = (0..base.rank())
        .map(|s| (plus.image(s) - minus.image(s)) / (2.0 * h) * base.inverse_image(s))
        .collect();
    Cocycle::new(base.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::representation::{pants_representation, random_traceless, ConstructionParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Arc<Representation>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rep = pants_representation(3, &mut rng, &ConstructionParams::default()).unwrap();
        (Arc::new(rep), rng)
    }

    fn random_cocycle(rep: &Arc<Representation>, rng: &mut ChaCha8Rng) -> Cocycle {
        let values = (0..rep.rank()).map(|_| random_traceless(3, rng, 1.0)).collect();
        Cocycle::new(rep.clone(), values).unwrap()
    }

    #[test]
    fn identity_and_inverse() {
        let (rep, mut rng) = setup();
        let a = random_cocycle(&rep, &mut rng);
        assert_eq!(a.evaluate_word(&Word::identity()).norm(), 0.0);
        let w = Word::from_codes(&[1, -2, 3, 1]);
        let lhs = a.evaluate_word(&w.inverse());
        let rhs = -rep.adjoint(&w.inverse(), &a.evaluate_word(&w));
        assert!((lhs - &rhs).norm() < 1e-9 * rhs.norm());
    }

    #[test]
    fn extension_rule_on_products() {
        let (rep, mut rng) = setup();
        let a = random_cocycle(&rep, &mut rng);
        let u = Word::from_codes(&[2, -1, 3]);
        let v = Word::from_codes(&[-3, -3, 1, 2]);
        let lhs = a.evaluate_word(&u.concat(&v));
        let rhs = a.evaluate_word(&u) + rep.adjoint(&u, &a.evaluate_word(&v));
        assert!((&lhs - rhs).norm() < 1e-9 * lhs.norm());
    }

    #[test]
    fn linearity_over_ring() {
        let (rep, mut rng) = setup();
        let a = random_cocycle(&rep, &mut rng);
        let x: GroupRingElement = Word::generator(0).into();
        let y: GroupRingElement = Word::generator(1).into();
        let lhs = a.evaluate(&(&x + &y));
        assert!((lhs - a.value(0) - a.value(1)).norm() < 1e-14);
    }

    #[test]
    fn coboundary_examples() {
        let (rep, mut rng) = setup();
        assert_eq!(coboundary(&rep, &DMatrix::zeros(3, 3)).norm(), 0.0);
        let x = random_traceless(3, &mut rng, 1.0);
        let dx = coboundary(&rep, &x);
        assert!(dx.relator_residual() < 1e-9);
        let w = Word::from_codes(&[1, 2, -1, 3]);
        let expect = rep.adjoint(&w, &x) - &x;
        assert!((dx.evaluate_word(&w) - expect).norm() < 1e-9);
    }

    #[test]
    fn coboundary_of_central_element_vanishes() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 0.5]));
        let e = DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 1.0, 4.0]));
        let rep = Arc::new(
            Representation::new(
                crate::word_algebra::SurfacePresentation::pants(),
                vec![d.clone(), e.clone(), linalg::inverse(&(&d * &e)).unwrap()],
            )
            .unwrap(),
        );
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, -3.0]));
        assert!(coboundary(&rep, &x).norm() < 1e-15);
    }

    #[test]
    fn coords_roundtrip() {
        let (rep, mut rng) = setup();
        let a = random_cocycle(&rep, &mut rng);
        let basis = SlBasis::new(3);
        let b = Cocycle::from_coords(rep.clone(), &basis, a.coords(&basis).as_slice());
        assert!(a.minus(&b).norm() < 1e-13);
    }
}
