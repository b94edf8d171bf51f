//! Numerical `SL(n, R)` representations of surface groups.

mod construct;
mod spectral;

pub use construct::{
    doubled_genus2, genus2_representation, genus2_seed, Genus2Seed, irreducible_embed, irreducible_lift, fuchsian_embed,
    one_holed_torus_representation, pants_representation, random_sl, random_traceless,
    sl2_hyperbolic, ConstructionParams,
};
pub use spectral::{
    f_values, length_invariants, spectral, spectral_generators, LengthInvariants, SpectralData,
    GAP_GATE,
};

use nalgebra::DMatrix;

use crate::linalg;
use crate::word_algebra::{GroupRingElement, SurfacePresentation, Word};
use crate::{Error, Result};

/// Relator residual accepted by [`Representation::new`].
pub const RELATOR_TOL: f64 = 1e-8;

/// Determinant tolerance for images.
pub const DET_TOL: f64 = 1e-9;

/// A homomorphism from a surface group to `SL(n, R)`, given on generators.
#[derive(Clone, Debug)]
pub struct Representation {
    presentation: SurfacePresentation,
    n: usize,
    images: Vec<DMatrix<f64>>,
    inverses: Vec<DMatrix<f64>>,
}

impl Representation {
    /// Validates sizes, determinants and the relator residual.
    pub fn new(presentation: SurfacePresentation, images: Vec<DMatrix<f64>>) -> Result<Self> {
        let rep = Self::from_images(presentation, images)?;
        let residual = rep.relator_residual();
        if residual > RELATOR_TOL {
            return Err(Error::RelatorViolation {
                residual,
                tolerance: RELATOR_TOL,
            });
        }
        Ok(rep)
    }

    /// Like [`Representation::new`] without the relator check.
    pub fn from_images(presentation: SurfacePresentation, images: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::validated(presentation, images, None)
    }

    fn validated(
        presentation: SurfacePresentation,
        images: Vec<DMatrix<f64>>,
        inverses: Option<Vec<DMatrix<f64>>>,
    ) -> Result<Self> {
        if images.len() != presentation.rank() || inverses.as_ref().is_some_and(|v| v.len() != images.len()) {
            return Err(Error::Dimension(format!(
                "{} images for {} generators",
                images.len(),
                presentation.rank()
            )));
        }
        let n = images.first().map(|g| g.nrows()).unwrap_or(0);
        for (i, g) in images.iter().enumerate() {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::Dimension(format!(
                    "image {i} is {}x{}, expected {n}x{n}",
                    g.nrows(),
                    g.ncols()
                )));
            }
            let det = g.determinant();
            if (det - 1.0).abs() > DET_TOL * g.norm().powi(n as i32).max(1.0) {
                return Err(Error::Dimension(format!("image {i} has determinant {det}")));
            }
        }
        let inverses = match inverses {
            Some(inv) => {
                for (i, (g, h)) in images.iter().zip(&inv).enumerate() {
                    let defect = (g * h - DMatrix::<f64>::identity(n, n)).norm();
                    if h.shape() != g.shape() || defect > 1e-8 * g.norm() * h.norm() {
                        return Err(Error::Dimension(format!("supplied inverse {i} is off by {defect:.3e}")));
                    }
                }
                inv
            }
            None => images.iter().map(linalg::inverse).collect::<Result<_>>()?,
        };
        Ok(Self {
            presentation,
            n,
            images,
            inverses,
        })
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.presentation
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[DMatrix<f64>] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &DMatrix<f64> {
        &self.images[gen]
    }

    pub fn inverse_image(&self, gen: usize) -> &DMatrix<f64> {
        &self.inverses[gen]
    }

    /// `ρ(w)` as an ordered product of generator images.
    pub fn evaluate(&self, w: &Word) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.n, self.n);
        for l in w.letters() {
            let m = if l.is_inverse() {
                &self.inverses[l.generator()]
            } else {
                &self.images[l.generator()]
            };
            out = out * m;
        }
        out
    }

    /// `Ad_{ρ(w)} X = ρ(w) X ρ(w)⁻¹`.
    pub fn adjoint(&self, w: &Word, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.evaluate(w) * x * self.evaluate(&w.inverse())
    }

    /// `Σ_w c_w Ad_{ρ(w)} X`.
    pub fn ring_action(&self, a: &GroupRingElement, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (w, c) in a.terms() {
            let c: f64 = num_traits::ToPrimitive::to_f64(c).expect("coefficient fits in f64");
            out += self.adjoint(w, x) * c;
        }
        out
    }

    /// `‖ρ(R) − I‖_F / (√n·κ)`, where `κ ≥ 1` is the largest Frobenius condition
    /// number `‖P‖‖P⁻¹‖/n` over the prefixes `P` of the relator, i.e. the roundoff
    /// amplification of the product itself.
    pub fn relator_residual(&self) -> f64 {
        let relator = self.presentation.relator();
        let n = self.n as f64;
        let mut kappa: f64 = 1.0;
        let mut prefix = DMatrix::<f64>::identity(self.n, self.n);
        let mut prefix_inv = DMatrix::<f64>::identity(self.n, self.n);
        for l in relator.letters() {
            let (m, m_inv) = if l.is_inverse() {
                (&self.inverses[l.generator()], &self.images[l.generator()])
            } else {
                (&self.images[l.generator()], &self.inverses[l.generator()])
            };
            prefix = prefix * m;
            prefix_inv = m_inv * prefix_inv;
            kappa = kappa.max(prefix.norm() * prefix_inv.norm() / n);
        }
        (prefix - DMatrix::<f64>::identity(self.n, self.n)).norm() / (n.sqrt() * kappa)
    }

    /// The representation `g ↦ ρ(words[g])` of another presentation.
    pub fn pull_back(&self, presentation: SurfacePresentation, words: &[Word]) -> Result<Self> {
        let images = words.iter().map(|w| self.evaluate(w)).collect();
        Self::from_images(presentation, images)
    }

    /// Replaces the images, keeping the presentation.
    pub fn with_images(&self, images: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::from_images(self.presentation.clone(), images)
    }

    /// Same presentation, new images with their inverses supplied by the caller
    /// (used when the inverses are known in closed form).
    pub fn with_images_and_inverses(&self, images: Vec<DMatrix<f64>>, inverses: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::validated(self.presentation.clone(), images, Some(inverses))
    }

    /// Conjugates every image by `g`.
    pub fn conjugate(&self, g: &DMatrix<f64>) -> Result<Self> {
        let g_inv = linalg::inverse(g)?;
        self.with_images(self.images.iter().map(|m| g * m * &g_inv).collect())
    }

    /// Conjugate by a positive matrix that (locally) minimizes `Σ ‖ρ(s)‖²_F`.
    ///
    /// Pairings and spectral data are conjugation invariant, while the smaller
    /// entries keep the cocycle linear algebra away from cancellation.
    /// Returns the balanced representation and the conjugator.
    pub fn balanced(&self) -> Result<(Self, DMatrix<f64>)> {
        let n = self.n;
        let cost = |imgs: &[DMatrix<f64>]| imgs.iter().map(|m| m.norm_squared()).sum::<f64>();
        let mut p = DMatrix::<f64>::identity(n, n);
        let mut imgs = self.images.clone();
        let mut current = cost(&imgs);
        let mut eta = 0.1 / current.max(1.0);
        for _ in 0..500 {
            let mut grad = DMatrix::<f64>::zeros(n, n);
            for m in &imgs {
                grad += m * m.transpose() - m.transpose() * m;
            }
            let gnorm = grad.norm();
            if gnorm <= 1e-12 * current {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let step = linalg::expm(&(&grad * -eta));
                let step_inv = linalg::expm(&(&grad * eta));
                let trial: Vec<_> = imgs.iter().map(|m| &step * m * &step_inv).collect();
                let c = cost(&trial);
                if c < current - 1e-4 * eta * gnorm * gnorm {
                    p = &step * &p;
                    imgs = trial;
                    current = c;
                    eta *= 1.5;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok((self.conjugate(&p)?, p))
    }
}
