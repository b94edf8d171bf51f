use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::spectral::{spectral, spectral_generators};
use super::Representation;
use crate::linalg;
use crate::word_algebra::SurfacePresentation;
use crate::{Error, Result};

/// Knobs for the built-in desk-scale constructors.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    /// Range of the `SL(2)` translation parameter `l` (eigenvalues `e^{±l}`).
    pub length_range: (f64, f64),
    /// Range of the angle between the attracting directions of the two generators.
    pub angle_range: (f64, f64),
    /// Size of the random `exp(εY)` perturbation applied after embedding.
    pub perturbation: f64,
    /// Scale of the bending coefficients used by [`genus2_representation`].
    pub bend_scale: f64,
    /// Minimal eigenvalue ratio demanded of every gated element.
    pub sturdy_gap: f64,
    pub max_attempts: usize,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        Self {
            length_range: (0.9, 1.0),
            angle_range: (0.2 * PI, 0.3 * PI),
            perturbation: 0.02,
            bend_scale: 0.2,
            sturdy_gap: 1.05,
            max_attempts: 256,
        }
    }
}

/// Random traceless matrix with i.i.d. normal entries of standard deviation `scale`.
pub fn random_traceless<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> DMatrix<f64> {
    let mut x = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    let t = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= t;
    }
    x
}

/// `exp` of a random traceless matrix.
pub fn random_sl<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> DMatrix<f64> {
    linalg::expm(&random_traceless(n, rng, scale))
}

/// Symmetric hyperbolic element of `SL(2)` with eigenvalues `e^{±l}` and attracting
/// direction at angle `theta`.
pub fn sl2_hyperbolic(l: f64, theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = DMatrix::from_row_slice(2, 2, &[l.exp(), 0.0, 0.0, (-l).exp()]);
    &r * d * r.transpose()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The irreducible `SL(2) → SL(n)` homomorphism on degree `n−1` symmetric tensors.
///
/// Basis `f_k = C(n−1, k) e_1^{n−1−k} e_2^k`; for `n = 3` this is
/// `[[a², 2ab, b²], [ac, ad+bc, bd], [c², 2cd, d²]]`.
pub fn irreducible_embed(g: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    assert_eq!(g.shape(), (2, 2), "irreducible_embed expects a 2x2 matrix");
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let deg = n - 1;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        // (a + c t)^{deg-k} (b + d t)^k
        let mut poly = vec![1.0];
        for step in 0..deg {
            let (p0, p1) = if step < deg - k { (a, c) } else { (b, d) };
            let mut next = vec![0.0; poly.len() + 1];
            for (j, &coef) in poly.iter().enumerate() {
                next[j] += coef * p0;
                next[j + 1] += coef * p1;
            }
            poly = next;
        }
        for (j, &coef) in poly.iter().enumerate() {
            m[(j, k)] = coef * binomial(deg, k) / binomial(deg, j);
        }
    }
    m
}

/// Composes an `SL(2)` representation with [`irreducible_embed`].
pub fn irreducible_lift(rep2: &Representation, n: usize) -> Result<Representation> {
    if rep2.n() != 2 {
        return Err(Error::Dimension(format!(
            "expected an SL(2) representation, got n = {}",
            rep2.n()
        )));
    }
    let images = rep2
        .images()
        .iter()
        .map(|g| irreducible_embed(g, n))
        .collect();
    Representation::from_images(rep2.presentation().clone(), images)
}

/// The `SL(2) → SL(3)` lift.
pub fn fuchsian_embed(rep2: &Representation) -> Result<Representation> {
    irreducible_lift(rep2, 3)
}

fn sturdy(g: &DMatrix<f64>, gap: f64) -> bool {
    match spectral(g) {
        Ok(sd) => sd
            .eigenvalues
            .windows(2)
            .all(|w| w[0].abs() / w[1].abs() >= gap),
        Err(_) => false,
    }
}

/// Two perturbed irreducibly embedded hyperbolics with crossing axes.
fn generator_pair<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    p: &ConstructionParams,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let l1 = rng.random_range(p.length_range.0..=p.length_range.1);
    let l2 = rng.random_range(p.length_range.0..=p.length_range.1);
    let theta = rng.random_range(0.0..PI);
    let delta = rng.random_range(p.angle_range.0..=p.angle_range.1);
    let a = irreducible_embed(&sl2_hyperbolic(l1, theta), n) * random_sl(n, rng, p.perturbation);
    let b = irreducible_embed(&sl2_hyperbolic(l2, theta + delta), n)
        * random_sl(n, rng, p.perturbation);
    (a, b)
}

fn exhausted(what: &str) -> Error {
    Error::NotLoxodromic {
        reason: format!("no {what} passing the loxodromic gates within the attempt budget"),
    }
}

/// Pants `(P, Q, (PQ)⁻¹)` with `P`, `Q`, `PQ` loxodromic.
pub fn pants_representation<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    p: &ConstructionParams,
) -> Result<Representation> {
    for _ in 0..p.max_attempts {
        let (a, b) = generator_pair(n, rng, p);
        let ab = &a * &b;
        if [&a, &b, &ab].iter().all(|g| sturdy(g, p.sturdy_gap)) {
            let images = vec![a, b, linalg::inverse(&ab)?];
            return Ok(Representation::new(SurfacePresentation::pants(), images)?.balanced()?.0);
        }
    }
    Err(exhausted("pants representation"))
}

/// One-holed torus `(A, B, [A, B]⁻¹)` with loxodromic boundary.
pub fn one_holed_torus_representation<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    p: &ConstructionParams,
) -> Result<Representation> {
    for _ in 0..p.max_attempts {
        let (a, b) = generator_pair(n, rng, p);
        let comm = &a * &b * linalg::inverse(&a)? * linalg::inverse(&b)?;
        if [&a, &b, &comm].iter().all(|g| sturdy(g, p.sturdy_gap)) {
            let images = vec![a, b, linalg::inverse(&comm)?];
            let rep = Representation::new(SurfacePresentation::one_holed_torus(), images)?;
            return Ok(rep.balanced()?.0);
        }
    }
    Err(exhausted("one-holed torus representation"))
}

/// The closed genus-2 point `(A, B, B, A)`; the relator holds identically.
pub fn doubled_genus2(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Representation> {
    Representation::new(
        SurfacePresentation::closed(2),
        vec![a.clone(), b.clone(), b.clone(), a.clone()],
    )
}

/// Data of a doubled-then-bent genus-2 point: `ρ = (A, B, E B E⁻¹, E A E⁻¹)` with
/// `E = exp(Σ_j c_j F_j([A, B]))`, viewed in a fixed gauge `G` (every image is
/// conjugated by `G`).
#[derive(Clone, Debug)]
pub struct Genus2Seed {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub bend: Vec<f64>,
    pub gauge: DMatrix<f64>,
}

impl Genus2Seed {
    pub fn representation(&self) -> Result<Representation> {
        self.assemble(&self.a, &self.b)
    }

    /// The point obtained from `A exp(t Y_a)`, `B exp(t Y_b)` with the same bending
    /// coefficients; a smooth path through [`Genus2Seed::representation`].
    pub fn deformed(&self, ya: &DMatrix<f64>, yb: &DMatrix<f64>, t: f64) -> Result<Representation> {
        let a = &self.a * linalg::expm(&(ya * t));
        let b = &self.b * linalg::expm(&(yb * t));
        self.assemble(&a, &b)
    }

    fn assemble(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Representation> {
        let g_inv = linalg::inverse(&self.gauge)?;
        let images = Self::raw(a, b, &self.bend)?
            .images()
            .iter()
            .map(|m| &self.gauge * m * &g_inv)
            .collect();
        Representation::new(SurfacePresentation::closed(2), images)
    }

    fn raw(a: &DMatrix<f64>, b: &DMatrix<f64>, bend: &[f64]) -> Result<Representation> {
        let comm = a * b * linalg::inverse(a)? * linalg::inverse(b)?;
        let gens = spectral_generators(&comm)?;
        let n = a.nrows();
        let mut x = DMatrix::zeros(n, n);
        for (f, c) in gens.iter().zip(bend) {
            x += f * *c;
        }
        let e = linalg::expm(&x);
        let e_inv = linalg::expm(&(-&x));
        let images = vec![a.clone(), b.clone(), &e * b * &e_inv, &e * a * &e_inv];
        Representation::from_images(SurfacePresentation::closed(2), images)
    }
}

/// Random [`Genus2Seed`] whose generators and `[A, B]` pass the loxodromic gates.
pub fn genus2_seed<R: Rng + ?Sized>(n: usize, rng: &mut R, p: &ConstructionParams) -> Result<Genus2Seed> {
    for _ in 0..p.max_attempts {
        let (a, b) = generator_pair(n, rng, p);
        let comm = &a * &b * linalg::inverse(&a)? * linalg::inverse(&b)?;
        if ![&a, &b, &comm].iter().all(|g| sturdy(g, p.sturdy_gap)) {
            continue;
        }
        let bend = (0..n - 1)
            .map(|_| rng.random_range(-1.0..1.0) * p.bend_scale)
            .collect::<Vec<_>>();
        let (_, gauge) = Genus2Seed::raw(&a, &b, &bend)?.balanced()?;
        return Ok(Genus2Seed { a, b, bend, gauge });
    }
    Err(exhausted("genus-2 representation"))
}

/// A doubled genus-2 point bent along `[x_1, y_1]` by a random combination of the
/// spectral generators of `ρ([x_1, y_1])`.
pub fn genus2_representation<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    p: &ConstructionParams,
) -> Result<Representation> {
    genus2_seed(n, rng, p)?.representation()
}
