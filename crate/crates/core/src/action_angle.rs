//! Hamiltonian flows, Darboux completion and Darboux verification on explicit
//! symplectic charts.
//!
//! Matrix convention: `ω(u, v) = uᵀ Ω v`. The Hamiltonian field of `f` is defined by
//! `ω(X_f, ·) = df`, i.e. `Ωᵀ X_f = ∇f`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

pub type PointFn<T> = Arc<dyn Fn(&DVector<f64>) -> T + Send + Sync>;

/// Nominal integrator step.
pub const RK4_STEP: f64 = 1e-3;
/// Local error tolerance for the step-halving check.
pub const RK4_TOL: f64 = 1e-13;
/// Target residual of Newton shooting; anything above [`SHOOTING_GATE`] is an error.
pub const SHOOTING_TOL: f64 = 1e-11;
pub const SHOOTING_GATE: f64 = 1e-7;
const SHOOTING_MAX_ITER: usize = 50;
const SINGULAR_RCOND: f64 = 1e-12;

/// A symplectic form on an open set of `R^{2n}` together with `n` functions.
#[derive(Clone)]
pub struct SymplecticChart {
    pub name: String,
    half_dim: usize,
    omega: PointFn<DMatrix<f64>>,
    f: PointFn<DVector<f64>>,
    f_jacobian: Option<PointFn<DMatrix<f64>>>,
    domain: PointFn<bool>,
}

impl fmt::Debug for SymplecticChart {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("SymplecticChart")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .finish_non_exhaustive()
    }
}

impl SymplecticChart {
    pub fn new(
        name: impl Into<String>,
        half_dim: usize,
        omega: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        f: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        SymplecticChart {
            name: name.into(),
            half_dim,
            omega: Arc::new(omega),
            f: Arc::new(f),
            f_jacobian: None,
            domain: Arc::new(|_| true),
        }
    }

    /// Analytic Jacobian of `f` (an `n × 2n` matrix); otherwise central differences.
    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.f_jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_domain(mut self, domain: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(domain);
        self
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn omega(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.omega)(x)
    }

    pub fn f(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim() && x.iter().all(|v| v.is_finite()) && (self.domain)(x)
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match &self.f_jacobian {
            Some(j) => j(x),
            None => central_jacobian(|p| self.f(p), x, 1e-6),
        }
    }

    /// Reciprocal 2-norm condition number of `Ω(x)`.
    pub fn omega_rcond(&self, x: &DVector<f64>) -> f64 {
        let sv = self.omega(x).svd(false, false).singular_values;
        sv.min() / sv.max()
    }

    /// `max |Ω + Ωᵀ|` at `x`.
    pub fn antisymmetry_defect(&self, x: &DVector<f64>) -> f64 {
        let m = self.omega(x);
        (&m + m.transpose()).amax()
    }

    /// Central-difference `dω(u, v, w)` for constant fields `u, v, w`.
    pub fn closedness_defect(&self, x: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let h = 1e-4;
        let deriv = |dir: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>| {
            let plus = self.omega(&(x + dir * h));
            let minus = self.omega(&(x - dir * h));
            (a.dot(&(plus * b)) - a.dot(&(minus * b))) / (2.0 * h)
        };
        (deriv(u, v, w) - deriv(v, u, w) + deriv(w, u, v)).abs()
    }
}

/// `σ : R^n → R^{2n}` meant to satisfy `f ∘ σ = id` with isotropic image.
#[derive(Clone)]
pub struct LagrangianSection {
    sigma: PointFn<DVector<f64>>,
}

impl fmt::Debug for LagrangianSection {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str("LagrangianSection")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionReport {
    /// `‖f(σ(c)) − c‖`.
    pub value_defect: f64,
    /// `max |ω(∂σ/∂c_i, ∂σ/∂c_j)|`.
    pub isotropy_defect: f64,
}

impl LagrangianSection {
    pub fn new(sigma: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static) -> Self {
        LagrangianSection { sigma: Arc::new(sigma) }
    }

    pub fn at(&self, c: &DVector<f64>) -> DVector<f64> {
        (self.sigma)(c)
    }

    pub fn check(&self, chart: &SymplecticChart, c: &DVector<f64>) -> SectionReport {
        let p = self.at(c);
        let value_defect = (chart.f(&p) - c).norm();
        let frame = central_jacobian(|q| self.at(q), c, 1e-5);
        let pulled = frame.transpose() * chart.omega(&p) * &frame;
        SectionReport {
            value_defect,
            isotropy_defect: pulled.amax(),
        }
    }
}

/// Central-difference Jacobian of `map` at `x`.
pub fn central_jacobian<F>(map: F, x: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut cols = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        cols.push((map(&xp) - map(&xm)) / (2.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// Solve `Ωᵀ v = ∇f_i` at `x`.
pub fn hamiltonian_field(chart: &SymplecticChart, i: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
    let grad: DVector<f64> = chart.jacobian(x).row(i).transpose();
    field_for(chart, &grad, x)
}

fn field_for(chart: &SymplecticChart, grad: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    if chart.omega_rcond(x) < SINGULAR_RCOND {
        return Err(Error::SingularOmega);
    }
    chart
        .omega(x)
        .transpose()
        .lu()
        .solve(grad)
        .ok_or(Error::SingularOmega)
}

fn rk4_step(chart: &SymplecticChart, i: usize, x: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let k1 = hamiltonian_field(chart, i, x)?;
    let k2 = hamiltonian_field(chart, i, &(x + &k1 * (h / 2.0)))?;
    let k3 = hamiltonian_field(chart, i, &(x + &k2 * (h / 2.0)))?;
    let k4 = hamiltonian_field(chart, i, &(x + &k3 * h))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Time-`t` flow of `X_{f_i}` by RK4 with nominal step [`RK4_STEP`]; each step is
/// compared against two half steps and halved until the Richardson estimate passes.
pub fn flow(chart: &SymplecticChart, i: usize, x: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if i >= chart.half_dim() {
        return Err(Error::Dimension(format!("function index {i} out of range")));
    }
    if !chart.contains(x) {
        return Err(Error::LeftDomain { t: 0.0 });
    }
    let dir = t.signum();
    let mut elapsed = 0.0;
    let mut p = x.clone();
    let mut h = RK4_STEP;
    while elapsed < t.abs() {
        let step = h.min(t.abs() - elapsed);
        let full = rk4_step(chart, i, &p, dir * step)?;
        let half = rk4_step(chart, i, &p, dir * step / 2.0)?;
        let two_halves = rk4_step(chart, i, &half, dir * step / 2.0)?;
        let err = (&two_halves - &full).amax() / 15.0;
        if err > RK4_TOL * (1.0 + p.amax()) && step > 1e-9 {
            h = step / 2.0;
            continue;
        }
        // Richardson extrapolation of the accepted step.
        p = &two_halves + (&two_halves - &full) / 15.0;
        elapsed += step;
        if !chart.contains(&p) {
            return Err(Error::LeftDomain { t: dir * elapsed });
        }
        if err < RK4_TOL / 64.0 {
            h = (h * 2.0).min(RK4_STEP);
        }
    }
    Ok(p)
}

/// `Φ_1^{t_1} ∘ … ∘ Φ_n^{t_n}` applied to `x` (the flows commute on a valid chart).
pub fn flow_composite(chart: &SymplecticChart, times: &[f64], x: &DVector<f64>) -> Result<DVector<f64>> {
    let mut p = x.clone();
    for (i, &t) in times.iter().enumerate().rev() {
        if t != 0.0 {
            p = flow(chart, i, &p, t)?;
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct DarbouxSolution {
    pub g: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Flow times `t` with `x = Φ^t(σ(f(x)))`, by Gauss–Newton shooting with a
/// finite-difference Jacobian of the flow map.
pub fn darboux_complete(chart: &SymplecticChart, section: &LagrangianSection, x: &DVector<f64>) -> Result<DarbouxSolution> {
    let n = chart.half_dim();
    let base = section.at(&chart.f(x));
    let mut t = DVector::<f64>::zeros(n);
    let shoot = |t: &DVector<f64>| flow_composite(chart, t.as_slice(), &base);
    let mut r = shoot(&t)? - x;
    let mut iterations = 0;
    while r.norm() > SHOOTING_TOL && iterations < SHOOTING_MAX_ITER {
        iterations += 1;
        let h = 1e-5 * (1.0 + t.amax());
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[k] += h;
            tm[k] -= h;
            cols.push((shoot(&tp)? - shoot(&tm)?) / (2.0 * h));
        }
        let jac = DMatrix::from_columns(&cols);
        let step = jac
            .svd(true, true)
            .solve(&r, 1e-12)
            .map_err(|_| Error::ShootingDiverged {
                residual: r.norm(),
                iterations,
            })?;
        // Backtrack if the full step does not reduce the residual.
        let mut lambda = 1.0;
        loop {
            let trial = &t - &step * lambda;
            match shoot(&trial) {
                Ok(end) => {
                    let rt = end - x;
                    if rt.norm() < r.norm() || lambda < 1e-3 {
                        t = trial;
                        r = rt;
                        break;
                    }
                }
                Err(Error::LeftDomain { .. }) if lambda >= 1e-3 => {}
                Err(e) => return Err(e),
            }
            lambda /= 2.0;
        }
    }
    let residual = r.norm();
    if !(residual <= SHOOTING_GATE) {
        return Err(Error::ShootingDiverged { residual, iterations });
    }
    Ok(DarbouxSolution {
        g: t.iter().copied().collect(),
        residual,
        iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DarbouxReport {
    /// `s` in `ω ≈ s · Σ df_i ∧ dg_i`; `-1` means `ω = Σ dg_i ∧ df_i`.
    pub sign: f64,
    /// `max |Ω − s Σ df∧dg|` over the probe points at the matched sign.
    pub deviation: f64,
    /// Same quantity at the opposite sign.
    pub other_deviation: f64,
    pub points: usize,
}

/// Compare `ω` with `±Σ df_i ∧ dg_i`, where the Jacobian of `g` comes from central
/// differences of its values at `x ± h e_k` around each probe point.
pub fn verify_darboux<G>(chart: &SymplecticChart, probes: &[DVector<f64>], g: G, h: f64) -> Result<DarbouxReport>
where
    G: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut dev = [0.0f64; 2];
    for x in probes {
        let df = chart.jacobian(x);
        let mut cols = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            cols.push((g(&xp)? - g(&xm)?) / (2.0 * h));
        }
        let dg = DMatrix::from_columns(&cols);
        let wedge = df.transpose() * &dg - dg.transpose() * &df;
        let omega = chart.omega(x);
        dev[0] = dev[0].max((&omega - &wedge).amax());
        dev[1] = dev[1].max((&omega + &wedge).amax());
    }
    let (sign, deviation, other_deviation) = if dev[0] <= dev[1] {
        (1.0, dev[0], dev[1])
    } else {
        (-1.0, dev[1], dev[0])
    };
    Ok(DarbouxReport {
        sign,
        deviation,
        other_deviation,
        points: probes.len(),
    })
}

/// `max |ω(X_{f_i}, X_{f_j})|` at `x`.
pub fn fiber_isotropy_defect(chart: &SymplecticChart, x: &DVector<f64>) -> Result<f64> {
    let n = chart.half_dim();
    let fields = (0..n)
        .map(|i| hamiltonian_field(chart, i, x))
        .collect::<Result<Vec<_>>>()?;
    let omega = chart.omega(x);
    let mut worst: f64 = 0.0;
    for a in &fields {
        for b in &fields {
            worst = worst.max(a.dot(&(&omega * b)).abs());
        }
    }
    Ok(worst)
}

/// `max |DΦᵀ Ω(Φ(x)) DΦ − Ω(x)|` for the time-`t` flow of `f_i`.
pub fn omega_preservation_defect(chart: &SymplecticChart, i: usize, x: &DVector<f64>, t: f64) -> Result<f64> {
    let h = 1e-5;
    let mut cols = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        cols.push((flow(chart, i, &xp, t)? - flow(chart, i, &xm, t)?) / (2.0 * h));
    }
    let d = DMatrix::from_columns(&cols);
    let end = flow(chart, i, x, t)?;
    Ok((d.transpose() * chart.omega(&end) * &d - chart.omega(x)).amax())
}

/// `‖Φ_i^s Φ_j^t x − Φ_j^t Φ_i^s x‖`.
pub fn commutativity_defect(chart: &SymplecticChart, i: usize, j: usize, x: &DVector<f64>, s: f64, t: f64) -> Result<f64> {
    let a = flow(chart, i, &flow(chart, j, x, t)?, s)?;
    let b = flow(chart, j, &flow(chart, i, x, s)?, t)?;
    Ok((a - b).norm())
}

/// Shipped analytic charts, each with a section through `x = 0`.
#[derive(Clone, Debug)]
pub struct DemoChart {
    pub chart: SymplecticChart,
    pub section: LagrangianSection,
}

pub const DEMO_CHARTS: [&str; 3] = ["canonical", "exponential", "coupled"];

fn standard_omega(n: usize) -> DMatrix<f64> {
    // Coordinates (x_1, y_1, …, x_n, y_n), ω = Σ dx_i ∧ dy_i.
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// `ω = dx ∧ dy`, `f = y`, `σ(c) = (0, c)`.
pub fn canonical_chart() -> DemoChart {
    let chart = SymplecticChart::new("canonical", 1, |_| standard_omega(1), |p| DVector::from_vec(vec![p[1]]))
        .with_jacobian(|_| DMatrix::from_row_slice(1, 2, &[0.0, 1.0]));
    DemoChart {
        chart,
        section: LagrangianSection::new(|c| DVector::from_vec(vec![0.0, c[0]])),
    }
}

/// `ω = dx ∧ dy`, `f = e^y`, `σ(c) = (0, log c)`.
pub fn exponential_chart() -> DemoChart {
    let chart = SymplecticChart::new("exponential", 1, |_| standard_omega(1), |p| DVector::from_vec(vec![p[1].exp()]))
        .with_jacobian(|p| DMatrix::from_row_slice(1, 2, &[0.0, p[1].exp()]));
    DemoChart {
        chart,
        section: LagrangianSection::new(|c| DVector::from_vec(vec![0.0, c[0].ln()])),
    }
}

/// `ω = dx_1∧dy_1 + dx_2∧dy_2`, `f = (y_1 + y_2²/2, e^{y_2})`,
/// `σ(c) = (0, c_1 − (log c_2)²/2, 0, log c_2)`.
pub fn coupled_chart() -> DemoChart {
    let chart = SymplecticChart::new(
        "coupled",
        2,
        |_| standard_omega(2),
        |p| DVector::from_vec(vec![p[1] + 0.5 * p[3] * p[3], p[3].exp()]),
    )
    .with_jacobian(|p| DMatrix::from_row_slice(2, 4, &[0.0, 1.0, 0.0, p[3], 0.0, 0.0, 0.0, p[3].exp()]));
    DemoChart {
        chart,
        section: LagrangianSection::new(|c| {
            let y2 = c[1].ln();
            DVector::from_vec(vec![0.0, c[0] - 0.5 * y2 * y2, 0.0, y2])
        }),
    }
}

pub fn demo_chart(name: &str) -> Result<DemoChart> {
    match name {
        "canonical" => Ok(canonical_chart()),
        "exponential" => Ok(exponential_chart()),
        "coupled" => Ok(coupled_chart()),
        other => Err(Error::Unsupported {
            what: "chart",
            name: other.to_string(),
        }),
    }
}

/// Closed-form Darboux completion `g` of the shipped charts (the flow times from
/// their sections).
pub fn closed_form_g(chart: &str, x: &DVector<f64>) -> Option<DVector<f64>> {
    match chart {
        "canonical" => Some(DVector::from_vec(vec![x[0]])),
        "exponential" => Some(DVector::from_vec(vec![x[0] * (-x[1]).exp()])),
        "coupled" => Some(DVector::from_vec(vec![x[0], (x[2] - x[0] * x[3]) * (-x[3]).exp()])),
        _ => None,
    }
}
