//! Split-step integration of `u_t = i Δu - i λ |u|^α u`, optionally with the
//! regularising viscosity `(1 - iε)Δ`, plus the a-priori diagnostics that
//! hold for `Im λ > 0`.
//!
//! The nonlinear part is integrated exactly: pointwise it is the same ODE
//! the blow-up profile solves. The linear part is an exact Fourier
//! multiplier on Cartesian grids and a Crank–Nicolson step on radial grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, norm_report_with, Field, NormReport, RadialLaplacian};
use crate::grid::{Grid, GridMode, Spectral};
use crate::params::{critical_power, validate_assumptions, PhysParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `L(dt/2) N(dt) L(dt/2)`, second order.
    StrangSplit,
    /// `N(dt) L(dt)`, first order.
    LieSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    #[serde(default)]
    pub viscosity_eps: f64,
    pub diag_every: usize,
}

impl SolveConfig {
    pub fn backward(t_start: f64, duration: f64, dt: f64) -> Self {
        Self {
            dt,
            t_start,
            t_end: t_start - duration,
            scheme: Scheme::StrangSplit,
            viscosity_eps: 0.0,
            diag_every: 1,
        }
    }

    pub fn with_diag_every(mut self, every: usize) -> Self {
        self.diag_every = every;
        self
    }

    /// Number of steps and the signed step length.
    pub fn steps(&self) -> Result<(usize, f64)> {
        let span = self.t_end - self.t_start;
        let n = (span.abs() / self.dt).round();
        if n < 1.0 || (n * self.dt - span.abs()).abs() > 1e-9 * span.abs().max(self.dt) {
            return Err(Error::SolveConfig(format!(
                "interval length {} is not a whole number of steps of {}",
                span.abs(),
                self.dt
            )));
        }
        Ok((n as usize, span / n))
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::SolveConfig(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_start == self.t_end {
            return Err(Error::SolveConfig("t_start and t_end must differ".into()));
        }
        if !(self.viscosity_eps >= 0.0) {
            return Err(Error::SolveConfig(format!(
                "viscosity_eps = {} must be >= 0",
                self.viscosity_eps
            )));
        }
        if self.diag_every == 0 {
            return Err(Error::SolveConfig("diag_every must be >= 1".into()));
        }
        let bound = max_stable_dt(grid);
        if self.dt > bound {
            return Err(Error::SolveConfig(format!(
                "dt = {} exceeds the dispersion bound {bound:.3e} for spacing {}",
                self.dt, grid.spacing
            )));
        }
        self.steps().map(|_| ())
    }

    pub fn is_backward(&self) -> bool {
        self.t_end < self.t_start
    }
}

/// Largest step for which the split-step Fourier method stays clear of its
/// resonance instability, `dt ξ_max² <= π`. Crank–Nicolson on radial grids
/// has no such bound.
pub fn max_stable_dt(grid: &Grid) -> f64 {
    match grid.mode {
        GridMode::Cartesian1D => std::f64::consts::PI / grid.max_wavenumber().powi(2),
        GridMode::RadialND => f64::INFINITY,
    }
}

/// Exact flow of `u_t = -i λ |u|^α u` over `dt`, in place.
///
/// Writing `u = ρ e^{iθ}` gives `ρ(dt)^{-α} = ρ₀^{-α} - α Im λ dt` and a
/// phase that integrates in closed form, so the update is
/// `u ← u · w^c` with `w = 1 - α Im λ ρ₀^α dt` and the profile exponent `c`.
pub fn nonlinear_substep_in_place(
    values: &mut [Complex64],
    alpha: f64,
    lambda: Complex64,
    dt: f64,
) -> Result<()> {
    let b = lambda.im;
    for v in values.iter_mut() {
        let rho = v.norm();
        if rho == 0.0 {
            continue;
        }
        let rho_a = rho.powf(alpha);
        if b == 0.0 {
            *v *= Complex64::from_polar(1.0, -lambda.re * rho_a * dt);
            continue;
        }
        let x = -alpha * b * rho_a * dt;
        if x <= -1.0 {
            return Err(Error::PointwiseBlowup { dt });
        }
        let log_w = x.ln_1p();
        let modulus = (-log_w / alpha).exp();
        let phase = lambda.re / (alpha * b) * log_w;
        *v *= Complex64::from_polar(modulus, phase);
    }
    Ok(())
}

pub fn nonlinear_substep(f: &Field, alpha: f64, lambda: Complex64, dt_sub: f64) -> Result<Field> {
    let mut v = f.values().to_vec();
    nonlinear_substep_in_place(&mut v, alpha, lambda, dt_sub)?;
    Field::new(*f.grid(), v, f.time_tag() + dt_sub)
}

/// Generator coefficient of the linear flow: `u_t = (i + ε_s) Δu`, with the
/// viscosity sign chosen so the `ε` term damps in the direction of
/// integration.
fn linear_coefficient(viscosity_eps: f64, dt: f64) -> Complex64 {
    Complex64::new(viscosity_eps * dt.signum(), 1.0)
}

#[derive(Debug, Clone)]
enum LinearPropagator {
    Spectral {
        spectral: Spectral,
        multiplier: Vec<Complex64>,
    },
    Radial(CrankNicolson),
}

impl LinearPropagator {
    fn new(grid: &Grid, dt: f64, viscosity_eps: f64) -> Self {
        let coeff = linear_coefficient(viscosity_eps, dt);
        match grid.mode {
            GridMode::Cartesian1D => {
                let spectral = Spectral::new(grid);
                let multiplier = spectral
                    .wavenumbers
                    .iter()
                    .map(|&xi| (-coeff * xi * xi * dt).exp())
                    .collect();
                LinearPropagator::Spectral {
                    spectral,
                    multiplier,
                }
            }
            GridMode::RadialND => {
                LinearPropagator::Radial(CrankNicolson::new(&RadialLaplacian::new(grid), coeff * dt))
            }
        }
    }

    fn apply(&self, v: &mut [Complex64]) {
        match self {
            LinearPropagator::Spectral {
                spectral,
                multiplier,
            } => {
                spectral.forward(v);
                for (x, m) in v.iter_mut().zip(multiplier) {
                    *x *= m;
                }
                spectral.inverse(v);
            }
            LinearPropagator::Radial(cn) => cn.apply(v),
        }
    }
}

/// `(I - β L) u' = (I + β L) u` with `β = coeff·dt/2`, factored once.
#[derive(Debug, Clone)]
struct CrankNicolson {
    beta: Complex64,
    lap: RadialLaplacian,
    /// Thomas-algorithm modified upper diagonal and pivots.
    c_prime: Vec<Complex64>,
    pivots: Vec<Complex64>,
}

impl CrankNicolson {
    fn new(lap: &RadialLaplacian, coeff_dt: Complex64) -> Self {
        let beta = 0.5 * coeff_dt;
        let m = lap.diag.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
        let mut pivots = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            let a = -beta * lap.lower[j];
            let b = 1.0 - beta * lap.diag[j];
            let c = -beta * lap.upper[j];
            let piv = if j == 0 { b } else { b - a * c_prime[j - 1] };
            pivots[j] = piv;
            c_prime[j] = c / piv;
        }
        Self {
            beta,
            lap: lap.clone(),
            c_prime,
            pivots,
        }
    }

    fn apply(&self, v: &mut [Complex64]) {
        let m = v.len();
        let lv = self.lap.apply(v);
        let mut d: Vec<Complex64> = v.iter().zip(&lv).map(|(x, l)| x + self.beta * l).collect();
        for j in 0..m {
            let a = -self.beta * self.lap.lower[j];
            if j > 0 {
                let prev = d[j - 1];
                d[j] -= a * prev;
            }
            d[j] /= self.pivots[j];
        }
        for j in (0..m.saturating_sub(1)).rev() {
            let next = d[j + 1];
            d[j] -= self.c_prime[j] * next;
        }
        v.copy_from_slice(&d);
    }
}

pub fn linear_substep(f: &Field, dt_sub: f64, viscosity_eps: f64) -> Field {
    if dt_sub == 0.0 {
        return f.clone();
    }
    let prop = LinearPropagator::new(f.grid(), dt_sub, viscosity_eps);
    let mut v = f.values().to_vec();
    prop.apply(&mut v);
    Field::new(*f.grid(), v, f.time_tag() + dt_sub)
        .expect("linear propagators preserve finiteness")
}

/// One fixed-step integrator for a given grid, step and scheme.
#[derive(Debug, Clone)]
pub struct Integrator {
    params: PhysParams,
    grid: Grid,
    scheme: Scheme,
    step: f64,
    half: LinearPropagator,
    full: LinearPropagator,
}

impl Integrator {
    /// `step` is signed: negative for backward integration.
    pub fn new(params: &PhysParams, grid: &Grid, scheme: Scheme, step: f64, viscosity_eps: f64) -> Self {
        Self {
            params: *params,
            grid: *grid,
            scheme,
            step,
            half: LinearPropagator::new(grid, 0.5 * step, viscosity_eps),
            full: LinearPropagator::new(grid, step, viscosity_eps),
        }
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spectral(&self) -> Option<&Spectral> {
        match &self.full {
            LinearPropagator::Spectral { spectral, .. } => Some(spectral),
            LinearPropagator::Radial(_) => None,
        }
    }

    pub fn step(&self, v: &mut [Complex64]) -> Result<()> {
        let (alpha, lambda) = (self.params.alpha, self.params.lambda);
        match self.scheme {
            Scheme::StrangSplit => {
                self.half.apply(v);
                nonlinear_substep_in_place(v, alpha, lambda, self.step)?;
                self.half.apply(v);
            }
            Scheme::LieSplit => {
                nonlinear_substep_in_place(v, alpha, lambda, self.step)?;
                self.full.apply(v);
            }
        }
        Ok(())
    }
}

/// Drive an integration, calling `observe(step_index, t, values)` at the
/// start, every `diag_every` steps, and at the end.
pub fn integrate<F>(params: &PhysParams, f0: &Field, cfg: &SolveConfig, mut observe: F) -> Result<Field>
where
    F: FnMut(usize, f64, &[Complex64], &Integrator) -> Result<()>,
{
    cfg.validate(f0.grid())?;
    let (n_steps, h) = cfg.steps()?;
    let integ = Integrator::new(params, f0.grid(), cfg.scheme, h, cfg.viscosity_eps);
    let mut v = f0.values().to_vec();
    let time_at = |i: usize| cfg.t_start + i as f64 * h;
    observe(0, cfg.t_start, &v, &integ)?;
    for i in 1..=n_steps {
        integ
            .step(&mut v)
            .map_err(|e| e.context(format!("step {i} at t = {}", time_at(i))))?;
        if i % cfg.diag_every == 0 || i == n_steps {
            if v.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
                return Err(Error::NonFinite(time_at(i)));
            }
            observe(i, time_at(i), &v, &integ)?;
        }
    }
    Field::new(*f0.grid(), v, cfg.t_end)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub params: PhysParams,
    pub times: Vec<f64>,
    pub norms: Vec<NormReport>,
    /// `½‖∇u‖² + Re(λ)/(α+2) ‖u‖_{α+2}^{α+2}`; the conserved energy when λ is real.
    pub energy: Vec<f64>,
    /// `‖u‖_{L^q}` with `q = N(α+2)/(N-2)`, recorded for `N >= 3`.
    pub critical_lq: Option<Vec<f64>>,
    pub charge_identity_residual: Vec<f64>,
    pub gradient_monotone_ok: Vec<bool>,
    #[serde(skip)]
    pub final_field: Option<Field>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Tolerance scale `dt²` for monotonicity checks.
    pub fn typical_step(&self) -> f64 {
        if self.times.len() < 2 {
            return 0.0;
        }
        (self.times[1] - self.times[0]).abs()
    }
}

fn critical_exponent(dim: u32, alpha: f64) -> Option<f64> {
    (dim >= 3).then(|| dim as f64 * (alpha + 2.0) / (dim as f64 - 2.0))
}

pub fn evolve(params: &PhysParams, f0: &Field, cfg: &SolveConfig) -> Result<TrajectoryRecord> {
    params.check_well_formed()?;
    if f0.grid().dim != params.dim {
        return Err(Error::GridMismatch(format!(
            "grid dimension {} vs N = {}",
            f0.grid().dim,
            params.dim
        )));
    }
    let alpha = params.alpha;
    let q = critical_exponent(params.dim, alpha);
    let mut times = Vec::new();
    let mut norms = Vec::new();
    let mut energy = Vec::new();
    let mut lq = Vec::new();
    let grid = *f0.grid();
    let final_field = integrate(params, f0, cfg, |_, t, v, integ| {
        let f = Field::new(grid, v.to_vec(), t)?;
        let r = norm_report_with(integ.spectral(), &f, alpha);
        if !r.is_finite() {
            return Err(Error::NonFinite(t));
        }
        energy.push(
            0.5 * r.h1_dot * r.h1_dot
                + params.lambda.re / (alpha + 2.0) * r.l_alpha_plus_2.powf(alpha + 2.0),
        );
        if let Some(q) = q {
            lq.push(lp_norm(&f, q));
        }
        times.push(t);
        norms.push(r);
        Ok(())
    })?;
    let mut traj = TrajectoryRecord {
        params: *params,
        times,
        norms,
        energy,
        critical_lq: q.map(|_| lq),
        charge_identity_residual: Vec::new(),
        gradient_monotone_ok: Vec::new(),
        final_field: Some(final_field),
    };
    if traj.len() >= 3 {
        traj.charge_identity_residual = charge_identity_residual(&traj)?;
    }
    traj.gradient_monotone_ok = gradient_monotonicity_check(&traj);
    Ok(traj)
}

/// Derivative of samples `y(t_i)` from the three-point Lagrange stencil,
/// centred in the interior and one-sided at the ends.
pub fn three_point_derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    (0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            let (t0, t1, t2) = (t[c - 1], t[c], t[c + 1]);
            let (y0, y1, y2) = (y[c - 1], y[c], y[c + 1]);
            let x = t[i];
            let d0 = (2.0 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
            let d1 = (2.0 * x - t0 - t2) / ((t1 - t0) * (t1 - t2));
            let d2 = (2.0 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
            d0 * y0 + d1 * y1 + d2 * y2
        })
        .collect()
}

/// `|d/dt ½‖u‖² - Im λ ‖u‖_{α+2}^{α+2}|` relative to `Im λ ‖u‖_{α+2}^{α+2}`.
/// For real λ the identity reduces to charge conservation and the residual
/// is `|d/dt ½‖u‖²| / ‖u‖²`.
pub fn charge_identity_residual(traj: &TrajectoryRecord) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(Error::NotApplicable(format!(
            "charge identity needs at least 3 recorded times, got {}",
            traj.len()
        )));
    }
    let alpha = traj.params.alpha;
    let b = traj.params.lambda.im;
    let half_charge: Vec<f64> = traj.norms.iter().map(|r| 0.5 * r.l2 * r.l2).collect();
    let rate = three_point_derivative(&traj.times, &half_charge);
    Ok(traj
        .norms
        .iter()
        .zip(&rate)
        .map(|(r, d)| {
            let source = b * r.l_alpha_plus_2.powf(alpha + 2.0);
            if b == 0.0 {
                let scale = r.l2 * r.l2;
                if scale == 0.0 {
                    d.abs()
                } else {
                    d.abs() / scale
                }
            } else if source == 0.0 {
                d.abs()
            } else {
                (d - source).abs() / source
            }
        })
        .collect())
}

/// One flag per consecutive pair of recorded times: `‖∇u‖` at the earlier
/// time does not exceed the later one by more than `dt²` relative.
pub fn gradient_monotonicity_check(traj: &TrajectoryRecord) -> Vec<bool> {
    let tol = traj.typical_step().powi(2);
    traj.times
        .windows(2)
        .zip(traj.norms.windows(2))
        .map(|(t, n)| {
            let (earlier, later) = if t[0] < t[1] { (n[0], n[1]) } else { (n[1], n[0]) };
            earlier.h1_dot <= later.h1_dot * (1.0 + tol) + f64::MIN_POSITIVE
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalBound {
    /// `∫ ‖u(t)‖_{L^q}^{α+2} dt` over the run, `q = N(α+2)/(N-2)`.
    pub integral: f64,
    /// `(‖∇u(t_late)‖² - ‖∇u(t_early)‖²) / ((α+2) Im λ - α|λ|)`.
    pub bound: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Space-time bound at the energy-critical power.
pub fn critical_spacetime_bound(traj: &TrajectoryRecord, tolerance: f64) -> Result<CriticalBound> {
    let p = &traj.params;
    let report = validate_assumptions(p)?;
    let crit = critical_power(p.dim);
    if p.dim < 3 || (p.alpha - crit).abs() > 1e-12 * crit {
        return Err(Error::NotApplicable(format!(
            "space-time bound needs N >= 3 and alpha = 4/(N-2); got N = {}, alpha = {}",
            p.dim, p.alpha
        )));
    }
    if !report.strict_coeff_ok {
        return Err(Error::NotApplicable(
            "space-time bound needs (alpha+2) Im(lambda) > alpha |lambda|".into(),
        ));
    }
    let lq = traj
        .critical_lq
        .as_ref()
        .ok_or_else(|| Error::NotApplicable("trajectory has no critical norms".into()))?;
    if traj.len() < 2 {
        return Err(Error::NotApplicable("need at least two recorded times".into()));
    }
    let power = p.alpha + 2.0;
    let integral: f64 = traj
        .times
        .windows(2)
        .zip(lq.windows(2))
        .map(|(t, q)| 0.5 * (t[1] - t[0]).abs() * (q[0].powf(power) + q[1].powf(power)))
        .sum();
    let (i_early, i_late) = if traj.times[0] < traj.times[traj.len() - 1] {
        (0, traj.len() - 1)
    } else {
        (traj.len() - 1, 0)
    };
    let g_late = traj.norms[i_late].h1_dot;
    let g_early = traj.norms[i_early].h1_dot;
    let coercivity = (p.alpha + 2.0) * p.lambda.im - p.alpha * p.lambda.norm();
    let bound = (g_late * g_late - g_early * g_early) / coercivity;
    Ok(CriticalBound {
        integral,
        bound,
        tolerance,
        holds: integral <= bound * (1.0 + tolerance) || integral <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, norm_report};
    use crate::profile::Profile;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn params(dim: u32, alpha: f64, lambda: Complex64) -> PhysParams {
        PhysParams::new(dim, alpha, lambda, 6.0).unwrap()
    }

    #[test]
    fn nonlinear_zero_stays_zero() {
        let g = Grid::cartesian(16, 1.0).unwrap();
        let f = Field::zeros(g, 0.0);
        let out = nonlinear_substep(&f, 2.0, I, -0.5).unwrap();
        assert!(out.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn nonlinear_closed_form_modulus() {
        let mut v = vec![Complex64::new(1.0, 0.0)];
        nonlinear_substep_in_place(&mut v, 2.0, I, -1.0).unwrap();
        assert!((v[0].norm() - 3f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn nonlinear_forward_blowup_rejected() {
        let mut v = vec![Complex64::new(1.0, 0.0)];
        // w = 1 - 2·1·1·0.5 = 0.
        let err = nonlinear_substep_in_place(&mut v, 2.0, I, 0.5);
        assert!(matches!(err, Err(Error::PointwiseBlowup { .. })));
    }

    #[test]
    fn nonlinear_semigroup() {
        let lambda = Complex64::new(0.6, 1.2);
        let z = vec![Complex64::new(0.8, -0.4), Complex64::new(-1.5, 0.3)];
        let mut one = z.clone();
        nonlinear_substep_in_place(&mut one, 2.5, lambda, -0.3).unwrap();
        let mut two = z.clone();
        nonlinear_substep_in_place(&mut two, 2.5, lambda, -0.15).unwrap();
        nonlinear_substep_in_place(&mut two, 2.5, lambda, -0.15).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert!((a - b).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn nonlinear_matches_profile_ode() {
        let p = PhysParams::new(1, 2.0, Complex64::new(0.7, 1.0), 4.0).unwrap();
        let prof = Profile::new(&p).unwrap();
        let (t0, r, dt) = (-0.25, 0.8, -0.1);
        let mut v = vec![prof.value(t0, r).unwrap()];
        nonlinear_substep_in_place(&mut v, p.alpha, p.lambda, dt).unwrap();
        let exact = prof.value(t0 + dt, r).unwrap();
        assert!((v[0] - exact).norm() < 1e-13 * exact.norm());
    }

    #[test]
    fn real_lambda_nonlinear_is_phase_rotation() {
        let mut v = vec![Complex64::new(0.5, 0.5)];
        nonlinear_substep_in_place(&mut v, 2.0, Complex64::new(1.0, 0.0), 0.3).unwrap();
        assert!((v[0].norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn linear_identity_at_zero_step() {
        let g = Grid::cartesian(32, 4.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new((-x * x).exp(), x)).unwrap();
        assert_eq!(linear_substep(&f, 0.0, 0.0), f);
    }

    #[test]
    fn linear_single_mode_symbol() {
        let g = Grid::cartesian(64, 5.0).unwrap();
        let xi = g.wavenumbers()[5];
        let f = Field::from_fn(g, 0.0, |x| Complex64::new(0.0, xi * x).exp()).unwrap();
        let dt = 0.37;
        let out = linear_substep(&f, dt, 0.0);
        let phase = Complex64::new(0.0, -xi * xi * dt).exp();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn free_gaussian_dispersion() {
        // u0 = e^{-x²/2}: u(t) = (1 + 2it)^{-1/2} exp(-x² / (2(1 + 2it))).
        let g = Grid::cartesian(1024, 40.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new((-0.5 * x * x).exp(), 0.0)).unwrap();
        let t = 0.8;
        let out = linear_substep(&f, t, 0.0);
        let z = Complex64::new(1.0, 2.0 * t);
        for (j, v) in out.values().iter().enumerate() {
            let x = g.coord(j);
            let exact = z.powf(-0.5) * (-(x * x) / (2.0 * z)).exp();
            assert!((v - exact).norm() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn spectral_step_is_isometry() {
        let g = Grid::cartesian(256, 8.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp())).unwrap();
        let out = linear_substep(&f, -0.123, 0.0);
        let (a, b) = (lp_norm(&f, 2.0), lp_norm(&out, 2.0));
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn radial_step_is_isometry_and_keeps_gradient() {
        let g = Grid::radial(3, 300, 12.0).unwrap();
        let f = Field::from_fn(g, 0.0, |r| Complex64::new((-r * r).exp(), 0.0)).unwrap();
        let out = linear_substep(&f, -0.05, 0.0);
        let (a, b) = (norm_report(&f, 2.0), norm_report(&out, 2.0));
        assert!((a.l2 - b.l2).abs() < 1e-12 * a.l2);
        assert!((a.h1_dot - b.h1_dot).abs() < 1e-12 * a.h1_dot);
    }

    #[test]
    fn viscosity_damps_both_directions() {
        let g = Grid::cartesian(128, 6.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let n0 = lp_norm(&f, 2.0);
        for dt in [0.1, -0.1] {
            let out = linear_substep(&f, dt, 0.05);
            assert!(lp_norm(&out, 2.0) < n0);
        }
    }

    #[test]
    fn rejects_too_large_step() {
        let g = Grid::cartesian(1024, 4.0).unwrap();
        let cfg = SolveConfig::backward(0.0, 0.1, 0.01);
        assert!(matches!(cfg.validate(&g), Err(Error::SolveConfig(_))));
        let radial = Grid::radial(3, 1024, 4.0).unwrap();
        assert!(cfg.validate(&radial).is_ok());
    }

    #[test]
    fn rejects_fractional_step_count() {
        let g = Grid::cartesian(64, 4.0).unwrap();
        let cfg = SolveConfig::backward(0.0, 0.1, 0.003);
        assert!(cfg.validate(&g).is_err());
    }

    #[test]
    fn backward_run_records_decreasing_times_and_dissipation() {
        let p = params(1, 2.0, I);
        let g = Grid::cartesian(256, 16.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let cfg = SolveConfig::backward(0.0, 0.2, 1e-3).with_diag_every(10);
        let traj = evolve(&p, &f, &cfg).unwrap();
        assert_eq!(traj.len(), 21);
        assert!(traj.times.windows(2).all(|w| w[1] < w[0]));
        assert!(traj.norms.windows(2).all(|w| w[1].l2 < w[0].l2));
        assert!(traj.gradient_monotone_ok.iter().all(|&ok| ok));
    }

    #[test]
    fn three_point_derivative_exact_for_quadratics() {
        let t = [0.0, -0.1, -0.25, -0.3];
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let d = three_point_derivative(&t, &y);
        for (ti, di) in t.iter().zip(&d) {
            assert!((di - (6.0 * ti - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_bound_rejects_noncritical() {
        let p = params(3, 2.0, I);
        let g = Grid::radial(3, 64, 4.0).unwrap();
        let f = Field::zeros(g, 0.0);
        let traj = evolve(&p, &f, &SolveConfig::backward(0.0, 0.01, 1e-3)).unwrap();
        assert!(matches!(critical_spacetime_bound(&traj, 0.05), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn critical_bound_zero_field() {
        let p = params(3, 4.0, I);
        let g = Grid::radial(3, 64, 4.0).unwrap();
        let f = Field::zeros(g, 0.0);
        let traj = evolve(&p, &f, &SolveConfig::backward(0.0, 0.01, 1e-3)).unwrap();
        let b = critical_spacetime_bound(&traj, 0.05).unwrap();
        assert_eq!(b.integral, 0.0);
        assert_eq!(b.bound, 0.0);
        assert!(b.holds);
    }
}
