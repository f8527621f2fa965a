//! The blow-up construction run as an experiment.
//!
//! For each `n` the Cauchy problem is started on the profile at
//! `T_n = -1/n` and integrated backward over a window of length `δ`. The
//! difference `ε_n(t) = u_n(t) - U(t)` is measured against the predicted
//! rates, and the time-reversed differences `η_n(s) = ε_n(T_n - s)` are
//! compared across `n` as a finite stand-in for the compactness argument.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, norm_report_with, sig12, Field, NormReport};
use crate::grid::{Grid, GridMode};
use crate::params::{critical_power, exponent_table, validate_assumptions, ExponentTable, PhysParams};
use crate::profile::{linear_fit, log_spaced_times, verify_scaling, Profile, ProfileQuantity, ScalingFit};
use crate::solver::{critical_spacetime_bound, evolve, integrate, CriticalBound, Scheme, SolveConfig};

/// Minimum number of grid spacings across the profile's gradient scale.
pub const MIN_SPACINGS_PER_SCALE: f64 = 4.0;
/// `|U|` at the edge of a periodic domain, relative to its centre value.
pub const MAX_EDGE_RATIO: f64 = 1e-3;
pub const MIN_FIT_POINTS: usize = 8;
/// `‖ε‖ / ‖u‖` below which `ε` is treated as zero.
pub const ROUNDOFF_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub params: PhysParams,
    pub grid: Grid,
    pub n_list: Vec<u32>,
    pub delta: f64,
    pub dt: f64,
    /// Fit interval in elapsed time `s = T_n - t`, inside `(0, δ)`.
    pub fit_window: (f64, f64),
    pub diag_every: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Drop the Laplacian: every node then follows the profile ODE exactly.
    #[serde(default)]
    pub ode_only: bool,
}

fn default_scheme() -> Scheme {
    Scheme::StrangSplit
}

impl StudyConfig {
    /// Fit window excluding the first and last 5% of `(0, δ)`.
    pub fn default_fit_window(delta: f64) -> (f64, f64) {
        (0.05 * delta, 0.95 * delta)
    }

    /// `δ = |T_{n_max}| / 2`.
    pub fn default_delta(n_list: &[u32]) -> f64 {
        let n_max = n_list.iter().copied().max().unwrap_or(1);
        0.5 / n_max as f64
    }

    pub fn new(params: PhysParams, grid: Grid, n_list: Vec<u32>, delta: f64, dt: f64) -> Self {
        Self {
            params,
            grid,
            n_list,
            delta,
            dt,
            fit_window: Self::default_fit_window(delta),
            diag_every: 1,
            scheme: Scheme::StrangSplit,
            ode_only: false,
        }
    }

    pub fn t_n(n: u32) -> f64 {
        -1.0 / n as f64
    }

    pub fn validate(&self) -> Result<()> {
        self.params.require_blowup_mode()?;
        let report = validate_assumptions(&self.params)?;
        if !report.theorem_applies {
            return Err(Error::InvalidParams(format!(
                "parameters outside the admissible range: {}",
                report.failures().join("; ")
            )));
        }
        if !self.params.k_is_even() {
            return Err(Error::InvalidParams(format!("k = {} must be an even integer", self.params.k)));
        }
        if self.grid.dim != self.params.dim {
            return Err(Error::GridMismatch(format!(
                "grid dimension {} vs N = {}",
                self.grid.dim, self.params.dim
            )));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[1] <= w[0]) || self.n_list[0] == 0 {
            return Err(Error::InvalidParams("n_list must be positive and strictly increasing".into()));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParams(format!("delta = {} must be positive", self.delta)));
        }
        let (lo, hi) = self.fit_window;
        if !(lo > 0.0 && lo < hi && hi <= self.delta) {
            return Err(Error::InvalidParams(format!(
                "fit window ({lo}, {hi}) must lie inside (0, {}]",
                self.delta
            )));
        }
        self.solve_config(self.n_list[0]).validate(&self.grid)
    }

    pub fn solve_config(&self, n: u32) -> SolveConfig {
        SolveConfig {
            dt: self.dt,
            t_start: Self::t_n(n),
            t_end: Self::t_n(n) - self.delta,
            scheme: self.scheme,
            viscosity_eps: 0.0,
            diag_every: self.diag_every,
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        let mut c = self.clone();
        c.diag_every = ((self.diag_every as f64) * self.dt / dt).round().max(1.0) as usize;
        c.dt = dt;
        c
    }
}

/// The profile's gradient length scale `max|U| / max|∇U|` at time `t` on
/// the grid's nodes.
pub fn gradient_scale(prof: &Profile, grid: &Grid, t: f64) -> Result<f64> {
    let mut u_max: f64 = 0.0;
    let mut g_max: f64 = 0.0;
    for r in grid.coords() {
        u_max = u_max.max(prof.value(t, r.abs())?.norm());
        g_max = g_max.max(prof.radial_derivative(t, r.abs())?.norm());
    }
    Ok(if g_max == 0.0 { f64::INFINITY } else { u_max / g_max })
}

/// Checks that the grid resolves the profile over `[T_n - δ, T_n]`.
pub fn check_resolution(cfg: &StudyConfig, n: u32) -> Result<()> {
    let prof = Profile::new(&cfg.params)?;
    let t_n = StudyConfig::t_n(n);
    let scale = gradient_scale(&prof, &cfg.grid, t_n)?;
    if scale < MIN_SPACINGS_PER_SCALE * cfg.grid.spacing {
        return Err(Error::Resolution(format!(
            "profile gradient scale {scale:.3e} at T_n = {t_n} is below {MIN_SPACINGS_PER_SCALE} \
             grid spacings ({:.3e})",
            cfg.grid.spacing
        )));
    }
    if cfg.grid.mode == GridMode::Cartesian1D {
        let t = t_n - cfg.delta;
        let ratio = prof.value(t, cfg.grid.radius)?.norm() / prof.value(t, 0.0)?.norm();
        if ratio > MAX_EDGE_RATIO {
            return Err(Error::Resolution(format!(
                "|U| at the periodic boundary is {ratio:.3e} of its centre value at t = {t}; \
                 enlarge the domain"
            )));
        }
    }
    Ok(())
}

/// One member of the sequence: `ε_n = u_n - U` along `[T_n - δ, T_n]`.
#[derive(Debug, Clone)]
pub struct EpsilonTrajectory {
    pub n: u32,
    pub t_n: f64,
    /// Recorded absolute times, decreasing from `T_n`.
    pub times: Vec<f64>,
    pub eps_norms: Vec<NormReport>,
    pub u_norms: Vec<NormReport>,
    /// `ε_n` at each recorded time.
    pub snapshots: Vec<Field>,
}

impl EpsilonTrajectory {
    /// Elapsed backward time `s = T_n - t`.
    pub fn elapsed(&self) -> Vec<f64> {
        self.times.iter().map(|t| self.t_n - t).collect()
    }

    /// `η_n(s) = ε_n(T_n - s)` at the recorded elapsed times.
    pub fn eta(&self) -> Vec<(f64, &Field)> {
        self.elapsed().into_iter().zip(&self.snapshots).collect()
    }
}

pub fn run_epsilon_trajectory(cfg: &StudyConfig, n: u32) -> Result<EpsilonTrajectory> {
    cfg.validate()?;
    check_resolution(cfg, n)?;
    let prof = Profile::new(&cfg.params)?;
    let t_n = StudyConfig::t_n(n);
    let grid = cfg.grid;
    let u0 = prof.field(&grid, t_n)?;
    let solve = cfg.solve_config(n);
    let alpha = cfg.params.alpha;
    let coords = grid.coords();

    let mut times = Vec::new();
    let mut eps_norms = Vec::new();
    let mut u_norms = Vec::new();
    let mut snapshots = Vec::new();
    let observe = |_: usize, t: f64, v: &[Complex64], integ: &crate::solver::Integrator| -> Result<()> {
        let eps: Vec<Complex64> = v
            .iter()
            .zip(&coords)
            .map(|(u, &x)| prof.value(t, x.abs()).map(|p| u - p))
            .collect::<Result<_>>()?;
        let eps = Field::new(grid, eps, t)?;
        let u = Field::new(grid, v.to_vec(), t)?;
        eps_norms.push(norm_report_with(integ.spectral(), &eps, alpha));
        u_norms.push(norm_report_with(integ.spectral(), &u, alpha));
        times.push(t);
        snapshots.push(eps);
        Ok(())
    };
    if cfg.ode_only {
        integrate_ode_only(&cfg.params, &u0, &solve, observe)?;
    } else {
        integrate(&cfg.params, &u0, &solve, observe)
            .map_err(|e| e.context(format!("n = {n}")))?;
    }
    Ok(EpsilonTrajectory {
        n,
        t_n,
        times,
        eps_norms,
        u_norms,
        snapshots,
    })
}

fn integrate_ode_only<F>(params: &PhysParams, f0: &Field, cfg: &SolveConfig, mut observe: F) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64], &crate::solver::Integrator) -> Result<()>,
{
    cfg.validate(f0.grid())?;
    let (n_steps, h) = cfg.steps()?;
    let integ = crate::solver::Integrator::new(params, f0.grid(), cfg.scheme, h, 0.0);
    let mut v = f0.values().to_vec();
    observe(0, cfg.t_start, &v, &integ)?;
    for i in 1..=n_steps {
        crate::solver::nonlinear_substep_in_place(&mut v, params.alpha, params.lambda, h)?;
        if i % cfg.diag_every == 0 || i == n_steps {
            observe(i, cfg.t_start + i as f64 * h, &v, &integ)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuantity {
    EpsL2,
    EpsH1dot,
    EpsH1,
    EpsWeighted,
}

impl RateQuantity {
    pub const ALL: [RateQuantity; 4] = [
        RateQuantity::EpsL2,
        RateQuantity::EpsH1dot,
        RateQuantity::EpsH1,
        RateQuantity::EpsWeighted,
    ];

    pub fn of(&self, r: &NormReport) -> f64 {
        match self {
            RateQuantity::EpsL2 => r.l2,
            RateQuantity::EpsH1dot => r.h1_dot,
            RateQuantity::EpsH1 => r.h1,
            RateQuantity::EpsWeighted => r.weighted_l2,
        }
    }

    pub fn predicted(&self, table: &ExponentTable) -> Option<f64> {
        match self {
            RateQuantity::EpsL2 => Some(table.mu1),
            RateQuantity::EpsH1dot => Some(table.h1_dot_rate()),
            RateQuantity::EpsH1 => Some(table.predicted_mu),
            RateQuantity::EpsWeighted => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub n: u32,
    pub quantity: RateQuantity,
    pub fitted_exponent: f64,
    pub predicted_exponent: Option<f64>,
    /// `C` in `‖·‖ ≈ C (T_n - t)^{fitted}` from the least-squares intercept.
    pub prefactor: f64,
    /// RMS deviation of the log-log fit.
    pub fit_residual: f64,
    pub num_points: usize,
}

fn window_points(traj: &EpsilonTrajectory, window: (f64, f64), q: RateQuantity) -> (Vec<f64>, Vec<f64>) {
    traj.elapsed()
        .into_iter()
        .zip(&traj.eps_norms)
        .filter(|(s, _)| *s >= window.0 * (1.0 - 1e-12) && *s <= window.1 * (1.0 + 1e-12))
        .map(|(s, r)| (s, q.of(r)))
        .unzip()
}

/// Least-squares rates of each `ε_n` norm against `T_n - t` over the fit
/// window. Quantities at roundoff level relative to `u_n` are skipped.
pub fn fit_rates(
    traj: &EpsilonTrajectory,
    table: &ExponentTable,
    window: (f64, f64),
) -> Result<Vec<RateFit>> {
    let mut fits = Vec::new();
    for q in RateQuantity::ALL {
        let (s, v) = window_points(traj, window, q);
        if s.len() < MIN_FIT_POINTS {
            return Err(Error::Fit(format!(
                "{} points in the fit window for n = {}, need {MIN_FIT_POINTS}",
                s.len(),
                traj.n
            )));
        }
        let at_roundoff = v
            .iter()
            .zip(&traj.u_norms)
            .all(|(&x, u)| x <= ROUNDOFF_LEVEL * q.of(u));
        if at_roundoff {
            continue;
        }
        if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Fit(format!(
                "{q:?} for n = {} has zero or non-finite samples in the window",
                traj.n
            )));
        }
        let xs: Vec<f64> = s.iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = v.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = linear_fit(&xs, &ys)?;
        let rms = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum::<f64>()
            / xs.len() as f64)
            .sqrt();
        fits.push(RateFit {
            n: traj.n,
            quantity: q,
            fitted_exponent: slope,
            predicted_exponent: q.predicted(table),
            prefactor: intercept.exp(),
            fit_residual: rms,
            num_points: xs.len(),
        });
    }
    Ok(fits)
}

/// `sup_s ‖ε_n(s)‖ / s^μ` over the window: the smallest constant for which
/// the bound `‖ε_n‖ <= C s^μ` holds on the samples.
pub fn envelope_constant(traj: &EpsilonTrajectory, q: RateQuantity, exponent: f64, window: (f64, f64)) -> f64 {
    let (s, v) = window_points(traj, window, q);
    s.iter()
        .zip(&v)
        .map(|(s, v)| v / s.powf(exponent))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyDiagnostic {
    pub tau: f64,
    pub n_pairs: Vec<(u32, u32)>,
    /// `sup_{s ∈ [τ, δ]} ‖η_n(s) - η_m(s)‖_{L²}` for consecutive pairs.
    pub pair_gaps: Vec<f64>,
}

impl CauchyDiagnostic {
    pub fn strictly_decreasing(&self) -> bool {
        self.pair_gaps.windows(2).all(|w| w[1] < w[0])
    }

    pub fn non_increasing(&self) -> bool {
        self.pair_gaps.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Sup-in-time `L²` gaps between consecutive time-reversed differences.
pub fn cauchy_diagnostic(trajs: &[EpsilonTrajectory], tau: f64, delta: f64) -> Result<CauchyDiagnostic> {
    let mut pair_gaps = Vec::new();
    let mut n_pairs = Vec::new();
    for pair in trajs.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (ea, eb) = (a.eta(), b.eta());
        if ea.len() != eb.len() {
            return Err(Error::GridMismatch(format!(
                "n = {} has {} records, n = {} has {}",
                a.n,
                ea.len(),
                b.n,
                eb.len()
            )));
        }
        let mut gap: f64 = 0.0;
        for ((sa, fa), (sb, fb)) in ea.iter().zip(&eb) {
            if (sa - sb).abs() > 1e-9 * delta {
                return Err(Error::GridMismatch(format!(
                    "elapsed times differ: {sa} vs {sb}"
                )));
            }
            if *sa < tau * (1.0 - 1e-12) || *sa > delta * (1.0 + 1e-12) {
                continue;
            }
            gap = gap.max(lp_norm(&fa.sub(fb)?, 2.0));
        }
        pair_gaps.push(gap);
        n_pairs.push((a.n, b.n));
    }
    Ok(CauchyDiagnostic {
        tau,
        n_pairs,
        pair_gaps,
    })
}

/// Largest `δ' <= δ` for which the `H¹` envelope constants over
/// `[0.05 δ', δ']` vary by less than a factor 2 across the sequence.
pub fn uniform_delta_probe(trajs: &[EpsilonTrajectory], table: &ExponentTable, delta: f64) -> f64 {
    if trajs.len() < 2 {
        return delta;
    }
    const STEPS: usize = 20;
    for j in (1..=STEPS).rev() {
        let d = delta * j as f64 / STEPS as f64;
        let window = (0.05 * d, d);
        let consts: Vec<f64> = trajs
            .iter()
            .map(|t| envelope_constant(t, RateQuantity::EpsH1, table.predicted_mu, window))
            .collect();
        let (lo, hi) = consts
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
        if lo > 0.0 && hi / lo < 2.0 {
            return d;
        }
    }
    0.0
}

/// Runs every member of `n_list`, in parallel.
pub fn run_all(cfg: &StudyConfig) -> Result<Vec<EpsilonTrajectory>> {
    cfg.validate()?;
    cfg.n_list
        .par_iter()
        .map(|&n| run_epsilon_trajectory(cfg, n))
        .collect()
}

/// `‖u_dt - u_{dt/2}‖ / ‖u_{dt/2} - u_{dt/4}‖` at the end of the window.
pub fn self_convergence_ratio(cfg: &StudyConfig, n: u32) -> Result<f64> {
    let finals = [1.0, 0.5, 0.25]
        .par_iter()
        .map(|&f| {
            let c = cfg.with_dt(cfg.dt * f);
            let traj = run_epsilon_trajectory(&c, n)?;
            Ok(traj.snapshots.last().cloned().expect("at least one record"))
        })
        .collect::<Result<Vec<_>>>()?;
    let d1 = lp_norm(&finals[0].sub(&finals[1])?, 2.0);
    let d2 = lp_norm(&finals[1].sub(&finals[2])?, 2.0);
    Ok(d1 / d2)
}

pub fn table_for(cfg: &StudyConfig) -> ExponentTable {
    exponent_table(&cfg.params)
}

/// Tolerances of the aggregate checks.
pub const L2_RATE_SLACK: f64 = 0.05;
pub const H1_RATE_SLACK: f64 = 0.1;
pub const PREFACTOR_SPREAD: f64 = 2.0;
pub const SCALING_SLOPE_TOL: f64 = 1e-2;
pub const MIN_SELF_CONVERGENCE: f64 = 3.5;
pub const CRITICAL_BOUND_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub params: PhysParams,
    pub grid: Grid,
    pub n_list: Vec<u32>,
    pub delta: f64,
    pub dt: f64,
    pub table: ExponentTable,
    pub rate_fits: Vec<RateFit>,
    pub cauchy: CauchyDiagnostic,
    pub uniform_delta: f64,
    pub profile_scaling: Vec<ScalingFit>,
    /// Quantities not resolvable on the scaling grid.
    pub scaling_skipped: Vec<String>,
    pub self_convergence_ratio: f64,
    pub critical_bound: Option<CriticalBound>,
    pub checks: Vec<Check>,
}

impl StudyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Grid for the profile scaling fits over `t ∈ [-1, -0.1]`.
pub fn scaling_grid(dim: u32) -> Result<Grid> {
    Grid::for_dim(dim, 8001, 40.0)
}

/// Scaling fits of `‖U‖_{L^p}`, `‖∇U‖_{L^p}` (`p = 2, 4, ∞`) and `‖ΔU‖_{L²}`
/// over `t ∈ [-1, -0.1]`. Quantities whose tails the grid truncates are
/// returned separately with the reason.
pub fn profile_scaling_fits(params: &PhysParams, grid: &Grid) -> Result<(Vec<ScalingFit>, Vec<String>)> {
    let times = log_spaced_times(-1.0, -0.1, 21);
    let mut jobs = Vec::new();
    for p in [2.0, 4.0, f64::INFINITY] {
        jobs.push((ProfileQuantity::Lp, p));
        jobs.push((ProfileQuantity::GradLp, p));
    }
    jobs.push((ProfileQuantity::LapL2, 2.0));
    let results: Vec<(ProfileQuantity, f64, Result<ScalingFit>)> = jobs
        .par_iter()
        .map(|&(q, p)| (q, p, verify_scaling(params, q, p, &times, grid)))
        .collect();
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for (q, p, r) in results {
        match r {
            Ok(f) => fits.push(f),
            Err(Error::Grid(msg)) => skipped.push(format!("{} p = {p}: {msg}", q.name())),
            Err(e) => return Err(e.context(format!("scaling of {} with p = {p}", q.name()))),
        }
    }
    Ok((fits, skipped))
}

fn sig_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| sig12(*x)).collect();
    format!("[{}]", items.join(", "))
}

fn is_critical(p: &PhysParams) -> bool {
    let crit = critical_power(p.dim);
    p.dim >= 3 && (p.alpha - crit).abs() <= 1e-12 * crit
}

/// Runs the whole study and grades every check.
pub fn blowup_report(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let trajs = run_all(cfg).map_err(|e| e.context("epsilon trajectories"))?;
    blowup_report_from(cfg, &trajs)
}

/// Same as [`blowup_report`] on trajectories already computed by
/// [`run_all`] for `cfg`.
pub fn blowup_report_from(cfg: &StudyConfig, trajs: &[EpsilonTrajectory]) -> Result<StudyReport> {
    cfg.validate()?;
    if trajs.iter().map(|t| t.n).ne(cfg.n_list.iter().copied()) {
        return Err(Error::InvalidParams("trajectories do not match n_list".into()));
    }
    let table = table_for(cfg);

    let mut rate_fits = Vec::new();
    for tr in trajs {
        rate_fits.extend(fit_rates(tr, &table, cfg.fit_window).map_err(|e| e.context("rate fits"))?);
    }
    let tau = 0.25 * cfg.delta;
    let cauchy = cauchy_diagnostic(trajs, tau, cfg.delta).map_err(|e| e.context("cauchy diagnostic"))?;
    let uniform_delta = uniform_delta_probe(trajs, &table, cfg.delta);
    let (profile_scaling, scaling_skipped) = profile_scaling_fits(&cfg.params, &scaling_grid(cfg.params.dim)?)?;
    let n_max = *cfg.n_list.last().expect("validated non-empty");
    let self_convergence_ratio =
        self_convergence_ratio(cfg, n_max).map_err(|e| e.context("self-convergence"))?;
    let critical_bound = if is_critical(&cfg.params) {
        let prof = Profile::new(&cfg.params)?;
        let u0 = prof.field(&cfg.grid, StudyConfig::t_n(n_max))?;
        let rec = evolve(&cfg.params, &u0, &cfg.solve_config(n_max))
            .map_err(|e| e.context("critical-case run"))?;
        Some(critical_spacetime_bound(&rec, CRITICAL_BOUND_TOL)?)
    } else {
        None
    };

    let mut checks = Vec::new();
    let zero_start = trajs.iter().all(|t| {
        let r = &t.eps_norms[0];
        r.l2 == 0.0 && r.h1 == 0.0
    });
    checks.push(Check::new("eps_zero_at_t_n", zero_start, "ε_n(T_n) = 0 for every n".into()));

    let fits_of = |q: RateQuantity| rate_fits.iter().filter(move |f| f.quantity == q);
    let l2: Vec<f64> = fits_of(RateQuantity::EpsL2).map(|f| f.fitted_exponent).collect();
    checks.push(Check::new(
        "rate_l2",
        l2.len() == trajs.len() && l2.iter().all(|&e| e >= table.mu1 - L2_RATE_SLACK),
        format!("fitted {} vs mu1 - {L2_RATE_SLACK} = {}", sig_list(&l2), sig12(table.mu1 - L2_RATE_SLACK)),
    ));
    let h1: Vec<f64> = fits_of(RateQuantity::EpsH1).map(|f| f.fitted_exponent).collect();
    checks.push(Check::new(
        "rate_h1",
        h1.len() == trajs.len() && h1.iter().all(|&e| e >= table.predicted_mu - H1_RATE_SLACK),
        format!(
            "fitted {} vs predicted_mu - {H1_RATE_SLACK} = {}",
            sig_list(&h1),
            sig12(table.predicted_mu - H1_RATE_SLACK)
        ),
    ));
    let pref: Vec<f64> = fits_of(RateQuantity::EpsH1).map(|f| f.prefactor).collect();
    let (lo, hi) = pref
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    checks.push(Check::new(
        "prefactor_uniform",
        !pref.is_empty() && lo > 0.0 && hi / lo < PREFACTOR_SPREAD,
        format!("H1 prefactors {}, spread {}", sig_list(&pref), sig12(hi / lo)),
    ));
    checks.push(Check::new(
        "cauchy_gaps_decrease",
        cauchy.pair_gaps.len() >= 2 && cauchy.strictly_decreasing(),
        format!("gaps {} at tau = {}", sig_list(&cauchy.pair_gaps), sig12(tau)),
    ));
    checks.push(Check::new(
        "uniform_delta_positive",
        uniform_delta > 0.0,
        format!("delta' = {uniform_delta}"),
    ));
    let worst = profile_scaling
        .iter()
        .map(|f| (f.fitted_slope - f.predicted_slope).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "profile_scaling",
        !profile_scaling.is_empty() && worst <= SCALING_SLOPE_TOL,
        format!(
            "max slope error {worst:.3e} over {} fits, {} skipped",
            profile_scaling.len(),
            scaling_skipped.len()
        ),
    ));
    checks.push(Check::new(
        "self_convergence",
        self_convergence_ratio >= MIN_SELF_CONVERGENCE,
        format!("ratio {self_convergence_ratio:.4} at n = {n_max}"),
    ));
    if let Some(b) = &critical_bound {
        checks.push(Check::new(
            "critical_bound",
            b.holds,
            format!("integral {:.6e} vs bound {:.6e}", b.integral, b.bound),
        ));
    }

    Ok(StudyReport {
        params: cfg.params,
        grid: cfg.grid,
        n_list: cfg.n_list.clone(),
        delta: cfg.delta,
        dt: cfg.dt,
        table,
        rate_fits,
        cauchy,
        uniform_delta,
        profile_scaling,
        scaling_skipped,
        self_convergence_ratio,
        critical_bound,
        checks,
    })
}
