//! The explicit blow-up profile
//!
//! ```text
//! U(t, x) = s^c,   s = α Im(λ) (|x|^k - t),   c = -1/α + i Re(λ) / (α Im(λ)),
//! ```
//!
//! which solves the pointwise ODE `i U_t = λ |U|^α U` with a blow-up time
//! `|x|^k` that depends on position. Since `s > 0` for every `t < 0` the
//! power is taken on the positive real axis and needs no branch choice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, Field};
use crate::grid::Grid;
use crate::params::{exponent_table, PhysParams};

/// Relative size allowed for the part of a profile norm lying outside the
/// grid.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Precomputed constants of the profile for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub params: PhysParams,
    /// `α Im λ`.
    pub rate: f64,
    /// The complex exponent `c`.
    pub exponent: Complex64,
}

impl Profile {
    pub fn new(params: &PhysParams) -> Result<Self> {
        params.require_blowup_mode()?;
        let rate = params.alpha * params.lambda.im;
        let exponent = Complex64::new(-1.0 / params.alpha, params.lambda.re / rate);
        Ok(Self {
            params: *params,
            rate,
            exponent,
        })
    }

    fn check_time(t: f64) -> Result<()> {
        if t < 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(t))
        }
    }

    /// `s = α Im λ (r^k - t)`.
    pub fn base(&self, t: f64, r: f64) -> f64 {
        self.rate * (r.powf(self.params.k) - t)
    }

    /// `s^w` for real `s > 0`.
    fn power(s: f64, w: Complex64) -> Complex64 {
        Complex64::from_polar(s.powf(w.re), w.im * s.ln())
    }

    /// `U(t, r)` with `r = |x|`.
    pub fn value(&self, t: f64, r: f64) -> Result<Complex64> {
        Self::check_time(t)?;
        Ok(Self::power(self.base(t, r), self.exponent))
    }

    /// `U_t = -α Im λ · c · s^{c-1}`.
    pub fn time_derivative(&self, t: f64, r: f64) -> Result<Complex64> {
        Self::check_time(t)?;
        let s = self.base(t, r);
        Ok(-self.rate * self.exponent * Self::power(s, self.exponent - 1.0))
    }

    /// `∂_r U = c s^{c-1} α Im λ k r^{k-1}`; zero at the origin for `k > 1`.
    pub fn radial_derivative(&self, t: f64, r: f64) -> Result<Complex64> {
        Self::check_time(t)?;
        let k = self.params.k;
        let s = self.base(t, r);
        let ds = self.rate * k * r.powf(k - 1.0);
        Ok(self.exponent * Self::power(s, self.exponent - 1.0) * ds)
    }

    /// `ΔU` in `R^N` for a radial profile.
    pub fn laplacian(&self, t: f64, r: f64) -> Result<Complex64> {
        Self::check_time(t)?;
        let (c, k, n) = (self.exponent, self.params.k, self.params.dim as f64);
        let s = self.base(t, r);
        let g = self.rate * k * r.powf(k - 1.0);
        let q = self.rate * k * (k + n - 2.0) * r.powf(k - 2.0);
        Ok(c * (c - 1.0) * Self::power(s, c - 2.0) * g * g + c * Self::power(s, c - 1.0) * q)
    }

    /// `∂_r ΔU`.
    pub fn grad_laplacian(&self, t: f64, r: f64) -> Result<Complex64> {
        Self::check_time(t)?;
        let (c, k, n) = (self.exponent, self.params.k, self.params.dim as f64);
        let s = self.base(t, r);
        let g = self.rate * k * r.powf(k - 1.0);
        let dg = self.rate * k * (k - 1.0) * r.powf(k - 2.0);
        let q = self.rate * k * (k + n - 2.0) * r.powf(k - 2.0);
        let dq = if k == 2.0 {
            0.0
        } else {
            self.rate * k * (k + n - 2.0) * (k - 2.0) * r.powf(k - 3.0)
        };
        let c1 = c - 1.0;
        Ok(c * c1 * (c - 2.0) * Self::power(s, c - 3.0) * g * g * g
            + c * c1 * Self::power(s, c - 2.0) * (2.0 * g * dg + g * q)
            + c * Self::power(s, c1) * dq)
    }

    /// `|i U_t - λ |U|^α U|` with the analytic time derivative.
    pub fn ode_residual(&self, t: f64, r: f64) -> Result<f64> {
        let u = self.value(t, r)?;
        let ut = self.time_derivative(t, r)?;
        let lhs = Complex64::i() * ut;
        let rhs = self.params.lambda * u.norm().powf(self.params.alpha) * u;
        Ok((lhs - rhs).norm())
    }

    /// The profile sampled on a grid at time `t`.
    pub fn field(&self, grid: &Grid, t: f64) -> Result<Field> {
        self.quantity_field(grid, t, |r| self.value(t, r))
    }

    fn quantity_field<F>(&self, grid: &Grid, t: f64, f: F) -> Result<Field>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        if grid.dim != self.params.dim {
            return Err(Error::GridMismatch(format!(
                "grid dimension {} vs N = {}",
                grid.dim, self.params.dim
            )));
        }
        Field::try_from_fn(*grid, t, |x| f(x.abs()))
    }

    /// Sampled values of one of the norm-scaling quantities.
    pub fn quantity_values(&self, grid: &Grid, t: f64, q: ProfileQuantity) -> Result<Field> {
        match q {
            ProfileQuantity::Lp => self.field(grid, t),
            ProfileQuantity::GradLp => self.quantity_field(grid, t, |r| self.radial_derivative(t, r)),
            ProfileQuantity::LapL2 => self.quantity_field(grid, t, |r| self.laplacian(t, r)),
            ProfileQuantity::GradLapL2 => {
                self.quantity_field(grid, t, |r| self.grad_laplacian(t, r))
            }
            ProfileQuantity::WeightedLapL2 => {
                self.quantity_field(grid, t, |r| Ok((1.0 + r) * self.laplacian(t, r)?))
            }
        }
    }
}

pub fn profile_value(p: &PhysParams, t: f64, x: &[f64]) -> Result<Complex64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Profile::new(p)?.value(t, r)
}

/// `∇U(t, x) = c s^{c-1} α Im λ k |x|^{k-2} x`.
pub fn profile_gradient(p: &PhysParams, t: f64, x: &[f64]) -> Result<Vec<Complex64>> {
    if !p.k_is_even() {
        return Err(Error::InvalidParams(format!(
            "profile gradient needs even k, got {}",
            p.k
        )));
    }
    let prof = Profile::new(p)?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dr = prof.radial_derivative(t, r)?;
    if r == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); x.len()]);
    }
    Ok(x.iter().map(|&xi| dr * (xi / r)).collect())
}

pub fn profile_ode_residual(p: &PhysParams, t: f64, x: &[f64]) -> Result<f64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Profile::new(p)?.ode_residual(t, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileQuantity {
    /// `‖U‖_{L^p}`
    Lp,
    /// `‖∇U‖_{L^p}`
    GradLp,
    /// `‖ΔU‖_{L²}`
    LapL2,
    /// `‖∇ΔU‖_{L²}`
    GradLapL2,
    /// `‖(1 + |x|) ΔU‖_{L²}`
    WeightedLapL2,
}

impl ProfileQuantity {
    pub const ALL: [ProfileQuantity; 5] = [
        ProfileQuantity::Lp,
        ProfileQuantity::GradLp,
        ProfileQuantity::LapL2,
        ProfileQuantity::GradLapL2,
        ProfileQuantity::WeightedLapL2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProfileQuantity::Lp => "lp",
            ProfileQuantity::GradLp => "grad_lp",
            ProfileQuantity::LapL2 => "lap_l2",
            ProfileQuantity::GradLapL2 => "gradlap_l2",
            ProfileQuantity::WeightedLapL2 => "weighted_lap_l2",
        }
    }

    /// The Lebesgue exponent actually used: the requested `p` for the first
    /// two quantities, 2 for the rest.
    pub fn lebesgue(&self, p: f64) -> f64 {
        match self {
            ProfileQuantity::Lp | ProfileQuantity::GradLp => p,
            _ => 2.0,
        }
    }

    /// Extra algebraic decay (in powers of `r`) relative to `|U|`, and
    /// weight growth.
    fn decay_shift(&self) -> f64 {
        match self {
            ProfileQuantity::Lp => 0.0,
            ProfileQuantity::GradLp => 1.0,
            ProfileQuantity::LapL2 => 2.0,
            ProfileQuantity::GradLapL2 => 3.0,
            ProfileQuantity::WeightedLapL2 => 1.0,
        }
    }

    /// Predicted exponent of `(-t)`; for the weighted quantity this is the
    /// small-`|t|` upper bound.
    pub fn predicted_slope(&self, params: &PhysParams, p: f64) -> f64 {
        let e = exponent_table(params);
        match self {
            ProfileQuantity::Lp => e.profile_lp(p),
            ProfileQuantity::GradLp => e.profile_grad_lp(p),
            ProfileQuantity::LapL2 | ProfileQuantity::WeightedLapL2 => e.profile_lap_l2,
            ProfileQuantity::GradLapL2 => e.profile_gradlap_l2,
        }
    }
}

/// Norm of a profile quantity on a grid, with integrability and
/// tail-truncation checks.
pub fn profile_quantity_norm(
    params: &PhysParams,
    quantity: ProfileQuantity,
    lp_exponent: f64,
    t: f64,
    grid: &Grid,
) -> Result<f64> {
    let prof = Profile::new(params)?;
    let p = quantity.lebesgue(lp_exponent);
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("Lebesgue exponent {p} < 1")));
    }
    let dim = params.dim as f64;
    let decay = params.k / params.alpha + quantity.decay_shift();
    if p.is_finite() && p * decay <= dim {
        return Err(Error::NonIntegrable(format!(
            "{} with p = {p}: |f|^p ~ r^-{} is not integrable in R^{}",
            quantity.name(),
            p * decay,
            params.dim
        )));
    }
    let f = prof.quantity_values(grid, t, quantity)?;
    let norm = lp_norm(&f, p);
    if p.is_finite() {
        let edge = f.values()[grid.num_points - 1].norm();
        let r = grid.radius;
        let tail = params.sphere_area() * edge.powf(p) * r.powf(dim) / (p * decay - dim);
        let total = norm.powf(p);
        if tail > TAIL_TOLERANCE * total {
            return Err(Error::Grid(format!(
                "domain radius {r} truncates {:.3e} of {} at t = {t}",
                tail / total,
                quantity.name()
            )));
        }
    }
    Ok(norm)
}

/// `‖U(t)‖_{L^p}` by quadrature.
pub fn profile_norm(params: &PhysParams, t: f64, lp_exponent: f64, grid: &Grid) -> Result<f64> {
    profile_quantity_norm(params, ProfileQuantity::Lp, lp_exponent, t, grid)
}

/// `‖U(t)‖_{H¹}` by quadrature of the analytic gradient.
pub fn profile_h1_norm(params: &PhysParams, t: f64, grid: &Grid) -> Result<f64> {
    let l2 = profile_quantity_norm(params, ProfileQuantity::Lp, 2.0, t, grid)?;
    let g = profile_quantity_norm(params, ProfileQuantity::GradLp, 2.0, t, grid)?;
    Ok((l2 * l2 + g * g).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub t: f64,
    pub norm: f64,
    pub predicted: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub quantity: ProfileQuantity,
    pub p: f64,
    pub fitted_slope: f64,
    pub predicted_slope: f64,
    /// Max relative deviation of the data from the fitted power law.
    pub residual: f64,
    pub rows: Vec<ScalingRow>,
}

/// Least-squares line through `(x_i, y_i)`: returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::Fit(format!("need at least two points, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fit `log ‖q(U(t))‖` against `log(-t)` and compare with the predicted
/// exponent. `t_list` must span at least a decade of `-t`.
pub fn verify_scaling(
    params: &PhysParams,
    quantity: ProfileQuantity,
    lp_exponent: f64,
    t_list: &[f64],
    grid: &Grid,
) -> Result<ScalingFit> {
    if t_list.iter().any(|&t| t >= 0.0) {
        return Err(Error::Domain(t_list.iter().cloned().fold(f64::MIN, f64::max)));
    }
    let lo = t_list.iter().map(|t| -t).fold(f64::INFINITY, f64::min);
    let hi = t_list.iter().map(|t| -t).fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(Error::Fit(format!(
            "times span only a factor {:.3} in -t; need a decade",
            hi / lo
        )));
    }
    let norms = t_list
        .iter()
        .map(|&t| profile_quantity_norm(params, quantity, lp_exponent, t, grid))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = norms.iter().position(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(Error::Fit(format!("non-finite norm at t = {}", t_list[bad])));
    }
    let xs: Vec<f64> = t_list.iter().map(|t| (-t).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    let predicted_slope = quantity.predicted_slope(params, lp_exponent);
    let mut residual: f64 = 0.0;
    let rows = t_list
        .iter()
        .zip(&norms)
        .zip(&xs)
        .map(|((&t, &norm), &x)| {
            let fitted = (intercept + slope * x).exp();
            residual = residual.max((norm / fitted - 1.0).abs());
            // Predicted line anchored at the first sample.
            let predicted = norms[0] * ((-t) / (-t_list[0])).powf(predicted_slope);
            ScalingRow {
                t,
                norm,
                predicted,
                fitted,
            }
        })
        .collect();
    Ok(ScalingFit {
        quantity,
        p: quantity.lebesgue(lp_exponent),
        fitted_slope: slope,
        predicted_slope,
        residual,
        rows,
    })
}

/// `n` times log-uniformly spaced on `[t_lo, t_hi]` (both negative).
pub fn log_spaced_times(t_lo: f64, t_hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = ((-t_lo).ln(), (-t_hi).ln());
    (0..n)
        .map(|i| {
            let w = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            -(a + w * (b - a)).exp()
        })
        .collect()
}
