//! Problem data `(N, alpha, lambda, k)`, admissibility of the blow-up
//! construction, and the closed-form exponents it predicts.
//!
//! Dimension-dependent thresholds such as `4/(N-2)` are read as `+inf` for
//! `N = 1, 2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;

/// Problem data for `i u_t + Δu = λ|u|^α u` in `R^N` together with the
/// profile steepness `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub dim: u32,
    pub alpha: f64,
    pub lambda: Complex64,
    pub k: f64,
}

impl PhysParams {
    pub fn new(dim: u32, alpha: f64, lambda: Complex64, k: f64) -> Result<Self> {
        let p = Self {
            dim,
            alpha,
            lambda,
            k,
        };
        p.check_well_formed()?;
        Ok(p)
    }

    pub fn check_well_formed(&self) -> Result<()> {
        if !(1..=5).contains(&self.dim) {
            return Err(Error::InvalidParams(format!(
                "N = {} outside 1..=5",
                self.dim
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must be a positive finite number",
                self.alpha
            )));
        }
        if !(self.lambda.re.is_finite() && self.lambda.im.is_finite()) || self.lambda.norm() == 0.0
        {
            return Err(Error::InvalidParams(format!(
                "lambda = {} must be finite and nonzero",
                self.lambda
            )));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidParams(format!(
                "k = {} must be positive and finite",
                self.k
            )));
        }
        Ok(())
    }

    /// Blow-up studies need `Im λ > 0`; real `λ` is validation mode only.
    pub fn require_blowup_mode(&self) -> Result<()> {
        self.check_well_formed()?;
        if self.lambda.im <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "Im(lambda) = {} must be positive for blow-up construction; \
                 use validation mode (evolve) for real lambda",
                self.lambda.im
            )));
        }
        Ok(())
    }

    pub fn k_is_even(&self) -> bool {
        self.k.fract() == 0.0 && (self.k as u64).is_multiple_of(2)
    }

    /// `S_{N-1}`, the area of the unit sphere in `R^N` (2 for `N = 1`).
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }
}

pub fn sphere_area(dim: u32) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => f64::NAN,
    }
}

/// `a/(N-2)`, infinite for `N <= 2`.
fn over_n_minus_2(a: f64, dim: u32) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        a / (dim as f64 - 2.0)
    }
}

/// Energy-critical power `4/(N-2)`.
pub fn critical_power(dim: u32) -> f64 {
    over_n_minus_2(4.0, dim)
}

fn approx_eq(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn le_tol(a: f64, b: f64) -> bool {
    a <= b || approx_eq(a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub subcritical_or_critical: bool,
    pub alpha_above_one: bool,
    pub weak_coeff_ok: bool,
    pub strict_coeff_ok: bool,
    pub strict_required: bool,
    pub theorem_applies: bool,
}

impl AdmissibilityReport {
    /// Human-readable reasons the construction does not apply.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.alpha_above_one {
            out.push("alpha must exceed 1");
        }
        if !self.subcritical_or_critical {
            out.push("alpha must satisfy alpha <= 4/(N-2)");
        }
        if !self.weak_coeff_ok {
            out.push("coefficient condition (alpha+2) Im(lambda) >= alpha |lambda| fails");
        } else if self.strict_required && !self.strict_coeff_ok {
            out.push(
                "strict inequality required: (alpha+2) Im(lambda) > alpha |lambda| \
                 is needed when alpha > N/(N-2) or alpha = 4/(N-2)",
            );
        }
        out
    }
}

pub fn validate_assumptions(p: &PhysParams) -> Result<AdmissibilityReport> {
    if !(1..=5).contains(&p.dim) {
        return Err(Error::InvalidParams(format!(
            "N = {} outside 1..=5",
            p.dim
        )));
    }
    let alpha = p.alpha;
    let crit = critical_power(p.dim);
    let subcritical_or_critical = alpha > 0.0 && le_tol(alpha, crit);
    let alpha_above_one = alpha > 1.0;

    let lhs = (alpha + 2.0) * p.lambda.im;
    let rhs = alpha * p.lambda.norm();
    let weak_coeff_ok = lhs >= rhs || approx_eq(lhs, rhs);
    let strict_coeff_ok = lhs > rhs && !approx_eq(lhs, rhs);

    let strict_required = alpha > over_n_minus_2(p.dim as f64, p.dim) || approx_eq(alpha, crit);

    let theorem_applies = subcritical_or_critical
        && alpha_above_one
        && weak_coeff_ok
        && (!strict_required || strict_coeff_ok);

    Ok(AdmissibilityReport {
        subcritical_or_critical,
        alpha_above_one,
        weak_coeff_ok,
        strict_coeff_ok,
        strict_required,
        theorem_applies,
    })
}

/// `1 < alpha < (N+2)/(N-2)`: the range in which the low-power estimate of
/// the `|eps|^alpha` term closes as `k -> inf`.
pub fn condition_a2(p: &PhysParams) -> bool {
    let upper = over_n_minus_2(p.dim as f64 + 2.0, p.dim);
    p.alpha > 1.0 && p.alpha < upper && !approx_eq(p.alpha, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerCase {
    /// `1 < alpha <= N/(N-2)`: Hölder plus Gagliardo–Nirenberg on `|eps|^alpha`.
    LowPower,
    /// `2 <= alpha <= 4/(N-2)`: Cauchy–Schwarz absorption into the coercive term.
    HighPower,
}

/// Which estimate chain handles the `|eps|^alpha |∇U| |∇eps|` term. When
/// both ranges contain `alpha`, `LowPower` wins.
pub fn power_case(alpha: f64, dim: u32) -> Result<PowerCase> {
    let low_upper = over_n_minus_2(dim as f64, dim);
    let high_upper = critical_power(dim);
    if alpha > 1.0 && le_tol(alpha, low_upper) {
        Ok(PowerCase::LowPower)
    } else if le_tol(2.0, alpha) && le_tol(alpha, high_upper) {
        Ok(PowerCase::HighPower)
    } else {
        Err(Error::InvalidParams(format!(
            "alpha = {alpha} lies in neither 1 < alpha <= N/(N-2) nor 2 <= alpha <= 4/(N-2) \
             for N = {dim}"
        )))
    }
}

/// Closed-form exponents for the profile norms and the difference
/// estimates. All are affine in `1/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub dim: u32,
    pub alpha: f64,
    pub k: f64,
    pub profile_lap_l2: f64,
    pub profile_gradlap_l2: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Only present in the high-power case, where the `|eps|^alpha` term is
    /// split through Cauchy–Schwarz.
    pub mu3: Option<f64>,
    pub mu4: f64,
    pub mu5: f64,
    pub predicted_mu: f64,
}

impl ExponentTable {
    /// `‖U(t)‖_{L^p} ~ (-t)^{-1/α + N/(pk)}`.
    pub fn profile_lp(&self, p: f64) -> f64 {
        -1.0 / self.alpha + self.dim as f64 / (p * self.k)
    }

    /// `‖∇U(t)‖_{L^p} ~ (-t)^{-1/α - 1/k + N/(pk)}`.
    pub fn profile_grad_lp(&self, p: f64) -> f64 {
        -1.0 / self.alpha - 1.0 / self.k + self.dim as f64 / (p * self.k)
    }

    /// Rate of `‖∇ε‖_{L²}` obtained by integrating `-d/dt‖∇ε‖² ≲ (-t)^{μ5}`.
    pub fn h1_dot_rate(&self) -> f64 {
        (self.mu5 + 1.0) / 2.0
    }
}

/// `mu3` from the two terms of the weighted bound
/// `‖ε‖²‖U‖_∞^{α-2}‖∇U‖_∞² + ‖ε‖_{L^α}^α ‖∇U‖_∞²`, the second reduced by
/// Gagliardo–Nirenberg with `‖∇ε‖` treated as bounded.
fn mu3_formula(dim: f64, alpha: f64, k: f64, mu1: f64) -> f64 {
    let first = 2.0 * mu1 - 1.0 - 2.0 / k;
    let second = mu1 * (2.0 * dim - alpha * (dim - 2.0)) / 2.0 - 2.0 / alpha - 2.0 / k;
    first.min(second)
}

pub fn exponent_table(p: &PhysParams) -> ExponentTable {
    let n = p.dim as f64;
    let a = p.alpha;
    let k = p.k;
    let mu1 = 1.0 - 1.0 / a - (4.0 - n) / (2.0 * k);
    let mu2 = mu1 * (a - n * (a - 1.0) / 2.0) - 1.0 / a - 1.0 / k;
    let mu3 = match power_case(a, p.dim) {
        Ok(PowerCase::HighPower) => Some(mu3_formula(n, a, k, mu1)),
        _ => None,
    };
    let mu4 = -1.0 / a - (6.0 - n) / (2.0 * k);
    let mu5 = mu3.map_or(mu2.min(mu4), |m3| mu2.min(m3).min(mu4));
    let predicted_mu = mu1.min((mu5 + 1.0) / 2.0);
    ExponentTable {
        dim: p.dim,
        alpha: a,
        k,
        profile_lap_l2: -1.0 / a - 2.0 / k + n / (2.0 * k),
        profile_gradlap_l2: -1.0 / a - 3.0 / k + n / (2.0 * k),
        mu1,
        mu2,
        mu3,
        mu4,
        mu5,
        predicted_mu,
    }
}

const MAX_K: u32 = 100_000;

/// Smallest even `k` for which `|U(t,·)|` lies in every `L^p` of `p_list`,
/// `0 < mu1 < 1`, and `mu5 > -1`.
pub fn min_admissible_k(dim: u32, alpha: f64, p_list: &[f64]) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} must be positive")));
    }
    if !(1..=5).contains(&dim) {
        return Err(Error::InvalidParams(format!("N = {dim} outside 1..=5")));
    }
    let fail = |reason: &str| Error::NoAdmissibleK {
        dim,
        alpha,
        reason: reason.to_string(),
    };

    // Every constraint is affine in 1/k, so the k -> inf limit decides existence.
    let n = dim as f64;
    let mu1_inf = 1.0 - 1.0 / alpha;
    if !(mu1_inf > 0.0 && mu1_inf < 1.0) {
        return Err(fail("mu1 -> 1 - 1/alpha is not in (0, 1)"));
    }
    let mu2_inf = mu1_inf * (alpha - n * (alpha - 1.0) / 2.0) - 1.0 / alpha;
    let mu4_inf = -1.0 / alpha;
    let mut mu5_inf = mu2_inf.min(mu4_inf);
    if let Ok(PowerCase::HighPower) = power_case(alpha, dim) {
        let first = 2.0 * mu1_inf - 1.0;
        let second = mu1_inf * (2.0 * n - alpha * (n - 2.0)) / 2.0 - 2.0 / alpha;
        mu5_inf = mu5_inf.min(first.min(second));
    }
    if mu5_inf <= -1.0 {
        return Err(fail("mu5 stays <= -1 for every k"));
    }

    let dummy_lambda = Complex64::new(0.0, 1.0);
    for half in 1..=MAX_K / 2 {
        let k = 2.0 * half as f64;
        let tails_ok = p_list
            .iter()
            .all(|&p| p.is_infinite() || p * k / alpha > n);
        if !tails_ok {
            continue;
        }
        let table = exponent_table(&PhysParams {
            dim,
            alpha,
            lambda: dummy_lambda,
            k,
        });
        if table.mu1 > 0.0 && table.mu1 < 1.0 && table.mu5 > -1.0 {
            return Ok(k);
        }
    }
    Err(fail("no even k below the search cap"))
}

/// `|x| U(t,·) ∈ L²` requires `2k/α - 2 > N`.
pub fn profile_in_sigma(p: &PhysParams) -> bool {
    2.0 * p.k / p.alpha - 2.0 > p.dim as f64
}
