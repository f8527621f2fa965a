use cnls_core::field::{lp_norm, norm_report};
use cnls_core::params::{critical_power, exponent_table, min_admissible_k, validate_assumptions};
use cnls_core::profile::profile_value;
use cnls_core::solver::{linear_substep, nonlinear_substep};
use cnls_core::{Field, Grid, PhysParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn gaussian(grid: Grid, amp: f64, width: f64, phase: f64) -> Field {
    Field::from_fn(grid, 0.0, |x| {
        Complex64::from_polar(amp * (-(x / width).powi(2)).exp(), phase * x)
    })
    .unwrap()
}

fn any_grid() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (32usize..256, 2.0..20.0f64).prop_map(|(m, r)| Grid::cartesian(m, r).unwrap()),
        (2u32..=5, 32usize..256, 2.0..20.0f64).prop_map(|(d, m, r)| Grid::radial(d, m, r).unwrap()),
    ]
}

/// Admissible `(N, α, λ)`: `α ∈ (1, 4/(N-2)]` and `(α+2) b > α|λ|` strictly.
fn admissible() -> impl Strategy<Value = (u32, f64, Complex64)> {
    (1u32..=5, 0.0..1.0f64, 0.05..1.0f64, prop::bool::ANY).prop_map(|(dim, w, slack, neg)| {
        let top = critical_power(dim).min(8.0);
        let alpha = 1.0 + 1e-3 + w * (top - 1.0 - 1e-3);
        // (α+2) b > α sqrt(a² + b²)  <=>  |a| < b sqrt((α+2)² - α²) / α.
        let b = 1.0;
        let a_max = b * ((alpha + 2.0).powi(2) - alpha * alpha).sqrt() / alpha;
        let a = if neg { -1.0 } else { 1.0 } * a_max * (1.0 - slack);
        (dim, alpha, Complex64::new(a, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_norm_is_homogeneous(grid in any_grid(), p in prop_oneof![Just(f64::INFINITY), 1.0..8.0f64],
                              re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        let f = gaussian(grid, 1.3, 1.1, 0.7);
        let a = lp_norm(&f.scaled(c), p);
        let b = c.norm() * lp_norm(&f, p);
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn norm_report_identities(grid in any_grid(), amp in 0.1..3.0f64, width in 0.5..2.0f64, alpha in 1.0..4.0f64) {
        let r = norm_report(&gaussian(grid, amp, width, 0.3), alpha);
        let h1_sq = r.l2 * r.l2 + r.h1_dot * r.h1_dot;
        prop_assert!((r.h1 * r.h1 - h1_sq).abs() <= 1e-12 * h1_sq);
        let sigma_sq = h1_sq + r.weighted_l2 * r.weighted_l2;
        prop_assert!((r.sigma * r.sigma - sigma_sq).abs() <= 1e-12 * sigma_sq);
    }

    #[test]
    fn min_k_gives_admissible_exponents((dim, alpha, lambda) in admissible()) {
        let p0 = PhysParams::new(dim, alpha, lambda, 2.0).unwrap();
        prop_assert!(validate_assumptions(&p0).unwrap().theorem_applies);
        let Ok(k) = min_admissible_k(dim, alpha, &[2.0]) else {
            return Ok(());
        };
        let t = exponent_table(&PhysParams::new(dim, alpha, lambda, k).unwrap());
        prop_assert!(t.mu1 > 0.0 && t.mu1 < 1.0, "mu1 = {}", t.mu1);
        prop_assert!(t.mu5 > -1.0, "mu5 = {}", t.mu5);
        prop_assert!(t.predicted_mu > 0.0, "predicted_mu = {}", t.predicted_mu);
    }

    #[test]
    fn exponents_monotone_in_inverse_k((dim, alpha, lambda) in admissible(), k1 in 2.0..50.0f64,
                                        dk1 in 1.0..50.0f64, dk2 in 1.0..50.0f64) {
        let table = |k: f64| exponent_table(&PhysParams::new(dim, alpha, lambda, k).unwrap());
        let ts = [table(k1), table(k1 + dk1), table(k1 + dk1 + dk2)];
        let fields = |t: &cnls_core::ExponentTable| {
            vec![t.profile_lap_l2, t.profile_gradlap_l2, t.mu1, t.mu2, t.mu4,
                 t.profile_lp(2.0), t.profile_grad_lp(2.0), t.h1_dot_rate()]
        };
        let v: Vec<Vec<f64>> = ts.iter().map(fields).collect();
        for j in 0..v[0].len() {
            let (d1, d2) = (v[1][j] - v[0][j], v[2][j] - v[1][j]);
            prop_assert!(d1 * d2 >= -1e-15, "field {j}: {d1} then {d2}");
        }
        let far = table(1e12);
        prop_assert!((far.profile_lp(2.0) + 1.0 / alpha).abs() < 1e-9);
    }

    #[test]
    fn lambda_i_meets_weak_condition(dim in 1u32..=5, alpha in 0.01..20.0f64) {
        let p = PhysParams::new(dim, alpha, Complex64::new(0.0, 1.0), 2.0).unwrap();
        prop_assert!(validate_assumptions(&p).unwrap().weak_coeff_ok);
    }

    #[test]
    fn profile_modulus_is_power_of_s((dim, alpha, lambda) in admissible(), t in -5.0..-1e-3f64,
                                     r in 0.0..4.0f64, half_k in 1u32..8) {
        let k = 2.0 * half_k as f64;
        let p = PhysParams::new(dim, alpha, lambda, k).unwrap();
        let mut x = vec![0.0; dim as usize];
        x[0] = r;
        let u = profile_value(&p, t, &x).unwrap();
        let s = alpha * lambda.im * (r.powf(k) - t);
        let expect = s.powf(-1.0 / alpha);
        prop_assert!((u.norm() - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn profile_has_no_branch_jumps((dim, alpha, lambda) in admissible(), t in -2.0..-1e-3f64) {
        let p = PhysParams::new(dim, alpha, lambda, 6.0).unwrap();
        let mut prev = profile_value(&p, t, &vec![0.0; dim as usize]).unwrap();
        for j in 1..=4000 {
            let mut x = vec![0.0; dim as usize];
            x[0] = 3.0 * j as f64 / 4000.0;
            let u = profile_value(&p, t, &x).unwrap();
            let turn = (u / prev).arg().abs();
            prop_assert!(turn < 0.5, "phase jump {turn} at r = {}", x[0]);
            prev = u;
        }
    }

    #[test]
    fn nonlinear_flow_is_a_semigroup(grid in any_grid(), amp in 0.1..2.0f64, alpha in 1.0..4.0f64,
                                     a in -1.0..1.0f64, b in 0.0..1.0f64, dt in -0.05..0.05f64) {
        let f = gaussian(grid, amp, 1.0, 0.5);
        let lambda = Complex64::new(a, b);
        let one = nonlinear_substep(&f, alpha, lambda, dt);
        let two = nonlinear_substep(&f, alpha, lambda, 0.5 * dt)
            .and_then(|g| nonlinear_substep(&g, alpha, lambda, 0.5 * dt));
        match (one, two) {
            (Ok(one), Ok(two)) => {
                let err = lp_norm(&one.sub(&two).unwrap(), 2.0);
                prop_assert!(err <= 1e-12 * lp_norm(&one, 2.0).max(f64::MIN_POSITIVE));
            }
            (Err(_), _) => {}
            (Ok(_), Err(e)) => prop_assert!(false, "half steps failed: {e}"),
        }
    }

    #[test]
    fn spectral_linear_step_is_isometric(m in 32usize..512, radius in 2.0..20.0f64, dt in -0.5..0.5f64) {
        let f = gaussian(Grid::cartesian(m, radius).unwrap(), 1.0, 1.0, 0.4);
        let g = linear_substep(&f, dt, 0.0);
        let (a, b) = (lp_norm(&g, 2.0), lp_norm(&f, 2.0));
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn snapshot_round_trips(grid in any_grid(), amp in 0.1..3.0f64, t in -1.0..0.0f64) {
        let f = gaussian(grid, amp, 1.0, 0.9).with_time_tag(t);
        prop_assert_eq!(&Field::from_bytes(&f.to_bytes()).unwrap(), &f);
        let back = Field::from_csv(&f.to_csv(), grid, t).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - b).norm() <= 1e-11 * b.norm().max(1e-300));
        }
    }
}

#[test]
fn power_diff_sup_is_finite_and_bounded() {
    for p in [0.5, 1.0, 2.0, 3.0] {
        for n in 0..=2 {
            let sup = cnls_core::field::power_diff_sup_ratio(p, n, 20_000, 7).unwrap();
            assert!(sup.is_finite() && sup > 0.0 && sup < 10.0, "p={p} n={n} sup={sup}");
        }
    }
}
