//! Subcommands. Exit codes: 0 success, 1 the theorem does not apply (or a
//! blow-up run is refused), 2 malformed configuration, 3 run failure.

use std::path::Path;

use cnls_core::params::{exponent_table, validate_assumptions};
use cnls_core::profile::ScalingFit;
use cnls_core::solver::{charge_identity_residual, critical_spacetime_bound, evolve, TrajectoryRecord};
use cnls_core::study::{
    blowup_report_from, fit_rates, profile_scaling_fits, run_all, scaling_grid, EpsilonTrajectory, RateFit,
    StudyConfig, CRITICAL_BOUND_TOL,
};
use cnls_core::{PhysParams, Result as CoreResult};
use serde_json::json;

use crate::config::{ConfigError, InitialSection, RunConfig};
use crate::output::{fmt, OutputDir};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_APPLICABLE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckParams,
    ProfileNorms,
    Evolve,
    BlowupStudy,
    FitRates,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckParams => "check-params",
            Command::ProfileNorms => "profile-norms",
            Command::Evolve => "evolve",
            Command::BlowupStudy => "blowup-study",
            Command::FitRates => "fit-rates",
        }
    }
}

/// An exit code with the message for stderr.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: String,
}

impl Exit {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Exit {
    fn from(e: ConfigError) -> Self {
        Exit::new(EXIT_MALFORMED, e.to_string())
    }
}

pub struct Options<'a> {
    pub out: &'a Path,
    pub dt_refine: bool,
}

pub fn run(cmd: Command, cfg: &RunConfig, opts: &Options) -> std::result::Result<(), Exit> {
    match cmd {
        Command::CheckParams => check_params(cfg),
        Command::ProfileNorms => profile_norms(cfg, opts),
        Command::Evolve => run_evolve(cfg, opts),
        Command::BlowupStudy => blowup_study(cfg, opts, false),
        Command::FitRates => blowup_study(cfg, opts, true),
    }
}

pub fn check_params(cfg: &RunConfig) -> std::result::Result<(), Exit> {
    let p = &cfg.params;
    let params = PhysParams::new(p.dim, p.alpha, num_complex::Complex64::new(p.lambda_re, p.lambda_im), p.k.unwrap_or(2.0))
        .map_err(|e| Exit::new(EXIT_MALFORMED, e.to_string()))?;
    let report = validate_assumptions(&params).map_err(|e| Exit::new(EXIT_MALFORMED, e.to_string()))?;
    let table = if report.theorem_applies {
        cfg.phys_params().ok().map(|p| exponent_table(&p))
    } else {
        None
    };
    let doc = json!({ "admissibility": report, "exponents": table });
    print!("{}", crate::output::to_json_text(&doc).map_err(|e| Exit::new(EXIT_FAILED, e.to_string()))?);
    if report.theorem_applies {
        println!("theorem applies: N = {}, alpha = {}, lambda = {}", p.dim, p.alpha, params.lambda);
        Ok(())
    } else {
        let reasons = report.failures().join("; ");
        println!("theorem does not apply: {reasons}");
        Err(Exit::new(EXIT_NOT_APPLICABLE, format!("theorem does not apply: {reasons}")))
    }
}

fn manifest(cmd: Command, cfg: &RunConfig, grid: Option<cnls_core::Grid>, dt: Option<f64>, dt_refine: bool) -> serde_json::Value {
    json!({
        "command": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": cfg.hash(),
        "seed": cfg.seed,
        "grid": grid,
        "dt": dt,
        "dt_refine": dt_refine,
    })
}

/// Runs `body` against a fresh output directory, removing partial outputs
/// on failure.
fn with_output<F>(root: &Path, manifest: serde_json::Value, body: F) -> std::result::Result<(), Exit>
where
    F: FnOnce(&mut OutputDir) -> std::result::Result<(), String>,
{
    let io = |e: std::io::Error| Exit::new(EXIT_FAILED, format!("{}: {e}", root.display()));
    let mut out = OutputDir::create(root, manifest).map_err(io)?;
    match body(&mut out) {
        Ok(()) => out.finish().map_err(io),
        Err(msg) => {
            out.fail(&msg).map_err(io)?;
            Err(Exit::new(EXIT_FAILED, msg))
        }
    }
}

fn core<T>(r: CoreResult<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn io<T>(r: std::io::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn scaling_rows(fit: &ScalingFit) -> Vec<Vec<String>> {
    fit.rows
        .iter()
        .map(|r| vec![fmt(r.t), fmt(r.norm), fmt(r.predicted), fmt(r.fitted)])
        .collect()
}

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn profile_norms(cfg: &RunConfig, opts: &Options) -> std::result::Result<(), Exit> {
    let params = cfg.phys_params()?;
    let grid = match cfg.grid {
        Some(_) => cfg.grid()?,
        None => scaling_grid(params.dim).map_err(ConfigError::from)?,
    };
    let m = manifest(Command::ProfileNorms, cfg, Some(grid), None, opts.dt_refine);
    with_output(opts.out, m, |out| {
        let (fits, skipped) = core(profile_scaling_fits(&params, &grid))?;
        for f in &fits {
            let name = format!("profile_{}_p{}.csv", f.quantity.name(), p_label(f.p));
            io(out.write_csv(&name, &["t", "norm", "predicted", "fitted"], &scaling_rows(f)))?;
        }
        let summary: Vec<_> = fits
            .iter()
            .map(|f| {
                json!({
                    "quantity": f.quantity.name(),
                    "p": if f.p.is_infinite() { json!("inf") } else { json!(f.p) },
                    "fitted_slope": f.fitted_slope,
                    "predicted_slope": f.predicted_slope,
                    "residual": f.residual,
                })
            })
            .collect();
        io(out.write_json("profile_scaling.json", &json!({ "params": params, "fits": summary, "skipped": skipped })))?;
        for f in &fits {
            println!(
                "{:<8} p = {:<4} fitted {:>12} predicted {:>12}",
                f.quantity.name(),
                p_label(f.p),
                fmt(f.fitted_slope),
                fmt(f.predicted_slope)
            );
        }
        Ok(())
    })
}

fn relative_drift(values: &[f64]) -> f64 {
    let v0 = values.first().copied().unwrap_or(0.0);
    let dev = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    if v0 == 0.0 {
        dev
    } else {
        dev / v0.abs()
    }
}

fn trajectory_rows(traj: &TrajectoryRecord) -> Vec<Vec<String>> {
    (0..traj.len())
        .map(|i| {
            let r = &traj.norms[i];
            let mut row = vec![
                fmt(traj.times[i]),
                fmt(r.l2),
                fmt(r.h1_dot),
                fmt(r.h1),
                fmt(r.l_alpha_plus_2),
                fmt(r.sigma),
                fmt(r.weighted_l2),
                fmt(traj.energy[i]),
                traj.charge_identity_residual.get(i).map(|v| fmt(*v)).unwrap_or_default(),
            ];
            if let Some(lq) = &traj.critical_lq {
                row.push(fmt(lq[i]));
            }
            row
        })
        .collect()
}

fn run_evolve(cfg: &RunConfig, opts: &Options) -> std::result::Result<(), Exit> {
    // k only shapes the profile; Gaussian data runs without one.
    let params = match (&cfg.initial, cfg.params.k) {
        (Some(InitialSection::Gaussian { .. }), None) => {
            let mut c = cfg.clone();
            c.params.k = Some(2.0);
            c.phys_params()?
        }
        _ => cfg.phys_params()?,
    };
    let grid = cfg.grid()?;
    let mut solve = cfg.solve_config()?;
    if opts.dt_refine {
        solve.dt *= 0.5;
        solve.diag_every *= 2;
    }
    solve.validate(&grid).map_err(|e| Exit::new(EXIT_MALFORMED, e.to_string()))?;
    let f0 = cfg.initial_field(&params, &grid, solve.t_start)?;
    let m = manifest(Command::Evolve, cfg, Some(grid), Some(solve.dt), opts.dt_refine);
    with_output(opts.out, m, |out| {
        let traj = core(evolve(&params, &f0, &solve))?;
        let mut header = vec![
            "t", "l2", "h1_dot", "h1", "l_alpha_plus_2", "sigma", "weighted_l2", "energy", "charge_residual",
        ];
        if traj.critical_lq.is_some() {
            header.push("critical_lq");
        }
        io(out.write_csv("trajectory.csv", &header, &trajectory_rows(&traj)))?;
        if let Some(f) = &traj.final_field {
            io(out.write_text("final_field.csv", &f.to_csv()))?;
            io(out.write_bytes("final_field.bin", &f.to_bytes()))?;
        }
        let l2: Vec<f64> = traj.norms.iter().map(|r| r.l2).collect();
        let residual = if traj.len() >= 3 {
            core(charge_identity_residual(&traj))?.into_iter().fold(0.0, f64::max)
        } else {
            0.0
        };
        let critical = critical_spacetime_bound(&traj, CRITICAL_BOUND_TOL).ok();
        let report = json!({
            "params": params,
            "solve": solve,
            "records": traj.len(),
            "l2_relative_drift": relative_drift(&l2),
            "energy_relative_drift": relative_drift(&traj.energy),
            "max_charge_identity_residual": residual,
            "gradient_monotone": traj.gradient_monotone_ok.iter().all(|&b| b),
            "critical_bound": critical,
        });
        io(out.write_json("evolve_report.json", &report))?;
        println!("records            {}", traj.len());
        println!("l2 drift           {}", fmt(relative_drift(&l2)));
        println!("energy drift       {}", fmt(relative_drift(&traj.energy)));
        println!("charge residual    {}", fmt(residual));
        if let Some(c) = critical {
            println!("critical bound     {} <= {} : {}", fmt(c.integral), fmt(c.bound), c.holds);
        }
        Ok(())
    })
}

fn eps_rows(traj: &EpsilonTrajectory) -> Vec<Vec<String>> {
    traj.times
        .iter()
        .zip(traj.elapsed())
        .zip(&traj.eps_norms)
        .map(|((t, s), r)| {
            vec![
                fmt(*t),
                fmt(s),
                fmt(r.l2),
                fmt(r.h1_dot),
                fmt(r.h1),
                fmt(r.l_alpha_plus_2),
                fmt(r.sigma),
                fmt(r.weighted_l2),
            ]
        })
        .collect()
}

fn rate_rows(fits: &[RateFit]) -> Vec<Vec<String>> {
    fits.iter()
        .map(|f| {
            let q = serde_json::to_value(f.quantity).expect("enum serializes");
            vec![
                f.n.to_string(),
                q.as_str().unwrap_or_default().to_string(),
                fmt(f.fitted_exponent),
                f.predicted_exponent.map(fmt).unwrap_or_default(),
                fmt(f.prefactor),
                fmt(f.fit_residual),
                f.num_points.to_string(),
            ]
        })
        .collect()
}

fn refuse_unless_blowup(params: &PhysParams) -> std::result::Result<(), Exit> {
    params
        .require_blowup_mode()
        .map_err(|e| Exit::new(EXIT_NOT_APPLICABLE, e.to_string()))?;
    let report = validate_assumptions(params).map_err(|e| Exit::new(EXIT_MALFORMED, e.to_string()))?;
    if !report.theorem_applies {
        return Err(Exit::new(
            EXIT_NOT_APPLICABLE,
            format!("theorem does not apply: {}", report.failures().join("; ")),
        ));
    }
    Ok(())
}

fn blowup_study(cfg: &RunConfig, opts: &Options, fits_only: bool) -> std::result::Result<(), Exit> {
    let params = cfg.phys_params()?;
    refuse_unless_blowup(&params)?;
    let mut study: StudyConfig = cfg.study_config()?;
    if opts.dt_refine {
        study = study.with_dt(0.5 * study.dt);
    }
    study.validate().map_err(|e| Exit::new(EXIT_MALFORMED, e.to_string()))?;
    let cmd = if fits_only { Command::FitRates } else { Command::BlowupStudy };
    let m = manifest(cmd, cfg, Some(study.grid), Some(study.dt), opts.dt_refine);
    with_output(opts.out, m, |out| {
        let trajs = core(run_all(&study))?;
        for tr in &trajs {
            io(out.write_csv(
                &format!("eps_n{}.csv", tr.n),
                &["t", "s", "l2", "h1_dot", "h1", "l_alpha_plus_2", "sigma", "weighted_l2"],
                &eps_rows(tr),
            ))?;
        }
        let table = cnls_core::study::table_for(&study);
        let mut fits = Vec::new();
        for tr in &trajs {
            fits.extend(core(fit_rates(tr, &table, study.fit_window))?);
        }
        io(out.write_csv(
            "rate_fits.csv",
            &["n", "quantity", "fitted_exponent", "predicted_exponent", "prefactor", "fit_residual", "num_points"],
            &rate_rows(&fits),
        ))?;
        if fits_only {
            io(out.write_json("rate_fits.json", &json!({ "exponents": table, "fits": fits })))?;
            for f in &fits {
                println!(
                    "n = {:<4} {:<13} fitted {:>20} predicted {:>20}",
                    f.n,
                    format!("{:?}", f.quantity),
                    fmt(f.fitted_exponent),
                    f.predicted_exponent.map(fmt).unwrap_or_else(|| "-".into())
                );
            }
            return Ok(());
        }
        let report = core(blowup_report_from(&study, &trajs))?;
        io(out.write_json("study_report.json", &report))?;
        for c in &report.checks {
            println!("{:<24} {}  {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
        }
        Ok(())
    })
}
