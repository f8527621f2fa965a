//! Run configuration: a sectioned key/value file parsed with `toml`.
//!
//! ```toml
//! [params]
//! N = 1
//! alpha = 2.0
//! lambda_re = 0.0
//! lambda_im = 1.0
//! k = 6.0            # optional, defaults to the smallest admissible even k
//!
//! [grid]
//! num_points = 1024
//! radius = 16.0
//! ```
//!
//! `[solve]` and `[initial]` drive `evolve`; `[study]` drives the blow-up
//! commands.

use cnls_core::params::min_admissible_k;
use cnls_core::solver::{Scheme, SolveConfig};
use cnls_core::study::StudyConfig;
use cnls_core::{Field, Grid, PhysParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config: missing section [{0}]")]
    MissingSection(&'static str),
    #[error("config: {0}")]
    Invalid(#[from] cnls_core::Error),
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(rename = "N")]
    pub dim: u32,
    pub alpha: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub num_points: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub viscosity_eps: f64,
    #[serde(default = "one")]
    pub diag_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub n_list: Vec<u32>,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default = "one")]
    pub diag_every: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub ode_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    /// `A exp(-(x/w)²) e^{i v x}`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// `U(t_start, ·)`.
    Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Recorded in the manifest; no command draws random numbers.
    #[serde(default)]
    pub seed: u32,
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
}

fn default_scheme() -> Scheme {
    Scheme::StrangSplit
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Ok((Self::parse(&text)?, text))
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Physical parameters; `k` defaults to the smallest admissible even k.
    pub fn phys_params(&self) -> Result<PhysParams, ConfigError> {
        let p = &self.params;
        let k = match p.k {
            Some(k) => k,
            None => min_admissible_k(p.dim, p.alpha, &[2.0])?,
        };
        Ok(PhysParams::new(p.dim, p.alpha, Complex64::new(p.lambda_re, p.lambda_im), k)?)
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        let g = self.grid.as_ref().ok_or(ConfigError::MissingSection("grid"))?;
        Ok(Grid::for_dim(self.params.dim, g.num_points, g.radius)?)
    }

    pub fn solve_config(&self) -> Result<SolveConfig, ConfigError> {
        let s = self.solve.as_ref().ok_or(ConfigError::MissingSection("solve"))?;
        Ok(SolveConfig {
            dt: s.dt,
            t_start: s.t_start,
            t_end: s.t_end,
            scheme: s.scheme,
            viscosity_eps: s.viscosity_eps,
            diag_every: s.diag_every,
        })
    }

    pub fn study_config(&self) -> Result<StudyConfig, ConfigError> {
        let s = self.study.as_ref().ok_or(ConfigError::MissingSection("study"))?;
        let delta = s.delta.unwrap_or_else(|| StudyConfig::default_delta(&s.n_list));
        let mut cfg = StudyConfig::new(self.phys_params()?, self.grid()?, s.n_list.clone(), delta, s.dt);
        if let Some([lo, hi]) = s.fit_window {
            cfg.fit_window = (lo, hi);
        }
        cfg.diag_every = s.diag_every;
        cfg.scheme = s.scheme;
        cfg.ode_only = s.ode_only;
        Ok(cfg)
    }

    pub fn initial_field(&self, params: &PhysParams, grid: &Grid, t0: f64) -> Result<Field, ConfigError> {
        let init = self.initial.as_ref().ok_or(ConfigError::MissingSection("initial"))?;
        let f = match *init {
            InitialSection::Gaussian {
                amplitude,
                width,
                velocity,
            } => Field::from_fn(*grid, t0, |x| {
                Complex64::from_polar(amplitude * (-(x / width).powi(2)).exp(), velocity * x)
            })?,
            InitialSection::Profile => cnls_core::profile::Profile::new(params)?.field(grid, t0)?,
        };
        Ok(f)
    }
}

/// `serialize(parse(text))`.
pub fn normalize(text: &str) -> Result<String, ConfigError> {
    Ok(RunConfig::parse(text)?.to_text())
}
