//! Output directory handling. Every write goes through one [`OutputDir`]
//! owned by the main thread.

use std::fs;
use std::path::{Path, PathBuf};

use cnls_core::field::sig12;
use serde::Serialize;
use serde_json::{json, Value};

pub const MANIFEST: &str = "manifest.json";
pub const SCHEMA: &str = "schema.json";

/// Column documentation for every CSV the CLI can emit.
pub fn schema() -> Value {
    json!({
        "trajectory.csv": {
            "t": "time",
            "l2": "‖u‖_{L²}",
            "h1_dot": "‖∇u‖_{L²}",
            "h1": "‖u‖_{H¹}",
            "l_alpha_plus_2": "‖u‖_{L^{α+2}}",
            "sigma": "‖u‖_Σ = (‖u‖_{H¹}² + ‖|x|u‖_{L²}²)^{1/2}",
            "weighted_l2": "‖|x|u‖_{L²}",
            "energy": "½‖∇u‖² + Re λ/(α+2) ‖u‖_{α+2}^{α+2}",
            "charge_residual": "relative residual of d/dt ½‖u‖² = Im λ ‖u‖_{α+2}^{α+2}",
            "critical_lq": "‖u‖_{L^q}, q = N(α+2)/(N-2); present for N >= 3"
        },
        "final_field.csv": {
            "coordinate": "x (N = 1) or r (radial)",
            "re": "Re u",
            "im": "Im u"
        },
        "final_field.bin": {
            "layout": "8-byte magic CNLSFLD1, u8 grid mode (0 cartesian, 1 radial), u32 N, u64 M, f64 R, f64 time, then M pairs of f64 (re, im); little-endian"
        },
        "profile_<quantity>_p<p>.csv": {
            "t": "time (negative)",
            "norm": "norm of the profile quantity at t",
            "predicted": "predicted power law anchored at the first row",
            "fitted": "least-squares power law"
        },
        "eps_n<n>.csv": {
            "t": "time",
            "s": "elapsed backward time T_n - t",
            "l2": "‖ε_n‖_{L²}",
            "h1_dot": "‖∇ε_n‖_{L²}",
            "h1": "‖ε_n‖_{H¹}",
            "l_alpha_plus_2": "‖ε_n‖_{L^{α+2}}",
            "sigma": "‖ε_n‖_Σ",
            "weighted_l2": "‖|x|ε_n‖_{L²}"
        },
        "rate_fits.csv": {
            "n": "sequence index, T_n = -1/n",
            "quantity": "eps_l2 | eps_h1dot | eps_h1 | eps_weighted",
            "fitted_exponent": "least-squares slope of log‖ε_n‖ against log(T_n - t)",
            "predicted_exponent": "predicted exponent, empty when none",
            "prefactor": "exp(intercept)",
            "fit_residual": "RMS deviation of the log-log fit",
            "num_points": "samples in the fit window"
        }
    })
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = sig12(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json_text<T: Serialize>(value: &T) -> std::io::Result<String> {
    let mut v = serde_json::to_value(value).map_err(std::io::Error::other)?;
    round_floats(&mut v);
    let mut text = serde_json::to_string_pretty(&v).map_err(std::io::Error::other)?;
    text.push('\n');
    Ok(text)
}

pub struct OutputDir {
    root: PathBuf,
    manifest: Value,
    written: Vec<PathBuf>,
}

impl OutputDir {
    /// Creates the directory and writes the manifest (status `running`) and
    /// the CSV schema before anything else.
    pub fn create(root: &Path, mut manifest: Value) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        manifest["status"] = json!("running");
        let mut out = Self {
            root: root.to_path_buf(),
            manifest,
            written: Vec::new(),
        };
        out.write_manifest()?;
        out.write_json(SCHEMA, &schema())?;
        Ok(out)
    }

    fn write_manifest(&self) -> std::io::Result<()> {
        fs::write(self.root.join(MANIFEST), to_json_text(&self.manifest)?)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> std::io::Result<()> {
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let text = to_json_text(value)?;
        self.write_text(name, &text)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.manifest["status"] = json!("complete");
        self.manifest["files"] = json!(self
            .written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect::<Vec<_>>());
        self.write_manifest()
    }

    /// Removes everything written so far and marks the manifest failed.
    pub fn fail(mut self, error: &str) -> std::io::Result<()> {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        self.manifest["status"] = json!("failed");
        self.manifest["error"] = json!(error);
        self.write_manifest()
    }
}

pub fn fmt(x: f64) -> String {
    sig12(x)
}
