//! Complex fields sampled on a [`Grid`], their derivatives, and the discrete
//! `L^p`, `Ḣ¹`, `H¹`, `Σ` and weighted norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridMode, Spectral};

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    time_tag: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, time_tag: f64) -> Result<Self> {
        if values.len() != grid.num_points {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.num_points
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(time_tag).context(format!("value at node {j}")));
        }
        Ok(Self {
            grid,
            values,
            time_tag,
        })
    }

    pub fn zeros(grid: Grid, time_tag: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.num_points],
            time_tag,
        }
    }

    pub fn from_fn<F>(grid: Grid, time_tag: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = grid.coords().into_iter().map(f).collect();
        Self::new(grid, values, time_tag)
    }

    pub fn try_from_fn<F>(grid: Grid, time_tag: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let values = grid
            .coords()
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, time_tag)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time_tag(&self) -> f64 {
        self.time_tag
    }

    pub fn with_time_tag(mut self, t: f64) -> Self {
        self.time_tag = t;
        self
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            time_tag: self.time_tag,
        }
    }

    /// `self - other`, tagged with `self`'s time.
    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            time_tag: self.time_tag,
        })
    }
}

/// `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

pub const SNAPSHOT_CSV_HEADER: &str = "coordinate,re,im";
const SNAPSHOT_MAGIC: &[u8; 8] = b"CNLSFLD1";

impl Field {
    /// CSV snapshot with columns `coordinate,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.values.len());
        out.push_str(SNAPSHOT_CSV_HEADER);
        out.push('\n');
        for (x, v) in self.grid.coords().into_iter().zip(&self.values) {
            out.push_str(&format!("{},{},{}\n", sig12(x), sig12(v.re), sig12(v.im)));
        }
        out
    }

    /// Parses a CSV snapshot on a known grid; coordinates must match the
    /// grid's nodes.
    pub fn from_csv(text: &str, grid: Grid, time_tag: f64) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(SNAPSHOT_CSV_HEADER) {
            return Err(Error::Config(format!("snapshot header must be `{SNAPSHOT_CSV_HEADER}`")));
        }
        let coords = grid.coords();
        let mut values = Vec::with_capacity(grid.num_points);
        for (j, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("snapshot row {}: {e}", j + 1)))?;
            if cols.len() != 3 {
                return Err(Error::Config(format!("snapshot row {} has {} columns", j + 1, cols.len())));
            }
            let x = *coords
                .get(j)
                .ok_or_else(|| Error::Grid(format!("snapshot has more than {} rows", grid.num_points)))?;
            if (cols[0] - x).abs() > 1e-9 * grid.radius {
                return Err(Error::GridMismatch(format!("row {} at {} but node is {x}", j + 1, cols[0])));
            }
            values.push(Complex64::new(cols[1], cols[2]));
        }
        Self::new(grid, values, time_tag)
    }

    /// Flat little-endian binary: magic, grid, time tag, then `re, im` pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48 + 16 * self.values.len());
        out.extend_from_slice(SNAPSHOT_MAGIC);
        out.push(match self.grid.mode {
            GridMode::Cartesian1D => 0,
            GridMode::RadialND => 1,
        });
        out.extend_from_slice(&self.grid.dim.to_le_bytes());
        out.extend_from_slice(&(self.grid.num_points as u64).to_le_bytes());
        out.extend_from_slice(&self.grid.radius.to_le_bytes());
        out.extend_from_slice(&self.time_tag.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("binary snapshot: {what}"));
        let mut pos = 0;
        let mut take = |n: usize| -> Result<&[u8]> {
            let chunk = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated"))?;
            pos += n;
            Ok(chunk)
        };
        if take(8)? != SNAPSHOT_MAGIC {
            return Err(bad("bad magic"));
        }
        let mode = take(1)?[0];
        let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
        let dim = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
        let m = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
        let radius = f64_at(take(8)?);
        let time_tag = f64_at(take(8)?);
        let grid = match mode {
            0 => Grid::cartesian(m, radius)?,
            1 => Grid::radial(dim, m, radius)?,
            _ => return Err(bad("unknown grid mode")),
        };
        let mut values = Vec::with_capacity(m);
        for _ in 0..m {
            let re = f64_at(take(8)?);
            let im = f64_at(take(8)?);
            values.push(Complex64::new(re, im));
        }
        if pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Self::new(grid, values, time_tag)
    }
}

/// `‖f‖_{L^p}`; `p = inf` gives the max modulus.
pub fn lp_norm(f: &Field, p: f64) -> f64 {
    if p.is_infinite() {
        return f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let w = f.grid.weights();
    let sum: f64 = f
        .values
        .iter()
        .zip(&w)
        .map(|(v, w)| w * v.norm().powf(p))
        .sum();
    sum.powf(1.0 / p)
}

/// `∂_x f` (spectral, periodic) or `∂_r f` (centered differences, zero at
/// the origin).
pub fn gradient(f: &Field) -> Field {
    let grid = f.grid;
    let values = match grid.mode {
        GridMode::Cartesian1D => {
            let sp = Spectral::new(&grid);
            let mut buf = f.values.clone();
            sp.derivative(&mut buf);
            buf
        }
        GridMode::RadialND => radial_gradient(&f.values, grid.spacing),
    };
    Field {
        grid,
        values,
        time_tag: f.time_tag,
    }
}

fn radial_gradient(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let m = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for j in 1..m - 1 {
        out[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    }
    out[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
    out
}

pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid;
    let values = match grid.mode {
        GridMode::Cartesian1D => {
            let sp = Spectral::new(&grid);
            let mut buf = f.values.clone();
            sp.laplacian(&mut buf);
            buf
        }
        GridMode::RadialND => {
            let op = RadialLaplacian::new(&grid);
            op.apply(&f.values)
        }
    };
    Field {
        grid,
        values,
        time_tag: f.time_tag,
    }
}

/// Finite-volume radial Laplacian `r^{1-N} ∂_r (r^{N-1} ∂_r)` on the dual
/// cells of a radial grid. The origin face has zero area (so `∂_r f(0) = 0`
/// is built in) and the outer face is closed (zero flux).
///
/// The operator is symmetric in the inner product weighted by the cell
/// volumes, which makes Crank–Nicolson steps unitary.
#[derive(Debug, Clone)]
pub struct RadialLaplacian {
    /// Sub-diagonal `(L f)_j ∋ lower_j f_{j-1}`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RadialLaplacian {
    pub fn new(grid: &Grid) -> Self {
        let m = grid.num_points;
        let h = grid.spacing;
        let vol = grid.weights();
        let area = grid.face_areas();
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for j in 0..m {
            let right = if j + 1 < m { area[j] / h } else { 0.0 };
            let left = if j > 0 { area[j - 1] / h } else { 0.0 };
            lower[j] = left / vol[j];
            upper[j] = right / vol[j];
            diag[j] = -(left + right) / vol[j];
        }
        Self { lower, diag, upper }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let m = v.len();
        (0..m)
            .map(|j| {
                let mut acc = self.diag[j] * v[j];
                if j > 0 {
                    acc += self.lower[j] * v[j - 1];
                }
                if j + 1 < m {
                    acc += self.upper[j] * v[j + 1];
                }
                acc
            })
            .collect()
    }
}

/// `‖∇f‖_{L²}`. Spectral on Cartesian grids; on radial grids the face-based
/// sum `Σ A_{j+1/2} |f_{j+1} - f_j|² / h`, which equals `⟨f, -L f⟩` for the
/// finite-volume Laplacian.
pub fn h1_dot_norm(f: &Field) -> f64 {
    match f.grid.mode {
        GridMode::Cartesian1D => {
            let sp = Spectral::new(&f.grid);
            h1_dot_with(&sp, f)
        }
        GridMode::RadialND => {
            let h = f.grid.spacing;
            let area = f.grid.face_areas();
            let sum: f64 = f
                .values
                .windows(2)
                .zip(&area)
                .map(|(w, a)| a * (w[1] - w[0]).norm_sqr() / h)
                .sum();
            sum.sqrt()
        }
    }
}

fn h1_dot_with(sp: &Spectral, f: &Field) -> f64 {
    let mut buf = f.values.clone();
    sp.derivative(&mut buf);
    let sum: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    (sum * f.grid.spacing).sqrt()
}

/// `‖|x| f‖_{L²}` with the plain weight `|x|`.
pub fn weighted_l2_norm(f: &Field) -> f64 {
    let w = f.grid.weights();
    let sum: f64 = f
        .values
        .iter()
        .zip(&w)
        .enumerate()
        .map(|(j, (v, w))| {
            let x = f.grid.coord(j);
            w * x * x * v.norm_sqr()
        })
        .sum();
    sum.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub h1_dot: f64,
    pub h1: f64,
    pub l_alpha_plus_2: f64,
    pub sigma: f64,
    pub weighted_l2: f64,
    pub time_tag: f64,
}

impl NormReport {
    pub fn zero(time_tag: f64) -> Self {
        Self {
            l2: 0.0,
            h1_dot: 0.0,
            h1: 0.0,
            l_alpha_plus_2: 0.0,
            sigma: 0.0,
            weighted_l2: 0.0,
            time_tag,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.l2,
            self.h1_dot,
            self.h1,
            self.l_alpha_plus_2,
            self.sigma,
            self.weighted_l2,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// All norms of `f`; `alpha` fixes the `L^{α+2}` exponent.
pub fn norm_report(f: &Field, alpha: f64) -> NormReport {
    let h1_dot = h1_dot_norm(f);
    norm_report_from(f, alpha, h1_dot)
}

/// Same as [`norm_report`] reusing a prepared FFT plan.
pub fn norm_report_with(sp: Option<&Spectral>, f: &Field, alpha: f64) -> NormReport {
    let h1_dot = match (sp, f.grid.mode) {
        (Some(sp), GridMode::Cartesian1D) => h1_dot_with(sp, f),
        _ => h1_dot_norm(f),
    };
    norm_report_from(f, alpha, h1_dot)
}

fn norm_report_from(f: &Field, alpha: f64, h1_dot: f64) -> NormReport {
    let l2 = lp_norm(f, 2.0);
    let weighted_l2 = weighted_l2_norm(f);
    let h1 = (l2 * l2 + h1_dot * h1_dot).sqrt();
    NormReport {
        l2,
        h1_dot,
        h1,
        l_alpha_plus_2: lp_norm(f, alpha + 2.0),
        sigma: (h1 * h1 + weighted_l2 * weighted_l2).sqrt(),
        weighted_l2,
        time_tag: f.time_tag,
    }
}

/// Terms of the elementary estimate for `F_n(z) = |z|^{p-n} z^n`:
/// `lhs = |F_n(z) - F_n(w)|`, and the majorants
/// `(|z|^{p-1} + |w|^{p-1}) |z - w|` (meaningful for `p >= 1`) and
/// `|z - w|^p` (meaningful for `0 < p <= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDiffTerms {
    pub lhs: f64,
    pub lipschitz_majorant: f64,
    pub holder_majorant: f64,
}

impl PowerDiffTerms {
    /// Ratio of `lhs` to the majorant relevant for `p`.
    pub fn ratio(&self, p: f64) -> f64 {
        let m = if p >= 1.0 {
            self.lipschitz_majorant
        } else {
            self.holder_majorant
        };
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / m
        }
    }
}

fn power_map(z: Complex64, p: f64, n: u32) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // |z|^{p-n} z^n = |z|^p e^{i n arg z}
    Complex64::from_polar(r.powf(p), n as f64 * z.arg())
}

pub fn power_diff_bound_check(z: Complex64, w: Complex64, p: f64, n: u32) -> Result<PowerDiffTerms> {
    if !(p > 0.0) {
        return Err(Error::InvalidParams(format!("p = {p} must be positive")));
    }
    if n > 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be 0, 1 or 2")));
    }
    if z == Complex64::new(0.0, 0.0) && w == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParams("z and w both zero".into()));
    }
    let lhs = (power_map(z, p, n) - power_map(w, p, n)).norm();
    let d = (z - w).norm();
    let pw = |r: f64| if r == 0.0 { 0.0 } else { r.powf(p - 1.0) };
    Ok(PowerDiffTerms {
        lhs,
        lipschitz_majorant: (pw(z.norm()) + pw(w.norm())) * d,
        holder_majorant: d.powf(p),
    })
}

/// Empirical `sup lhs/majorant` over `samples` seeded random pairs. Half the
/// pairs are independent with log-uniform moduli in `[1e-3, 1e3]`; the
/// other half are near-coincident, `w = z (1 + ζ)` with `|ζ|` log-uniform in
/// `[1e-6, 1]`. A prefix of a longer sample with the same seed is the
/// shorter sample.
pub fn power_diff_sup_ratio(p: f64, n: u32, samples: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let mut sup: f64 = 0.0;
    for i in 0..samples {
        let z = Complex64::from_polar(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(0.0..tau));
        let w = if i % 2 == 0 {
            Complex64::from_polar(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(0.0..tau))
        } else {
            let zeta = Complex64::from_polar(10f64.powf(rng.gen_range(-6.0..0.0)), rng.gen_range(0.0..tau));
            z * (1.0 + zeta)
        };
        if z == w {
            continue;
        }
        let r = power_diff_bound_check(z, w, p, n)?.ratio(p);
        if !r.is_finite() {
            return Err(Error::NonFinite(r));
        }
        sup = sup.max(r);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(grid: Grid) -> Field {
        Field::from_fn(grid, 0.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap()
    }

    #[test]
    fn zero_field_norms() {
        let g = Grid::cartesian(64, 4.0).unwrap();
        let r = norm_report(&Field::zeros(g, 0.0), 2.0);
        assert_eq!(r, NormReport::zero(0.0));
        assert_eq!(lp_norm(&Field::zeros(g, 0.0), f64::INFINITY), 0.0);
    }

    #[test]
    fn gaussian_l2_norm() {
        let g = Grid::cartesian(256, 10.0).unwrap();
        let n = lp_norm(&gaussian(g), 2.0);
        assert!((n - (PI / 2.0).powf(0.25)).abs() < 1e-6);
    }

    #[test]
    fn plateau_norm_matches_volume() {
        // Smooth plateau of height 3 on |x| < 2 with a narrow tanh edge.
        let g = Grid::cartesian(4096, 8.0).unwrap();
        let edge = 0.02;
        let f = Field::from_fn(g, 0.0, |x| {
            Complex64::new(1.5 * (1.0 - ((x.abs() - 2.0) / edge).tanh()), 0.0)
        })
        .unwrap();
        let n = lp_norm(&f, 1.0);
        assert!((n - 3.0 * 4.0).abs() < 1e-3 * 12.0);
    }

    #[test]
    fn radial_gaussian_l2_norm() {
        // ∫_{R^3} e^{-2r²} = (π/2)^{3/2}.
        let g = Grid::radial(3, 801, 8.0).unwrap();
        let f = Field::from_fn(g, 0.0, |r| Complex64::new((-r * r).exp(), 0.0)).unwrap();
        let n = lp_norm(&f, 2.0);
        let exact = (PI / 2.0).powf(0.75);
        assert!((n - exact).abs() < 1e-4 * exact);
    }

    #[test]
    fn cartesian_laplacian_of_gaussian() {
        let g = Grid::cartesian(256, 10.0).unwrap();
        let lap = laplacian(&gaussian(g));
        for (j, v) in lap.values().iter().enumerate() {
            let x = g.coord(j);
            let exact = (4.0 * x * x - 2.0) * (-x * x).exp();
            assert!((v.re - exact).abs() < 1e-10 && v.im.abs() < 1e-12);
        }
    }

    fn radial_lap_error(points: usize) -> f64 {
        let g = Grid::radial(3, points, 6.0).unwrap();
        let f = Field::from_fn(g, 0.0, |r| Complex64::new((-r * r).exp(), 0.0)).unwrap();
        let lap = laplacian(&f);
        lap.values()
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let r = g.coord(j);
                (v.re - (4.0 * r * r - 6.0) * (-r * r).exp()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn radial_laplacian_second_order() {
        let e1 = radial_lap_error(121);
        let e2 = radial_lap_error(241);
        assert!(e1 < 2e-2, "e1 = {e1}");
        assert!(e1 / e2 >= 3.8, "ratio {}", e1 / e2);
    }

    #[test]
    fn constant_field_derivatives_vanish() {
        for g in [
            Grid::cartesian(64, 3.0).unwrap(),
            Grid::radial(4, 64, 3.0).unwrap(),
        ] {
            let f = Field::from_fn(g, 0.0, |_| Complex64::new(2.0, -1.0)).unwrap();
            assert!(gradient(&f).values().iter().all(|v| v.norm() < 1e-12));
            assert!(laplacian(&f).values().iter().all(|v| v.norm() < 1e-10));
        }
    }

    #[test]
    fn radial_gradient_norm_matches_dirichlet_form() {
        let g = Grid::radial(5, 200, 6.0).unwrap();
        let f = Field::from_fn(g, 0.0, |r| Complex64::new((-r * r).exp(), 0.3 * r * (-r * r).exp())).unwrap();
        let lap = laplacian(&f);
        let w = g.weights();
        let form: f64 = f
            .values()
            .iter()
            .zip(lap.values())
            .zip(&w)
            .map(|((u, lu), w)| -(u.conj() * lu).re * w)
            .sum();
        let h1 = h1_dot_norm(&f);
        assert!((h1 * h1 - form).abs() < 1e-12 * form);
    }

    #[test]
    fn report_identities() {
        let g = Grid::cartesian(128, 6.0).unwrap();
        let f = gaussian(g).scaled(Complex64::new(0.3, 0.7));
        let r = norm_report(&f, 2.0);
        assert!((r.h1 * r.h1 - r.l2 * r.l2 - r.h1_dot * r.h1_dot).abs() < 1e-12 * r.h1 * r.h1);
        assert!((r.sigma * r.sigma - r.h1 * r.h1 - r.weighted_l2 * r.weighted_l2).abs()
            < 1e-12 * r.sigma * r.sigma);
    }

    #[test]
    fn windowed_plane_wave_weight_is_set_by_window() {
        // |x| e^{i 5 x} on |x| < a has weighted norm² = 2 a³/3 regardless of the wave.
        let a = 1.5;
        let g = Grid::cartesian(8192, 4.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| {
            if x.abs() < a {
                Complex64::new(0.0, 5.0 * x).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let w = weighted_l2_norm(&f);
        let exact = (2.0 * a * a * a / 3.0).sqrt();
        assert!((w - exact).abs() < 5e-3 * exact);
    }

    #[test]
    fn power_diff_examples() {
        let one = Complex64::new(1.0, 0.0);
        let t = power_diff_bound_check(one, one, 1.5, 1).unwrap();
        assert_eq!(t.lhs, 0.0);
        let t = power_diff_bound_check(Complex64::new(2.0, 0.0), one, 2.0, 0).unwrap();
        assert!((t.lhs - 3.0).abs() < 1e-14);
        assert!((t.lipschitz_majorant - 3.0).abs() < 1e-14);
        assert!(power_diff_bound_check(one, one, 0.0, 0).is_err());
        assert!(power_diff_bound_check(one, one, 1.0, 3).is_err());
        let z = Complex64::new(0.0, 0.0);
        assert!(power_diff_bound_check(z, z, 1.0, 0).is_err());
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = Grid::cartesian(16, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::new(g, v, 0.0).is_err());
    }
}
