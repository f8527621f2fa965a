//! Computational grids: a periodic 1-D Cartesian grid for `N = 1` and a
//! radial grid `r ∈ [0, R]` for radially symmetric fields in `N = 2..=5`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::sphere_area;

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    Cartesian1D,
    RadialND,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub mode: GridMode,
    pub dim: u32,
    pub num_points: usize,
    pub spacing: f64,
    /// Half-width for Cartesian grids, outer radius for radial grids.
    pub radius: f64,
}

impl Grid {
    /// Nodes `x_j = -R + j h`, `j = 0..M`, with `h (M-1) = 2R`. The period is
    /// `M h`, so `x = ±R` are neighbours through the wrap.
    pub fn cartesian(num_points: usize, radius: f64) -> Result<Self> {
        if num_points < MIN_POINTS {
            return Err(Error::Grid(format!(
                "num_points = {num_points} below minimum {MIN_POINTS}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Grid(format!("radius = {radius} must be positive")));
        }
        Ok(Self {
            mode: GridMode::Cartesian1D,
            dim: 1,
            num_points,
            spacing: 2.0 * radius / (num_points - 1) as f64,
            radius,
        })
    }

    /// Nodes `r_j = j h`, `j = 0..M`, with `h (M-1) = R`.
    pub fn radial(dim: u32, num_points: usize, radius: f64) -> Result<Self> {
        if !(2..=5).contains(&dim) {
            return Err(Error::Grid(format!(
                "radial grids need 2 <= N <= 5, got N = {dim}"
            )));
        }
        if num_points < MIN_POINTS {
            return Err(Error::Grid(format!(
                "num_points = {num_points} below minimum {MIN_POINTS}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Grid(format!("radius = {radius} must be positive")));
        }
        Ok(Self {
            mode: GridMode::RadialND,
            dim,
            num_points,
            spacing: radius / (num_points - 1) as f64,
            radius,
        })
    }

    /// Cartesian for `N = 1`, radial otherwise.
    pub fn for_dim(dim: u32, num_points: usize, radius: f64) -> Result<Self> {
        if dim == 1 {
            Self::cartesian(num_points, radius)
        } else {
            Self::radial(dim, num_points, radius)
        }
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        self.num_points == 0
    }

    pub fn is_radial(&self) -> bool {
        self.mode == GridMode::RadialND
    }

    pub fn coord(&self, j: usize) -> f64 {
        match self.mode {
            GridMode::Cartesian1D => -self.radius + j as f64 * self.spacing,
            GridMode::RadialND => j as f64 * self.spacing,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.coord(j)).collect()
    }

    /// Quadrature weights. Radial weights are the exact shell volumes of the
    /// dual cells `[r_j - h/2, r_j + h/2] ∩ [0, R]`.
    pub fn weights(&self) -> Vec<f64> {
        match self.mode {
            GridMode::Cartesian1D => vec![self.spacing; self.num_points],
            GridMode::RadialND => {
                let n = self.dim as i32;
                let s = sphere_area(self.dim) / self.dim as f64;
                let h = self.spacing;
                (0..self.num_points)
                    .map(|j| {
                        let lo = (self.coord(j) - 0.5 * h).max(0.0);
                        let hi = (self.coord(j) + 0.5 * h).min(self.radius);
                        s * (hi.powi(n) - lo.powi(n))
                    })
                    .collect()
            }
        }
    }

    /// Radial only: `S_{N-1} r_{j+1/2}^{N-1}` for the `M - 1` interior faces.
    pub fn face_areas(&self) -> Vec<f64> {
        let s = sphere_area(self.dim);
        let h = self.spacing;
        (0..self.num_points - 1)
            .map(|j| s * ((j as f64 + 0.5) * h).powi(self.dim as i32 - 1))
            .collect()
    }

    /// Angular wavenumbers in FFT order for the period `M h`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.num_points;
        let base = 2.0 * std::f64::consts::PI / (m as f64 * self.spacing);
        (0..m)
            .map(|j| {
                let f = if j < m.div_ceil(2) {
                    j as f64
                } else {
                    j as f64 - m as f64
                };
                base * f
            })
            .collect()
    }

    pub fn max_wavenumber(&self) -> f64 {
        std::f64::consts::PI / self.spacing
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Forward/inverse FFT pair and wavenumbers for a Cartesian grid.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    pub wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("len", &self.wavenumbers.len())
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let m = grid.num_points;
        Self {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            wavenumbers: grid.wavenumbers(),
        }
    }

    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse transform including the `1/M` normalisation.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Multiply by `symbol(ξ)` in Fourier space.
    pub fn apply_symbol<F>(&self, buf: &mut [Complex64], symbol: F)
    where
        F: Fn(f64) -> Complex64,
    {
        self.forward(buf);
        for (v, &xi) in buf.iter_mut().zip(&self.wavenumbers) {
            *v *= symbol(xi);
        }
        self.inverse(buf);
    }

    pub fn derivative(&self, buf: &mut [Complex64]) {
        let m = self.len();
        self.forward(buf);
        for (j, (v, &xi)) in buf.iter_mut().zip(&self.wavenumbers).enumerate() {
            // Odd derivatives drop the unpaired Nyquist mode.
            if m.is_multiple_of(2) && j == m / 2 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v *= Complex64::new(0.0, xi);
            }
        }
        self.inverse(buf);
    }

    pub fn laplacian(&self, buf: &mut [Complex64]) {
        self.apply_symbol(buf, |xi| Complex64::new(-xi * xi, 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_spacing_invariant() {
        let g = Grid::cartesian(64, 3.0).unwrap();
        assert!((g.spacing * 63.0 - 6.0).abs() < 1e-14);
        assert_eq!(g.coord(0), -3.0);
        assert!((g.coord(63) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn radial_weights_sum_to_ball_volume() {
        for dim in 2..=5 {
            let g = Grid::radial(dim, 101, 2.0).unwrap();
            let total: f64 = g.weights().iter().sum();
            let exact = sphere_area(dim) / dim as f64 * 2f64.powi(dim as i32);
            assert!((total - exact).abs() < 1e-12 * exact, "N={dim}");
        }
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(Grid::cartesian(8, 1.0).is_err());
        assert!(Grid::radial(3, 8, 1.0).is_err());
        assert!(Grid::radial(1, 32, 1.0).is_err());
    }

    #[test]
    fn spectral_derivative_of_mode() {
        let g = Grid::cartesian(64, 5.0).unwrap();
        let sp = Spectral::new(&g);
        let xi = sp.wavenumbers[3];
        let mut buf: Vec<Complex64> = g
            .coords()
            .iter()
            .map(|&x| Complex64::new(0.0, xi * x).exp())
            .collect();
        let expect: Vec<Complex64> = buf.iter().map(|v| v * Complex64::new(0.0, xi)).collect();
        sp.derivative(&mut buf);
        for (a, b) in buf.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
