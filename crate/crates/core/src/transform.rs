//! FFT plumbing with physical normalization.
//!
//! The forward transform approximates the continuous Fourier integral by the
//! quadrature sum
//!
//! ```text
//! F[k] = cell_volume · Σ_j f(x_j) e^{-i ξ_k · x_j},   ξ_k = 2πk/L,
//! ```
//!
//! and the inverse carries 1/box_volume, so that
//!
//! ```text
//! ‖f‖²_{L²} = (1/box_volume) Σ_k |F[k]|²    (discrete Parseval)
//! ```
//!
//! holds exactly against the physical L² norm of [`Field`]. Because the grid
//! is centered at the origin, each axis picks up the phase e^{-i ξ_k x₀}
//! relative to the raw DFT; the phases are baked in here so that spectral
//! convolution `inverse(forward(f) · forward(g))` equals the quadrature
//! convolution of f and g on the box. This is the single place where the
//! normalization convention lives.

use crate::field::{Field, Grid};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct SpectralTransform {
    grid: Arc<Grid>,
    forward_plans: Vec<Arc<dyn Fft<f64>>>,
    inverse_plans: Vec<Arc<dyn Fft<f64>>>,
    /// Per-axis phase e^{-i ξ_k x₀} in DFT bin order.
    forward_phases: Vec<Vec<Complex64>>,
}

impl SpectralTransform {
    pub fn new(grid: Arc<Grid>) -> Self {
        let mut planner = FftPlanner::new();
        let mut forward_plans = Vec::new();
        let mut inverse_plans = Vec::new();
        let mut forward_phases = Vec::new();
        for axis in 0..grid.dims() {
            let n = grid.points()[axis];
            forward_plans.push(planner.plan_fft_forward(n));
            inverse_plans.push(planner.plan_fft_inverse(n));
            let x0 = -0.5 * grid.extents()[axis];
            let phases = (0..n)
                .map(|k| Complex64::from_polar(1.0, -grid.frequency(axis, k) * x0))
                .collect();
            forward_phases.push(phases);
        }
        Self { grid, forward_plans, inverse_plans, forward_phases }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn apply_axis(&self, values: &mut [Complex64], axis: usize, forward: bool) {
        let n = self.grid.points()[axis];
        // stride between consecutive elements along `axis` (row-major)
        let stride: usize = self.grid.points()[axis + 1..].iter().product();
        let plan = if forward { &self.forward_plans[axis] } else { &self.inverse_plans[axis] };
        let mut line = vec![Complex64::default(); n];
        let total = values.len();
        let block = n * stride;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + offset + j * stride];
                }
                plan.process(&mut line);
                for (j, slot) in line.iter().enumerate() {
                    values[base + offset + j * stride] = *slot;
                }
            }
        }
    }

    /// Forward transform: spectral coefficients in DFT bin order per axis.
    pub fn forward(&self, f: &Field) -> Field {
        assert_eq!(f.grid().as_ref(), self.grid.as_ref(), "transform grid mismatch");
        let mut out = f.clone();
        for axis in 0..self.grid.dims() {
            self.apply_axis(out.values_mut(), axis, true);
        }
        let cv = self.grid.cell_volume();
        let grid = Arc::clone(&self.grid);
        let phases = &self.forward_phases;
        for (flat, v) in out.values_mut().iter_mut().enumerate() {
            let idx = grid.multi_index(flat);
            let mut phase = Complex64::new(cv, 0.0);
            for (axis, &k) in idx.iter().enumerate() {
                phase *= phases[axis][k];
            }
            *v *= phase;
        }
        out
    }

    /// Inverse transform, so that `inverse(forward(f)) = f` to round-off.
    pub fn inverse(&self, hat: &Field) -> Field {
        assert_eq!(hat.grid().as_ref(), self.grid.as_ref(), "transform grid mismatch");
        let mut out = hat.clone();
        let grid = Arc::clone(&self.grid);
        let phases = &self.forward_phases;
        // undo the forward phases, then run unnormalized inverse DFTs
        for (flat, v) in out.values_mut().iter_mut().enumerate() {
            let idx = grid.multi_index(flat);
            let mut phase = Complex64::new(1.0, 0.0);
            for (axis, &k) in idx.iter().enumerate() {
                phase *= phases[axis][k].conj();
            }
            *v *= phase;
        }
        for axis in 0..self.grid.dims() {
            self.apply_axis(out.values_mut(), axis, false);
        }
        // rustfft's inverse is unnormalized: divide by N_total, and undo the
        // forward cell_volume so the pair carries 1/box_volume overall.
        let scale = 1.0 / (self.grid.len() as f64 * self.grid.cell_volume());
        for v in out.values_mut() {
            *v *= scale;
        }
        out
    }

    /// Spectral-side L² sum: (1/box_volume) Σ |F[k]|², the Parseval partner
    /// of `Field::l2_norm` squared.
    pub fn spectral_l2_sq(&self, hat: &Field) -> f64 {
        let sum: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
        sum / self.grid.box_volume()
    }

    /// Quadrature convolution of two fields via the spectral product.
    pub fn convolve(&self, f: &Field, g: &Field) -> Field {
        let mut fh = self.forward(f);
        let gh = self.forward(g);
        for (a, b) in fh.values_mut().iter_mut().zip(gh.values()) {
            *a *= b;
        }
        self.inverse(&fh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_band_limited;
    use approx::assert_relative_eq;

    #[test]
    fn parseval_random_fields() {
        for (dims, seed) in [(vec![64], 1u64), (vec![16, 32], 2), (vec![8, 8, 8], 3)] {
            let extents: Vec<f64> = dims.iter().map(|&n| 1.0 + n as f64 / 10.0).collect();
            let grid = Arc::new(Grid::new(extents, dims).unwrap());
            let f = random_band_limited(&grid, 3, seed);
            let t = SpectralTransform::new(Arc::clone(&grid));
            let hat = t.forward(&f);
            assert_relative_eq!(t.spectral_l2_sq(&hat), f.l2_norm().powi(2), max_relative = 1e-12);
        }
    }

    #[test]
    fn round_trip_identity() {
        let grid = Arc::new(Grid::new(vec![3.0, 5.0], vec![16, 8]).unwrap());
        let f = random_band_limited(&grid, 3, 7);
        let t = SpectralTransform::new(Arc::clone(&grid));
        let back = t.inverse(&t.forward(&f));
        let err = back.sub(&f).unwrap().l2_norm();
        assert!(err <= 1e-13 * f.l2_norm());
    }

    #[test]
    fn single_mode_lands_in_one_bin() {
        let grid = Arc::new(Grid::line(5.0, 32).unwrap());
        let l = 10.0;
        let tau = 2.0 * std::f64::consts::PI / l;
        // mode k = 3
        let f = grid.sample(|x| Complex64::from_polar(1.0, 3.0 * tau * x[0]));
        let t = SpectralTransform::new(Arc::clone(&grid));
        let hat = t.forward(&f);
        for (k, v) in hat.values().iter().enumerate() {
            let expect = if k == 3 { l } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-10, "bin {k}: {v}");
        }
    }

    #[test]
    fn convolution_matches_direct_sum() {
        // compare spectral convolution against the O(N²) quadrature sum
        let grid = Arc::new(Grid::line(2.0, 64).unwrap());
        let f = grid.sample_real(|x| (-8.0 * x[0] * x[0]).exp());
        let g = grid.sample_real(|x| if x[0].abs() < 0.5 { 1.0 - 2.0 * x[0].abs() } else { 0.0 });
        let t = SpectralTransform::new(Arc::clone(&grid));
        let conv = t.convolve(&f, &g);

        let n = grid.len();
        let h = grid.cell_volume();
        for m in (0..n).step_by(11) {
            let mut direct = Complex64::default();
            for j in 0..n {
                // g evaluated at x_m - x_j, wrapped periodically
                let k = (m + n - j) % n; // offset in lattice steps
                let x = grid.coord(0, k) + grid.extents()[0] / 2.0; // = k·h ∈ [0, L)
                let x_wrapped = if x >= grid.extents()[0] / 2.0 { x - grid.extents()[0] } else { x };
                // find the grid index of x_wrapped
                let idx = ((x_wrapped + grid.extents()[0] / 2.0) / h).round() as usize % n;
                direct += f.values()[j] * g.values()[idx];
            }
            direct *= h;
            assert!((conv.values()[m] - direct).norm() < 1e-12, "node {m}");
        }
    }
}
