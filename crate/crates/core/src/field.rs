//! Periodic-box grids and complex grid functions.
//!
//! The box is centered at the origin: axis i covers [-L_i/2, L_i/2) with N_i
//! uniformly spaced points. All norms are physical (quadrature) norms, i.e.
//! they carry the cell volume, so that the discrete Parseval identity holds
//! against the transform defined in [`crate::transform`].

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use std::sync::Arc;

/// Uniform periodic grid on a centered box.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    extents: Vec<f64>,
    points: Vec<usize>,
}

impl Grid {
    /// A d-dimensional periodic grid with `points[i]` nodes across a box of
    /// side `extents[i]`. Points per axis must be powers of two (≥ 8 for the
    /// solver paths; smaller grids are accepted for bookkeeping but FFT
    /// efficiency is only guaranteed for powers of two).
    pub fn new(extents: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        if extents.is_empty() || extents.len() != points.len() {
            return Err(Error::invalid("grid: extents and points must be non-empty and same length"));
        }
        for &l in &extents {
            if !(l > 0.0) {
                return Err(Error::invalid("grid: extents must be positive"));
            }
        }
        for &n in &points {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::invalid(format!("grid: points per axis must be a power of two >= 2, got {n}")));
            }
        }
        Ok(Self { extents, points })
    }

    /// Convenience 1-D constructor: box [-half, half) with n points.
    pub fn line(half_extent: f64, n: usize) -> Result<Self> {
        Self::new(vec![2.0 * half_extent], vec![n])
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.extents.iter().zip(&self.points).map(|(l, &n)| l / n as f64).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn box_volume(&self) -> f64 {
        self.extents.iter().product()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical coordinate of node `j` on `axis`: -L/2 + j·h.
    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        let h = self.extents[axis] / self.points[axis] as f64;
        -0.5 * self.extents[axis] + j as f64 * h
    }

    /// Coordinates of the flat index, row-major (last axis fastest).
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &j)| self.coord(axis, j))
            .collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dims()];
        for axis in (0..self.dims()).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    /// Frequency ξ = 2πk/L of DFT bin `k` on `axis`, with k wrapped to
    /// [-N/2, N/2).
    pub fn frequency(&self, axis: usize, k: usize) -> f64 {
        let n = self.points[axis];
        let k_signed = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
        2.0 * std::f64::consts::PI * k_signed as f64 / self.extents[axis]
    }

    /// Fill a field by evaluating `f` at every node.
    pub fn sample(self: &Arc<Self>, mut f: impl FnMut(&[f64]) -> Complex64) -> Field {
        let mut values = Vec::with_capacity(self.len());
        let mut coords = vec![0.0; self.dims()];
        let mut idx = vec![0usize; self.dims()];
        for _ in 0..self.len() {
            for (axis, &j) in idx.iter().enumerate() {
                coords[axis] = self.coord(axis, j);
            }
            values.push(f(&coords));
            // row-major increment, last axis fastest
            for axis in (0..self.dims()).rev() {
                idx[axis] += 1;
                if idx[axis] < self.points[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Field { grid: Arc::clone(self), values }
    }

    pub fn sample_real(self: &Arc<Self>, mut f: impl FnMut(&[f64]) -> f64) -> Field {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }

    pub fn zero_field(self: &Arc<Self>) -> Field {
        Field { grid: Arc::clone(self), values: vec![Complex64::new(0.0, 0.0); self.len()] }
    }
}

/// Complex-valued grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field: {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// L^q norm by quadrature; `q = f64::INFINITY` returns the grid max,
    /// which under-estimates the true sup for sharply peaked functions.
    pub fn lp_norm(&self, q: f64) -> Result<f64> {
        if q.is_infinite() && q > 0.0 {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        if !(q >= 1.0) {
            return Err(Error::invalid(format!("lp_norm: exponent must satisfy q >= 1 or q = inf, got {q}")));
        }
        let sum: f64 = self.values.iter().map(|v| v.norm().powf(q)).sum();
        Ok((self.grid.cell_volume() * sum).powf(1.0 / q))
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.grid.cell_volume() * sum).sqrt()
    }

    /// L² inner product ⟨f, g⟩ = cell_volume · Σ f·conj(g).
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.same_grid(other)?;
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(self.grid.cell_volume() * sum)
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn add_assign(&mut self, other: &Field) -> Result<()> {
        self.same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field { grid: Arc::clone(&self.grid), values })
    }

    /// Pointwise product with a real field (e.g. a potential).
    pub fn mul_real(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.re)
            .collect();
        Ok(Field { grid: Arc::clone(&self.grid), values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Fraction of L² mass in the outer band of the box (per axis, the
    /// outermost `band_fraction` of the half-extent on each side). Used to
    /// monitor wrap-around contamination.
    pub fn boundary_mass_fraction(&self, band_fraction: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let grid = &self.grid;
        let cut: Vec<f64> = grid
            .extents()
            .iter()
            .map(|l| 0.5 * l * (1.0 - band_fraction))
            .collect();
        let mut band = 0.0;
        let mut idx = vec![0usize; grid.dims()];
        for v in &self.values {
            let mut in_band = false;
            for (axis, &j) in idx.iter().enumerate() {
                if grid.coord(axis, j).abs() >= cut[axis] {
                    in_band = true;
                    break;
                }
            }
            if in_band {
                band += v.norm_sqr();
            }
            for axis in (0..grid.dims()).rev() {
                idx[axis] += 1;
                if idx[axis] < grid.points()[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        band / total
    }

    /// CSV snapshot: one row per node, `i0[,i1,..],re,im`.
    pub fn to_csv(&self) -> String {
        let d = self.grid.dims();
        let mut out = String::new();
        for axis in 0..d {
            out.push_str(&format!("i{axis},"));
        }
        out.push_str("re,im\n");
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.grid.multi_index(flat);
            for j in idx {
                out.push_str(&format!("{j},"));
            }
            out.push_str(&format!("{},{}\n", v.re, v.im));
        }
        out
    }

    /// Raw little-endian binary: interleaved (re, im) f64 pairs per node,
    /// row-major. The grid geometry goes in a JSON sidecar.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    /// JSON sidecar describing the binary layout.
    pub fn binary_sidecar(&self) -> String {
        let pts: Vec<String> = self.grid.points().iter().map(|n| n.to_string()).collect();
        let ext: Vec<String> = self.grid.extents().iter().map(|l| l.to_string()).collect();
        format!(
            "{{\"dtype\":\"complex64: little-endian (re,im) f64 pairs\",\"order\":\"row-major\",\"points\":[{}],\"extents\":[{}]}}\n",
            pts.join(","),
            ext.join(",")
        )
    }
}

/// Band-limited random field with unit L² norm, reproducible from a seed.
/// Coefficients are drawn uniformly on the complex unit square for every mode
/// with |k_i| <= max_mode on each axis.
pub fn random_band_limited(grid: &Arc<Grid>, max_mode: usize, seed: u64) -> Field {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let transform = crate::transform::SpectralTransform::new(Arc::clone(grid));
    let mut hat = grid.zero_field();
    let n = grid.len();
    for flat in 0..n {
        let idx = grid.multi_index(flat);
        let banded = idx.iter().enumerate().all(|(axis, &k)| {
            let npts = grid.points()[axis] as i64;
            let k_signed = if (k as i64) < npts / 2 { k as i64 } else { k as i64 - npts };
            k_signed.unsigned_abs() as usize <= max_mode
        });
        if banded {
            hat.values_mut()[flat] =
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut field = transform.inverse(&hat);
    let norm = field.l2_norm();
    field.scale(Complex64::new(1.0 / norm, 0.0));
    field
}
