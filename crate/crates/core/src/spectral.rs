//! The fractional operator 𝓡ˢ = (−Δ)ˢ as a spectral multiplier on the
//! periodic box, and the inhomogeneous Sobolev norms built from it.
//!
//! The multiplier of −Δ on the frequency lattice is σ(ξ) = |ξ|², so 𝓡^a acts
//! by multiplying the spectral coefficient at ξ by σ(ξ)^a. On the torus the
//! homogeneous norms are understood modulo constants: for negative powers the
//! zero mode is projected out and flagged rather than made infinite.

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::transform::SpectralTransform;
use std::sync::Arc;

/// (−Δ)^s with precomputed multiplier tables. Immutable after construction;
/// application is pure, so sharing across threads is safe.
pub struct FractionalOperator {
    transform: SpectralTransform,
    s: f64,
    /// σ(ξ) = |ξ|² per flat spectral index.
    sigma: Vec<f64>,
    /// σ(ξ)^s per flat spectral index.
    sigma_s: Vec<f64>,
}

/// Output of [`FractionalOperator::apply_power`].
pub struct PowerResult {
    pub field: Field,
    /// True when a negative power annihilated the zero Fourier mode.
    pub zero_mode_projected: bool,
}

impl FractionalOperator {
    pub fn new(grid: Arc<Grid>, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::invalid("fractional power s must be positive"));
        }
        let transform = SpectralTransform::new(Arc::clone(&grid));
        let mut sigma = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let idx = grid.multi_index(flat);
            let s2: f64 = idx
                .iter()
                .enumerate()
                .map(|(axis, &k)| {
                    let xi = grid.frequency(axis, k);
                    xi * xi
                })
                .sum();
            sigma.push(s2);
        }
        let sigma_s = sigma.iter().map(|&v| v.powf(s)).collect();
        Ok(Self { transform, s, sigma, sigma_s })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.transform.grid()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Degree ν of the base operator −Δ.
    pub fn degree(&self) -> f64 {
        2.0
    }

    pub fn transform(&self) -> &SpectralTransform {
        &self.transform
    }

    /// Multiplier table σ(ξ) in spectral (flat DFT) order.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Multiplier table σ(ξ)^s.
    pub fn sigma_s(&self) -> &[f64] {
        &self.sigma_s
    }

    /// Apply 𝓡^a: multiply each spectral coefficient by σ(ξ)^a.
    ///
    /// `a = 0` is the identity up to the transform round trip. For `a < 0`
    /// the zero mode (σ = 0) is projected out and the result flagged.
    pub fn apply_power(&self, f: &Field, a: f64) -> Result<PowerResult> {
        if f.grid().as_ref() != self.grid().as_ref() {
            return Err(Error::GridMismatch("apply_power: field not on the operator grid".into()));
        }
        let mut hat = self.transform.forward(f);
        let mut zero_mode_projected = false;
        for (v, &sig) in hat.values_mut().iter_mut().zip(&self.sigma) {
            if sig == 0.0 && a < 0.0 {
                *v *= 0.0;
                zero_mode_projected = true;
            } else {
                // 0^0 = 1 keeps a = 0 the identity on the zero mode
                *v *= sig.powf(a);
            }
        }
        Ok(PowerResult { field: self.transform.inverse(&hat), zero_mode_projected })
    }

    /// ‖𝓡^{a/ν} f‖_{L²} computed on the spectral side (no inverse transform).
    pub fn homogeneous_norm(&self, f: &Field, order: f64) -> Result<f64> {
        if f.grid().as_ref() != self.grid().as_ref() {
            return Err(Error::GridMismatch("homogeneous_norm: field not on the operator grid".into()));
        }
        let hat = self.transform.forward(f);
        Ok(self.homogeneous_norm_spectral(&hat, order))
    }

    /// Same as [`Self::homogeneous_norm`] but from already-transformed data.
    pub fn homogeneous_norm_spectral(&self, hat: &Field, order: f64) -> f64 {
        let power = order / self.degree();
        let sum: f64 = hat
            .values()
            .iter()
            .zip(&self.sigma)
            .map(|(v, &sig)| {
                let m = if sig == 0.0 && power < 0.0 { 0.0 } else { sig.powf(power) };
                (m * m) * v.norm_sqr()
            })
            .sum();
        (sum / self.grid().box_volume()).sqrt()
    }

    /// Inhomogeneous Sobolev norm ‖f‖_{H^a} = ‖𝓡^{a/ν}f‖_{L²} + ‖f‖_{L²}
    /// (a sum of the two terms, not a root of a sum of squares).
    pub fn sobolev_norm(&self, f: &Field, order: f64) -> Result<f64> {
        if order < 0.0 {
            return Err(Error::invalid("sobolev_norm: order must be nonnegative"));
        }
        Ok(self.homogeneous_norm(f, order)? + f.l2_norm())
    }

    /// ‖𝓡^{a/ν} f‖_{L^q}: the homogeneous L^q Sobolev norm of order `a`.
    pub fn homogeneous_lq_norm(&self, f: &Field, order: f64, q: f64) -> Result<f64> {
        let powered = self.apply_power(f, order / self.degree())?;
        powered.field.lp_norm(q)
    }
}
