//! Diagonal symbol models at mode level.
//!
//! For the Heisenberg sub-Laplacian the symbol spectrum is known in closed
//! form: |λ|(2|ℓ|+n) over multi-indices ℓ ∈ ℕⁿ. For the Engel sub-Laplacian
//! the symbol is the anharmonic oscillator −d²/du² + ¼(λu² − μ/λ)², whose
//! spectrum is discrete; we compute it by dense symmetric diagonalization in
//! a Hermite-function basis, with matrix elements assembled by Gauss–Hermite
//! quadrature on a node set scaled to the quartic well width.
//!
//! This module also carries the decoupled mode equation
//!
//! ```text
//! i v'(t) + β^{2s} v(t) = f(t),   v(0) = v₀,
//! ```
//!
//! solved exactly for piecewise-constant forcing via Duhamel's formula.
//! Sign convention (fixed here once): the homogeneous solution is
//! v(t) = v₀ e^{+i β^{2s} t}, matching ∂ₜv = i β^{2s} v − i f. All estimates
//! used downstream involve |v| only, so they are insensitive to this choice.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// First `count` eigenvalues of the Heisenberg symbol |λ|(2|ℓ|+n), ℓ ∈ ℕⁿ,
/// sorted with multiplicities (level 2m+n has multiplicity C(m+n−1, n−1)).
pub fn heisenberg_spectrum(n: usize, lambda: f64, count: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("heisenberg_spectrum: n must be positive"));
    }
    if lambda == 0.0 {
        return Err(Error::invalid("heisenberg_spectrum: λ = 0 is not a non-trivial representation"));
    }
    if count == 0 {
        return Err(Error::invalid("heisenberg_spectrum: count must be >= 1"));
    }
    let mut out = Vec::with_capacity(count);
    let mut level: u64 = 0;
    while out.len() < count {
        let mult = binomial(level + n as u64 - 1, n as u64 - 1);
        let value = lambda.abs() * (2 * level + n as u64) as f64;
        for _ in 0..mult {
            out.push(value);
            if out.len() == count {
                break;
            }
        }
        level += 1;
    }
    Ok(out)
}

/// Distinct Heisenberg symbol levels with the multiplicity of each within the
/// first `count` eigenvalues. Used for spectrum dumps.
pub fn heisenberg_levels(n: usize, lambda: f64, count: usize) -> Result<Vec<(f64, usize)>> {
    let flat = heisenberg_spectrum(n, lambda, count)?;
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for v in flat {
        match levels.last_mut() {
            Some((last, mult)) if *last == v => *mult += 1,
            _ => levels.push((v, 1)),
        }
    }
    Ok(levels)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut out: u64 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Eigenvalues plus a convergence flag from the basis-size comparison.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// True when halving the basis changes every requested eigenvalue by less
    /// than 1e-6 relative.
    pub converged: bool,
}

/// Gauss–Hermite nodes for m points (weight e^{-x²}) by Golub–Welsch.
fn gauss_hermite_nodes(m: usize) -> Vec<f64> {
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let off = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = off;
        jac[(k, k - 1)] = off;
    }
    let eig = jac.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes
}

/// Orthonormal Hermite functions h_0..h_{nmax-1} at the given points, by the
/// stable three-term recurrence.
fn hermite_functions(points: &[f64], nmax: usize) -> DMatrix<f64> {
    let m = points.len();
    let mut h = DMatrix::<f64>::zeros(nmax, m);
    let c0 = std::f64::consts::PI.powf(-0.25);
    for (k, &x) in points.iter().enumerate() {
        h[(0, k)] = c0 * (-x * x / 2.0).exp();
        if nmax > 1 {
            h[(1, k)] = std::f64::consts::SQRT_2 * x * h[(0, k)];
        }
    }
    for j in 1..nmax.saturating_sub(1) {
        let a = (2.0 / (j as f64 + 1.0)).sqrt();
        let b = (j as f64 / (j as f64 + 1.0)).sqrt();
        for (k, &x) in points.iter().enumerate() {
            h[(j + 1, k)] = a * x * h[(j, k)] - b * h[(j - 1, k)];
        }
    }
    h
}

/// Lowest `count` eigenvalues of −d²/du² + V(u) in a Hermite-function basis
/// scaled by `alpha` (basis functions √α·h_j(αu)).
///
/// The kinetic block uses the oscillator identity −h″_j = (2j+1)h_j − v²h_j;
/// the potential block is assembled by Gauss–Hermite quadrature with enough
/// nodes to integrate polynomial potentials of degree ≤ 8 exactly.
pub fn hermite_basis_spectrum(
    potential: impl Fn(f64) -> f64,
    alpha: f64,
    basis_size: usize,
    count: usize,
) -> Result<Vec<f64>> {
    if basis_size < count {
        return Err(Error::invalid("hermite_basis_spectrum: basis smaller than requested count"));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid("hermite_basis_spectrum: scale must be positive"));
    }
    let m = basis_size + 8;
    let nodes = gauss_hermite_nodes(m);
    let h_all = hermite_functions(&nodes, m);
    // quadrature weights against plain dx: w̃_k = 1/Σ_j h_j(x_k)²
    let weights: Vec<f64> = (0..m)
        .map(|k| {
            let s: f64 = (0..m).map(|j| h_all[(j, k)] * h_all[(j, k)]).sum();
            1.0 / s
        })
        .collect();

    let basis = h_all.rows(0, basis_size).into_owned();
    let weighted = |diag: &[f64]| -> DMatrix<f64> {
        let mut scaled = basis.clone();
        for k in 0..m {
            let w = weights[k] * diag[k];
            for j in 0..basis_size {
                scaled[(j, k)] *= w;
            }
        }
        &scaled * basis.transpose()
    };

    let x2: Vec<f64> = nodes.iter().map(|x| x * x).collect();
    let u2 = weighted(&x2);
    let vdiag: Vec<f64> = nodes.iter().map(|&x| potential(x / alpha)).collect();
    let w = weighted(&vdiag);

    let mut a = w;
    let a2 = alpha * alpha;
    for j in 0..basis_size {
        for k in 0..basis_size {
            a[(j, k)] -= a2 * u2[(j, k)];
        }
        a[(j, j)] += a2 * (2 * j + 1) as f64;
    }
    // symmetrize away quadrature round-off
    let at = a.transpose();
    a = (a + at) * 0.5;

    let eig = a.symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev.truncate(count);
    Ok(ev)
}

/// Lowest `count` eigenvalues of the Engel symbol −𝓐 = −d²/du² + ¼(λu² − μ/λ)²
/// for the representation parameters (λ, μ), with a convergence flag from a
/// basis_size vs basis_size/2 comparison.
pub fn engel_symbol_spectrum(
    lambda: f64,
    mu: f64,
    basis_size: usize,
    count: usize,
) -> Result<SpectrumResult> {
    if lambda == 0.0 {
        return Err(Error::invalid("engel_symbol_spectrum: λ must be nonzero"));
    }
    if count == 0 {
        return Err(Error::invalid("engel_symbol_spectrum: count must be >= 1"));
    }
    if basis_size < 4 * count {
        return Err(Error::invalid(format!(
            "engel_symbol_spectrum: basis_size {basis_size} < 4·count = {}",
            4 * count
        )));
    }
    let well = move |u: f64| {
        let q = lambda * u * u - mu / lambda;
        0.25 * q * q
    };
    // length scale balancing −d²/du² against the λ²u⁴/4 term
    let alpha = (lambda * lambda / 4.0).powf(1.0 / 6.0);
    let eigenvalues = hermite_basis_spectrum(well, alpha, basis_size, count)?;
    let coarse = hermite_basis_spectrum(well, alpha, basis_size / 2, count)?;
    let converged = eigenvalues
        .iter()
        .zip(&coarse)
        .all(|(a, b)| (a - b).abs() <= 1e-6 * a.abs().max(1e-300));
    Ok(SpectrumResult { eigenvalues, converged })
}

/// Solve i v' + β^{2s} v = f on [0, T] with f given as uniform samples
/// (t_j, f(t_j)) covering [0, T] and held piecewise constant on each
/// subinterval. The homogeneous phase is propagated exactly per sample time;
/// the Duhamel integral is exact per subinterval.
///
/// Returns (t_j, v(t_j)) at the sample times.
pub fn mode_duhamel_solve(
    beta2s: f64,
    v0: Complex64,
    forcing: &[(f64, Complex64)],
    t_final: f64,
) -> Result<Vec<(f64, Complex64)>> {
    if forcing.is_empty() {
        return Err(Error::invalid("mode_duhamel_solve: empty forcing grid"));
    }
    if !(beta2s >= 0.0) {
        return Err(Error::invalid("mode_duhamel_solve: β^{2s} must be nonnegative"));
    }
    let t0 = forcing[0].0;
    let tn = forcing[forcing.len() - 1].0;
    if t0.abs() > 1e-12 * t_final.max(1.0) || (tn - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(Error::invalid("mode_duhamel_solve: forcing samples must cover [0, T]"));
    }
    if forcing.len() > 1 {
        let dt = (tn - t0) / (forcing.len() - 1) as f64;
        for (j, (t, _)) in forcing.iter().enumerate() {
            if (t - (t0 + j as f64 * dt)).abs() > 1e-9 * dt.max(1e-12) {
                return Err(Error::invalid("mode_duhamel_solve: forcing grid is not uniform"));
            }
        }
    }

    let mut out = Vec::with_capacity(forcing.len());
    // J(t) = ∫₀ᵗ e^{-iβτ} f(τ) dτ, accumulated exactly per subinterval
    let mut j_acc = Complex64::new(0.0, 0.0);
    for (j, &(t, _)) in forcing.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, beta2s * t);
        out.push((t, phase * (v0 - Complex64::i() * j_acc)));
        if j + 1 < forcing.len() {
            let (t_next, _) = forcing[j + 1];
            let f_j = forcing[j].1;
            let seg = if beta2s == 0.0 {
                Complex64::new(t_next - t, 0.0)
            } else {
                (Complex64::from_polar(1.0, -beta2s * t) - Complex64::from_polar(1.0, -beta2s * t_next))
                    / (Complex64::i() * beta2s)
            };
            j_acc += f_j * seg;
        }
    }
    Ok(out)
}
