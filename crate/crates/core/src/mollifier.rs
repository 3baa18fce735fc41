//! Friedrichs mollifiers under anisotropic dilations and the regularizing
//! nets for singular potentials.
//!
//! The base bump ψ is compactly supported with unit mass; its dilates
//!
//! ```text
//! ψ_ε(x) = ε^{-Q} ψ(D_{1/ε}(x)),   ε ∈ (0,1],
//! ```
//!
//! approximate the identity, with Q the homogeneous dimension of the group.
//! Singular potentials never exist as grid objects: δ lives only through the
//! net ψ_ε, δ² through ψ_ε², and a smooth p through p * ψ_ε.

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::fit::log_log_fit;
use crate::group::GroupStructure;
use crate::report::{ScalingReport, Verdict};
use crate::transform::SpectralTransform;
use std::sync::Arc;

/// Fewer grid cells than this across the support (any axis) is a resolution
/// error; mass accuracy is only asserted from twice this resolution up.
pub const MIN_CELLS_ACROSS_SUPPORT: f64 = 8.0;

/// Base bump profile, radial in the Euclidean norm on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpProfile {
    /// c·(1 − |x/R|²)^order on |x| ≤ R. Order 8 keeps the discrete mass of
    /// well-resolved dilates within 1e-6 of unity (order 4 does not).
    Polynomial { order: u32 },
    /// c·e^{−|x/R|²/(2w²)} truncated at |x| ≤ R (w relative to R).
    TruncatedGaussian { relative_width: f64 },
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile::Polynomial { order: 8 }
    }
}

/// A Friedrichs mollifier on a homogeneous group: base profile, support
/// radius, and the normalization constant fixing unit mass.
#[derive(Debug, Clone)]
pub struct Mollifier {
    group: GroupStructure,
    profile: BumpProfile,
    radius: f64,
    /// 1/(mass of the unnormalized profile on ℝⁿ).
    norm_const: f64,
}

impl Mollifier {
    pub fn new(group: GroupStructure, profile: BumpProfile, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("mollifier radius must be positive"));
        }
        if let BumpProfile::TruncatedGaussian { relative_width } = profile {
            if !(relative_width > 0.0) {
                return Err(Error::invalid("gaussian profile width must be positive"));
            }
        }
        let n = group.topological_dimension();
        let mass = profile_mass(profile, radius, n);
        Ok(Self { group, profile, radius, norm_const: 1.0 / mass })
    }

    pub fn standard(group: GroupStructure) -> Self {
        Self::new(group, BumpProfile::default(), 1.0).expect("default profile is valid")
    }

    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// ψ(x) at a point of ℝⁿ.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() / (self.radius * self.radius);
        if r2 > 1.0 {
            return 0.0;
        }
        let shape = match self.profile {
            BumpProfile::Polynomial { order } => (1.0 - r2).powi(order as i32),
            BumpProfile::TruncatedGaussian { relative_width } => {
                (-r2 / (2.0 * relative_width * relative_width)).exp()
            }
        };
        self.norm_const * shape
    }

    /// ψ(0) = sup ψ, so sup ψ_ε = ε^{-Q}·peak exactly.
    pub fn peak(&self) -> f64 {
        self.norm_const
    }

    /// ψ_ε(x) = ε^{-Q} ψ(D_{1/ε}(x)), evaluated exactly (no grid).
    pub fn eval_scaled(&self, x: &[f64], eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let y = self.group.dilate(x, 1.0 / eps)?;
        Ok(eps.powf(-self.group.homogeneous_dimension_f64()) * self.eval(&y))
    }

    /// Support half-extent along each axis after dilation: R·ε^{νᵢ}.
    pub fn support_extents(&self, eps: f64) -> Vec<f64> {
        self.group
            .weights_f64()
            .iter()
            .map(|w| self.radius * eps.powf(*w))
            .collect()
    }

    /// Sample ψ_ε on a grid. Errors when the support leaves the box or is
    /// resolved by fewer than [`MIN_CELLS_ACROSS_SUPPORT`] cells on some axis.
    pub fn sample_scaled(&self, grid: &Arc<Grid>, eps: f64) -> Result<Field> {
        check_eps(eps)?;
        if grid.dims() != self.group.topological_dimension() {
            return Err(Error::GridMismatch(format!(
                "mollifier on {} needs a {}-axis grid, got {} axes",
                self.group,
                self.group.topological_dimension(),
                grid.dims()
            )));
        }
        let support = self.support_extents(eps);
        let spacing = grid.spacing();
        for (axis, (&half, ext)) in support.iter().zip(grid.extents()).enumerate() {
            if 2.0 * half > *ext {
                return Err(Error::Resolution(format!(
                    "mollifier support 2·{half:.3e} exceeds box extent {ext:.3e} on axis {axis} at ε={eps}"
                )));
            }
            let cells = 2.0 * half / spacing[axis];
            if cells < MIN_CELLS_ACROSS_SUPPORT {
                return Err(Error::Resolution(format!(
                    "only {cells:.1} cells across the mollifier support on axis {axis} at ε={eps} (need ≥ {MIN_CELLS_ACROSS_SUPPORT})"
                )));
            }
        }
        let q = self.group.homogeneous_dimension_f64();
        let scale = eps.powf(-q);
        let inv = 1.0 / eps;
        let weights = self.group.weights_f64();
        let mut y = vec![0.0; grid.dims()];
        Ok(grid.sample_real(|x| {
            for ((yi, xi), w) in y.iter_mut().zip(x).zip(&weights) {
                *yi = inv.powf(*w) * xi;
            }
            scale * self.eval(&y)
        }))
    }

    /// Discrete mass of ψ_ε on a private evaluation lattice with
    /// `cells_across` cells spanning the support per axis. Streams the sum so
    /// high-dimensional presets never materialize a field.
    pub fn discrete_mass(&self, eps: f64, cells_across: usize) -> Result<f64> {
        check_eps(eps)?;
        if cells_across < MIN_CELLS_ACROSS_SUPPORT as usize {
            return Err(Error::Resolution(format!(
                "{cells_across} cells across the support (need ≥ {MIN_CELLS_ACROSS_SUPPORT})"
            )));
        }
        let n = self.group.topological_dimension();
        let support = self.support_extents(eps);
        // pad the box a little so the support edge never sits on the lattice edge
        let steps: Vec<usize> = vec![cells_across + 4; n];
        let h: Vec<f64> = support.iter().map(|s| 2.0 * s / cells_across as f64).collect();
        let total: usize = steps.iter().product();
        let q = self.group.homogeneous_dimension_f64();
        let scale = eps.powf(-q);
        let inv = 1.0 / eps;
        let weights = self.group.weights_f64();
        let mut idx = vec![0usize; n];
        let mut sum = 0.0;
        let mut y = vec![0.0; n];
        for _ in 0..total {
            for axis in 0..n {
                let x = (idx[axis] as f64 - steps[axis] as f64 / 2.0) * h[axis];
                y[axis] = inv.powf(weights[axis]) * x;
            }
            sum += scale * self.eval(&y);
            for axis in (0..n).rev() {
                idx[axis] += 1;
                if idx[axis] < steps[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Ok(sum * h.iter().product::<f64>())
    }

    /// Fit log sup ψ_ε against log ε on exact evaluations. The slope is −Q
    /// for every preset group.
    pub fn sup_norm_scaling(&self, epsilons: &[f64]) -> Result<ScalingReport> {
        let mut pairs = Vec::with_capacity(epsilons.len());
        let q = self.group.homogeneous_dimension_f64();
        for &eps in epsilons {
            check_eps(eps)?;
            pairs.push((eps, eps.powf(-q) * self.peak()));
        }
        let fit = log_log_fit(&pairs)
            .ok_or_else(|| Error::invalid("sup_norm_scaling: need at least two ε values"))?;
        let verdict = if (fit.slope + q).abs() <= 0.05 && fit.residual < 1e-3 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Ok(ScalingReport::new("mollifier-sup-scaling", pairs, Some(fit), verdict))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("ε must lie in (0,1], got {eps}")));
    }
    Ok(())
}

/// Mass of the unnormalized profile over ℝⁿ.
///
/// For the polynomial profile the closed form is
/// π^{n/2}·k!·Rⁿ / Γ(n/2 + k + 1); the truncated Gaussian is reduced to a
/// 1-D radial quadrature against the sphere area 2π^{n/2}/Γ(n/2)·r^{n-1}.
fn profile_mass(profile: BumpProfile, radius: f64, n: usize) -> f64 {
    match profile {
        BumpProfile::Polynomial { order } => {
            let mut log_mass = 0.5 * n as f64 * std::f64::consts::PI.ln();
            log_mass += ln_gamma_half(2 * order + 2) - ln_gamma_half(n as u32 + 2 * order + 2);
            log_mass.exp() * radius.powi(n as i32)
        }
        BumpProfile::TruncatedGaussian { relative_width } => {
            let sphere = 2.0 * std::f64::consts::PI.powf(n as f64 / 2.0)
                / (ln_gamma_half(n as u32).exp());
            // Simpson quadrature of ∫₀^R e^{-(r/R)²/(2w²)} r^{n-1} dr
            let m = 20_000usize;
            let h = radius / m as f64;
            let integrand = |r: f64| {
                let t = r / radius;
                (-t * t / (2.0 * relative_width * relative_width)).exp() * r.powi(n as i32 - 1)
            };
            let mut s = integrand(0.0) + integrand(radius);
            for j in 1..m {
                s += integrand(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            sphere * s * h / 3.0
        }
    }
}

/// ln Γ(m/2) for positive integer m, by the recurrence from Γ(1/2) and Γ(1).
fn ln_gamma_half(m: u32) -> f64 {
    assert!(m >= 1);
    let mut z = m as f64 / 2.0;
    let mut acc = 0.0;
    while z > 1.25 {
        z -= 1.0;
        acc += z.ln();
    }
    if (z - 0.5).abs() < 1e-12 {
        acc + 0.5 * std::f64::consts::PI.ln()
    } else {
        acc // Γ(1) = 1
    }
}

/// The ε-parametrized potential nets.
#[derive(Debug, Clone)]
pub enum PotentialNet {
    /// δ realized as ψ_ε.
    Delta,
    /// δ² realized as ψ_ε².
    DeltaSquared,
    /// A fixed nonnegative field regularized by convolution: p * ψ_ε.
    Mollified(Field),
    /// Base net shifted by the negligible constant e^{-1/ε}.
    ConstantShifted(Box<PotentialNet>),
    /// The zero potential (every realization vanishes).
    Zero,
}

impl PotentialNet {
    /// Companion net p̃_ε = p_ε + e^{-1/ε}.
    pub fn shifted(self) -> PotentialNet {
        PotentialNet::ConstantShifted(Box::new(self))
    }

    /// Realize p_ε on the grid. Every realization is nonnegative.
    pub fn realize(&self, mollifier: &Mollifier, grid: &Arc<Grid>, eps: f64) -> Result<Field> {
        match self {
            PotentialNet::Delta => mollifier.sample_scaled(grid, eps),
            PotentialNet::DeltaSquared => {
                let mut f = mollifier.sample_scaled(grid, eps)?;
                for v in f.values_mut() {
                    *v = *v * *v;
                }
                Ok(f)
            }
            PotentialNet::Mollified(p) => {
                if p.grid().as_ref() != grid.as_ref() {
                    return Err(Error::GridMismatch("mollified net: base potential on a different grid".into()));
                }
                let psi = mollifier.sample_scaled(grid, eps)?;
                let transform = SpectralTransform::new(Arc::clone(grid));
                let mut out = transform.convolve(p, &psi);
                // circular convolution of nonnegative data is nonnegative up
                // to spectral round-off; clamp the dust
                for v in out.values_mut() {
                    if v.re < 0.0 {
                        v.re = 0.0;
                    }
                    v.im = 0.0;
                }
                Ok(out)
            }
            PotentialNet::ConstantShifted(base) => {
                let mut f = base.realize(mollifier, grid, eps)?;
                let shift = (-1.0 / eps).exp();
                for v in f.values_mut() {
                    v.re += shift;
                }
                Ok(f)
            }
            PotentialNet::Zero => Ok(grid.zero_field()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PotentialNet::Delta => "delta".into(),
            PotentialNet::DeltaSquared => "delta_squared".into(),
            PotentialNet::Mollified(_) => "mollified".into(),
            PotentialNet::ConstantShifted(base) => format!("{}+e^(-1/eps)", base.label()),
            PotentialNet::Zero => "zero".into(),
        }
    }
}

/// Which norm a scaling measurement uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Lp(f64),
    Sup,
}

impl NormSpec {
    pub fn apply(&self, f: &Field) -> Result<f64> {
        match self {
            NormSpec::Lp(q) => f.lp_norm(*q),
            NormSpec::Sup => f.lp_norm(f64::INFINITY),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormSpec::Lp(q) => format!("L{q}"),
            NormSpec::Sup => "sup".into(),
        }
    }
}

/// Measure ‖p_ε‖ across a geometric ε net and fit the moderateness exponent:
/// slope of log‖p_ε‖ vs log ε, with N = −slope.
///
/// Resolution failures at small ε are propagated as warnings with partial
/// results, as long as at least two ε values survive.
pub fn moderateness_slope(
    net: &PotentialNet,
    mollifier: &Mollifier,
    grid: &Arc<Grid>,
    norm: NormSpec,
    epsilons: &[f64],
) -> Result<ScalingReport> {
    if epsilons.len() < 5 {
        return Err(Error::invalid("moderateness_slope: need at least 5 ε values"));
    }
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    for &eps in epsilons {
        match net.realize(mollifier, grid, eps) {
            Ok(f) => pairs.push((eps, norm.apply(&f)?)),
            Err(Error::Resolution(msg)) => warnings.push(format!("ε={eps}: {msg}")),
            Err(e) => return Err(e),
        }
    }
    if pairs.len() < 2 {
        return Err(Error::Resolution(format!(
            "moderateness_slope: fewer than two resolvable ε values ({})",
            warnings.join("; ")
        )));
    }
    let fit = log_log_fit(&pairs);
    let verdict = match &fit {
        Some(f) if f.slope.is_finite() && f.residual < 0.1 => Verdict::Pass,
        _ => Verdict::Fail,
    };
    let mut report = ScalingReport::new(
        format!("moderateness-{}-{}", net.label(), norm.label()),
        pairs,
        fit,
        verdict,
    );
    report.warnings = warnings;
    Ok(report)
}
