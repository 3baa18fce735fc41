//! Time evolution of the regularized Cauchy problems
//!
//! ```text
//! i ∂ₜu + 𝓡ˢu + p(x)u = 0,   u(0) = u₀,
//! ```
//!
//! by split-step spectral propagation. Sign convention (fixed here once):
//! ∂ₜu = i(𝓡ˢu + pu), so the free flight multiplies the coefficient at ξ by
//! e^{+i σ(ξ)^s dt} and the potential phase is e^{+i p(x) dt}. Each substep
//! is an exact unitary on the discrete L², which makes the L² conservation
//! law structurally exact, which is the identity every uniqueness argument
//! leans on.
//! Splitting was chosen over exponential integrators for precisely this
//! reason.
//!
//! Energy E(t) = ‖𝓡^{s/2}u‖² + ‖√p u‖² is conserved by the exact flow and
//! drifts O(dt²) under Strang splitting, O(dt) under Lie.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mollifier::{Mollifier, PotentialNet};
use crate::spectral::FractionalOperator;
use num_complex::Complex64;

/// Outer fraction of each half-axis monitored for wrap-around mass.
pub const WRAP_BAND_FRACTION: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Full potential phase, then free flight. First-order energy drift.
    Lie,
    /// Half potential phase, free flight, half potential phase. Second order.
    Strang,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Record diagnostics every this many steps (≥ 1).
    pub record_every: usize,
    /// Warn when the boundary band holds more than this fraction of the mass.
    pub wrap_mass_threshold: f64,
    /// Keep a state snapshot every this many recordings (0 = endpoints only).
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_final,
            scheme: Scheme::Strang,
            record_every: 1,
            wrap_mass_threshold: 1e-8,
            snapshot_every: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid("solver: dt must be positive"));
        }
        if self.t_final < self.dt {
            return Err(Error::invalid("solver: T must be at least dt"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("solver: record_every must be >= 1"));
        }
        Ok(())
    }

    /// Number of full steps plus an optional remainder landing exactly on T.
    pub fn step_plan(&self) -> (usize, Option<f64>) {
        let ratio = self.t_final / self.dt;
        let near = ratio.round();
        if (ratio - near).abs() < 1e-9 * near.max(1.0) {
            (near as usize, None)
        } else {
            let full = ratio.floor() as usize;
            (full, Some(self.t_final - full as f64 * self.dt))
        }
    }
}

/// Recorded state and diagnostics of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    /// E(t) = ‖𝓡^{s/2}u‖² + ‖√p u‖².
    pub energy: Vec<f64>,
    /// ‖u(t)‖_{H^{sν/2}} = ‖𝓡^{s/2}u‖ + ‖u‖.
    pub sobolev: Vec<f64>,
    pub wrap_mass: Vec<f64>,
    /// Decimated snapshots (time, state); always includes t = 0 and t = T.
    pub states: Vec<(f64, Field)>,
    pub warnings: Vec<String>,
    /// Grid points where the realized potential was clamped to 0 before √p.
    pub clamped_cells: usize,
}

impl Trajectory {
    pub fn max_l2_drift(&self) -> f64 {
        let u0 = self.l2[0];
        self.l2.iter().map(|v| (v - u0).abs()).fold(0.0, f64::max) / u0
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max)
    }

    pub fn max_sobolev(&self) -> f64 {
        self.sobolev.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> &Field {
        &self.states.last().expect("trajectory has endpoints").1
    }

    /// Diagnostics as CSV: `t,l2,energy,sobolev,wrap_mass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,l2,energy,sobolev,wrap_mass\n");
        for j in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.times[j], self.l2[j], self.energy[j], self.sobolev[j], self.wrap_mass[j]
            ));
        }
        out
    }
}

/// Split-step propagator with phase tables cached for a fixed dt.
pub struct Stepper<'a> {
    op: &'a FractionalOperator,
    /// Clamped nonnegative potential values (for the energy functional).
    potential: Vec<f64>,
    half_phase: Vec<Complex64>,
    full_phase: Vec<Complex64>,
    free_phase: Vec<Complex64>,
    scheme: Scheme,
    pub clamped_cells: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(op: &'a FractionalOperator, p: &Field, dt: f64, scheme: Scheme) -> Result<Self> {
        if p.grid().as_ref() != op.grid().as_ref() {
            return Err(Error::GridMismatch("stepper: potential not on the operator grid".into()));
        }
        let scale = p.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut clamped_cells = 0;
        let mut potential = Vec::with_capacity(p.values().len());
        for v in p.values() {
            if v.im.abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::invalid("stepper: potential must be real"));
            }
            if v.re < -1e-10 * scale.max(1.0) {
                return Err(Error::invalid("stepper: potential must be nonnegative"));
            }
            if v.re < 0.0 {
                clamped_cells += 1;
                potential.push(0.0);
            } else {
                potential.push(v.re);
            }
        }
        let half_phase = p.values().iter().map(|v| Complex64::from_polar(1.0, v.re * dt / 2.0)).collect();
        let full_phase = p.values().iter().map(|v| Complex64::from_polar(1.0, v.re * dt)).collect();
        let free_phase = op.sigma_s().iter().map(|&s| Complex64::from_polar(1.0, s * dt)).collect();
        Ok(Self { op, potential, half_phase, full_phase, free_phase, scheme, clamped_cells })
    }

    fn mul_table(u: &mut Field, table: &[Complex64]) {
        for (v, ph) in u.values_mut().iter_mut().zip(table) {
            *v *= ph;
        }
    }

    /// Advance one step of the dt this stepper was built for.
    pub fn step(&self, u: &mut Field) {
        match self.scheme {
            Scheme::Strang => {
                Self::mul_table(u, &self.half_phase);
                let mut hat = self.op.transform().forward(u);
                Self::mul_table(&mut hat, &self.free_phase);
                *u = self.op.transform().inverse(&hat);
                Self::mul_table(u, &self.half_phase);
            }
            Scheme::Lie => {
                Self::mul_table(u, &self.full_phase);
                let mut hat = self.op.transform().forward(u);
                Self::mul_table(&mut hat, &self.free_phase);
                *u = self.op.transform().inverse(&hat);
            }
        }
    }

    fn record(&self, t: f64, u: &Field, traj: &mut Trajectory, wrap_threshold: f64) {
        let hat = self.op.transform().forward(u);
        let order = self.op.s() * self.op.degree() / 2.0; // H^{sν/2}
        let hom = self.op.homogeneous_norm_spectral(&hat, order);
        let l2 = u.l2_norm();
        let cv = u.grid().cell_volume();
        let pot_term: f64 = self
            .potential
            .iter()
            .zip(u.values())
            .map(|(p, v)| p * v.norm_sqr())
            .sum::<f64>()
            * cv;
        let wrap = u.boundary_mass_fraction(WRAP_BAND_FRACTION);
        if wrap > wrap_threshold && traj.warnings.is_empty() {
            traj.warnings.push(format!(
                "wrap mass {wrap:.3e} exceeded threshold {wrap_threshold:.1e} at t={t}"
            ));
        }
        traj.times.push(t);
        traj.l2.push(l2);
        traj.energy.push(hom * hom + pot_term);
        traj.sobolev.push(hom + l2);
        traj.wrap_mass.push(wrap);
    }
}

/// One split step of size dt (building phase tables on the fly; use
/// [`Stepper`] for loops).
pub fn step(u: &Field, p: &Field, op: &FractionalOperator, dt: f64, scheme: Scheme) -> Result<Field> {
    let stepper = Stepper::new(op, p, dt, scheme)?;
    let mut out = u.clone();
    stepper.step(&mut out);
    Ok(out)
}

/// Evolve `u0` under a fixed realized potential, recording diagnostics.
pub fn solve_with_potential(
    u0: &Field,
    p: &Field,
    op: &FractionalOperator,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if u0.l2_norm() == 0.0 {
        return Err(Error::invalid("solve: initial state must be nonzero"));
    }
    u0.same_grid(p)?;
    if u0.grid().as_ref() != op.grid().as_ref() {
        return Err(Error::GridMismatch("solve: state not on the operator grid".into()));
    }
    let stepper = Stepper::new(op, p, cfg.dt, cfg.scheme)?;
    let (full_steps, remainder) = cfg.step_plan();

    let mut traj = Trajectory {
        times: Vec::new(),
        l2: Vec::new(),
        energy: Vec::new(),
        sobolev: Vec::new(),
        wrap_mass: Vec::new(),
        states: Vec::new(),
        warnings: Vec::new(),
        clamped_cells: stepper.clamped_cells,
    };

    let mut u = u0.clone();
    stepper.record(0.0, &u, &mut traj, cfg.wrap_mass_threshold);
    traj.states.push((0.0, u.clone()));
    let mut recordings = 1usize;

    for j in 1..=full_steps {
        stepper.step(&mut u);
        if !u.is_finite() {
            return Err(Error::Blowup { step: j, reason: "non-finite state".into() });
        }
        let last = j == full_steps && remainder.is_none();
        if j % cfg.record_every == 0 || last {
            let t = if last { cfg.t_final } else { j as f64 * cfg.dt };
            stepper.record(t, &u, &mut traj, cfg.wrap_mass_threshold);
            recordings += 1;
            if cfg.snapshot_every > 0 && recordings % cfg.snapshot_every == 0 && !last {
                traj.states.push((t, u.clone()));
            }
        }
    }
    if let Some(dt_rem) = remainder {
        let final_stepper = Stepper::new(op, p, dt_rem, cfg.scheme)?;
        final_stepper.step(&mut u);
        if !u.is_finite() {
            return Err(Error::Blowup { step: full_steps + 1, reason: "non-finite state".into() });
        }
        stepper.record(cfg.t_final, &u, &mut traj, cfg.wrap_mass_threshold);
    }
    traj.states.push((cfg.t_final, u));
    Ok(traj)
}

/// Evolve under a realized potential net at a given ε.
pub fn solve(
    u0: &Field,
    net: &PotentialNet,
    mollifier: &Mollifier,
    eps: f64,
    op: &FractionalOperator,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let p = net.realize(mollifier, op.grid(), eps)?;
    solve_with_potential(u0, &p, op, cfg)
}

/// Classical reference: the same stepping at dt/8, recorded on the same
/// time lattice as `cfg` so states line up for comparisons.
pub fn reference_solution(
    u0: &Field,
    p: &Field,
    op: &FractionalOperator,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let fine = SolverConfig {
        dt: cfg.dt / 8.0,
        record_every: cfg.record_every * 8,
        ..*cfg
    };
    solve_with_potential(u0, p, op, &fine)
}
