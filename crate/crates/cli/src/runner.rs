//! Subcommand execution: build the domain from a validated config, run the
//! requested experiment, write artifacts (JSON report + CSV twin + manifest),
//! and hand back one verdict per experiment for the exit code.

use crate::artifacts::ArtifactWriter;
use crate::config::{ConfigError, RunConfig};
use anyhow::Context;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;
use vwslab::experiments::{
    apriori_check, consistency_experiment, embedding_check, moderateness_experiment,
    uniqueness_experiment,
};
use vwslab::group::PresetTag;
use vwslab::report::Verdict;
use vwslab::symbol::{engel_symbol_spectrum, heisenberg_levels};
use vwslab::SolverConfig;

pub struct Outcome {
    pub verdicts: Vec<(String, Verdict)>,
}

impl Outcome {
    fn single(name: impl Into<String>, verdict: Verdict) -> Self {
        Self { verdicts: vec![(name.into(), verdict)] }
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.passed())
    }

    pub fn print(&self) {
        for (name, verdict) in &self.verdicts {
            println!("{name}: {verdict}");
        }
    }
}

fn config_value(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

#[derive(Serialize)]
struct SolveReport {
    experiment: String,
    epsilon: f64,
    l2_relative_drift: f64,
    energy_drift: f64,
    clamped_cells: usize,
    warnings: Vec<String>,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

/// Evolve once (at ε = epsilon.start for net potentials) and dump the
/// trajectory diagnostics plus the final state.
pub fn run_solve(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    let eps0 = cfg.epsilon.start;
    let u0 = cfg
        .initial
        .data(&domain.grid, cfg.seed)?
        .realize(&domain.mollifier, &domain.op, eps0)?;
    let p = if cfg.potential.is_singular() {
        cfg.potential.net(&domain.grid)?.realize(&domain.mollifier, &domain.grid, eps0)?
    } else {
        cfg.potential.fixed_field(&domain.grid)?
    };
    let traj = vwslab::solve_with_potential(&u0, &p, &domain.op, &domain.solver)?;

    let report = SolveReport {
        experiment: "solve".into(),
        epsilon: eps0,
        l2_relative_drift: traj.max_l2_drift(),
        energy_drift: traj.max_energy_drift(),
        clamped_cells: traj.clamped_cells,
        warnings: traj.warnings.clone(),
        verdict: Verdict::from_bool(traj.max_l2_drift() <= 1e-11),
        seed: cfg.initial.uses_seed().then_some(cfg.seed),
    };

    let mut w = ArtifactWriter::new(out_dir, "solve", config_value(cfg))?;
    w.write_text("diagnostics.csv", &traj.to_csv())?;
    let final_state = traj.final_state();
    w.write_text("final_state.csv", &final_state.to_csv())?;
    w.write("final_state.bin", &final_state.to_binary())?;
    w.write_text("final_state.json", &final_state.binary_sidecar())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single("solve", report.verdict))
}

pub fn run_moderateness(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    let initial = cfg.initial.data(&domain.grid, cfg.seed)?;
    let net = cfg.potential.net(&domain.grid)?;
    let eps = cfg.epsilon.net()?;
    let mut report = moderateness_experiment(
        &initial,
        &net,
        &domain.mollifier,
        &eps,
        &domain.op,
        &domain.solver,
    )
    .context("moderateness experiment")?;
    report.seed = cfg.initial.uses_seed().then_some(cfg.seed);

    let mut w = ArtifactWriter::new(out_dir, "moderateness", config_value(cfg))?;
    w.write_text("report.csv", &report.to_csv())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single(report.experiment.clone(), report.verdict))
}

pub fn run_uniqueness(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    let initial = cfg.initial.data(&domain.grid, cfg.seed)?;
    let net = cfg.potential.net(&domain.grid)?;
    let eps = cfg.epsilon.net()?;
    let perturbation = cfg.perturbation.build(&domain.grid);
    let mut report = uniqueness_experiment(
        &initial,
        &net,
        &perturbation,
        &domain.mollifier,
        &eps,
        &domain.op,
        &domain.solver,
    )
    .context("uniqueness experiment")?;
    report.seed = cfg.initial.uses_seed().then_some(cfg.seed);

    let mut w = ArtifactWriter::new(out_dir, "uniqueness", config_value(cfg))?;
    w.write_text("report.csv", &report.to_csv())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single(report.experiment.clone(), report.verdict))
}

pub fn run_consistency(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    if cfg.potential.is_singular() {
        return Err(ConfigError::Semantic(
            "consistency compares against a classical solution; potential must be a fixed field (gaussian_well, constant or zero)"
                .into(),
        )
        .into());
    }
    let p = cfg.potential.fixed_field(&domain.grid)?;
    let u0 = cfg.initial.field(&domain.grid, cfg.seed)?;
    let eps = cfg.epsilon.net()?;
    // comparisons happen at snapshot times; cap the snapshot count so the
    // reference run stays in memory
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let solver = SolverConfig {
        record_every: cfg.record_every.max(steps.div_ceil(50)),
        ..domain.solver
    };
    let mut report = consistency_experiment(
        &u0,
        &p,
        &domain.mollifier,
        &eps,
        &domain.op,
        &solver,
        cfg.consistency_final_tol,
    )
    .context("consistency experiment")?;
    report.seed = cfg.initial.uses_seed().then_some(cfg.seed);

    let mut w = ArtifactWriter::new(out_dir, "consistency", config_value(cfg))?;
    w.write_text("report.csv", &report.to_csv())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single(report.experiment.clone(), report.verdict))
}

pub fn run_apriori(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    let spec = cfg.apriori.clone().unwrap_or_default();
    let kind = spec.kind()?;
    let p = cfg.potential.fixed_field(&domain.grid)?;
    let u0 = cfg.initial.field(&domain.grid, cfg.seed)?;
    let report = apriori_check(&u0, &p, &domain.op, &domain.solver, kind, spec.c_max)
        .context("a-priori check")?;

    let mut w = ArtifactWriter::new(out_dir, "apriori", config_value(cfg))?;
    w.write_text("series.csv", &report.to_csv())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single(format!("apriori-{}", report.estimate), report.verdict))
}

pub fn run_embedding(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let domain = cfg.domain()?;
    let spec = cfg.embedding.clone().ok_or_else(|| {
        ConfigError::Semantic("embedding requires an \"embedding\" section".into())
    })?;
    let report = embedding_check(
        cfg.s,
        &domain.grid,
        &spec.family(),
        spec.a,
        spec.b,
        spec.q_tilde,
        spec.q0,
    )
    .context("embedding check")?;

    let mut w = ArtifactWriter::new(out_dir, "embedding", config_value(cfg))?;
    w.write_text("ratios.csv", &report.to_csv())?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single("embedding", report.verdict))
}

#[derive(Serialize)]
struct MollifierScalingReport {
    experiment: String,
    group: String,
    homogeneous_dimension: f64,
    slope: f64,
    residual: f64,
    max_mass_error: f64,
    verdict: Verdict,
}

/// Exact sup-norm scaling (slope must be −Q) plus the discrete-mass check on
/// a private evaluation lattice. Works on every preset group.
pub fn run_mollifier_scaling(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let group = cfg.group_structure();
    let mollifier = cfg.mollifier.build(group.clone())?;
    let eps = cfg.epsilon.net()?;
    let scaling = mollifier.sup_norm_scaling(eps.values())?;
    let q = group.homogeneous_dimension_f64();

    let mut mass_csv = String::from("epsilon,mass\n");
    let mut max_mass_error: f64 = 0.0;
    for &e in eps.values() {
        let mass = mollifier.discrete_mass(e, 16)?;
        max_mass_error = max_mass_error.max((mass - 1.0).abs());
        mass_csv.push_str(&format!("{e},{mass}\n"));
    }
    let fit = scaling.fit.expect("scaling fit always present");
    let verdict = Verdict::from_bool(scaling.verdict.passed() && max_mass_error <= 1e-6);
    let report = MollifierScalingReport {
        experiment: "mollifier-scaling".into(),
        group: cfg.group.clone(),
        homogeneous_dimension: q,
        slope: fit.slope,
        residual: fit.residual,
        max_mass_error,
        verdict,
    };

    let mut w = ArtifactWriter::new(out_dir, "mollifier-scaling", config_value(cfg))?;
    w.write_text("sup_scaling.csv", &scaling.to_csv())?;
    w.write_text("mass.csv", &mass_csv)?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    Ok(Outcome::single("mollifier-scaling", verdict))
}

#[derive(Debug, Clone)]
pub struct SpectrumParams {
    pub preset: String,
    pub count: usize,
    pub lambda: f64,
    pub mu: f64,
    pub basis: usize,
}

#[derive(Serialize)]
struct SpectrumReport {
    experiment: String,
    preset: String,
    lambda: f64,
    mu: f64,
    count: usize,
    eigenvalues: Vec<f64>,
    converged: bool,
    verdict: Verdict,
}

/// Symbol spectrum dump: Heisenberg levels in closed form, Engel levels by
/// Hermite-basis diagonalization.
pub fn run_spectrum(params: &SpectrumParams, out_dir: &Path) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let group = vwslab::GroupStructure::parse(&params.preset)
        .map_err(|e| ConfigError::Semantic(e.to_string()))?;
    // bad λ/count/basis values are command-line mistakes, not run failures
    let usage = |e: vwslab::Error| ConfigError::Semantic(e.to_string());
    let (levels, converged): (Vec<(f64, usize)>, bool) = match group.preset() {
        PresetTag::Heisenberg(n) => {
            (heisenberg_levels(n, params.lambda, params.count).map_err(usage)?, true)
        }
        PresetTag::Engel => {
            let res = engel_symbol_spectrum(params.lambda, params.mu, params.basis, params.count)
                .map_err(usage)?;
            (res.eigenvalues.iter().map(|&e| (e, 1usize)).collect(), res.converged)
        }
        PresetTag::Abelian(_) => {
            return Err(ConfigError::Semantic(
                "spectrum requires \"heisenberg:<n>\" or \"engel\" (abelian symbols are continuous)"
                    .into(),
            )
            .into())
        }
    };

    let mut csv = String::from("index,eigenvalue,multiplicity\n");
    let mut flat = Vec::new();
    for (idx, (value, mult)) in levels.iter().enumerate() {
        csv.push_str(&format!("{idx},{value},{mult}\n"));
        for _ in 0..*mult {
            flat.push(*value);
        }
    }
    let report = SpectrumReport {
        experiment: "spectrum".into(),
        preset: params.preset.clone(),
        lambda: params.lambda,
        mu: params.mu,
        count: params.count,
        eigenvalues: flat,
        converged,
        verdict: Verdict::from_bool(converged),
    };

    let config = serde_json::json!({
        "preset": params.preset,
        "count": params.count,
        "lambda": params.lambda,
        "mu": params.mu,
        "basis": params.basis,
    });
    let mut w = ArtifactWriter::new(out_dir, "spectrum", config)?;
    w.write_text("spectrum.csv", &csv)?;
    w.write_report("report.json", &report)?;
    w.finish(started)?;
    if !converged {
        eprintln!(
            "warning: spectrum not converged between basis sizes {} and {}",
            params.basis / 2,
            params.basis
        );
    }
    Ok(Outcome::single("spectrum", report.verdict))
}
