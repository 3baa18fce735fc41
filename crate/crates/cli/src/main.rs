//! Command-line front door.
//!
//! Exit codes: 0 = all experiment verdicts passed, 1 = some verdict failed
//! (or a run blew up), 2 = usage or config error. Partial artifacts are
//! flushed before a failure exit.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use vwslab_cli::config::{ConfigError, RunConfig};
use vwslab_cli::runner::{self, SpectrumParams};

#[derive(Parser)]
#[command(name = "vwslab", version, about = "Fractional Schrödinger laboratory with singular potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the JSON run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory (overrides config and VWSLAB_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one regularized problem and dump diagnostics.
    Solve(ConfigArgs),
    /// ε-scaling of solution Sobolev norms (moderateness exponent).
    Moderateness(ConfigArgs),
    /// Stability under negligible perturbations (uniqueness).
    Uniqueness(ConfigArgs),
    /// Convergence of regularized runs to the classical solution.
    Consistency(ConfigArgs),
    /// A-priori estimate ratio check.
    Apriori(ConfigArgs),
    /// Sobolev embedding constants with grid-refinement stability.
    Embedding(ConfigArgs),
    /// Symbol spectrum dump (heisenberg:<n> or engel).
    Spectrum {
        /// Group preset: "heisenberg:<n>" or "engel".
        #[arg(long)]
        preset: String,
        /// Number of eigenvalues.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Representation parameter λ (nonzero).
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Representation parameter μ (engel only).
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Hermite basis size (engel only).
        #[arg(long, default_value_t = 256)]
        basis: usize,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Mollifier sup-norm scaling (slope −Q) and discrete-mass check.
    MollifierScaling(ConfigArgs),
}

fn out_dir(flag: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir.clone();
    }
    match std::env::var_os("VWSLAB_OUT") {
        Some(root) => PathBuf::from(root).join(&cfg.output_dir),
        None => PathBuf::from(&cfg.output_dir),
    }
}

fn load(args: &ConfigArgs) -> Result<(RunConfig, PathBuf), ConfigError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        ConfigError::Semantic(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let cfg = RunConfig::parse(&text)?;
    let dir = out_dir(&args.out, &cfg);
    Ok((cfg, dir))
}

fn dispatch(command: &Command) -> anyhow::Result<runner::Outcome> {
    match command {
        Command::Solve(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_solve(&cfg, &dir)
        }
        Command::Moderateness(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_moderateness(&cfg, &dir)
        }
        Command::Uniqueness(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_uniqueness(&cfg, &dir)
        }
        Command::Consistency(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_consistency(&cfg, &dir)
        }
        Command::Apriori(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_apriori(&cfg, &dir)
        }
        Command::Embedding(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_embedding(&cfg, &dir)
        }
        Command::Spectrum { preset, count, lambda, mu, basis, out } => {
            let params = SpectrumParams {
                preset: preset.clone(),
                count: *count,
                lambda: *lambda,
                mu: *mu,
                basis: *basis,
            };
            let dir = match std::env::var_os("VWSLAB_OUT") {
                Some(root) => PathBuf::from(root).join(out),
                None => out.clone(),
            };
            runner::run_spectrum(&params, &dir)
        }
        Command::MollifierScaling(a) => {
            let (cfg, dir) = load(a)?;
            runner::run_mollifier_scaling(&cfg, &dir)
        }
    }
}

fn main() {
    let cli = Cli::parse(); // usage errors exit 2 via clap
    match dispatch(&cli.command) {
        Ok(outcome) => {
            outcome.print();
            std::process::exit(if outcome.all_passed() { 0 } else { 1 });
        }
        Err(err) => {
            if let Some(cfg_err) = err.downcast_ref::<ConfigError>() {
                eprintln!("{cfg_err}");
                std::process::exit(2);
            }
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
