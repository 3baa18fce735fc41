//! JSON run configuration: parsing, defaults, semantic validation, and
//! conversion into the domain objects.
//!
//! JSON is the single config and report interchange format (CSV for tabular
//! series). Unknown keys are rejected with the offending key named; semantic
//! errors name the field and the violated constraint.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use std::sync::Arc;
use vwslab::experiments::{AprioriKind, EpsilonNet, InitialData, Perturbation, TestField};
use vwslab::field::random_band_limited;
use vwslab::group::PresetTag;
use vwslab::mollifier::BumpProfile;
use vwslab::{
    Field, FractionalOperator, Grid, GroupStructure, Mollifier, PotentialNet, Scheme, SolverConfig,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("config error: {0}")]
    Semantic(String),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

fn semantic(msg: impl Into<String>) -> ConfigError {
    ConfigError::Semantic(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: String,
    pub points: Vec<usize>,
    pub extents: Vec<f64>,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_wrap_threshold")]
    pub wrap_mass_threshold: f64,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub mollifier: MollifierSpec,
    #[serde(default)]
    pub epsilon: EpsilonSpec,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apriori: Option<AprioriSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingSpec>,
    #[serde(default = "default_final_tol")]
    pub consistency_final_tol: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_s() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_t() -> f64 {
    1.0
}
fn default_scheme() -> Scheme {
    Scheme::Strang
}
fn default_record_every() -> usize {
    1
}
fn default_wrap_threshold() -> f64 {
    1e-8
}
fn default_final_tol() -> f64 {
    1e-3
}
fn default_output_dir() -> String {
    "out".into()
}
fn default_true() -> bool {
    true
}

/// Potential spec: a bare name ("delta", "delta_squared", "zero") or a
/// tagged object like {"kind": "gaussian_well", "amplitude": 1, "width": 1}.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Delta,
    DeltaSquared,
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    GaussianWell {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
}

impl<'de> Deserialize<'de> for PotentialSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
        enum Tagged {
            Delta,
            DeltaSquared,
            Zero,
            Constant {
                value: f64,
            },
            GaussianWell {
                amplitude: f64,
                width: f64,
                #[serde(default)]
                center: f64,
            },
        }
        let value = serde_json::Value::deserialize(de)?;
        match &value {
            serde_json::Value::String(name) => match name.as_str() {
                "delta" => Ok(PotentialSpec::Delta),
                "delta_squared" => Ok(PotentialSpec::DeltaSquared),
                "zero" => Ok(PotentialSpec::Zero),
                other => Err(D::Error::custom(format!(
                    "unknown potential {other:?} (expected \"delta\", \"delta_squared\", \"zero\" or an object with a \"kind\" field)"
                ))),
            },
            _ => {
                let tagged: Tagged = serde_json::from_value(value)
                    .map_err(|e| D::Error::custom(format!("potential: {e}")))?;
                Ok(match tagged {
                    Tagged::Delta => PotentialSpec::Delta,
                    Tagged::DeltaSquared => PotentialSpec::DeltaSquared,
                    Tagged::Zero => PotentialSpec::Zero,
                    Tagged::Constant { value } => PotentialSpec::Constant { value },
                    Tagged::GaussianWell { amplitude, width, center } => {
                        PotentialSpec::GaussianWell { amplitude, width, center }
                    }
                })
            }
        }
    }
}

impl PotentialSpec {
    /// The ε-net this spec stands for.
    pub fn net(&self, grid: &Arc<Grid>) -> Result<PotentialNet> {
        Ok(match self {
            PotentialSpec::Delta => PotentialNet::Delta,
            PotentialSpec::DeltaSquared => PotentialNet::DeltaSquared,
            PotentialSpec::Zero => PotentialNet::Zero,
            PotentialSpec::Constant { .. } | PotentialSpec::GaussianWell { .. } => {
                PotentialNet::Mollified(self.fixed_field(grid)?)
            }
        })
    }

    /// The potential as a fixed grid function, when it has one (δ and δ² do not).
    pub fn fixed_field(&self, grid: &Arc<Grid>) -> Result<Field> {
        match *self {
            PotentialSpec::Zero => Ok(grid.zero_field()),
            PotentialSpec::Constant { value } => {
                if value < 0.0 {
                    return Err(semantic("potential.value must be nonnegative"));
                }
                Ok(grid.sample_real(|_| value))
            }
            PotentialSpec::GaussianWell { amplitude, width, center } => {
                if amplitude < 0.0 {
                    return Err(semantic("potential.amplitude must be nonnegative"));
                }
                if !(width > 0.0) {
                    return Err(semantic("potential.width must be positive"));
                }
                Ok(grid.sample_real(move |x| {
                    let r2: f64 = x
                        .iter()
                        .enumerate()
                        .map(|(i, v)| if i == 0 { (v - center) * (v - center) } else { v * v })
                        .sum();
                    amplitude * (-r2 / (2.0 * width * width)).exp()
                }))
            }
            PotentialSpec::Delta | PotentialSpec::DeltaSquared => Err(semantic(
                "potential: delta-type potentials exist only as ε-nets, not as fixed fields",
            )),
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, PotentialSpec::Delta | PotentialSpec::DeltaSquared)
    }
}

/// Initial data: "delta", or a tagged object {"kind": "gaussian", ...} /
/// {"kind": "random", ...}. `regularize` selects u₀ * ψ_ε (the default)
/// against using the sampled field for every ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Gaussian {
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default = "default_true")]
        regularize: bool,
    },
    Random {
        max_mode: usize,
        #[serde(default = "default_true")]
        regularize: bool,
    },
    Delta,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Gaussian { width: 1.0, center: 0.0, momentum: 0.0, regularize: true }
    }
}

impl<'de> Deserialize<'de> for InitialSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
        enum Tagged {
            Gaussian {
                width: f64,
                #[serde(default)]
                center: f64,
                #[serde(default)]
                momentum: f64,
                #[serde(default = "default_true")]
                regularize: bool,
            },
            Random {
                max_mode: usize,
                #[serde(default = "default_true")]
                regularize: bool,
            },
            Delta,
        }
        let value = serde_json::Value::deserialize(de)?;
        match &value {
            serde_json::Value::String(name) if name == "delta" => Ok(InitialSpec::Delta),
            serde_json::Value::String(other) => Err(D::Error::custom(format!(
                "unknown initial data {other:?} (expected \"delta\" or an object with a \"kind\" field)"
            ))),
            _ => {
                let tagged: Tagged = serde_json::from_value(value)
                    .map_err(|e| D::Error::custom(format!("initial: {e}")))?;
                Ok(match tagged {
                    Tagged::Gaussian { width, center, momentum, regularize } => {
                        InitialSpec::Gaussian { width, center, momentum, regularize }
                    }
                    Tagged::Random { max_mode, regularize } => {
                        InitialSpec::Random { max_mode, regularize }
                    }
                    Tagged::Delta => InitialSpec::Delta,
                })
            }
        }
    }
}

impl InitialSpec {
    pub fn field(&self, grid: &Arc<Grid>, seed: u64) -> Result<Field> {
        match *self {
            InitialSpec::Gaussian { width, center, momentum, .. } => {
                if !(width > 0.0) {
                    return Err(semantic("initial.width must be positive"));
                }
                Ok(grid.sample(move |x| {
                    let r2: f64 = x
                        .iter()
                        .enumerate()
                        .map(|(i, v)| if i == 0 { (v - center) * (v - center) } else { v * v })
                        .sum();
                    Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), momentum * x[0])
                }))
            }
            InitialSpec::Random { max_mode, .. } => Ok(random_band_limited(grid, max_mode, seed)),
            InitialSpec::Delta => Err(semantic("initial: delta data exists only as an ε-net")),
        }
    }

    pub fn data(&self, grid: &Arc<Grid>, seed: u64) -> Result<InitialData> {
        match self {
            InitialSpec::Delta => Ok(InitialData::Delta),
            InitialSpec::Gaussian { regularize, .. } | InitialSpec::Random { regularize, .. } => {
                let f = self.field(grid, seed)?;
                Ok(if *regularize { InitialData::Mollified(f) } else { InitialData::Exact(f) })
            }
        }
    }

    pub fn uses_seed(&self) -> bool {
        matches!(self, InitialSpec::Random { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierSpec {
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_gauss_width")]
    pub relative_width: f64,
}

fn default_profile() -> String {
    "polynomial".into()
}
fn default_order() -> u32 {
    8
}
fn default_radius() -> f64 {
    1.0
}
fn default_gauss_width() -> f64 {
    0.2
}

impl Default for MollifierSpec {
    fn default() -> Self {
        Self {
            profile: default_profile(),
            order: default_order(),
            radius: default_radius(),
            relative_width: default_gauss_width(),
        }
    }
}

impl MollifierSpec {
    pub fn build(&self, group: GroupStructure) -> Result<Mollifier> {
        let profile = match self.profile.as_str() {
            "polynomial" => BumpProfile::Polynomial { order: self.order },
            "gaussian" => BumpProfile::TruncatedGaussian { relative_width: self.relative_width },
            other => {
                return Err(semantic(format!(
                    "mollifier.profile {other:?} unknown (expected \"polynomial\" or \"gaussian\")"
                )))
            }
        };
        Mollifier::new(group, profile, self.radius).map_err(|e| semantic(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSpec {
    #[serde(default = "default_eps_start")]
    pub start: f64,
    #[serde(default = "default_eps_ratio")]
    pub ratio: f64,
    #[serde(default = "default_eps_count")]
    pub count: usize,
}

fn default_eps_start() -> f64 {
    0.5
}
fn default_eps_ratio() -> f64 {
    0.7
}
fn default_eps_count() -> usize {
    6
}

impl Default for EpsilonSpec {
    fn default() -> Self {
        Self { start: default_eps_start(), ratio: default_eps_ratio(), count: default_eps_count() }
    }
}

impl EpsilonSpec {
    pub fn net(&self) -> Result<EpsilonNet> {
        if !(self.start > 0.0 && self.start <= 1.0) {
            return Err(semantic("epsilon must lie in (0,1]"));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(semantic("epsilon.ratio must lie in (0,1)"));
        }
        if self.count < 5 {
            return Err(semantic("epsilon.count >= 5"));
        }
        EpsilonNet::geometric(self.start, self.ratio, self.count)
            .map_err(|e| semantic(e.to_string()))
    }
}

/// Perturbation for the uniqueness experiment: "potential_shift" or
/// {"kind": "initial_shift", "order": 6}.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    #[default]
    PotentialShift,
    InitialShift { order: u32 },
}

impl<'de> Deserialize<'de> for PerturbationSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
        enum Tagged {
            PotentialShift,
            InitialShift { order: u32 },
        }
        let value = serde_json::Value::deserialize(de)?;
        match &value {
            serde_json::Value::String(name) if name == "potential_shift" => {
                Ok(PerturbationSpec::PotentialShift)
            }
            serde_json::Value::String(other) => Err(D::Error::custom(format!(
                "unknown perturbation {other:?} (expected \"potential_shift\" or an object with a \"kind\" field)"
            ))),
            _ => {
                let tagged: Tagged = serde_json::from_value(value)
                    .map_err(|e| D::Error::custom(format!("perturbation: {e}")))?;
                Ok(match tagged {
                    Tagged::PotentialShift => PerturbationSpec::PotentialShift,
                    Tagged::InitialShift { order } => PerturbationSpec::InitialShift { order },
                })
            }
        }
    }
}

impl PerturbationSpec {
    pub fn build(&self, grid: &Arc<Grid>) -> Perturbation {
        match *self {
            PerturbationSpec::PotentialShift => Perturbation::PotentialShift,
            PerturbationSpec::InitialShift { order } => {
                // fixed unit-norm direction: the first cosine mode
                let l = grid.extents()[0];
                let g = grid.sample_real(move |x| (2.0 * std::f64::consts::PI * x[0] / l).cos());
                let norm = g.l2_norm();
                Perturbation::InitialShift {
                    order,
                    direction: g.scaled(Complex64::new(1.0 / norm, 0.0)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AprioriSpec {
    #[serde(default = "default_estimate")]
    pub estimate: String,
    #[serde(default = "default_c_max")]
    pub c_max: f64,
}

fn default_estimate() -> String {
    "linf".into()
}
fn default_c_max() -> f64 {
    10.0
}

impl Default for AprioriSpec {
    fn default() -> Self {
        Self { estimate: default_estimate(), c_max: default_c_max() }
    }
}

impl AprioriSpec {
    pub fn kind(&self) -> Result<AprioriKind> {
        match self.estimate.as_str() {
            "linf" => Ok(AprioriKind::BoundedPotential),
            "mixed" => Ok(AprioriKind::MixedNorm),
            other => Err(semantic(format!(
                "apriori.estimate {other:?} unknown (expected \"linf\" or \"mixed\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub a: f64,
    pub b: f64,
    pub q_tilde: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default = "default_widths")]
    pub gaussian_widths: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: Vec<i64>,
}

fn default_widths() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_modes() -> Vec<i64> {
    vec![3]
}

impl EmbeddingSpec {
    pub fn family(&self) -> Vec<TestField> {
        let mut out: Vec<TestField> =
            self.gaussian_widths.iter().map(|&w| TestField::Gaussian { width: w }).collect();
        out.extend(self.modes.iter().map(|&k| TestField::Mode { index: k }));
        out
    }
}

/// Everything a solver-based run needs, built from a validated config.
pub struct DomainSetup {
    pub group: GroupStructure,
    pub grid: Arc<Grid>,
    pub op: FractionalOperator,
    pub mollifier: Mollifier,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            if e.is_syntax() || e.is_eof() {
                ConfigError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() }
            } else {
                semantic(e.to_string())
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Effective config with defaults filled, as echoed into artifacts.
    pub fn echo_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        GroupStructure::parse(&self.group).map_err(|e| semantic(e.to_string()))?;
        if self.points.is_empty() || self.points.len() != self.extents.len() {
            return Err(semantic("points and extents must be non-empty and the same length"));
        }
        for &n in &self.points {
            if !n.is_power_of_two() {
                return Err(semantic(format!("points must be powers of two, got {n}")));
            }
        }
        for &l in &self.extents {
            if !(l > 0.0) {
                return Err(semantic("extents must be positive"));
            }
        }
        if !(self.s > 0.0) {
            return Err(semantic("s must be positive"));
        }
        if !(self.dt > 0.0) {
            return Err(semantic("dt must be positive"));
        }
        if self.t_final < self.dt {
            return Err(semantic("T >= dt"));
        }
        if self.record_every == 0 {
            return Err(semantic("record_every >= 1"));
        }
        self.epsilon.net()?;
        if let Some(ap) = &self.apriori {
            let kind = ap.kind()?;
            if kind == AprioriKind::MixedNorm {
                let q = self.points.len() as f64;
                let nu_s = 2.0 * self.s;
                if q <= nu_s {
                    return Err(semantic(format!(
                        "apriori.estimate \"mixed\" requires Q > νs (Q = {q}, νs = {nu_s})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group_structure(&self) -> GroupStructure {
        GroupStructure::parse(&self.group).expect("validated")
    }

    /// Build the solver-side domain objects. Requires the abelian preset: the
    /// PDE is discretized on abelian geometry only, while the other presets
    /// feed the mollifier scaling engine and the symbol models.
    pub fn domain(&self) -> Result<DomainSetup> {
        let group = self.group_structure();
        match group.preset() {
            PresetTag::Abelian(d) => {
                if d != self.points.len() {
                    return Err(semantic(format!(
                        "group abelian:{d} needs {d} grid axes, got {}",
                        self.points.len()
                    )));
                }
            }
            _ => {
                return Err(semantic(format!(
                    "the solver runs on abelian presets only (got \"{}\"); heisenberg/engel feed `spectrum` and `mollifier-scaling`",
                    self.group
                )))
            }
        }
        let grid = Arc::new(
            Grid::new(self.extents.clone(), self.points.clone())
                .map_err(|e| semantic(e.to_string()))?,
        );
        let op =
            FractionalOperator::new(Arc::clone(&grid), self.s).map_err(|e| semantic(e.to_string()))?;
        let mollifier = self.mollifier.build(group.clone())?;
        let solver = SolverConfig {
            dt: self.dt,
            t_final: self.t_final,
            scheme: self.scheme,
            record_every: self.record_every,
            wrap_mass_threshold: self.wrap_mass_threshold,
            snapshot_every: 0,
        };
        solver.validate().map_err(|e| semantic(e.to_string()))?;
        Ok(DomainSetup { group, grid, op, mollifier, solver })
    }
}
