//! Report types produced by the scaling engine and the experiment harness.
//!
//! Every report serializes to JSON losslessly (parse ∘ serialize = identity)
//! and has a CSV twin with one (ε, value) row per measurement. File layout
//! and manifests are the front end's business; this module only produces the
//! content.

use crate::fit::LogLogFit;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
        }
    }
}

/// One measured point of an ε-parametrized quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsValue {
    pub epsilon: f64,
    pub value: f64,
    /// Set when the value sits at the round-off floor and carries no scaling
    /// information.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub floor_limited: bool,
}

/// Per-ε norm table with fitted log–log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub experiment: String,
    pub pairs: Vec<EpsValue>,
    pub fit: Option<LogLogFit>,
    /// Moderateness exponent N = −slope.
    pub implied_n: Option<f64>,
    /// N rounded up to the nearest nonnegative integer.
    pub implied_n_ceil: Option<i64>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
}

impl ScalingReport {
    pub fn new(
        experiment: impl Into<String>,
        pairs: Vec<(f64, f64)>,
        fit: Option<LogLogFit>,
        verdict: Verdict,
    ) -> Self {
        let implied_n = fit.map(|f| -f.slope);
        let implied_n_ceil = implied_n.map(|n| n.max(0.0).ceil() as i64);
        Self {
            experiment: experiment.into(),
            pairs: pairs
                .into_iter()
                .map(|(epsilon, value)| EpsValue { epsilon, value, floor_limited: false })
                .collect(),
            fit,
            implied_n,
            implied_n_ceil,
            verdict,
            warnings: Vec::new(),
            seed: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,value\n");
        for p in &self.pairs {
            out.push_str(&format!("{},{}\n", p.epsilon, p.value));
        }
        out
    }
}

/// Uniqueness / negligibility-stability measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub experiment: String,
    pub perturbation: String,
    /// max over recorded t of ‖u_ε − ũ_ε‖_{L²}, per ε.
    pub pairs: Vec<EpsValue>,
    pub fit: Option<LogLogFit>,
    /// Constants C_k fitted at the largest ε, k = 1..=k_max.
    pub ck_constants: Vec<f64>,
    pub k_max: u32,
    /// Every measured value lies below C_k ε^k on the tested range.
    pub ck_bounded: bool,
    /// Max absolute mismatch against the global-phase closed form, when the
    /// perturbation is a spatially constant potential shift.
    pub phase_check_error: Option<f64>,
    /// Tested ε range, stated because superpolynomial verdicts are
    /// necessarily range-limited.
    pub eps_range: (f64, f64),
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
}

impl UniquenessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,value\n");
        for p in &self.pairs {
            out.push_str(&format!("{},{}\n", p.epsilon, p.value));
        }
        out
    }
}

/// Consistency of the regularized runs with a fixed classical reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub experiment: String,
    /// max over compared t of ‖u_ε − u_ref‖_{L²}, per ε.
    pub pairs: Vec<EpsValue>,
    /// Measured convergence order in ε (recorded, not asserted).
    pub fit: Option<LogLogFit>,
    pub monotone_decreasing: bool,
    pub final_error: f64,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
}

impl ConsistencyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,value\n");
        for p in &self.pairs {
            out.push_str(&format!("{},{}\n", p.epsilon, p.value));
        }
        out
    }
}

/// A-priori estimate check: LHS/RHS ratio with constant 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub experiment: String,
    pub estimate: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub c_max: f64,
    /// (t, ‖u(t)‖_H) series underlying the sup.
    pub series: Vec<(f64, f64)>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

impl AprioriReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,sobolev\n");
        for (t, v) in &self.series {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

/// Sobolev embedding constants across a family of fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub experiment: String,
    pub a: f64,
    pub b: f64,
    pub q0: f64,
    pub q_tilde: f64,
    /// Per-field (label, lhs norm, rhs norm, ratio) on the coarse grid.
    pub ratios: Vec<(String, f64, f64, f64)>,
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    /// |refined − coarse| / coarse for the max ratio.
    pub refinement_drift: f64,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

impl EmbeddingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,lhs,rhs,ratio\n");
        for (label, lhs, rhs, ratio) in &self.ratios {
            out.push_str(&format!("{label},{lhs},{rhs},{ratio}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_report_round_trips() {
        let mut r = ScalingReport::new(
            "demo",
            vec![(0.5, 2.0), (0.25, 4.0)],
            crate::fit::log_log_fit(&[(0.5, 2.0), (0.25, 4.0)]),
            Verdict::Pass,
        );
        r.warnings.push("partial".into());
        r.seed = Some(7);
        let json = serde_json::to_string(&r).unwrap();
        let back: ScalingReport = serde_json::from_str(&json).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn uniqueness_report_round_trips() {
        let r = UniquenessReport {
            experiment: "uniqueness".into(),
            perturbation: "potential-shift".into(),
            pairs: vec![EpsValue { epsilon: 0.2, value: 6.7e-3, floor_limited: false }],
            fit: None,
            ck_constants: vec![1.0, 2.0],
            k_max: 2,
            ck_bounded: true,
            phase_check_error: Some(1e-12),
            eps_range: (0.1, 0.5),
            verdict: Verdict::Pass,
            warnings: vec![],
            seed: None,
        };
        let back: UniquenessReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn csv_layout() {
        let r = ScalingReport::new("demo", vec![(0.5, 1.0)], None, Verdict::Fail);
        assert_eq!(r.to_csv(), "epsilon,value\n0.5,1\n");
    }
}
