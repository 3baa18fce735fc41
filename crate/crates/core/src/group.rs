//! Homogeneous-group bookkeeping: dilation weights, anisotropic dilations,
//! and the homogeneous dimension Q.
//!
//! Only three presets are built in: abelian ℝ^d, the Heisenberg groups ℍ_n
//! and the Engel group 𝓑₄. Weights are kept as exact rationals because Q
//! enters the exponents of fitted scaling laws; converting to floating point
//! happens once, at dilation time.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use std::fmt;

pub type Weight = Ratio<i64>;

/// Which built-in group a `GroupStructure` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetTag {
    Abelian(usize),
    Heisenberg(usize),
    Engel,
}

/// Dilation structure of a homogeneous Lie group: the weights ν₁,…,νₙ of the
/// anisotropic dilations D_r(x) = (r^{ν₁}x₁, …, r^{νₙ}xₙ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    weights: Vec<Weight>,
    preset: PresetTag,
    /// Homogeneous degree of the chosen Rockland operator (2 for the
    /// Laplacian / sub-Laplacian on every preset).
    operator_degree: Weight,
}

impl GroupStructure {
    /// Abelian ℝ^d: all weights 1, Q = d, operator −Δ of degree 2.
    pub fn abelian(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("abelian dimension must be positive"));
        }
        Ok(Self {
            weights: vec![Ratio::from_integer(1); d],
            preset: PresetTag::Abelian(d),
            operator_degree: Ratio::from_integer(2),
        })
    }

    /// Heisenberg ℍ_n ~ ℝ^{2n+1}: weights (1,…,1,2), Q = 2n+2.
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("heisenberg index must be positive"));
        }
        let mut weights = vec![Ratio::from_integer(1); 2 * n];
        weights.push(Ratio::from_integer(2));
        Ok(Self {
            weights,
            preset: PresetTag::Heisenberg(n),
            operator_degree: Ratio::from_integer(2),
        })
    }

    /// Engel 𝓑₄ ~ ℝ⁴: weights (1,1,2,3), Q = 7.
    pub fn engel() -> Self {
        Self {
            weights: [1, 1, 2, 3].iter().map(|&w| Ratio::from_integer(w)).collect(),
            preset: PresetTag::Engel,
            operator_degree: Ratio::from_integer(2),
        }
    }

    /// Parse a preset name as accepted in config files:
    /// `"abelian:<d>"`, `"heisenberg:<n>"`, `"engel"`.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown group preset {name:?} (expected \"abelian:<d>\", \"heisenberg:<n>\" or \"engel\")"));
        if name == "engel" {
            return Ok(Self::engel());
        }
        let (kind, arg) = name.split_once(':').ok_or_else(bad)?;
        let n: usize = arg.parse().map_err(|_| bad())?;
        match kind {
            "abelian" => Self::abelian(n),
            "heisenberg" => Self::heisenberg(n),
            _ => Err(bad()),
        }
    }

    pub fn preset(&self) -> PresetTag {
        self.preset
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap()).collect()
    }

    pub fn topological_dimension(&self) -> usize {
        self.weights.len()
    }

    /// Homogeneous dimension Q = Σνᵢ, exact.
    pub fn homogeneous_dimension(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn homogeneous_dimension_f64(&self) -> f64 {
        self.homogeneous_dimension().to_f64().unwrap()
    }

    /// Degree ν of the Rockland operator attached to the preset.
    pub fn operator_degree(&self) -> Weight {
        self.operator_degree
    }

    /// Anisotropic dilation D_r(x) = (r^{ν₁}x₁, …, r^{νₙ}xₙ).
    pub fn dilate(&self, x: &[f64], r: f64) -> Result<Vec<f64>> {
        if x.len() != self.weights.len() {
            return Err(Error::invalid(format!(
                "dilate: coordinate vector has length {}, group has dimension {}",
                x.len(),
                self.weights.len()
            )));
        }
        if !(r > 0.0) {
            return Err(Error::invalid("dilate: scale r must be positive"));
        }
        Ok(self
            .weights
            .iter()
            .zip(x)
            .map(|(w, xi)| r.powf(w.to_f64().unwrap()) * xi)
            .collect())
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset {
            PresetTag::Abelian(d) => write!(f, "abelian:{d}"),
            PresetTag::Heisenberg(n) => write!(f, "heisenberg:{n}"),
            PresetTag::Engel => write!(f, "engel"),
        }
    }
}
