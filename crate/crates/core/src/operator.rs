//! Operator kinds and engine limits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which fiber operator a computation refers to.
///
/// `Adjacency` and `Normalized` act on the fundamental graph itself;
/// `Schrodinger` and `NegLaplacian` act on the loop-augmented modified graph,
/// where the potential and vertex degrees are absorbed into per-vertex loop
/// weights `v_x = V_x - κ_x` (with `V = 0` for `NegLaplacian`, so that
/// `-Δ = A - κ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Adjacency,
    NegLaplacian,
    Schrodinger,
    Normalized,
}

impl OperatorKind {
    /// Kinds that are realized as weighted adjacency on the modified graph.
    pub fn uses_modified_graph(self) -> bool {
        matches!(self, OperatorKind::Schrodinger | OperatorKind::NegLaplacian)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Adjacency => "adjacency",
            OperatorKind::NegLaplacian => "neg-laplacian",
            OperatorKind::Schrodinger => "schrodinger",
            OperatorKind::Normalized => "normalized",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adjacency" => Ok(OperatorKind::Adjacency),
            "neg-laplacian" | "laplacian" => Ok(OperatorKind::NegLaplacian),
            "schrodinger" => Ok(OperatorKind::Schrodinger),
            "normalized" => Ok(OperatorKind::Normalized),
            other => Err(format!(
                "unknown operator kind `{other}` (expected adjacency, neg-laplacian, schrodinger or normalized)"
            )),
        }
    }
}

/// Cost caps and sampling defaults.
///
/// `power_cap` bounds symbolic matrix powers (term count grows like
/// `O((2nτ_+ + 1)^d ν²)`); `oracle_cap` bounds exhaustive cycle enumeration
/// (`Θ(ν κ_+^n)` walks); `norm_grid` is the per-dimension grid used for the
/// global operator-norm estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub power_cap: usize,
    pub oracle_cap: usize,
    pub norm_grid: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            power_cap: 12,
            oracle_cap: 8,
            norm_grid: 16,
        }
    }
}

impl EngineConfig {
    pub fn with_power_cap(mut self, cap: usize) -> Self {
        self.power_cap = cap;
        self
    }

    pub fn with_oracle_cap(mut self, cap: usize) -> Self {
        self.oracle_cap = cap;
        self
    }
}
