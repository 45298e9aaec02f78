//! Experiment configuration and report schemas. Everything stochastic is
//! seeded from the config, so a report is a pure function of its config file
//! (timing aside).

use serde::{Deserialize, Serialize};

use gaborpol::io::{AxisSpec, SCHEMA_VERSION};
use gaborpol::{
    beta, BetaMode, Error, IndexSet, Lattice, PhaseMethod, ReconstructionStatus, Result,
    SpectralReport, DEFAULT_EXHAUSTIVE_LIMIT,
};

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_method() -> PhaseMethod {
    PhaseMethod::Sync
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub m: usize,
    /// Oversampling constant; the guarantees need `c > 3`.
    pub c: f64,
    #[serde(default = "AxisSpec::full")]
    pub t: AxisSpec,
    #[serde(default = "AxisSpec::full")]
    pub f: AxisSpec,
    pub q: ShiftSpec,
    pub p: ShiftSpec,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: PhaseMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<SubspaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_vanish: Option<f64>,
    /// Monte-carlo spark trials to run on the first trial's window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spark_trials: Option<u64>,
}

/// How a shift set is produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShiftSpec {
    Explicit { members: Vec<usize> },
    /// The full difference set of the resolved time support.
    DifferenceOfT,
    /// The full difference set of the resolved frequency support.
    DifferenceOfF,
    Bernoulli { rate: f64, seed: u64 },
    /// Minimum low-bias subset search at the config's `c`.
    Beta {
        #[serde(default)]
        randomized: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaSummary {
    pub cardinality: usize,
    pub witness: Vec<usize>,
    pub exact: bool,
}

impl ShiftSpec {
    pub fn resolve(
        &self,
        m: usize,
        big_c: f64,
        lattice: &Lattice,
        exhaustive_limit: usize,
    ) -> Result<(IndexSet, Option<BetaSummary>)> {
        match self {
            ShiftSpec::Explicit { members } => {
                Ok((IndexSet::new(m, members.iter().copied())?, None))
            }
            ShiftSpec::DifferenceOfT => {
                Ok((lattice.time_support().difference_set()?, None))
            }
            ShiftSpec::DifferenceOfF => {
                Ok((lattice.freq_support().difference_set()?, None))
            }
            ShiftSpec::Bernoulli { rate, seed } => {
                let set = gaborpol::random_subset(m, *rate, *seed)?;
                if set.is_empty() {
                    return Err(Error::EmptySet { what: "sampled shift set" });
                }
                Ok((set, None))
            }
            ShiftSpec::Beta {
                randomized,
                trials,
                seed,
            } => {
                let mode = if *randomized {
                    BetaMode::Randomized {
                        trials: trials.unwrap_or(2000),
                        seed: seed.unwrap_or(0),
                    }
                } else {
                    BetaMode::Exhaustive {
                        max_modulus: exhaustive_limit,
                    }
                };
                let result = beta(m, big_c, &mode)?;
                let summary = BetaSummary {
                    cardinality: result.cardinality,
                    witness: result.witness.members().to_vec(),
                    exact: result.exact,
                };
                Ok((result.witness, Some(summary)))
            }
        }
    }
}

/// Subspace mode: dimension plus the synthesis map, either seeded per trial
/// or fixed explicit columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceSpec {
    pub d: usize,
    pub w: SubspaceMapSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspaceMapSpec {
    /// A fresh Gaussian map per trial, derived from this seed.
    Seed { seed: u64 },
    /// Fixed columns, each a length-M complex vector.
    Columns { columns: Vec<Vec<[f64; 2]>> },
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub status: ReconstructionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_distance: Option<f64>,
    pub component_size: usize,
    pub pruned_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparkSummary {
    pub trials: u64,
    pub failures: usize,
    pub min_margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisChecks {
    /// `||Q||_u <= ((C-3)/(C-1)) P(Q)`.
    pub q_pseudorandom: Option<bool>,
    pub p_pseudorandom: Option<bool>,
    /// `|Λ|` against `C` times the solve dimension (M, or d in subspace mode).
    pub lattice_exceeds_threshold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spark: Option<SparkSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub q: Vec<usize>,
    pub p: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_q: Option<BetaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_p: Option<BetaSummary>,
    pub lattice_points: usize,
    /// Counted from the assembled frame.
    pub measurement_count: usize,
    /// Recomputed independently as `|Λ| (1 + 3 |Q| |P|)`.
    pub count_formula: usize,
    pub hypotheses: HypothesisChecks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralReport>,
    pub trials: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
    pub wall_ms: u64,
}

pub fn default_exhaustive_limit_from_budget(budget: Option<u64>) -> usize {
    match budget {
        Some(b) if b > 0 => (u64::BITS - 1 - b.leading_zeros()) as usize,
        _ => DEFAULT_EXHAUSTIVE_LIMIT,
    }
}
