use thiserror::Error;

/// Crate-wide error type. Validation failures are split out finely enough
/// that the CLI can map them onto its exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("index {value} out of range for modulus {modulus}")]
    IndexOutOfRange { value: usize, modulus: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("{what} must not be empty")]
    EmptySet { what: &'static str },

    #[error("inclusion rate {0} outside (0, 1]")]
    InvalidRate(f64),

    #[error("constant C must exceed 3, got {0}")]
    InvalidConstant(f64),

    #[error("pseudorandomness factor c must lie in (0, 1), got {0}")]
    InvalidFactor(f64),

    #[error("window vanishes at coordinate {index}")]
    VanishingWindow { index: usize },

    #[error("auxiliary phase index t must be 0, 1 or 2, got {0}")]
    InvalidAuxPhase(u8),

    #[error("{set} contains {value}, which lies outside the difference set of {axis}")]
    ShiftOutsideDifferences {
        set: &'static str,
        value: usize,
        axis: &'static str,
    },

    #[error("{required} candidates exceed the budget of {budget}; use the randomized/monte-carlo mode")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("randomized search found no qualifying set within {trials} trials; result unknown")]
    SearchInconclusive { trials: u64 },

    #[error("graph is not regular; the spectral gap of an irregular graph is undefined here")]
    NotRegular,

    #[error("spectral gap must be positive for a component bound, got {0}")]
    ZeroGap(f64),

    #[error("coefficient magnitude {value:.3e} at or below threshold {threshold:.3e}; relative phase undefined")]
    MagnitudeBelowThreshold { value: f64, threshold: f64 },

    #[error("vertex ({k}, {l}) is unreachable from the propagation root")]
    UnreachableVertex { k: usize, l: usize },

    #[error("linear system is rank deficient (condition number {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("rank certificate failed: singular value ratio {ratio:.3e} at or below {threshold:.3e}")]
    RankCertificate { ratio: f64, threshold: f64 },

    #[error("lattice has {points} points; at least {needed} are required")]
    LatticeTooSmall { points: usize, needed: usize },

    #[error("measurement layout mismatch at row {row}: expected {expected}, found {found}")]
    MeasurementLayout {
        row: usize,
        expected: String,
        found: String,
    },

    #[error("measurements end early: missing row for {missing}")]
    MeasurementTruncated { missing: String },

    #[error("negative measurement value {value} at row {row}")]
    NegativeMeasurement { row: usize, value: f64 },

    #[error("duplicate measurement index at row {row}: {index}")]
    DuplicateMeasurement { row: usize, index: String },

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
