//! Construction of phase retrievable multi-window Gabor frames by
//! polarization, and reconstruction of complex signals (up to a global phase)
//! from the resulting phaseless measurements.
//!
//! The pipeline: a nowhere-vanishing primary window `g` is paired with
//! auxiliary windows `g ⊙ s_qpt` whose phaseless measurements encode relative
//! phases between the primary frame coefficients. Those relative phases are
//! propagated (or synchronized) over a measurement graph whose connectivity
//! is controlled by the Fourier bias of the shift sets, and the signal is
//! recovered from the re-phased coefficients by least squares.

pub mod error;
pub mod frame;
pub mod graph;
pub mod io;
pub mod recover;
pub mod sets;
pub mod signal;

pub use error::{Error, Result};
pub use frame::{
    auxiliary_window, full_spark_check, random_window, Lattice, MeasurementIndex,
    MeasurementVector, MultiWindowGaborFrame, SparkFailure, SparkMode, SparkReport, Window,
    WindowTag, DEFAULT_SPARK_BUDGET, MIN_WINDOW_MODULUS, SPARK_MARGIN_THRESHOLD,
};
pub use graph::{
    component_bound, connected_components, prune_edges, spectral_gap, ComponentLabeling, Edge,
    PhaseGraph, PruneOutcome, SpectralMethod, SpectralReport, SpectralStructure,
};
pub use recover::{
    angular_sync, propagate_phases, reconstruct, reconstruct_subspace, relative_phase,
    solve_coefficients, PhaseAssignment, PhaseMethod, ReconstructionResult, ReconstructionStatus,
    RecoverOptions, RelativePhase, SubspacePrior, SyncResult, EPS_VANISH, POWER_ITER_MAX,
    POWER_ITER_TOL, RANK_RATIO_THRESHOLD,
};
pub use sets::{
    beta, bias_ratio, check_pseudorandom, random_subset, BetaMode, BetaResult, IndexSet,
    DEFAULT_EXHAUSTIVE_LIMIT,
};
pub use signal::{
    coordwise_product, dft, inverse_dft, modulate, phase_distance, tf_shift, translate, Signal,
    TFIndex, C64,
};
