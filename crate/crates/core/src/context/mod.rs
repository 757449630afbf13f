//! Hidden-variable valuations under noisy analyzer alignment versus quantum
//! joint-measurement statistics.

pub mod alignment;
pub mod experiment;
pub mod valuation;

pub use alignment::{
    perturb_direction, random_rotation, rotation_matrix, sample_actual_triad, sample_direction, AlignmentDistribution,
    AlignmentKind,
};
pub use experiment::{
    contextuality_experiment, derive_seed, estimate_p, find_illegal_triad, hidden_illegal_probability, induced_valuation,
    induced_value, match_probability, Estimate, ExperimentConfig, ExperimentReport, ExperimentSummary, IllegalTriad,
    TrialRow,
};
pub use valuation::{splitmix64, ValuationStrategy, ValuationSummary};
