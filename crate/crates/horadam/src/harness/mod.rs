//! Convergence experiments, decay fits, published-result cross-checks,
//! specialization checks, variant resolution, and grid sweeps.
//!
//! Each (params, query, n) cell is independent; sweeps evaluate cells in
//! parallel and merge results in deterministic input order.

mod experiment;
mod intro;
mod remark;
mod report;
mod resolve;
mod sweep;

pub use experiment::{
    assess_convergence, convergence_experiment, decay_rate, estimate_totals_at, expected_decay_hint,
    run_until_converged, ConvergenceAssessment, DecayFit, DecayOutcome, EstimatorKind,
    ExperimentConfig, ExperimentReport, ExperimentRow, FLAG_BOUND_SWAMPS, FLAG_NOISE_FLOOR,
};
pub use intro::{cross_check_intro, CrossCheckReport, CrossCheckRow, IntroCase, INTRO_CASES};
pub use remark::{remark_specialization_check, RemarkReport, RemarkRow};
pub use report::{experiment_csv, experiment_json};
pub use resolve::{resolve_variant, VariantEvidence, VariantResolution};
pub use sweep::{
    run_cell, run_sweep, standard_grid, sweep_csv, valid_pq_pairs, SweepCell, SweepCellResult,
    SweepConfig,
};
