//! Metrics, convergence diagnostics and the experiment runner.

pub mod diagnostics;
pub mod game;
pub mod metrics;
pub mod output;
pub mod runner;

pub use diagnostics::{
    averaged_distance_to_saddle, distance_to_saddle, lic_diagnostic, mean_and_standard_error, settling_diagnostic,
    tail_amplitude, LicVerdict, SaddleTarget, CATCH_TOL, DEFAULT_WINDOW_FRACTION, TOY_TOL,
};
pub use game::{game_trace_csv, run_game};
pub use metrics::{estimate_mu_star_empirical, penalized_reward, sigmoid_weight, weighted_reward};
pub use output::{fmt_f64, line_chart_svg, parse_trace_csv, trace_csv, write_atomic, ParsedTraceCsv};
pub use runner::{run_experiment, summary_csv, Aggregate, ConvergenceReport, RunConfig, SeedFailure, SeedReport};
