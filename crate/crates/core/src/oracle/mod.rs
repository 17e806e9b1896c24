//! Ground-truth saddle points: the occupancy LP and a brute-force grid check.

pub mod brute;
pub mod saddle;
pub mod simplex;

pub use brute::brute_force_verify;
pub use saddle::{
    achievable_range, classify_in_range, classify_threshold, maximize_over_k, solve_cmdp_lp, KProgram,
    SaddlePoint, SaddleStatus, ThresholdClass,
};
pub use simplex::{solve_standard, LpSolution, LpStatus, StandardLp};
