//! Optimistic mirror-descent saddle-point solvers for tabular constrained
//! MDPs, with an exact LP oracle and the diagnostics used to tell last-iterate
//! from average-iterate convergence.
//!
//! ```
//! use reload_core::{envs, oracle, solvers};
//!
//! let cmdp = envs::paradoxical_cmdp();
//! let saddle = oracle::solve_cmdp_lp(&cmdp).unwrap();
//! assert!((saddle.primal_value - 0.5).abs() < 1e-9);
//!
//! let config = solvers::SolverConfig { iterations: 3000, ..Default::default() };
//! let trace = solvers::reload_mdpi(&cmdp, &config).unwrap();
//! assert!((trace.last().values[0] - 0.5).abs() < 1e-2);
//! ```

pub mod cmdp;
pub mod envs;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod minmax;
pub mod oracle;
pub mod solvers;

pub use cmdp::{Cmdp, Constraint, Multipliers, OccupancyMeasure, Policy, QValues};
pub use envs::EnvSpec;
pub use error::{Error, Result};
pub use experiment::{ConvergenceReport, LicVerdict, RunConfig};
pub use minmax::{BilinearGame, BregmanGeometry, Domain, GameAlgorithm, IterateTrace, MirrorMap, StepSchedule};
pub use oracle::{SaddlePoint, SaddleStatus, ThresholdClass};
pub use solvers::{CmdpTrace, PolicyInit, SolverConfig};
