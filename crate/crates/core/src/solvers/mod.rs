//! Saddle-point solvers for CMDPs.

mod config;
mod mdpi;
mod occupancy;
mod trace;

pub use config::{PolicyInit, SolverConfig, DEFAULT_MU_CAP};
pub use mdpi::{fixed_mu_solver, mu_mdpi, peg_mdpi, reload_mdpi};
pub use occupancy::{default_occupancy_eta, occupancy_lipschitz, reload_occupancy, PROJECTION_TOL};
pub use trace::{extract_saddle_estimate, Averaging, CmdpRecord, CmdpTrace, SaddleEstimate};

use crate::cmdp::Cmdp;
use crate::error::{parameter, Result};

pub const SOLVER_NAMES: [&str; 5] = ["reload-mdpi", "mu-mdpi", "peg-mdpi", "reload-occ", "fixed-mu"];

/// Runs a solver by registry name. `fixed-mu` needs the multipliers to hold.
pub fn run_solver(name: &str, cmdp: &Cmdp, config: &SolverConfig, fixed_mu: Option<&[f64]>) -> Result<CmdpTrace> {
    match name {
        "reload-mdpi" => reload_mdpi(cmdp, &SolverConfig { optimism: true, ..config.clone() }),
        "mu-mdpi" => mu_mdpi(cmdp, config),
        "peg-mdpi" => peg_mdpi(cmdp, config),
        "reload-occ" => reload_occupancy(cmdp, config),
        "fixed-mu" => {
            let mu = fixed_mu.ok_or_else(|| parameter("fixed-mu needs multipliers"))?;
            fixed_mu_solver(cmdp, mu, config)
        }
        other => Err(parameter(format!(
            "unknown solver `{other}` (expected one of {})",
            SOLVER_NAMES.join(", ")
        ))),
    }
}
