//! Multi-seed experiment runs and their artifacts.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cmdp::Cmdp;
use crate::envs::EnvSpec;
use crate::error::{parameter, Error, Result};
use crate::experiment::diagnostics::{
    averaged_distance_to_saddle, distance_to_saddle, lic_diagnostic, mean_and_standard_error, settling_diagnostic,
    tail_amplitude, LicVerdict, SaddleTarget, CATCH_TOL, DEFAULT_WINDOW_FRACTION, TOY_TOL,
};
use crate::experiment::metrics::{estimate_mu_star_empirical, penalized_reward, sigmoid_weight, weighted_reward};
use crate::experiment::output::{fmt_f64, line_chart_svg, trace_csv, write_atomic};
use crate::minmax::fit_linear_rate;
use crate::oracle::{solve_cmdp_lp, SaddlePoint, SaddleStatus};
use crate::solvers::{run_solver, CmdpTrace, SolverConfig, SOLVER_NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvSpec,
    pub solver: String,
    #[serde(default)]
    pub config: SolverConfig,
    /// Solve the LP once and measure distances to its saddle.
    #[serde(default)]
    pub oracle: bool,
    /// Directory for CSV and SVG output; nothing is written when absent.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Multipliers for `fixed-mu`; the oracle's are used when absent.
    #[serde(default)]
    pub fixed_mu: Option<Vec<f64>>,
    /// LIC/AIC tolerance; defaults to 1e-3, or 1e-2 on Catch.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_window")]
    pub window_fraction: f64,
}

fn default_window() -> f64 {
    DEFAULT_WINDOW_FRACTION
}

impl RunConfig {
    pub fn new(env: EnvSpec, solver: &str, config: SolverConfig, seeds: Vec<u64>) -> Self {
        Self {
            env,
            solver: solver.to_string(),
            config,
            oracle: false,
            out_dir: None,
            seeds,
            fixed_mu: None,
            tol: None,
            window_fraction: DEFAULT_WINDOW_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !SOLVER_NAMES.contains(&self.solver.as_str()) {
            return Err(parameter(format!(
                "unknown solver `{}` (expected one of {})",
                self.solver,
                SOLVER_NAMES.join(", ")
            )));
        }
        if self.seeds.is_empty() {
            return Err(parameter("need at least one seed"));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err(parameter("window_fraction must lie in (0, 1]"));
        }
        self.config.validate()
    }

    pub fn effective_tol(&self) -> f64 {
        self.tol
            .unwrap_or(if self.env.name == "catch" { CATCH_TOL } else { TOY_TOL })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: u64,
    pub final_values: Vec<f64>,
    pub final_mu: Vec<f64>,
    /// `v₀..v_N` of the averaged occupancy.
    pub averaged_values: Vec<f64>,
    pub averaged_mu: Vec<f64>,
    pub distance: Vec<f64>,
    pub averaged_distance: Vec<f64>,
    /// `max − min` of `v₀` over the final window.
    pub tail_amplitude: f64,
    pub lic: Option<LicVerdict>,
    pub aic: Option<LicVerdict>,
    /// Per-iteration linear rate fitted to the distance series.
    pub alpha: Option<f64>,
    #[serde(skip)]
    pub trace: Option<CmdpTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_final_values: Vec<f64>,
    pub se_final_values: Vec<f64>,
    pub mean_final_mu: Vec<f64>,
    pub se_final_mu: Vec<f64>,
    pub mean_tail_amplitude: f64,
    pub se_tail_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub env: EnvSpec,
    pub solver: String,
    pub saddle: Option<SaddleTarget>,
    pub saddle_status: Option<SaddleStatus>,
    /// Multipliers used for the weighted reward, and where they came from.
    pub mu_hat: Vec<f64>,
    pub mu_hat_source: String,
    pub seeds: Vec<SeedReport>,
    pub failures: Vec<SeedFailure>,
    pub aggregate: Option<Aggregate>,
}

fn seed_report(trace: CmdpTrace, seed: u64, target: Option<&SaddleTarget>, cfg: &RunConfig) -> Result<SeedReport> {
    let tol = cfg.effective_tol();
    let last = trace.last().clone();
    let v0 = trace.value_series(0);
    let (distance, averaged_distance) = match target {
        Some(t) => (distance_to_saddle(&trace, t)?, averaged_distance_to_saddle(&trace, t)?),
        None => (Vec::new(), Vec::new()),
    };
    let enough = |s: &[f64]| s.len() as f64 >= 10.0 / cfg.window_fraction;
    let (lic, aic) = if target.is_some() && enough(&distance) {
        (
            Some(lic_diagnostic(&distance, cfg.window_fraction, tol)?),
            Some(lic_diagnostic(&averaged_distance, cfg.window_fraction, tol)?),
        )
    } else if target.is_none() && enough(&v0) {
        (
            Some(settling_diagnostic(&v0, cfg.window_fraction, tol)?),
            Some(settling_diagnostic(&trace.mean_value_series(0), cfg.window_fraction, tol)?),
        )
    } else {
        (None, None)
    };
    let alpha = if distance.len() >= 10 && distance.iter().all(|&d| d > 0.0) {
        fit_linear_rate(&distance)
            .ok()
            .map(|f| f.alpha.powf(1.0 / trace.recorded_every as f64))
    } else {
        None
    };
    Ok(SeedReport {
        seed,
        final_values: last.values.clone(),
        final_mu: last.mu.clone(),
        averaged_values: last.mean_values.clone(),
        averaged_mu: trace.mean_mu.clone(),
        tail_amplitude: tail_amplitude(&v0, cfg.window_fraction),
        distance,
        averaged_distance,
        lic,
        aic,
        alpha,
        trace: Some(trace),
    })
}

/// Runs every seed, continuing past per-seed solver failures, and writes
/// artifacts when `out_dir` is set. Oracle failures abort the run.
pub fn run_experiment(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let cmdp = cfg.env.build()?;
    let saddle: Option<SaddlePoint> = if cfg.oracle {
        let sp = solve_cmdp_lp(&cmdp).map_err(|e| match e {
            Error::Oracle(m) => Error::Oracle(m),
            other => Error::Oracle(other.to_string()),
        })?;
        if !sp.is_optimal() {
            return Err(Error::Oracle("the cmdp is infeasible".into()));
        }
        Some(sp)
    } else {
        None
    };
    let target = saddle.as_ref().map(|s| SaddleTarget::from_saddle(s, &cmdp));
    let fixed_mu = match (&cfg.fixed_mu, &saddle) {
        (Some(m), _) => Some(m.clone()),
        (None, Some(s)) => Some(s.mu_star.0.clone()),
        (None, None) => None,
    };
    let mut seeds = Vec::new();
    let mut failures = Vec::new();
    for &seed in &cfg.seeds {
        let config = SolverConfig {
            seed,
            ..cfg.config.clone()
        };
        let outcome = run_solver(&cfg.solver, &cmdp, &config, fixed_mu.as_deref())
            .and_then(|trace| seed_report(trace, seed, target.as_ref(), cfg));
        match outcome {
            Ok(r) => seeds.push(r),
            Err(e) => failures.push(SeedFailure {
                seed,
                error: e.to_string(),
            }),
        }
    }
    let (mu_hat, mu_hat_source) = match (&saddle, seeds.is_empty()) {
        (Some(s), _) => (s.mu_star.0.clone(), "oracle".to_string()),
        (None, false) => {
            let traces: Vec<CmdpTrace> = seeds.iter().filter_map(|s| s.trace.clone()).collect();
            (estimate_mu_star_empirical(&traces)?.0, "empirical".to_string())
        }
        (None, true) => (vec![0.0; cmdp.n_constraints()], "none".to_string()),
    };
    let report = ConvergenceReport {
        env: cfg.env.clone(),
        solver: cfg.solver.clone(),
        saddle: target,
        saddle_status: saddle.as_ref().map(|s| s.status),
        mu_hat,
        mu_hat_source,
        aggregate: aggregate(&seeds),
        seeds,
        failures,
    };
    if let Some(dir) = &cfg.out_dir {
        write_artifacts(&report, &cmdp, dir)?;
    }
    Ok(report)
}

fn aggregate(seeds: &[SeedReport]) -> Option<Aggregate> {
    let first = seeds.first()?;
    let column = |f: &dyn Fn(&SeedReport) -> f64| mean_and_standard_error(&seeds.iter().map(f).collect::<Vec<_>>());
    let (mv, sv): (Vec<f64>, Vec<f64>) = (0..first.final_values.len())
        .map(|n| column(&|s| s.final_values[n]))
        .unzip();
    let (mm, sm): (Vec<f64>, Vec<f64>) = (0..first.final_mu.len()).map(|n| column(&|s| s.final_mu[n])).unzip();
    let (ma, sa) = column(&|s| s.tail_amplitude);
    Some(Aggregate {
        mean_final_values: mv,
        se_final_values: sv,
        mean_final_mu: mm,
        se_final_mu: sm,
        mean_tail_amplitude: ma,
        se_tail_amplitude: sa,
    })
}

/// Per-seed summary rows, then `mean` and `se` rows.
pub fn summary_csv(report: &ConvergenceReport, cmdp: &Cmdp) -> Result<String> {
    let n = cmdp.n_constraints();
    let thetas = cmdp.thresholds();
    let mut header = vec!["seed".to_string()];
    header.extend((0..=n).map(|i| format!("v{i}")));
    header.extend((1..=n).map(|i| format!("mu{i}")));
    header.extend(
        [
            "tail_amplitude_v0",
            "final_dist_to_saddle",
            "weighted_reward_raw_mu",
            "weighted_reward_exp_mu",
            "penalized_reward",
            "alpha",
            "lic",
            "aic",
        ]
        .map(String::from),
    );
    let mut out = header.join(",");
    out.push('\n');
    let mut numeric_rows: Vec<Vec<f64>> = Vec::new();
    let exp_mu: Vec<f64> = report.mu_hat.iter().map(|&m| sigmoid_weight(m)).collect();
    for s in &report.seeds {
        let v = &s.final_values;
        let mut nums = v.clone();
        nums.extend(&s.final_mu);
        nums.push(s.tail_amplitude);
        nums.push(s.distance.last().copied().unwrap_or(f64::NAN));
        nums.push(weighted_reward(v[0], &v[1..], &thetas, &report.mu_hat)?);
        nums.push(weighted_reward(v[0], &v[1..], &thetas, &exp_mu)?);
        nums.push(penalized_reward(v[0], &v[1..], &thetas)?);
        nums.push(s.alpha.unwrap_or(f64::NAN));
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.seed,
            nums.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(","),
            s.lic.map_or("none", |l| l.label()),
            s.aic.map_or("none", |l| l.label())
        );
        numeric_rows.push(nums);
    }
    for f in &report.failures {
        let blanks = vec!["NaN"; 2 * n + 7].join(",");
        let _ = writeln!(out, "{},{blanks},failed,failed", f.seed);
    }
    if !numeric_rows.is_empty() {
        let width = numeric_rows[0].len();
        let stats: Vec<(f64, f64)> = (0..width)
            .map(|j| mean_and_standard_error(&numeric_rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .collect();
        let converged = |f: &dyn Fn(&SeedReport) -> Option<LicVerdict>| {
            format!(
                "{}/{}",
                report.seeds.iter().filter(|s| f(s).is_some_and(|v| v.is_converged())).count(),
                report.seeds.len()
            )
        };
        let lic = converged(&|s| s.lic);
        let aic = converged(&|s| s.aic);
        let _ = writeln!(
            out,
            "mean,{},{lic},{aic}",
            stats.iter().map(|s| fmt_f64(s.0)).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(out, "se,{},,", stats.iter().map(|s| fmt_f64(s.1)).collect::<Vec<_>>().join(","));
    }
    Ok(out)
}

fn write_artifacts(report: &ConvergenceReport, cmdp: &Cmdp, dir: &std::path::Path) -> Result<()> {
    let mut v0_series = Vec::new();
    let mut dist_series = Vec::new();
    for s in &report.seeds {
        let trace = s.trace.as_ref().expect("trace kept for artifacts");
        write_atomic(&dir.join(format!("seed_{}.csv", s.seed)), trace_csv(trace, &s.distance).as_bytes())?;
        let iters: Vec<f64> = trace.records.iter().map(|r| r.iteration as f64).collect();
        v0_series.push((
            format!("seed {}", s.seed),
            iters.iter().copied().zip(trace.value_series(0)).collect::<Vec<_>>(),
        ));
        if !s.distance.is_empty() {
            dist_series.push((
                format!("seed {}", s.seed),
                iters.iter().copied().zip(s.distance.iter().copied()).collect::<Vec<_>>(),
            ));
        }
    }
    write_atomic(&dir.join("summary.csv"), summary_csv(report, cmdp)?.as_bytes())?;
    let title = format!("{} on {}", report.solver, report.env.name);
    write_atomic(
        &dir.join("v0.svg"),
        line_chart_svg(&title, "iteration", "v0", &v0_series, false).as_bytes(),
    )?;
    if !dist_series.is_empty() {
        write_atomic(
            &dir.join("dist_to_saddle.svg"),
            line_chart_svg(&title, "iteration", "distance to saddle (log10)", &dist_series, true).as_bytes(),
        )?;
    }
    let json = serde_json::to_string_pretty(report)?;
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    Ok(())
}
