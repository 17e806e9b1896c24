use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reload_core::envs::EnvSpec;
use reload_core::experiment::{run_experiment, run_game, ConvergenceReport, RunConfig};
use reload_core::minmax::{BilinearGame, GameAlgorithm};
use reload_core::oracle::solve_cmdp_lp;
use reload_core::solvers::{PolicyInit, SolverConfig};
use reload_core::Error;

#[derive(Parser)]
#[command(name = "reload", version, about = "Optimistic mirror-descent solvers for constrained MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a first-order method on the bilinear game min_x max_y xy.
    Game(GameArgs),
    /// Run a CMDP solver over one or more seeds.
    Cmdp(CmdpArgs),
    /// Run an experiment described by a JSON run config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print an environment in the CMDP JSON format.
    Export(EnvArgs),
    /// Solve the occupancy LP and print the saddle point as JSON.
    Oracle(EnvArgs),
}

#[derive(Args)]
struct GameArgs {
    #[arg(long, value_parser = ["gda", "ogda", "mwu", "omwu", "eg", "peg", "rg", "singly"])]
    alg: String,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Strong-monotonicity modulus m added to the game.
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    /// Initial x (first-action probability for mwu/omwu).
    #[arg(long, default_value_t = 1.0)]
    x0: f64,
    #[arg(long, default_value_t = 1.0)]
    y0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct EnvArgs {
    #[arg(long, value_parser = ["paradox", "catch", "random"])]
    env: String,
    /// Catch board rows.
    #[arg(long)]
    rows: Option<usize>,
    /// Catch board columns.
    #[arg(long)]
    cols: Option<usize>,
    /// Seed of the random CMDP.
    #[arg(long)]
    env_seed: Option<u64>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    constraints: Option<usize>,
    /// Replace the first constraint threshold.
    #[arg(long)]
    theta: Option<f64>,
}

impl EnvArgs {
    fn spec(&self) -> EnvSpec {
        let mut spec = EnvSpec::new(&self.env);
        let pairs = [
            ("rows", self.rows.map(|x| x as f64)),
            ("cols", self.cols.map(|x| x as f64)),
            ("seed", self.env_seed.map(|x| x as f64)),
            ("states", self.states.map(|x| x as f64)),
            ("actions", self.actions.map(|x| x as f64)),
            ("constraints", self.constraints.map(|x| x as f64)),
            ("theta", self.theta),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                spec = spec.with(k, v);
            }
        }
        spec
    }
}

#[derive(Args)]
struct CmdpArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_parser = ["reload-mdpi", "mu-mdpi", "peg-mdpi", "reload-occ", "fixed-mu"])]
    solver: String,
    #[arg(long, default_value_t = 0.1)]
    eta_pi: f64,
    #[arg(long, default_value_t = 0.1)]
    eta_mu: f64,
    /// Occupancy-space step size (reload-occ); defaults to 0.4 / L.
    #[arg(long)]
    eta_occ: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    /// Weight of the seeded Dirichlet perturbation of the uniform start.
    #[arg(long, default_value_t = 0.2)]
    jitter: f64,
    #[arg(long)]
    mu_cap: Option<f64>,
    /// Multipliers held fixed by `fixed-mu` (comma separated).
    #[arg(long, value_delimiter = ',')]
    fixed_mu: Option<Vec<f64>>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precondition(_) | Error::Parameter(_) | Error::Validation(_) | Error::Io(_) => 2,
        Error::Singularity(_) | Error::Numerical(_) | Error::Convergence { .. } => 3,
        Error::Oracle(_) => 4,
    }
}

fn print_report(r: &ConvergenceReport) {
    if let Some(s) = &r.saddle {
        println!("saddle: values {:?} mu {:?}", s.values, s.mu);
    }
    for s in &r.seeds {
        println!(
            "seed {:>4}: v = {:?}  mu = {:?}  tail amplitude {:.3e}  lic {}  aic {}",
            s.seed,
            s.final_values,
            s.final_mu,
            s.tail_amplitude,
            s.lic.map_or("-", |v| v.label()),
            s.aic.map_or("-", |v| v.label()),
        );
    }
    for f in &r.failures {
        println!("seed {:>4}: failed: {}", f.seed, f.error);
    }
}

fn run(cli: Cli) -> reload_core::Result<()> {
    match cli.command {
        Command::Game(a) => {
            let algo = GameAlgorithm::from_name(&a.alg)?;
            let entropic = matches!(algo, GameAlgorithm::Mwu | GameAlgorithm::Omwu);
            let base = if entropic { BilinearGame::matching_pennies() } else { BilinearGame::xy() };
            let game = BilinearGame::new(base.payoff, base.x_domain, base.y_domain, a.m)?;
            // On the simplices the start is the probability of the first action.
            let (x0, y0) = if entropic {
                (vec![a.x0, 1.0 - a.x0], vec![a.y0, 1.0 - a.y0])
            } else {
                (vec![a.x0], vec![a.y0])
            };
            let trace = run_game(&game, algo, a.eta, (&x0, &y0), a.iters, a.stride, a.out.as_deref())?;
            let norms = trace.norms();
            println!(
                "{}: initial norm {:.6e}, final norm {:.6e} after {} iterations",
                algo.name(),
                norms[0],
                norms[norms.len() - 1],
                a.iters
            );
        }
        Command::Cmdp(a) => {
            let config = SolverConfig {
                eta_pi: a.eta_pi,
                eta_mu: a.eta_mu,
                iterations: a.iters,
                stride: a.stride,
                policy_init: if a.jitter > 0.0 {
                    PolicyInit::Jittered { weight: a.jitter }
                } else {
                    PolicyInit::Uniform
                },
                mu_cap: a.mu_cap.or(SolverConfig::default().mu_cap),
                occupancy_eta: a.eta_occ,
                ..SolverConfig::default()
            };
            let mut rc = RunConfig::new(a.env.spec(), &a.solver, config, a.seeds);
            rc.oracle = a.oracle;
            rc.out_dir = a.out;
            rc.fixed_mu = a.fixed_mu;
            rc.tol = a.tol;
            print_report(&run_experiment(&rc)?);
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config)?;
            let rc: RunConfig = serde_json::from_str(&text)?;
            print_report(&run_experiment(&rc)?);
        }
        Command::Export(e) => println!("{}", e.spec().build()?.to_json()),
        Command::Oracle(e) => {
            let sp = solve_cmdp_lp(&e.spec().build()?)?;
            println!("{}", serde_json::to_string_pretty(&sp.to_json())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
