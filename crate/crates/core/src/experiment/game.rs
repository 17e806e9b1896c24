//! Runs of the bilinear-game dynamics with CSV/SVG output.

use std::path::Path;

use crate::error::Result;
use crate::experiment::output::{fmt_f64, line_chart_svg, write_atomic};
use crate::minmax::{solve_game, BilinearGame, GameAlgorithm, IterateTrace, StepSchedule};

/// `iter,x1..,y1..,norm,objective`.
pub fn game_trace_csv(trace: &IterateTrace) -> String {
    let (nx, ny) = trace
        .iterates
        .first()
        .map(|(x, y)| (x.len(), y.len()))
        .unwrap_or((0, 0));
    let mut cols = vec!["iter".to_string()];
    cols.extend((1..=nx).map(|i| format!("x{i}")));
    cols.extend((1..=ny).map(|i| format!("y{i}")));
    cols.push("norm".into());
    cols.push("objective".into());
    let mut out = cols.join(",");
    out.push('\n');
    for (i, (x, y)) in trace.iterates.iter().enumerate() {
        let mut row = vec![trace.iterations[i].to_string()];
        row.extend(x.iter().chain(y).map(|&v| fmt_f64(v)));
        row.push(fmt_f64(trace.diagnostics[i]["norm"]));
        row.push(fmt_f64(trace.diagnostics[i]["objective"]));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Solves the game and writes `<alg>.csv` and `<alg>.svg` into `out_dir`.
pub fn run_game(
    game: &BilinearGame,
    algo: GameAlgorithm,
    eta: f64,
    init: (&[f64], &[f64]),
    iters: usize,
    stride: usize,
    out_dir: Option<&Path>,
) -> Result<IterateTrace> {
    let trace = solve_game(game, algo, &StepSchedule::Constant(eta), init, iters, stride)?;
    if let Some(dir) = out_dir {
        write_atomic(&dir.join(format!("{}.csv", algo.name())), game_trace_csv(&trace).as_bytes())?;
        let pts: Vec<(f64, f64)> = trace
            .iterations
            .iter()
            .zip(trace.norms())
            .map(|(&k, n)| (k as f64, n))
            .collect();
        let svg = line_chart_svg(
            &format!("{} on the bilinear game, eta = {eta}", algo.name()),
            "iteration",
            "distance to origin (log10)",
            &[(algo.name().to_string(), pts)],
            true,
        );
        write_atomic(&dir.join(format!("{}.svg", algo.name())), svg.as_bytes())?;
    }
    Ok(trace)
}
