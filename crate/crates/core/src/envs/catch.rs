//! Tabular constrained Catch.
//!
//! A ball falls one row per step down a `rows × cols` board while the agent
//! moves a paddle along the bottom. States are `(ball_row, ball_col,
//! paddle_col)`; actions are left, stay, right. Leaving a bottom-row state
//! pays +1 if the paddle is under the ball and −1 otherwise, then restarts the
//! episode: ball in row 0 at a uniformly random column, paddle in the centre
//! column. The constraint reward is 0.2 while the paddle is in one of the three
//! leftmost columns.

use crate::cmdp::{Cmdp, Constraint};
use crate::envs::DEFAULT_GAMMA;
use crate::error::{parameter, Result};

pub const CATCH_CONSTRAINT_COLUMNS: usize = 3;
const CONSTRAINT_REWARD: f64 = 0.2;
/// Allowed constraint return per episode.
const EPISODE_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatchState {
    pub ball_row: usize,
    pub ball_col: usize,
    pub paddle_col: usize,
}

/// Index of `st` on a board with `cols` columns.
pub fn catch_state(cols: usize, st: CatchState) -> usize {
    (st.ball_row * cols + st.ball_col) * cols + st.paddle_col
}

fn decode(cols: usize, s: usize) -> CatchState {
    CatchState {
        ball_row: s / (cols * cols),
        ball_col: (s / cols) % cols,
        paddle_col: s % cols,
    }
}

/// Constrained Catch with discount [`DEFAULT_GAMMA`].
///
/// The stated budget of 1.0 constraint reward per episode is expressed in the
/// crate's normalized value units by dividing by the episode length `rows`.
pub fn constrained_catch(rows: usize, cols: usize) -> Result<Cmdp> {
    if rows < 2 || cols < CATCH_CONSTRAINT_COLUMNS {
        return Err(parameter(format!("catch needs rows ≥ 2 and cols ≥ 3, got {rows}×{cols}")));
    }
    let ns = rows * cols * cols;
    let na = 3;
    let centre = cols / 2;
    let mut rho = vec![0.0; ns];
    for bc in 0..cols {
        let s = catch_state(
            cols,
            CatchState {
                ball_row: 0,
                ball_col: bc,
                paddle_col: centre,
            },
        );
        rho[s] = 1.0 / cols as f64;
    }
    let mut kernel = vec![0.0; ns * na * ns];
    let mut r0 = vec![0.0; ns * na];
    let mut r1 = vec![0.0; ns * na];
    for s in 0..ns {
        let st = decode(cols, s);
        for a in 0..na {
            let row = &mut kernel[(s * na + a) * ns..(s * na + a + 1) * ns];
            if st.ball_row + 1 == rows {
                r0[s * na + a] = if st.paddle_col == st.ball_col { 1.0 } else { -1.0 };
                row.copy_from_slice(&rho);
            } else {
                let paddle_col = (st.paddle_col + a).saturating_sub(1).min(cols - 1);
                let next = CatchState {
                    ball_row: st.ball_row + 1,
                    ball_col: st.ball_col,
                    paddle_col,
                };
                row[catch_state(cols, next)] = 1.0;
            }
            if st.paddle_col < CATCH_CONSTRAINT_COLUMNS {
                r1[s * na + a] = CONSTRAINT_REWARD;
            }
        }
    }
    Cmdp::new(
        ns,
        na,
        DEFAULT_GAMMA,
        rho,
        kernel,
        r0,
        vec![Constraint {
            reward: r1,
            threshold: EPISODE_THRESHOLD / rows as f64,
        }],
    )
}
