//! Bregman geometries and first-order dynamics for convex-concave games.

pub mod game;
pub mod geometry;
pub mod rate;
pub mod spectral;

pub use game::{average_trace, running_means, solve_game, spectral_norm, BilinearGame, GameAlgorithm, IterateTrace, StepSchedule};
pub use geometry::{project_simplex, softmax, BregmanGeometry, Domain, MirrorMap};
pub use rate::{fit_linear_rate, RateFit};
pub use spectral::{singly_optimistic_eigenvalues, singly_optimistic_jacobian, singly_optimistic_spectral_radius};
