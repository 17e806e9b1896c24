//! Tabular CMDP machinery: models, exact evaluation and the flow polytope.

pub mod eval;
pub mod model;
pub mod projection;

pub use eval::{
    bellman_residual, evaluate_all, lagrangian, lagrangian_from_values, lagrangian_grad_d, lagrangian_grad_mu,
    mixed_q, mixed_reward, normalized_state_value, occupancy_from_policy, policy_eval, policy_from_occupancy,
    policy_transition, value_of, values_of_occupancy, Evaluation, PolicyEvaluator,
};
pub use model::{flow_residual, Cmdp, CmdpFile, Constraint, ConstraintFile, Multipliers, OccupancyMeasure, Policy, QValues};
pub use projection::{project_onto_k, FlowProjector};
