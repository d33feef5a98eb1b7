//! Tabular constrained-MDP laboratory: exact CMDP evaluation, a synthetic
//! affective user simulator, Lagrangian and baseline learners, an exact
//! constrained oracle and trade-off metrics.

pub mod agents;
pub mod cmdp;
pub mod envs;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod rollout;

pub use cmdp::{
    discounted_cost, discounted_return, exact_policy_values, validate_cmdp, CmdpError, CmdpSpec,
    PolicyValues, StationaryPolicy, Trajectory, Transition,
};
pub use rollout::{rollout, EnvError, Environment, GreedyPolicy, Observation, Policy};
