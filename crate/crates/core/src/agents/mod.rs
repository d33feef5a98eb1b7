//! Learners: a rule-based heuristic, two unconstrained Q-learning baselines and
//! the Lagrangian-constrained learner.

pub mod critic;
pub mod dual;
pub mod explore;
pub mod reward;
pub mod rule;
pub mod trainer;

use thiserror::Error;

use crate::rollout::EnvError;

pub use critic::{q_update, DualCritic};
pub use dual::{dual_update, LagrangeState};
pub use explore::{argmax, epsilon_greedy, EpsilonSchedule};
pub use reward::{composite_reward, lagrangian_scalarize, CompositeWeights};
pub use rule::{rule_based_policy, RuleBasedPolicy};
pub use trainer::{
    step_composite, train_agent, train_baseline, train_rrl, AgentKind, BaselineVariant,
    LearnerConfig, TrainReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("invalid reward weights {0:?}: need all finite, nonnegative and at least one positive")]
    Weights(CompositeWeights),
    #[error("invalid {name}: {value}")]
    Param { name: &'static str, value: f64 },
    #[error(
        "non-finite critic entry {value} at state {state}, action {action} \
         after iteration {iteration} (lambda = {lambda})"
    )]
    NonFinite {
        iteration: usize,
        state: usize,
        action: usize,
        value: f64,
        lambda: f64,
    },
    #[error("agent {0:?} does not train")]
    NotLearner(AgentKind),
    #[error(transparent)]
    Env(#[from] EnvError),
}
