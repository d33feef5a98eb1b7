use serde::{Deserialize, Serialize};

use crate::cmdp::{Trajectory, Transition};
use crate::rng::{derive_seed, streams};
use crate::rollout::{rollout, Environment, GreedyPolicy, Observation};

use super::critic::{q_update, DualCritic};
use super::dual::LagrangeState;
use super::explore::{epsilon_greedy, EpsilonSchedule};
use super::reward::{composite_reward, lagrangian_scalarize, CompositeWeights};
use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    RuleBased,
    EngagementOnly,
    PenaltyShaped,
    Rrl,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::RuleBased,
        AgentKind::EngagementOnly,
        AgentKind::PenaltyShaped,
        AgentKind::Rrl,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AgentKind::RuleBased => "rule_based",
            AgentKind::EngagementOnly => "engagement_only",
            AgentKind::PenaltyShaped => "penalty_shaped",
            AgentKind::Rrl => "rrl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineVariant {
    EngagementOnly,
    PenaltyShaped,
}

fn default_learning_rate() -> f64 {
    0.05
}

fn default_dual_step_size() -> f64 {
    0.01
}

fn default_iterations() -> usize {
    3000
}

fn default_batch_episodes() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub weights: CompositeWeights,
    pub threshold_d: f64,
    #[serde(default = "default_dual_step_size")]
    pub dual_step_size: f64,
    #[serde(default)]
    pub initial_lambda: f64,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub epsilon: EpsilonSchedule,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_batch_episodes")]
    pub batch_episodes: usize,
}

impl LearnerConfig {
    pub fn new(weights: CompositeWeights, threshold_d: f64) -> Self {
        Self {
            weights,
            threshold_d,
            dual_step_size: default_dual_step_size(),
            initial_lambda: 0.0,
            learning_rate: default_learning_rate(),
            epsilon: EpsilonSchedule::default(),
            iterations: default_iterations(),
            batch_episodes: default_batch_episodes(),
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        self.weights.validate()?;
        LagrangeState::new(self.initial_lambda, self.dual_step_size, self.threshold_d)?;
        self.epsilon.validate()?;
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0 && self.learning_rate <= 1.0)
        {
            return Err(AgentError::Param {
                name: "learning_rate",
                value: self.learning_rate,
            });
        }
        if self.iterations == 0 {
            return Err(AgentError::Param {
                name: "iterations",
                value: 0.0,
            });
        }
        if self.batch_episodes == 0 {
            return Err(AgentError::Param {
                name: "batch_episodes",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Per-iteration training series plus the final greedy policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub agent: AgentKind,
    /// Batch mean of the discounted composite return.
    pub mean_return: Vec<f64>,
    /// Batch mean of the discounted cost, the dual ascent's cost estimate.
    pub mean_cost: Vec<f64>,
    /// Multiplier after the iteration's dual step.
    pub lambda: Vec<f64>,
    /// Whether the batch cost estimate exceeded the threshold.
    pub violated: Vec<bool>,
    pub final_policy: Vec<usize>,
}

impl TrainReport {
    pub fn iterations(&self) -> usize {
        self.mean_return.len()
    }

    /// Mean of `mean_cost` over the trailing `fraction` of iterations (at
    /// least one).
    pub fn tail_mean_cost(&self, fraction: f64) -> f64 {
        let n = self.mean_cost.len();
        let k = ((n as f64 * fraction).ceil() as usize).clamp(1, n.max(1));
        let tail = &self.mean_cost[n.saturating_sub(k)..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }

    pub fn greedy_policy(&self) -> GreedyPolicy {
        GreedyPolicy {
            actions: self.final_policy.clone(),
        }
    }
}

/// Composite reward of a logged step. Environments without affect signals
/// contribute their raw reward as engagement and zero alignment.
pub fn step_composite(t: &Transition, w: &CompositeWeights) -> f64 {
    let (r_eng, r_emo) = match &t.signals {
        Some(s) => (s.r_eng, s.r_emo),
        None => (t.reward, 0.0),
    };
    composite_reward(r_eng, r_emo, t.violation(), w)
}

fn discounted<F: Fn(&Transition) -> f64>(traj: &Trajectory, discount: f64, f: F) -> f64 {
    let mut acc = 0.0;
    let mut g = 1.0;
    for t in &traj.transitions {
        acc += g * f(t);
        g *= discount;
    }
    acc
}

/// Episode seed for the `episode`-th training rollout of a run.
pub fn training_episode_seed(run_seed: u64, episode: u64) -> u64 {
    derive_seed(derive_seed(run_seed, streams::TRAIN), episode)
}

/// Shared loop for every learning agent.
///
/// `weights` defines the composite reward; the multiplier only moves when
/// `dual_active` is set.
fn train_loop<E: Environment + ?Sized>(
    env: &mut E,
    kind: AgentKind,
    weights: CompositeWeights,
    config: &LearnerConfig,
    dual_active: bool,
    seed: u64,
) -> Result<TrainReport, AgentError> {
    config.validate()?;
    let initial_lambda = if dual_active {
        config.initial_lambda
    } else {
        0.0
    };
    let mut lagrange = LagrangeState::new(initial_lambda, config.dual_step_size, config.threshold_d)?;
    let mut critic = DualCritic::new(env.n_states(), env.n_actions(), config.learning_rate);
    let discount = env.discount();
    let horizon = env.horizon();
    let n = config.iterations;
    let mut report = TrainReport {
        agent: kind,
        mean_return: Vec::with_capacity(n),
        mean_cost: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
        violated: Vec::with_capacity(n),
        final_policy: Vec::new(),
    };
    let mut episode = 0u64;
    let mut batch = Vec::with_capacity(config.batch_episodes);
    for iteration in 0..n {
        let eps = config.epsilon.at(iteration, n);
        batch.clear();
        for _ in 0..config.batch_episodes {
            let q = &critic.q_reward;
            let mut behaviour =
                |obs: &Observation, rng: &mut _| epsilon_greedy(&q[obs.index], eps, rng);
            let traj = rollout(
                env,
                &mut behaviour,
                horizon,
                training_episode_seed(seed, episode),
            )?;
            batch.push(traj);
            episode += 1;
        }
        let b = batch.len() as f64;
        let mean_return = batch
            .iter()
            .map(|tr| discounted(tr, discount, |t| step_composite(t, &weights)))
            .sum::<f64>()
            / b;
        let mean_cost = batch
            .iter()
            .map(|tr| discounted(tr, discount, |t| t.cost))
            .sum::<f64>()
            / b;

        for traj in &batch {
            for t in &traj.transitions {
                let r = step_composite(t, &weights);
                let scalarized = lagrangian_scalarize(r, t.cost, lagrange.lambda);
                q_update(&mut critic, t, scalarized, discount, false);
            }
        }
        if let Some((state, action, value)) = critic.first_non_finite() {
            return Err(AgentError::NonFinite {
                iteration,
                state,
                action,
                value,
                lambda: lagrange.lambda,
            });
        }
        if dual_active {
            lagrange = lagrange.dual_update(mean_cost);
        }
        report.mean_return.push(mean_return);
        report.mean_cost.push(mean_cost);
        report.lambda.push(lagrange.lambda);
        report.violated.push(mean_cost > config.threshold_d);
    }
    report.final_policy = critic.greedy_policy();
    Ok(report)
}

/// Lagrangian-constrained learner: Q-learning on `r - lambda * c` with
/// projected dual ascent on the batch cost estimate.
pub fn train_rrl<E: Environment + ?Sized>(
    env: &mut E,
    config: &LearnerConfig,
    seed: u64,
) -> Result<TrainReport, AgentError> {
    train_loop(env, AgentKind::Rrl, config.weights, config, true, seed)
}

pub fn train_baseline<E: Environment + ?Sized>(
    env: &mut E,
    variant: BaselineVariant,
    config: &LearnerConfig,
    seed: u64,
) -> Result<TrainReport, AgentError> {
    match variant {
        BaselineVariant::EngagementOnly => train_loop(
            env,
            AgentKind::EngagementOnly,
            CompositeWeights::ENGAGEMENT_ONLY,
            config,
            false,
            seed,
        ),
        BaselineVariant::PenaltyShaped => train_loop(
            env,
            AgentKind::PenaltyShaped,
            config.weights,
            config,
            false,
            seed,
        ),
    }
}

/// Trains any learning agent kind; the rule-based agent has nothing to train.
pub fn train_agent<E: Environment + ?Sized>(
    env: &mut E,
    kind: AgentKind,
    config: &LearnerConfig,
    seed: u64,
) -> Result<TrainReport, AgentError> {
    match kind {
        AgentKind::RuleBased => Err(AgentError::NotLearner(kind)),
        AgentKind::EngagementOnly => {
            train_baseline(env, BaselineVariant::EngagementOnly, config, seed)
        }
        AgentKind::PenaltyShaped => {
            train_baseline(env, BaselineVariant::PenaltyShaped, config, seed)
        }
        AgentKind::Rrl => train_rrl(env, config, seed),
    }
}
