//! The environment step contract and seeded episode collection.

use thiserror::Error;

use crate::cmdp::{StationaryPolicy, Trajectory, Transition};
use crate::rng::{derive_seed, rng_from_seed, streams, SimRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("episode already finished; call reset before stepping")]
    EpisodeFinished,
    #[error("environment stepped before reset")]
    NotReset,
    #[error("action {action} out of range for {n_actions} actions")]
    InvalidAction { action: usize, n_actions: usize },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// What an agent sees at a decision point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Discrete state index for tabular learners.
    pub index: usize,
    /// Observed affective readiness (noisy for the synthetic user).
    pub readiness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub transition: Transition,
    pub observation: Observation,
    /// Set once the episode horizon is reached.
    pub done: bool,
}

pub trait Environment {
    fn n_states(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn discount(&self) -> f64;
    fn horizon(&self) -> usize;
    /// Intended affective valence per action, each in {-1, 0, +1}.
    fn action_valences(&self) -> Vec<i8>;
    /// Actions counted as engaging by the engagement-rate metric.
    fn engage_actions(&self) -> Vec<bool> {
        self.action_valences().iter().map(|&v| v > 0).collect()
    }
    fn reset(&mut self, rng: &mut SimRng) -> Observation;
    fn step(&mut self, action: usize, rng: &mut SimRng) -> Result<Step, EnvError>;
}

/// Anything that maps an observation to an action.
pub trait Policy {
    fn act(&mut self, obs: &Observation, rng: &mut SimRng) -> usize;
}

impl<F> Policy for F
where
    F: FnMut(&Observation, &mut SimRng) -> usize,
{
    fn act(&mut self, obs: &Observation, rng: &mut SimRng) -> usize {
        self(obs, rng)
    }
}

impl Policy for StationaryPolicy {
    fn act(&mut self, obs: &Observation, rng: &mut SimRng) -> usize {
        self.sample(obs.index, rng)
    }
}

/// Deterministic lookup table over discrete state indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPolicy {
    pub actions: Vec<usize>,
}

impl Policy for GreedyPolicy {
    fn act(&mut self, obs: &Observation, _rng: &mut SimRng) -> usize {
        self.actions[obs.index]
    }
}

/// Runs one episode of at most `horizon` steps.
///
/// The environment and the policy draw from separate sub-streams of `seed`,
/// so two policies run with the same seed see the same environment noise
/// whenever the environment consumes a fixed number of draws per step.
pub fn rollout<E, P>(
    env: &mut E,
    policy: &mut P,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory, EnvError>
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    if horizon == 0 {
        return Err(EnvError::ZeroHorizon);
    }
    let mut env_rng = rng_from_seed(derive_seed(seed, streams::ENV));
    let mut policy_rng = rng_from_seed(derive_seed(seed, streams::POLICY));
    let mut obs = env.reset(&mut env_rng);
    let mut transitions = Vec::with_capacity(horizon.min(env.horizon()));
    for _ in 0..horizon {
        let action = policy.act(&obs, &mut policy_rng);
        let step = env.step(action, &mut env_rng)?;
        transitions.push(step.transition);
        obs = step.observation;
        if step.done {
            break;
        }
    }
    Ok(Trajectory { transitions, seed })
}
