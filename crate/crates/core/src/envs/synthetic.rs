//! Synthetic emotional-user simulator.
//!
//! A simulated user carries a static profile, an engagement history and a
//! latent affective readiness `e` in [-1, +1]. The agent only sees a noisy
//! reading `o = e + xi`, `xi ~ N(0, sigma_obs^2)`, discretized together with
//! the profile and history into a tabular state index.
//!
//! Latent dynamics per step:
//! - with probability `env_noise` the move direction is drawn uniformly
//!   (one step up or one step down);
//! - otherwise a *sensitive* action (valence +1 while `e >= distress_threshold`)
//!   raises `e` by one step with probability `p_raise`, a *lowering* action
//!   (valence -1, or valence +1 while distressed) lowers it with probability
//!   `p_lower`, and a neutral action (valence 0) leaves it unchanged;
//! - all residual probability mass leaves `e` unchanged.
//!
//! Step sizes are scaled by the profile: raising moves by
//! `base_step * (0.5 + responsiveness)`, lowering by `base_step * (0.5 + severity)`.
//! The result is clamped to [-1, +1].
//!
//! Each step consumes exactly five uniforms (three for the latent move, two
//! for the Box-Muller observation noise); reset consumes five as well.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmdp::{StepSignals, Transition};
use crate::rng::{standard_normal, SimRng};
use crate::rollout::{EnvError, Environment, Observation, Step};

use super::sign_agreement;

pub const CHECK_IN: usize = 0;
pub const ENCOURAGE_ACTIVITY: usize = 1;
pub const DELIVER_CONTENT: usize = 2;
pub const ESCALATE_SUPPORT: usize = 3;
pub const WAIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid synthetic environment parameter `{name}` = {value}: {reason}")]
pub struct SyntheticConfigError {
    pub name: String,
    pub value: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { low: x, high: x }
    }

    fn sample(&self, rng: &mut SimRng) -> f64 {
        let u: f64 = rng.gen();
        self.low + u * (self.high - self.low)
    }
}

/// One entry of the intervention menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub name: String,
    /// Intended affective valence: -1, 0 or +1.
    pub valence: i8,
    /// Cost multiplier when the action is applied to a distressed user.
    /// Zero means the action can never incur cost.
    pub intensity: f64,
    /// Engagement payoff in [0,1]; scaled by readiness for valence +1 actions.
    pub engagement_payoff: f64,
}

/// Population the per-episode user profile is drawn from, plus the cutpoints
/// used to discretize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilePopulation {
    pub severity: Interval,
    pub responsiveness: Interval,
    pub severity_cutpoints: Vec<f64>,
    pub responsiveness_cutpoints: Vec<f64>,
}

impl ProfilePopulation {
    pub fn levels(&self) -> usize {
        (self.severity_cutpoints.len() + 1) * (self.responsiveness_cutpoints.len() + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticEnvConfig {
    pub p_raise: f64,
    pub p_lower: f64,
    /// Probability that the latent move direction is randomized.
    pub env_noise: f64,
    /// Standard deviation of the additive observation noise.
    pub sigma_obs: f64,
    pub base_step: f64,
    /// Latent readiness below this value counts as distress.
    pub distress_threshold: f64,
    /// Cost per unit intensity for engaging a distressed user.
    pub cost_penalty: f64,
    pub actions: Vec<ActionSpec>,
    /// Decay of the engagement-history moving average.
    pub history_decay: f64,
    pub initial_latent: Interval,
    pub profile: ProfilePopulation,
    pub horizon: usize,
    pub e_bins: usize,
    pub h_bins: usize,
    pub discount: f64,
}

impl Default for SyntheticEnvConfig {
    fn default() -> Self {
        let action = |name: &str, valence, intensity, engagement_payoff| ActionSpec {
            name: name.to_owned(),
            valence,
            intensity,
            engagement_payoff,
        };
        Self {
            p_raise: 0.8,
            p_lower: 0.6,
            env_noise: 0.1,
            sigma_obs: 0.1,
            base_step: 0.2,
            distress_threshold: -0.3,
            cost_penalty: 1.0,
            actions: vec![
                action("check_in", 1, 1.0, 0.6),
                action("encourage_activity", 1, 1.0, 0.8),
                action("deliver_content", 0, 0.0, 0.3),
                action("escalate_support", 1, 2.0, 1.0),
                action("wait", -1, 0.0, 0.0),
            ],
            history_decay: 0.8,
            initial_latent: Interval {
                low: -0.6,
                high: 0.6,
            },
            profile: ProfilePopulation {
                severity: Interval {
                    low: 0.0,
                    high: 1.0,
                },
                responsiveness: Interval {
                    low: 0.0,
                    high: 1.0,
                },
                severity_cutpoints: vec![0.5],
                responsiveness_cutpoints: vec![0.5],
            },
            horizon: 50,
            e_bins: 5,
            h_bins: 3,
            discount: 0.95,
        }
    }
}

fn param_err(name: impl Into<String>, value: f64, reason: &'static str) -> SyntheticConfigError {
    SyntheticConfigError {
        name: name.into(),
        value,
        reason,
    }
}

fn check_unit(name: &str, v: f64) -> Result<(), SyntheticConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(param_err(name, v, "must lie in [0,1]"))
    }
}

fn check_interval(
    name: &str,
    iv: &Interval,
    lo: f64,
    hi: f64,
) -> Result<(), SyntheticConfigError> {
    if !(iv.low <= iv.high) {
        return Err(param_err(format!("{name}.low"), iv.low, "exceeds high"));
    }
    if iv.low < lo || iv.high > hi {
        return Err(param_err(name.to_string(), iv.low, "outside allowed bounds"));
    }
    Ok(())
}

fn check_cutpoints(name: &str, cuts: &[f64]) -> Result<(), SyntheticConfigError> {
    for w in cuts.windows(2) {
        if !(w[0] < w[1]) {
            return Err(param_err(name, w[1], "cutpoints must be strictly increasing"));
        }
    }
    if let Some(c) = cuts.iter().find(|c| !c.is_finite()) {
        return Err(param_err(name, *c, "cutpoints must be finite"));
    }
    Ok(())
}

impl SyntheticEnvConfig {
    pub fn validate(&self) -> Result<(), SyntheticConfigError> {
        check_unit("p_raise", self.p_raise)?;
        check_unit("p_lower", self.p_lower)?;
        check_unit("env_noise", self.env_noise)?;
        if !(self.sigma_obs.is_finite() && self.sigma_obs >= 0.0) {
            return Err(param_err("sigma_obs", self.sigma_obs, "must be >= 0"));
        }
        if !(self.base_step > 0.0 && self.base_step <= 2.0) {
            return Err(param_err("base_step", self.base_step, "must lie in (0,2]"));
        }
        if !(-1.0..=1.0).contains(&self.distress_threshold) {
            return Err(param_err(
                "distress_threshold",
                self.distress_threshold,
                "must lie in [-1,1]",
            ));
        }
        if !(self.cost_penalty.is_finite() && self.cost_penalty >= 0.0) {
            return Err(param_err("cost_penalty", self.cost_penalty, "must be >= 0"));
        }
        if self.actions.is_empty() {
            return Err(param_err("actions", 0.0, "at least one action is required"));
        }
        for (i, a) in self.actions.iter().enumerate() {
            if !(-1..=1).contains(&a.valence) {
                return Err(param_err(
                    format!("actions[{i}].valence"),
                    a.valence as f64,
                    "must be -1, 0 or +1",
                ));
            }
            if !(a.intensity.is_finite() && a.intensity >= 0.0) {
                return Err(param_err(
                    format!("actions[{i}].intensity"),
                    a.intensity,
                    "must be >= 0",
                ));
            }
            check_unit(&format!("actions[{i}].engagement_payoff"), a.engagement_payoff)?;
        }
        if !(self.history_decay > 0.0 && self.history_decay < 1.0) {
            return Err(param_err("history_decay", self.history_decay, "must lie in (0,1)"));
        }
        check_interval("initial_latent", &self.initial_latent, -1.0, 1.0)?;
        check_interval("profile.severity", &self.profile.severity, 0.0, 1.0)?;
        check_interval("profile.responsiveness", &self.profile.responsiveness, 0.0, 1.0)?;
        check_cutpoints("profile.severity_cutpoints", &self.profile.severity_cutpoints)?;
        check_cutpoints(
            "profile.responsiveness_cutpoints",
            &self.profile.responsiveness_cutpoints,
        )?;
        if self.horizon == 0 {
            return Err(param_err("horizon", 0.0, "must be >= 1"));
        }
        if self.e_bins < 2 {
            return Err(param_err("e_bins", self.e_bins as f64, "must be >= 2"));
        }
        if self.h_bins < 2 {
            return Err(param_err("h_bins", self.h_bins as f64, "must be >= 2"));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(param_err("discount", self.discount, "must lie in (0,1)"));
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.e_bins * self.h_bins * self.profile.levels()
    }

    pub fn valence(&self, action: usize) -> i8 {
        self.actions[action].valence
    }
}

/// Static user attributes, fixed for an episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub severity: f64,
    pub responsiveness: f64,
}

impl UserProfile {
    pub fn attributes(&self) -> [f64; 2] {
        [self.severity, self.responsiveness]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementHistory {
    pub ewma_engagement: f64,
    pub decay: f64,
}

impl EngagementHistory {
    pub fn new(decay: f64) -> Self {
        Self {
            ewma_engagement: 0.0,
            decay,
        }
    }

    pub fn update(&mut self, engaged: bool) {
        let x = if engaged { 1.0 } else { 0.0 };
        self.ewma_engagement = self.decay * self.ewma_engagement + (1.0 - self.decay) * x;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionalState {
    pub latent_e: f64,
    pub observed_o: f64,
}

/// Full simulator state `[u, h, e]` plus its discrete index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserState {
    pub profile: UserProfile,
    pub history: EngagementHistory,
    pub emotion: EmotionalState,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffectMove {
    Raise,
    Lower,
    Hold,
}

pub fn classify_move(valence: i8, latent_e: f64, distress_threshold: f64) -> AffectMove {
    match valence {
        1 if latent_e >= distress_threshold => AffectMove::Raise,
        1 | -1 => AffectMove::Lower,
        _ => AffectMove::Hold,
    }
}

/// Samples the next latent readiness. Draws exactly three uniforms.
pub fn emotional_transition(
    latent_e: f64,
    action: usize,
    profile: &UserProfile,
    config: &SyntheticEnvConfig,
    rng: &mut SimRng,
) -> f64 {
    let u_noise: f64 = rng.gen();
    let u_dir: f64 = rng.gen();
    let u_move: f64 = rng.gen();
    let raise = config.base_step * (0.5 + profile.responsiveness);
    let lower = config.base_step * (0.5 + profile.severity);
    let delta = if u_noise < config.env_noise {
        if u_dir < 0.5 {
            raise
        } else {
            -lower
        }
    } else {
        match classify_move(config.valence(action), latent_e, config.distress_threshold) {
            AffectMove::Raise if u_move < config.p_raise => raise,
            AffectMove::Lower if u_move < config.p_lower => -lower,
            _ => 0.0,
        }
    };
    (latent_e + delta).clamp(-1.0, 1.0)
}

/// Noisy sensor reading of the latent readiness. Draws exactly two uniforms.
pub fn observe(latent_e: f64, sigma_obs: f64, rng: &mut SimRng) -> f64 {
    latent_e + sigma_obs * standard_normal(rng)
}

/// `(r_eng, r_emo)` for taking `action` in `state`.
///
/// Engaging actions pay `engagement_payoff * (1 + e) / 2`; other actions pay
/// their flat payoff. `r_emo` is the sign agreement between latent affect and
/// the action's valence.
pub fn reward_signals(state: &UserState, action: usize, config: &SyntheticEnvConfig) -> (f64, f64) {
    let spec = &config.actions[action];
    let e = state.emotion.latent_e;
    let r_eng = if spec.valence > 0 {
        spec.engagement_payoff * (1.0 + e) / 2.0
    } else {
        spec.engagement_payoff
    };
    (r_eng, sign_agreement(e, spec.valence))
}

/// Penalty for pushing an engaging action on a distressed user.
pub fn cost_signal(state: &UserState, action: usize, config: &SyntheticEnvConfig) -> f64 {
    let spec = &config.actions[action];
    if spec.valence > 0
        && spec.intensity > 0.0
        && state.emotion.latent_e < config.distress_threshold
    {
        config.cost_penalty * spec.intensity
    } else {
        0.0
    }
}

/// Interior cutpoints splitting `[low, high]` into `bins` equal intervals.
pub fn uniform_cutpoints(low: f64, high: f64, bins: usize) -> Vec<f64> {
    (1..bins)
        .map(|k| low + (high - low) * k as f64 / bins as f64)
        .collect()
}

/// Bin of `x` given sorted cutpoints: intervals are closed below and open
/// above, so a value on a cutpoint lands in the upper bin.
pub fn bin_of(x: f64, cutpoints: &[f64]) -> usize {
    cutpoints.iter().take_while(|&&c| x >= c).count()
}

/// Row-major index over `[profile level][history bin][readiness bin]`.
///
/// The observation is clamped to [-1, 1] and split into `e_bins` uniform
/// intervals; the history average is split over [0, 1] into `h_bins`; the
/// profile level combines severity and responsiveness bins from the
/// configured cutpoints.
pub fn discretize_state(
    profile: &UserProfile,
    history: &EngagementHistory,
    observation: f64,
    config: &SyntheticEnvConfig,
) -> usize {
    let e_bin = bin_of(
        observation.clamp(-1.0, 1.0),
        &uniform_cutpoints(-1.0, 1.0, config.e_bins),
    );
    let h_bin = bin_of(
        history.ewma_engagement.clamp(0.0, 1.0),
        &uniform_cutpoints(0.0, 1.0, config.h_bins),
    );
    let pop = &config.profile;
    let sev = bin_of(profile.severity, &pop.severity_cutpoints);
    let resp = bin_of(profile.responsiveness, &pop.responsiveness_cutpoints);
    let level = sev * (pop.responsiveness_cutpoints.len() + 1) + resp;
    (level * config.h_bins + h_bin) * config.e_bins + e_bin
}

#[derive(Debug, Clone)]
pub struct SyntheticEnv {
    config: SyntheticEnvConfig,
    state: Option<UserState>,
    t: usize,
}

impl SyntheticEnv {
    pub fn new(config: SyntheticEnvConfig) -> Result<Self, SyntheticConfigError> {
        config.validate()?;
        Ok(Self {
            config,
            state: None,
            t: 0,
        })
    }

    pub fn config(&self) -> &SyntheticEnvConfig {
        &self.config
    }

    /// Current simulator state, including the latent readiness the agent never sees.
    pub fn user_state(&self) -> Option<&UserState> {
        self.state.as_ref()
    }

    fn observation(state: &UserState) -> Observation {
        Observation {
            index: state.index,
            readiness: state.emotion.observed_o,
        }
    }
}

impl Environment for SyntheticEnv {
    fn n_states(&self) -> usize {
        self.config.n_states()
    }

    fn n_actions(&self) -> usize {
        self.config.actions.len()
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn action_valences(&self) -> Vec<i8> {
        self.config.actions.iter().map(|a| a.valence).collect()
    }

    fn reset(&mut self, rng: &mut SimRng) -> Observation {
        let cfg = &self.config;
        let profile = UserProfile {
            severity: cfg.profile.severity.sample(rng),
            responsiveness: cfg.profile.responsiveness.sample(rng),
        };
        let latent_e = cfg.initial_latent.sample(rng);
        let history = EngagementHistory::new(cfg.history_decay);
        let observed_o = observe(latent_e, cfg.sigma_obs, rng);
        let index = discretize_state(&profile, &history, observed_o, cfg);
        let state = UserState {
            profile,
            history,
            emotion: EmotionalState {
                latent_e,
                observed_o,
            },
            index,
        };
        self.state = Some(state);
        self.t = 0;
        Self::observation(&state)
    }

    fn step(&mut self, action: usize, rng: &mut SimRng) -> Result<Step, EnvError> {
        let current = self.state.ok_or(EnvError::NotReset)?;
        if self.t >= self.config.horizon {
            return Err(EnvError::EpisodeFinished);
        }
        let n_actions = self.config.actions.len();
        if action >= n_actions {
            return Err(EnvError::InvalidAction { action, n_actions });
        }
        let cfg = &self.config;
        let (r_eng, r_emo) = reward_signals(&current, action, cfg);
        let cost = cost_signal(&current, action, cfg);

        let latent_e = emotional_transition(
            current.emotion.latent_e,
            action,
            &current.profile,
            cfg,
            rng,
        );
        let mut history = current.history;
        history.update(cfg.valence(action) > 0);
        let observed_o = observe(latent_e, cfg.sigma_obs, rng);
        let index = discretize_state(&current.profile, &history, observed_o, cfg);
        let next = UserState {
            profile: current.profile,
            history,
            emotion: EmotionalState {
                latent_e,
                observed_o,
            },
            index,
        };
        self.state = Some(next);
        self.t += 1;
        Ok(Step {
            transition: Transition {
                state: current.index,
                action,
                reward: r_eng,
                cost,
                next_state: index,
                signals: Some(StepSignals {
                    r_eng,
                    r_emo,
                    latent_e: current.emotion.latent_e,
                }),
            },
            observation: Self::observation(&next),
            done: self.t >= cfg.horizon,
        })
    }
}
