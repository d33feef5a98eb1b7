//! Two-state, two-action CMDP: a neutral and an emotional user state, with an
//! engage and a disengage action.

use serde::{Deserialize, Serialize};

use crate::cmdp::{validate_cmdp, CmdpError, CmdpSpec};

use super::tabular::{StateAnnotation, TabularEnv};

pub const NEUTRAL: usize = 0;
pub const EMOTIONAL: usize = 1;
pub const ENGAGE: usize = 0;
pub const DISENGAGE: usize = 1;

/// A value for each of the two actions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerAction {
    pub engage: f64,
    pub disengage: f64,
}

impl PerAction {
    fn get(&self, action: usize) -> f64 {
        if action == ENGAGE {
            self.engage
        } else {
            self.disengage
        }
    }
}

/// Rewards for the (state, action) pairs other than (neutral, engage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyOtherRewards {
    pub neutral_disengage: f64,
    pub emotional_engage: f64,
    pub emotional_disengage: f64,
}

/// Switching probabilities between the two states, per action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyTransitions {
    pub neutral_to_emotional: PerAction,
    pub emotional_to_neutral: PerAction,
}

/// Missing fields in a serialized config fall back to
/// [`ToyEnvConfig::default_acceptance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyEnvConfig {
    /// Reward for engaging in the neutral state.
    pub r0: f64,
    /// Cost for engaging in the emotional state.
    pub c1: f64,
    pub reward_other: ToyOtherRewards,
    pub transition_params: ToyTransitions,
    pub discount: f64,
    pub threshold_d: f64,
    /// Episode length used when the config is simulated.
    pub horizon: usize,
}

impl Default for ToyEnvConfig {
    fn default() -> Self {
        Self::default_acceptance()
    }
}

impl ToyEnvConfig {
    /// Sticky dynamics where engaging pays 1 in both states and costs 1 in the
    /// emotional state. The constrained optimum mixes "always engage" with
    /// "engage only when neutral".
    pub fn default_acceptance() -> Self {
        Self {
            r0: 1.0,
            c1: 1.0,
            reward_other: ToyOtherRewards {
                neutral_disengage: 0.0,
                emotional_engage: 1.0,
                emotional_disengage: 0.0,
            },
            transition_params: ToyTransitions {
                neutral_to_emotional: PerAction {
                    engage: 0.05,
                    disengage: 0.05,
                },
                emotional_to_neutral: PerAction {
                    engage: 0.3,
                    disengage: 0.6,
                },
            },
            discount: 0.9,
            threshold_d: 0.5,
            horizon: 150,
        }
    }

    /// Engaging the emotional user is the single most rewarding move, and it
    /// keeps the user in the emotional state.
    pub fn adversarial() -> Self {
        Self {
            r0: 1.0,
            c1: 1.0,
            reward_other: ToyOtherRewards {
                neutral_disengage: 0.0,
                emotional_engage: 2.0,
                emotional_disengage: 0.0,
            },
            transition_params: ToyTransitions {
                neutral_to_emotional: PerAction {
                    engage: 0.3,
                    disengage: 0.3,
                },
                emotional_to_neutral: PerAction {
                    engage: 0.1,
                    disengage: 0.5,
                },
            },
            discount: 0.9,
            threshold_d: 1.0,
            horizon: 150,
        }
    }

    pub fn validate(&self) -> Result<(), CmdpError> {
        let probs = [
            self.transition_params.neutral_to_emotional.engage,
            self.transition_params.neutral_to_emotional.disengage,
            self.transition_params.emotional_to_neutral.engage,
            self.transition_params.emotional_to_neutral.disengage,
        ];
        for (i, p) in probs.into_iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                let (state, action) = (i / 2, i % 2);
                return Err(CmdpError::Probability {
                    state,
                    action,
                    next: 1 - state,
                    value: p,
                });
            }
        }
        if !(self.c1.is_finite() && self.c1 >= 0.0) {
            return Err(CmdpError::Cost {
                state: EMOTIONAL,
                action: ENGAGE,
                value: self.c1,
            });
        }
        Ok(())
    }
}

/// Builds the validated 2x2 CMDP for a toy configuration.
pub fn toy_env_build(config: &ToyEnvConfig) -> Result<CmdpSpec, CmdpError> {
    config.validate()?;
    let tp = &config.transition_params;
    let mut transition = vec![vec![vec![0.0; 2]; 2]; 2];
    for a in [ENGAGE, DISENGAGE] {
        let to_emo = tp.neutral_to_emotional.get(a);
        transition[NEUTRAL][a] = vec![1.0 - to_emo, to_emo];
        let to_neu = tp.emotional_to_neutral.get(a);
        transition[EMOTIONAL][a] = vec![to_neu, 1.0 - to_neu];
    }
    let ro = &config.reward_other;
    let reward = vec![
        vec![config.r0, ro.neutral_disengage],
        vec![ro.emotional_engage, ro.emotional_disengage],
    ];
    let cost = vec![vec![0.0, 0.0], vec![config.c1, 0.0]];
    validate_cmdp(CmdpSpec {
        n_states: 2,
        n_actions: 2,
        transition,
        reward,
        cost,
        discount: config.discount,
        threshold_d: config.threshold_d,
        start: None,
    })
}

/// Simulator for the toy CMDP.
///
/// The neutral state carries latent affect +1 and the emotional state -1;
/// engaging has valence +1 and disengaging -1, so alignment rewards engaging
/// a neutral user and stepping back from an emotional one.
pub fn toy_env(config: &ToyEnvConfig) -> Result<TabularEnv, CmdpError> {
    let spec = toy_env_build(config)?;
    Ok(TabularEnv::new(spec, config.horizon)?.with_annotation(StateAnnotation {
        latent: vec![1.0, -1.0],
        valence: vec![1, -1],
    }))
}
