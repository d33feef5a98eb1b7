use rand::Rng;

use crate::cmdp::{validate_cmdp, CmdpError, CmdpSpec, StepSignals, Transition};
use crate::rollout::{EnvError, Environment, Observation, Step};
use crate::rng::SimRng;

use super::sign_agreement;

/// Per-state latent affect and per-action valence for a tabular environment.
#[derive(Debug, Clone, PartialEq)]
pub struct StateAnnotation {
    pub latent: Vec<f64>,
    pub valence: Vec<i8>,
}

/// Samples episodes directly from a [`CmdpSpec`].
///
/// Each step draws exactly one uniform for the successor state; reset draws
/// one uniform for the start state.
#[derive(Debug, Clone)]
pub struct TabularEnv {
    spec: CmdpSpec,
    horizon: usize,
    annotation: Option<StateAnnotation>,
    state: Option<usize>,
    t: usize,
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

impl TabularEnv {
    pub fn new(spec: CmdpSpec, horizon: usize) -> Result<Self, CmdpError> {
        let spec = validate_cmdp(spec)?;
        Ok(Self {
            spec,
            horizon,
            annotation: None,
            state: None,
            t: 0,
        })
    }

    pub fn with_annotation(mut self, annotation: StateAnnotation) -> Self {
        assert_eq!(annotation.latent.len(), self.spec.n_states);
        assert_eq!(annotation.valence.len(), self.spec.n_actions);
        self.annotation = Some(annotation);
        self
    }

    pub fn spec(&self) -> &CmdpSpec {
        &self.spec
    }

    fn latent(&self, s: usize) -> f64 {
        self.annotation.as_ref().map_or(0.0, |a| a.latent[s])
    }

    fn observe(&self, s: usize) -> Observation {
        Observation {
            index: s,
            readiness: self.latent(s),
        }
    }
}

impl Environment for TabularEnv {
    fn n_states(&self) -> usize {
        self.spec.n_states
    }

    fn n_actions(&self) -> usize {
        self.spec.n_actions
    }

    fn discount(&self) -> f64 {
        self.spec.discount
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn action_valences(&self) -> Vec<i8> {
        match &self.annotation {
            Some(a) => a.valence.clone(),
            None => vec![0; self.spec.n_actions],
        }
    }

    fn reset(&mut self, rng: &mut SimRng) -> Observation {
        let start = self.spec.start_distribution();
        let s = sample_index(&start, rng.gen());
        self.state = Some(s);
        self.t = 0;
        self.observe(s)
    }

    fn step(&mut self, action: usize, rng: &mut SimRng) -> Result<Step, EnvError> {
        let s = self.state.ok_or(EnvError::NotReset)?;
        if self.t >= self.horizon {
            return Err(EnvError::EpisodeFinished);
        }
        if action >= self.spec.n_actions {
            return Err(EnvError::InvalidAction {
                action,
                n_actions: self.spec.n_actions,
            });
        }
        let next = sample_index(&self.spec.transition[s][action], rng.gen());
        let reward = self.spec.reward[s][action];
        let cost = self.spec.cost[s][action];
        let signals = self.annotation.as_ref().map(|a| StepSignals {
            r_eng: reward,
            r_emo: sign_agreement(a.latent[s], a.valence[action]),
            latent_e: a.latent[s],
        });
        self.state = Some(next);
        self.t += 1;
        Ok(Step {
            transition: Transition {
                state: s,
                action,
                reward,
                cost,
                next_state: next,
                signals,
            },
            observation: self.observe(next),
            done: self.t >= self.horizon,
        })
    }
}
