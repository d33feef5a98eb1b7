use serde::{Deserialize, Serialize};

use super::AgentError;

/// Weights of the composite reward
/// `w_eng * r_eng + w_emo * r_emo - w_safety * 1{violation}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeWeights {
    pub w_eng: f64,
    pub w_emo: f64,
    pub w_safety: f64,
}

impl CompositeWeights {
    pub const ENGAGEMENT_ONLY: Self = Self {
        w_eng: 1.0,
        w_emo: 0.0,
        w_safety: 0.0,
    };

    pub fn new(w_eng: f64, w_emo: f64, w_safety: f64) -> Result<Self, AgentError> {
        let w = Self {
            w_eng,
            w_emo,
            w_safety,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let all = [self.w_eng, self.w_emo, self.w_safety];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(AgentError::Weights(*self));
        }
        if all.iter().all(|&w| w == 0.0) {
            return Err(AgentError::Weights(*self));
        }
        Ok(())
    }
}

pub fn composite_reward(r_eng: f64, r_emo: f64, violation: bool, w: &CompositeWeights) -> f64 {
    let indicator = if violation { 1.0 } else { 0.0 };
    w.w_eng * r_eng + w.w_emo * r_emo - w.w_safety * indicator
}

/// Per-step integrand of the Lagrangian: `r - lambda * c`.
///
/// The constant `lambda * d` shifts the dual objective only and is left out.
pub fn lagrangian_scalarize(r: f64, c: f64, lambda: f64) -> f64 {
    r - lambda * c
}
