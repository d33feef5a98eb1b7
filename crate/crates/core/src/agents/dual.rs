use serde::{Deserialize, Serialize};

use super::AgentError;

/// Lagrange multiplier and the parameters of its projected dual ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeState {
    pub lambda: f64,
    pub dual_step_size: f64,
    pub threshold_d: f64,
}

impl LagrangeState {
    pub fn new(lambda: f64, dual_step_size: f64, threshold_d: f64) -> Result<Self, AgentError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(AgentError::Param {
                name: "initial_lambda",
                value: lambda,
            });
        }
        if !(dual_step_size.is_finite() && dual_step_size > 0.0) {
            return Err(AgentError::Param {
                name: "dual_step_size",
                value: dual_step_size,
            });
        }
        if !(threshold_d.is_finite() && threshold_d >= 0.0) {
            return Err(AgentError::Param {
                name: "threshold_d",
                value: threshold_d,
            });
        }
        Ok(Self {
            lambda,
            dual_step_size,
            threshold_d,
        })
    }

    /// `lambda' = max(0, lambda + step * (estimated_cost - d))`.
    pub fn dual_update(&self, estimated_cost: f64) -> Self {
        let raw = self.lambda + self.dual_step_size * (estimated_cost - self.threshold_d);
        Self {
            lambda: raw.max(0.0),
            ..*self
        }
    }
}

pub fn dual_update(ls: &LagrangeState, estimated_cost: f64) -> LagrangeState {
    ls.dual_update(estimated_cost)
}
