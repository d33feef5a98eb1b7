use crate::envs::synthetic::{SyntheticEnvConfig, CHECK_IN, WAIT};
use crate::envs::toy::{DISENGAGE, ENGAGE};
use crate::rng::SimRng;
use crate::rollout::{Observation, Policy};

/// Static heuristic: step back when the observed readiness signals distress,
/// otherwise reach out. Never learns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleBasedPolicy {
    pub distress_threshold: f64,
    pub engage_action: usize,
    pub withdraw_action: usize,
}

impl RuleBasedPolicy {
    pub fn for_synthetic(config: &SyntheticEnvConfig) -> Self {
        Self {
            distress_threshold: config.distress_threshold,
            engage_action: CHECK_IN,
            withdraw_action: WAIT,
        }
    }

    /// The toy environment reports readiness +1 (neutral) or -1 (emotional).
    pub fn for_toy() -> Self {
        Self {
            distress_threshold: 0.0,
            engage_action: ENGAGE,
            withdraw_action: DISENGAGE,
        }
    }

    pub fn choose(&self, readiness: f64) -> usize {
        if readiness < self.distress_threshold {
            self.withdraw_action
        } else {
            self.engage_action
        }
    }
}

pub fn rule_based_policy(policy: &RuleBasedPolicy, observation: &Observation) -> usize {
    policy.choose(observation.readiness)
}

impl Policy for RuleBasedPolicy {
    fn act(&mut self, obs: &Observation, _rng: &mut SimRng) -> usize {
        self.choose(obs.readiness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_table() {
        let p = RuleBasedPolicy::for_synthetic(&SyntheticEnvConfig::default());
        let obs = |readiness| Observation { index: 0, readiness };
        assert_eq!(rule_based_policy(&p, &obs(-0.8)), WAIT);
        assert_eq!(rule_based_policy(&p, &obs(0.4)), CHECK_IN);
        for _ in 0..3 {
            assert_eq!(rule_based_policy(&p, &obs(0.1)), CHECK_IN);
        }
        let toy = RuleBasedPolicy::for_toy();
        assert_eq!(toy.choose(-1.0), DISENGAGE);
        assert_eq!(toy.choose(1.0), ENGAGE);
    }
}
