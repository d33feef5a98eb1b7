//! Tabular constrained MDPs: specification, policies, trajectories and exact
//! policy evaluation.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, SingularMatrix};

/// Tolerance on probability rows (transition kernel, policies, start distribution).
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmdpError {
    #[error("{what} must be non-empty")]
    Empty { what: &'static str },
    #[error("{what} has shape mismatch: expected {expected}, found {found}")]
    Shape {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("transition row ({state},{action}) sums to {sum}")]
    RowSum {
        state: usize,
        action: usize,
        sum: f64,
    },
    #[error("transition entry ({state},{action},{next}) = {value} is outside [0,1]")]
    Probability {
        state: usize,
        action: usize,
        next: usize,
        value: f64,
    },
    #[error("reward ({state},{action}) = {value} is not finite")]
    Reward {
        state: usize,
        action: usize,
        value: f64,
    },
    #[error("cost ({state},{action}) = {value} is negative or not finite")]
    Cost {
        state: usize,
        action: usize,
        value: f64,
    },
    #[error("discount out of range: {0} (must lie strictly inside (0,1))")]
    Discount(f64),
    #[error("threshold_d out of range: {0} (must be finite and >= 0)")]
    Threshold(f64),
    #[error("start distribution invalid: {0}")]
    Start(String),
    #[error("policy row for state {state} invalid: {reason}")]
    Policy { state: usize, reason: String },
    #[error("policy evaluation failed: {0}")]
    Singular(#[from] SingularMatrix),
}

/// Full tabular description of a constrained MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmdpSpec {
    pub n_states: usize,
    pub n_actions: usize,
    /// `transition[s][a][s']`
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a]`
    pub reward: Vec<Vec<f64>>,
    /// `cost[s][a]`, non-negative.
    pub cost: Vec<Vec<f64>>,
    pub discount: f64,
    pub threshold_d: f64,
    /// Start-state distribution. `None` starts deterministically in state 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

impl CmdpSpec {
    pub fn validate(self) -> Result<Self, CmdpError> {
        validate_cmdp(self)
    }

    pub fn start_distribution(&self) -> Vec<f64> {
        match &self.start {
            Some(p) => p.clone(),
            None => {
                let mut p = vec![0.0; self.n_states];
                p[0] = 1.0;
                p
            }
        }
    }

    /// Number of deterministic stationary policies, saturating at `u128::MAX`.
    pub fn deterministic_policy_count(&self) -> u128 {
        let mut count: u128 = 1;
        for _ in 0..self.n_states {
            count = count.saturating_mul(self.n_actions as u128);
        }
        count
    }
}

fn check_len(what: impl Into<String>, expected: usize, found: usize) -> Result<(), CmdpError> {
    if expected != found {
        return Err(CmdpError::Shape {
            what: what.into(),
            expected,
            found,
        });
    }
    Ok(())
}

/// Checks every structural invariant and returns the spec unchanged.
///
/// Errors name the first violated invariant together with its indices.
pub fn validate_cmdp(spec: CmdpSpec) -> Result<CmdpSpec, CmdpError> {
    let (ns, na) = (spec.n_states, spec.n_actions);
    if ns == 0 {
        return Err(CmdpError::Empty { what: "state space" });
    }
    if na == 0 {
        return Err(CmdpError::Empty {
            what: "action space",
        });
    }
    if !(spec.discount > 0.0 && spec.discount < 1.0) {
        return Err(CmdpError::Discount(spec.discount));
    }
    if !(spec.threshold_d.is_finite() && spec.threshold_d >= 0.0) {
        return Err(CmdpError::Threshold(spec.threshold_d));
    }
    check_len("transition", ns, spec.transition.len())?;
    check_len("reward", ns, spec.reward.len())?;
    check_len("cost", ns, spec.cost.len())?;
    for s in 0..ns {
        check_len(format!("transition[{s}]"), na, spec.transition[s].len())?;
        check_len(format!("reward[{s}]"), na, spec.reward[s].len())?;
        check_len(format!("cost[{s}]"), na, spec.cost[s].len())?;
        for a in 0..na {
            let row = &spec.transition[s][a];
            check_len(format!("transition[{s}][{a}]"), ns, row.len())?;
            for (next, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(CmdpError::Probability {
                        state: s,
                        action: a,
                        next,
                        value: p,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(CmdpError::RowSum {
                    state: s,
                    action: a,
                    sum,
                });
            }
            let r = spec.reward[s][a];
            if !r.is_finite() {
                return Err(CmdpError::Reward {
                    state: s,
                    action: a,
                    value: r,
                });
            }
            let c = spec.cost[s][a];
            if !(c.is_finite() && c >= 0.0) {
                return Err(CmdpError::Cost {
                    state: s,
                    action: a,
                    value: c,
                });
            }
        }
    }
    if let Some(start) = &spec.start {
        if start.len() != ns {
            return Err(CmdpError::Start(format!(
                "length {} for {ns} states",
                start.len()
            )));
        }
        if start.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(CmdpError::Start("entry outside [0,1]".into()));
        }
        let sum: f64 = start.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(CmdpError::Start(format!("sums to {sum}")));
        }
    }
    Ok(spec)
}

/// Per-step signals emitted by environments that model the user's affect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSignals {
    pub r_eng: f64,
    pub r_emo: f64,
    /// Latent affective readiness at the step's source state.
    pub latent_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub cost: f64,
    pub next_state: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signals: Option<StepSignals>,
}

impl Transition {
    /// A step counts as a safety violation when it incurs positive cost.
    pub fn violation(&self) -> bool {
        self.cost > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub transitions: Vec<Transition>,
    pub seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Each transition's `next_state` must be the following transition's `state`.
    pub fn is_chained(&self) -> bool {
        self.transitions
            .windows(2)
            .all(|w| w[0].next_state == w[1].state)
    }
}

fn discounted_sum(values: impl Iterator<Item = f64>, discount: f64) -> f64 {
    let mut weight = 1.0;
    let mut acc = 0.0;
    for v in values {
        acc += weight * v;
        weight *= discount;
    }
    acc
}

/// `sum_t discount^t * reward_t`.
pub fn discounted_return(traj: &Trajectory, discount: f64) -> f64 {
    discounted_sum(traj.transitions.iter().map(|t| t.reward), discount)
}

/// `sum_t discount^t * cost_t`.
pub fn discounted_cost(traj: &Trajectory, discount: f64) -> f64 {
    discounted_sum(traj.transitions.iter().map(|t| t.cost), discount)
}

/// Stationary, possibly randomized, policy `pi(a|s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPolicy {
    pub action_probabilities: Vec<Vec<f64>>,
}

impl StationaryPolicy {
    pub fn deterministic(actions: &[usize], n_actions: usize) -> Self {
        let action_probabilities = actions
            .iter()
            .map(|&a| {
                assert!(a < n_actions, "action {a} out of range");
                let mut row = vec![0.0; n_actions];
                row[a] = 1.0;
                row
            })
            .collect();
        Self {
            action_probabilities,
        }
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Self {
            action_probabilities: vec![vec![1.0 / n_actions as f64; n_actions]; n_states],
        }
    }

    pub fn validate(&self, n_states: usize, n_actions: usize) -> Result<(), CmdpError> {
        check_len("policy", n_states, self.action_probabilities.len())?;
        for (s, row) in self.action_probabilities.iter().enumerate() {
            check_len(format!("policy[{s}]"), n_actions, row.len())?;
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CmdpError::Policy {
                    state: s,
                    reason: "entry outside [0,1]".into(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(CmdpError::Policy {
                    state: s,
                    reason: format!("row sums to {sum}"),
                });
            }
        }
        Ok(())
    }

    /// The chosen action per state when every row is one-hot.
    pub fn as_deterministic(&self) -> Option<Vec<usize>> {
        self.action_probabilities
            .iter()
            .map(|row| {
                let mut hot = None;
                for (a, &p) in row.iter().enumerate() {
                    if p == 1.0 {
                        hot = Some(a);
                    } else if p != 0.0 {
                        return None;
                    }
                }
                hot
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let row = &self.action_probabilities[state];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        // Rounding left u above the accumulated mass; take the last supported action.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
    }
}

/// State-value vectors of a policy for the reward and cost channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyValues {
    pub reward: Vec<f64>,
    pub cost: Vec<f64>,
}

impl PolicyValues {
    /// Values averaged over a start distribution: `(reward, cost)`.
    pub fn at(&self, start: &[f64]) -> (f64, f64) {
        let r = self.reward.iter().zip(start).map(|(v, p)| v * p).sum();
        let c = self.cost.iter().zip(start).map(|(v, p)| v * p).sum();
        (r, c)
    }
}

/// Solves `V = r_pi + discount * P_pi V` for both channels by direct elimination.
pub fn exact_policy_values(
    spec: &CmdpSpec,
    policy: &StationaryPolicy,
) -> Result<PolicyValues, CmdpError> {
    let n = spec.n_states;
    policy.validate(n, spec.n_actions)?;
    let mut a = vec![0.0; n * n];
    let mut r_pi = vec![0.0; n];
    let mut c_pi = vec![0.0; n];
    for s in 0..n {
        a[s * n + s] = 1.0;
        for (act, &p) in policy.action_probabilities[s].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            r_pi[s] += p * spec.reward[s][act];
            c_pi[s] += p * spec.cost[s][act];
            for (next, &q) in spec.transition[s][act].iter().enumerate() {
                a[s * n + next] -= spec.discount * p * q;
            }
        }
    }
    let mut sol = linalg::solve(&a, n, &[r_pi, c_pi])?;
    let cost = sol.pop().expect("two columns");
    let reward = sol.pop().expect("two columns");
    Ok(PolicyValues { reward, cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_state(p: f64) -> CmdpSpec {
        CmdpSpec {
            n_states: 2,
            n_actions: 1,
            transition: vec![vec![vec![p, 1.0 - p]], vec![vec![1.0 - p, p]]],
            reward: vec![vec![1.0], vec![0.0]],
            cost: vec![vec![0.0], vec![1.0]],
            discount: 0.9,
            threshold_d: 1.0,
            start: None,
        }
    }

    fn traj(rewards: &[f64], costs: &[f64]) -> Trajectory {
        Trajectory {
            transitions: rewards
                .iter()
                .zip(costs)
                .map(|(&reward, &cost)| Transition {
                    state: 0,
                    action: 0,
                    reward,
                    cost,
                    next_state: 0,
                    signals: None,
                })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn symmetric_rows_accepted() {
        assert!(validate_cmdp(two_state(0.5)).is_ok());
    }

    #[test]
    fn row_sum_error_names_row() {
        let mut spec = two_state(0.5);
        spec.transition[1][0] = vec![0.51, 0.5];
        match validate_cmdp(spec).unwrap_err() {
            CmdpError::RowSum { state, action, sum } => {
                assert_eq!((state, action), (1, 0));
                assert!((sum - 1.01).abs() < 1e-12);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn discount_one_rejected() {
        let mut spec = two_state(0.5);
        spec.discount = 1.0;
        let err = validate_cmdp(spec).unwrap_err();
        assert!(err.to_string().contains("discount out of range"));
    }

    #[test]
    fn negative_cost_rejected() {
        let mut spec = two_state(0.5);
        spec.cost[0][0] = -0.1;
        assert!(matches!(
            validate_cmdp(spec),
            Err(CmdpError::Cost { state: 0, action: 0, .. })
        ));
    }

    #[test]
    fn probability_out_of_range_rejected() {
        let mut spec = two_state(0.5);
        spec.transition[0][0] = vec![1.5, -0.5];
        assert!(matches!(
            validate_cmdp(spec),
            Err(CmdpError::Probability { .. })
        ));
    }

    #[test]
    fn bad_start_rejected() {
        let mut spec = two_state(0.5);
        spec.start = Some(vec![0.3, 0.3]);
        assert!(matches!(validate_cmdp(spec), Err(CmdpError::Start(_))));
    }

    #[test]
    fn discounted_sums() {
        assert_eq!(discounted_return(&Trajectory::default(), 0.9), 0.0);
        assert_eq!(discounted_return(&traj(&[1.0, 1.0, 1.0], &[0.0; 3]), 0.5), 1.75);
        assert_eq!(discounted_return(&traj(&[-3.25], &[0.0]), 0.123), -3.25);
        assert_eq!(discounted_cost(&Trajectory::default(), 0.9), 0.0);
        let c = discounted_cost(&traj(&[0.0; 3], &[0.0, 0.0, 2.0]), 0.9);
        assert!((c - 1.62).abs() < 1e-12);
        assert_eq!(discounted_cost(&traj(&[5.0; 4], &[0.0; 4]), 0.9), 0.0);
    }

    #[test]
    fn zero_reward_gives_zero_values() {
        let mut spec = two_state(0.3);
        spec.reward = vec![vec![0.0], vec![0.0]];
        let v = exact_policy_values(&spec, &StationaryPolicy::uniform(2, 1)).unwrap();
        assert_eq!(v.reward, vec![0.0, 0.0]);
    }

    #[test]
    fn single_state_geometric_series() {
        let spec = CmdpSpec {
            n_states: 1,
            n_actions: 1,
            transition: vec![vec![vec![1.0]]],
            reward: vec![vec![1.0]],
            cost: vec![vec![0.0]],
            discount: 0.5,
            threshold_d: 0.0,
            start: None,
        };
        let v = exact_policy_values(&spec, &StationaryPolicy::deterministic(&[0], 1)).unwrap();
        assert!((v.reward[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn deterministic_roundtrip() {
        let p = StationaryPolicy::deterministic(&[1, 0, 2], 3);
        assert_eq!(p.as_deterministic(), Some(vec![1, 0, 2]));
        assert_eq!(StationaryPolicy::uniform(2, 2).as_deterministic(), None);
    }

    #[test]
    fn chain_check() {
        let mut t = traj(&[0.0, 0.0], &[0.0, 0.0]);
        assert!(t.is_chained());
        t.transitions[0].next_state = 1;
        assert!(!t.is_chained());
    }
}
