use serde::{Deserialize, Serialize};

use crate::cmdp::Transition;

use super::explore::argmax;

/// Tabular action values for the scalarized reward channel and the raw cost
/// channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCritic {
    pub q_reward: Vec<Vec<f64>>,
    pub q_cost: Vec<Vec<f64>>,
    pub learning_rate: f64,
}

impl DualCritic {
    pub fn new(n_states: usize, n_actions: usize, learning_rate: f64) -> Self {
        Self {
            q_reward: vec![vec![0.0; n_actions]; n_states],
            q_cost: vec![vec![0.0; n_actions]; n_states],
            learning_rate,
        }
    }

    pub fn greedy_policy(&self) -> Vec<usize> {
        self.q_reward.iter().map(|row| argmax(row)).collect()
    }

    /// First non-finite entry as `(state, action, value)`.
    pub fn first_non_finite(&self) -> Option<(usize, usize, f64)> {
        for table in [&self.q_reward, &self.q_cost] {
            for (s, row) in table.iter().enumerate() {
                for (a, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Some((s, a, v));
                    }
                }
            }
        }
        None
    }
}

/// One-step temporal-difference update of both channels.
///
/// `q_reward` moves toward `scalarized + discount * q_reward[s'][a*]` and
/// `q_cost` toward `cost + discount * q_cost[s'][a*]`, where `a*` is greedy
/// with respect to the scalarized values at `s'`. A terminal step drops the
/// bootstrap term.
pub fn q_update(
    critic: &mut DualCritic,
    transition: &Transition,
    scalarized: f64,
    discount: f64,
    terminal: bool,
) {
    let (s, a, next) = (transition.state, transition.action, transition.next_state);
    let (target_r, target_c) = if terminal {
        (scalarized, transition.cost)
    } else {
        let best = argmax(&critic.q_reward[next]);
        (
            scalarized + discount * critic.q_reward[next][best],
            transition.cost + discount * critic.q_cost[next][best],
        )
    };
    let lr = critic.learning_rate;
    critic.q_reward[s][a] += lr * (target_r - critic.q_reward[s][a]);
    critic.q_cost[s][a] += lr * (target_c - critic.q_cost[s][a]);
}
