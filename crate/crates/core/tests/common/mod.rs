#![allow(dead_code)]

use rand::Rng;
use rrl_core::cmdp::{discounted_cost, discounted_return, CmdpSpec, StationaryPolicy};
use rrl_core::envs::TabularEnv;
use rrl_core::rng::SimRng;
use rrl_core::rollout;

/// Random valid CMDP with sparse-ish transitions and nonnegative costs.
pub fn random_cmdp(rng: &mut SimRng, n_states: usize, n_actions: usize, discount: f64) -> CmdpSpec {
    let row = |rng: &mut SimRng| {
        let mut w: Vec<f64> = (0..n_states)
            .map(|_| {
                if rng.gen::<f64>() < 0.3 {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[rng.gen_range(0..n_states)] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    let transition = (0..n_states)
        .map(|_| (0..n_actions).map(|_| row(rng)).collect())
        .collect();
    let reward = (0..n_states)
        .map(|_| (0..n_actions).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let cost = (0..n_states)
        .map(|_| {
            (0..n_actions)
                .map(|_| {
                    if rng.gen::<f64>() < 0.4 {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    CmdpSpec {
        n_states,
        n_actions,
        transition,
        reward,
        cost,
        discount,
        threshold_d: 1.0,
        start: None,
    }
}

/// Horizon after which the discounted tail is below `tol` of the per-step scale.
pub fn horizon_for(discount: f64, tol: f64) -> usize {
    (tol.ln() / discount.ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub reward_mean: f64,
    pub reward_se: f64,
    pub cost_mean: f64,
    pub cost_se: f64,
    pub steps: usize,
    /// Bound on the discounted reward or cost mass lost to truncation.
    pub tail_bound: f64,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Monte-Carlo policy values from truncated rollouts totalling at least
/// `min_steps` transitions.
pub fn monte_carlo_values(
    spec: &CmdpSpec,
    policy: &StationaryPolicy,
    min_steps: usize,
    seed: u64,
) -> McEstimate {
    let horizon = horizon_for(spec.discount, 1e-12);
    let mut env = TabularEnv::new(spec.clone(), horizon).unwrap();
    let mut pol = policy.clone();
    let (mut rs, mut cs) = (Vec::new(), Vec::new());
    let mut steps = 0;
    let mut episode = 0u64;
    while steps < min_steps {
        let t = rollout(&mut env, &mut pol, horizon, seed.wrapping_add(episode)).unwrap();
        steps += t.len();
        rs.push(discounted_return(&t, spec.discount));
        cs.push(discounted_cost(&t, spec.discount));
        episode += 1;
    }
    let (reward_mean, reward_se) = mean_se(&rs);
    let (cost_mean, cost_se) = mean_se(&cs);
    let scale = spec
        .reward
        .iter()
        .chain(&spec.cost)
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    McEstimate {
        tail_bound: spec.discount.powi(horizon as i32) * scale / (1.0 - spec.discount),
        reward_mean,
        reward_se,
        cost_mean,
        cost_se,
        steps,
    }
}

impl McEstimate {
    /// Reward and cost each within `k` standard errors plus the truncation bound.
    pub fn agrees(&self, exact_reward: f64, exact_cost: f64, k: f64) -> (bool, bool) {
        (
            within_se(
                exact_reward,
                self.reward_mean,
                self.reward_se,
                k,
                self.tail_bound,
            ),
            within_se(exact_cost, self.cost_mean, self.cost_se, k, self.tail_bound),
        )
    }
}

/// `|exact - mean| <= k * se + slack`, with rounding allowance when the
/// standard error vanishes.
pub fn within_se(exact: f64, mean: f64, se: f64, k: f64, slack: f64) -> bool {
    (exact - mean).abs() <= k * se + slack + 1e-9 * exact.abs().max(1.0)
}
