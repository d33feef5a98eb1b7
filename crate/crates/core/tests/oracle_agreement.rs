mod common;

use common::monte_carlo_values;
use rrl_core::cmdp::StationaryPolicy;
use rrl_core::envs::toy::{toy_env, toy_env_build, ToyEnvConfig, EMOTIONAL, ENGAGE};
use rrl_core::oracle::enumerate_policies;
use rrl_core::rollout::{rollout, GreedyPolicy};
use serde::Deserialize;

#[derive(Deserialize)]
struct GoldenPoint {
    actions: Vec<usize>,
    value_reward: f64,
    value_cost: f64,
}

#[derive(Deserialize)]
struct Golden {
    default_acceptance: Vec<GoldenPoint>,
    adversarial: Vec<GoldenPoint>,
}

fn golden() -> Golden {
    serde_json::from_str(include_str!("golden/toy_policies.json")).unwrap()
}

#[test]
fn toy_tables_match_golden() {
    let g = golden();
    for (cfg, table) in [
        (ToyEnvConfig::default_acceptance(), &g.default_acceptance),
        (ToyEnvConfig::adversarial(), &g.adversarial),
    ] {
        let pts = enumerate_policies(&toy_env_build(&cfg).unwrap()).unwrap();
        assert_eq!(pts.len(), table.len());
        for (p, gp) in pts.iter().zip(table) {
            assert_eq!(p.actions, gp.actions);
            assert!((p.value_reward - gp.value_reward).abs() < 1e-9);
            assert!((p.value_cost - gp.value_cost).abs() < 1e-9);
        }
    }
}

#[test]
fn toy_values_match_monte_carlo() {
    for cfg in [ToyEnvConfig::default_acceptance(), ToyEnvConfig::adversarial()] {
        let spec = toy_env_build(&cfg).unwrap();
        for (i, p) in enumerate_policies(&spec).unwrap().iter().enumerate() {
            let mc = monte_carlo_values(&spec, &p.policy, 1_000_000, 4242 + i as u64);
            assert!(mc.steps >= 1_000_000);
            assert!(
                mc.agrees(p.value_reward, p.value_cost, 3.0).0,
                "policy {:?}: exact {} mc {} se {}",
                p.actions,
                p.value_reward,
                mc.reward_mean,
                mc.reward_se
            );
            assert!(
                mc.agrees(p.value_reward, p.value_cost, 3.0).1,
                "policy {:?}: exact cost {} mc {} se {}",
                p.actions,
                p.value_cost,
                mc.cost_mean,
                mc.cost_se
            );
        }
    }
}

/// Long-run fraction of costly steps under always-engage equals the
/// stationary mass of the emotional state times the cost.
#[test]
fn always_engage_cost_frequency_matches_stationary_occupancy() {
    let mut cfg = ToyEnvConfig::default_acceptance();
    cfg.horizon = 400_000;
    let spec = toy_env_build(&cfg).unwrap();
    let mut dist = vec![1.0, 0.0];
    for _ in 0..10_000 {
        let mut next = vec![0.0; 2];
        for s in 0..2 {
            for s2 in 0..2 {
                next[s2] += dist[s] * spec.transition[s][ENGAGE][s2];
            }
        }
        dist = next;
    }
    let expected = dist[EMOTIONAL] * cfg.c1;
    assert!((dist[EMOTIONAL] - 0.05 / 0.35).abs() < 1e-12);

    let mut env = toy_env(&cfg).unwrap();
    let mut policy = GreedyPolicy {
        actions: vec![ENGAGE, ENGAGE],
    };
    let traj = rollout(&mut env, &mut policy, cfg.horizon, 99).unwrap();
    let burn_in = 1_000;
    let tail = &traj.transitions[burn_in..];
    let freq = tail.iter().map(|t| t.cost).sum::<f64>() / tail.len() as f64;
    // The chain mixes in a few steps; 4e5 steps give a standard error near 0.002.
    assert!((freq - expected).abs() < 0.01, "freq {freq} expected {expected}");
}

#[test]
fn randomized_policy_matches_monte_carlo() {
    let spec = toy_env_build(&ToyEnvConfig::adversarial()).unwrap();
    let policy = StationaryPolicy {
        action_probabilities: vec![vec![0.3, 0.7], vec![0.6, 0.4]],
    };
    let exact = rrl_core::exact_policy_values(&spec, &policy).unwrap();
    let mc = monte_carlo_values(&spec, &policy, 200_000, 7);
    assert_eq!(mc.agrees(exact.reward[0], exact.cost[0], 3.0), (true, true));
}
