mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rrl_core::cmdp::{exact_policy_values, CmdpSpec, StationaryPolicy};
use rrl_core::rng::SimRng;

fn value_iteration(spec: &CmdpSpec, policy: &StationaryPolicy, sweeps: usize) -> (Vec<f64>, Vec<f64>) {
    let n = spec.n_states;
    let (mut v, mut w) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..sweeps {
        let (mut v2, mut w2) = (vec![0.0; n], vec![0.0; n]);
        for s in 0..n {
            for (a, &p) in policy.action_probabilities[s].iter().enumerate() {
                let ev: f64 = (0..n).map(|s2| spec.transition[s][a][s2] * v[s2]).sum();
                let ew: f64 = (0..n).map(|s2| spec.transition[s][a][s2] * w[s2]).sum();
                v2[s] += p * (spec.reward[s][a] + spec.discount * ev);
                w2[s] += p * (spec.cost[s][a] + spec.discount * ew);
            }
        }
        v = v2;
        w = w2;
    }
    (v, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn linear_solve_equals_value_iteration_limit(
        seed in any::<u64>(),
        n_states in 1usize..=6,
        n_actions in 1usize..=3,
        discount in 0.05f64..0.98,
    ) {
        let mut rng = SimRng::seed_from_u64(seed);
        let spec = common::random_cmdp(&mut rng, n_states, n_actions, discount);
        let mut policy = StationaryPolicy::uniform(n_states, n_actions);
        if seed % 2 == 0 {
            let actions: Vec<usize> = (0..n_states).map(|s| (s + seed as usize) % n_actions).collect();
            policy = StationaryPolicy::deterministic(&actions, n_actions);
        }
        let exact = exact_policy_values(&spec, &policy).unwrap();
        let (v, w) = value_iteration(&spec, &policy, 1000);
        for s in 0..n_states {
            prop_assert!((exact.reward[s] - v[s]).abs() < 1e-6);
            prop_assert!((exact.cost[s] - w[s]).abs() < 1e-6);
            prop_assert!(exact.cost[s] >= -1e-12);
        }
    }
}
