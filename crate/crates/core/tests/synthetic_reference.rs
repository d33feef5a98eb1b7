//! The synthetic environment checked against an independent straight-line
//! simulator and against the exact stationary law of its latent chain.

use rand::{Rng, SeedableRng};
use rrl_core::envs::synthetic::{Interval, SyntheticEnv, SyntheticEnvConfig, CHECK_IN};
use rrl_core::rng::SimRng;
use rrl_core::rollout::{rollout, Environment, Observation};

/// Minimal re-implementation of the user model from its written rules. Only
/// statistics are compared, so it draws from its own generator in its own
/// order.
struct Reference {
    engaged: usize,
    cost: f64,
    r_eng: f64,
    latent_sum: f64,
    steps: usize,
}

fn reference_run(cfg: &SyntheticEnvConfig, episodes: usize, seed: u64) -> Reference {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut out = Reference {
        engaged: 0,
        cost: 0.0,
        r_eng: 0.0,
        latent_sum: 0.0,
        steps: 0,
    };
    for _ in 0..episodes {
        let sev = rng.gen_range(0.0..1.0);
        let resp = rng.gen_range(0.0..1.0);
        let mut e: f64 = rng.gen_range(-0.6..0.6);
        for _ in 0..cfg.horizon {
            let a = rng.gen_range(0..5);
            let (valence, intensity, payoff) = match a {
                0 => (1, 1.0, 0.6),
                1 => (1, 1.0, 0.8),
                2 => (0, 0.0, 0.3),
                3 => (1, 2.0, 1.0),
                _ => (-1, 0.0, 0.0),
            };
            out.latent_sum += e;
            out.steps += 1;
            if valence == 1 {
                out.engaged += 1;
                out.r_eng += payoff * (1.0 + e) / 2.0;
                if e < -0.3 {
                    out.cost += intensity;
                }
            } else {
                out.r_eng += payoff;
            }
            let up = 0.2 * (0.5 + resp);
            let down = 0.2 * (0.5 + sev);
            let step = if rng.gen::<f64>() < 0.1 {
                if rng.gen::<f64>() < 0.5 {
                    up
                } else {
                    -down
                }
            } else if valence == 1 && e >= -0.3 {
                if rng.gen::<f64>() < 0.8 {
                    up
                } else {
                    0.0
                }
            } else if valence != 0 {
                if rng.gen::<f64>() < 0.6 {
                    -down
                } else {
                    0.0
                }
            } else {
                0.0
            };
            e = (e + step).clamp(-1.0, 1.0);
        }
    }
    out
}

/// Per-step averages of engagement, cost, engagement reward and latent
/// readiness under the uniformly random policy.
fn simulate_random(cfg: &SyntheticEnvConfig, episodes: usize) -> [f64; 4] {
    let mut env = SyntheticEnv::new(cfg.clone()).unwrap();
    let mut sums = [0.0; 4];
    let mut steps = 0usize;
    for ep in 0..episodes {
        let mut random = |_: &Observation, rng: &mut SimRng| rng.gen_range(0..5usize);
        let traj = rollout(&mut env, &mut random, cfg.horizon, ep as u64).unwrap();
        for t in &traj.transitions {
            steps += 1;
            if cfg.valence(t.action) > 0 {
                sums[0] += 1.0;
            }
            sums[1] += t.cost;
            sums[2] += t.reward;
            sums[3] += t.signals.unwrap().latent_e;
        }
    }
    sums.map(|x| x / steps as f64)
}

fn reference_averages(cfg: &SyntheticEnvConfig, episodes: usize, seed: u64) -> [f64; 4] {
    let r = reference_run(cfg, episodes, seed);
    let n = r.steps as f64;
    [r.engaged as f64 / n, r.cost / n, r.r_eng / n, r.latent_sum / n]
}

#[test]
fn random_policy_engagement_rate_matches_reference() {
    let cfg = SyntheticEnvConfig::default();
    // 1,000 episodes of 50 steps.
    let sim = simulate_random(&cfg, 1_000);
    let reference = reference_averages(&cfg, 1_000, 12345);
    assert!((sim[0] - reference[0]).abs() < 0.01, "{sim:?} vs {reference:?}");
}

#[test]
fn random_policy_dynamics_match_reference() {
    let cfg = SyntheticEnvConfig::default();
    // One million steps per side; standard errors are a few thousandths.
    let sim = simulate_random(&cfg, 20_000);
    let reference = reference_averages(&cfg, 20_000, 12345);
    let tolerance = [0.005, 0.01, 0.01, 0.015];
    for k in 0..4 {
        assert!(
            (sim[k] - reference[k]).abs() < tolerance[k],
            "statistic {k}: {sim:?} vs {reference:?}"
        );
    }
}

/// With both profile attributes fixed at 0.5 every move is 0.2, so the latent
/// readiness lives on the 11-point grid {-1, -0.8, ..., 1}.
#[test]
fn always_check_in_latent_mean_matches_stationary_chain() {
    let cfg = SyntheticEnvConfig {
        p_raise: 0.8,
        initial_latent: Interval::point(0.0),
        horizon: 400_000,
        profile: rrl_core::envs::synthetic::ProfilePopulation {
            severity: Interval::point(0.5),
            responsiveness: Interval::point(0.5),
            ..SyntheticEnvConfig::default().profile
        },
        ..SyntheticEnvConfig::default()
    };
    let grid: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
    let mut p = vec![vec![0.0; 11]; 11];
    for (i, &e) in grid.iter().enumerate() {
        let up = (i + 1).min(10);
        let down = i.saturating_sub(1);
        let noise = cfg.env_noise;
        p[i][up] += noise * 0.5;
        p[i][down] += noise * 0.5;
        if e >= cfg.distress_threshold {
            p[i][up] += (1.0 - noise) * cfg.p_raise;
            p[i][i] += (1.0 - noise) * (1.0 - cfg.p_raise);
        } else {
            p[i][down] += (1.0 - noise) * cfg.p_lower;
            p[i][i] += (1.0 - noise) * (1.0 - cfg.p_lower);
        }
    }
    let mut dist = vec![0.0; 11];
    dist[5] = 1.0;
    for _ in 0..100_000 {
        let mut next = vec![0.0; 11];
        for i in 0..11 {
            for j in 0..11 {
                next[j] += dist[i] * p[i][j];
            }
        }
        dist = next;
    }
    let stationary_mean: f64 = dist.iter().zip(&grid).map(|(q, e)| q * e).sum();

    let mut env = SyntheticEnv::new(cfg.clone()).unwrap();
    let mut always = |_: &Observation, _: &mut SimRng| CHECK_IN;
    let traj = rollout(&mut env, &mut always, cfg.horizon, 2024).unwrap();
    let tail = &traj.transitions[1_000..];
    let mean = tail.iter().map(|t| t.signals.unwrap().latent_e).sum::<f64>() / tail.len() as f64;
    assert!(
        (mean - stationary_mean).abs() < 0.02,
        "empirical {mean} stationary {stationary_mean}"
    );
    assert_eq!(env.n_actions(), 5);
}
