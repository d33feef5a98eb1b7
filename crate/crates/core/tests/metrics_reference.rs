use rand::{Rng, SeedableRng};
use rrl_core::metrics::pareto::{exclusive_contributions, hypervolume, Point3};
use rrl_core::metrics::{aggregate, CostMode, MetricReport};
use rrl_core::rng::SimRng;

/// Monte-Carlo exclusive contributions for distinct points.
fn mc_contributions(points: &[Point3], reference: Point3, samples: usize, seed: u64) -> Vec<f64> {
    let hi: Point3 =
        std::array::from_fn(|k| points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max));
    let box_volume: f64 = (0..3).map(|k| hi[k] - reference[k]).product();
    let mut rng = SimRng::seed_from_u64(seed);
    let mut hits = vec![0usize; points.len()];
    for _ in 0..samples {
        let x: Point3 = std::array::from_fn(|k| rng.gen_range(reference[k]..hi[k]));
        let mut owner = None;
        let mut count = 0;
        for (i, p) in points.iter().enumerate() {
            if (0..3).all(|k| p[k] >= x[k]) {
                count += 1;
                owner = Some(i);
            }
        }
        if count == 1 {
            hits[owner.unwrap()] += 1;
        }
    }
    hits.iter()
        .map(|&h| h as f64 / samples as f64 * box_volume)
        .collect()
}

#[test]
fn three_point_contributions_match_monte_carlo() {
    let pts = [[3.0, 2.0, 2.0], [2.0, 3.0, 2.0], [2.0, 2.0, 3.0]];
    let origin = [0.0; 3];
    let exact = exclusive_contributions(&pts, origin).unwrap();
    assert_eq!(exact, vec![4.0, 4.0, 4.0]);
    assert_eq!(hypervolume(&pts, origin).unwrap(), 20.0);
    let mc = mc_contributions(&pts, origin, 1_000_000, 31);
    for (e, m) in exact.iter().zip(&mc) {
        assert!((e - m).abs() <= 0.01 * e, "exact {e} mc {m}");
    }
}

#[test]
fn aggregate_matches_closed_form() {
    let values = [0.1, 0.25, 0.4, 0.55, 0.9, 0.35];
    let reports: Vec<MetricReport> = values
        .iter()
        .map(|&x| MetricReport {
            engagement_rate: x,
            emotional_alignment: 1.0 - x,
            safety_cost: 2.0 * x,
            cost_mode: CostMode::Discounted,
            violation_probability: x / 2.0,
            n_episodes: 200,
            mean_return: -x,
            halfwidths: None,
        })
        .collect();
    let agg = aggregate(&reports).unwrap();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let hw = 1.96 * (var / n).sqrt();
    let h = agg.halfwidths.unwrap();
    assert!((agg.engagement_rate - mean).abs() < 1e-12);
    assert!((h.engagement_rate - hw).abs() < 1e-12);
    assert!((h.emotional_alignment - hw).abs() < 1e-12);
    assert!((h.safety_cost - 2.0 * hw).abs() < 1e-12);
    assert!((h.violation_probability - hw / 2.0).abs() < 1e-12);
    assert!((h.mean_return - hw).abs() < 1e-12);
    assert_eq!(agg.n_episodes, 1200);
}
