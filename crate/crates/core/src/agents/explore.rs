use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// With probability `epsilon` a uniformly random action, otherwise the greedy one.
pub fn epsilon_greedy<R: Rng + ?Sized>(q_row: &[f64], epsilon: f64, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    if u < epsilon {
        rng.gen_range(0..q_row.len())
    } else {
        argmax(q_row)
    }
}

/// Geometric decay from `start` to `end` over the training iterations.
///
/// Falls back to linear interpolation when either end is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            start: 0.3,
            end: 0.01,
        }
    }
}

impl EpsilonSchedule {
    pub fn constant(epsilon: f64) -> Self {
        Self {
            start: epsilon,
            end: epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        for (name, v) in [("epsilon.start", self.start), ("epsilon.end", self.end)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(AgentError::Param { name, value: v });
            }
        }
        Ok(())
    }

    pub fn at(&self, iteration: usize, iterations: usize) -> f64 {
        if iterations <= 1 {
            return self.start;
        }
        let frac = iteration as f64 / (iterations - 1) as f64;
        if self.start > 0.0 && self.end > 0.0 {
            self.start * (self.end / self.start).powf(frac)
        } else {
            self.start + (self.end - self.start) * frac
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn greedy_examples() {
        let mut rng = rng_from_seed(0);
        assert_eq!(epsilon_greedy(&[1.0, 3.0, 2.0], 0.0, &mut rng), 1);
        assert_eq!(epsilon_greedy(&[2.0, 2.0, 0.0], 0.0, &mut rng), 0);
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut rng = rng_from_seed(1);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[epsilon_greedy(&[0.0, 9.0, 0.0, 0.0, 0.0], 1.0, &mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.2).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn schedule_endpoints() {
        let s = EpsilonSchedule::default();
        assert_eq!(s.at(0, 100), 0.3);
        assert!((s.at(99, 100) - 0.01).abs() < 1e-15);
        assert!(s.at(50, 100) < 0.3 && s.at(50, 100) > 0.01);
        let lin = EpsilonSchedule { start: 0.2, end: 0.0 };
        assert!((lin.at(1, 3) - 0.1).abs() < 1e-15);
        assert_eq!(EpsilonSchedule::constant(0.0).at(5, 10), 0.0);
    }

    proptest! {
        #[test]
        fn argmax_invariant_under_positive_affine_maps(
            row in proptest::collection::vec(-100.0f64..100.0, 1..8),
            scale in 0.01f64..100.0,
            shift in -100.0f64..100.0,
        ) {
            let mapped: Vec<f64> = row.iter().map(|v| scale * v + shift).collect();
            // Skip rows where rounding could merge or split near-ties.
            let best = row.iter().cloned().fold(f64::MIN, f64::max);
            let near_tie = row.iter().filter(|&&v| v != best && best - v < 1e-9).count() > 0;
            prop_assume!(!near_tie);
            let ties = row.iter().filter(|&&v| v == best).count();
            prop_assume!(ties == 1);
            prop_assert_eq!(argmax(&row), argmax(&mapped));
        }
    }
}
