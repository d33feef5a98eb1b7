//! Exact ground truth for small CMDPs by exhaustive enumeration of
//! deterministic stationary policies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmdp::{exact_policy_values, validate_cmdp, CmdpError, CmdpSpec, StationaryPolicy};

/// Largest number of deterministic policies the oracle will enumerate.
pub const MAX_POLICIES: u128 = 1_000_000;

const BISECTION_ITERS: usize = 100;
const COST_TOL: f64 = 1e-6;
const FEASIBLE_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{count} deterministic policies exceed the enumeration limit of {MAX_POLICIES}")]
    TooLarge { count: u128 },
    #[error("infeasible: the cheapest policy costs {min_cost} > threshold {threshold_d}")]
    Infeasible { min_cost: f64, threshold_d: f64 },
    #[error(transparent)]
    Cmdp(#[from] CmdpError),
}

/// A deterministic policy with its values at the start distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyValuePoint {
    pub policy: StationaryPolicy,
    /// Chosen action per state.
    pub actions: Vec<usize>,
    pub value_reward: f64,
    pub value_cost: f64,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mixing {
    Deterministic {
        policy: PolicyValuePoint,
    },
    /// At episode start, `primary` is followed for the whole episode with
    /// probability `weight` and `secondary` otherwise.
    Mixture {
        primary: PolicyValuePoint,
        secondary: PolicyValuePoint,
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedSolution {
    pub optimal_value: f64,
    pub optimal_cost: f64,
    pub mixing: Mixing,
    pub lambda_star: f64,
}

/// Deterministic policy number `index`, with state 0 as the least significant
/// base-`n_actions` digit.
pub fn policy_actions(index: u64, n_states: usize, n_actions: usize) -> Vec<usize> {
    let mut rest = index;
    (0..n_states)
        .map(|_| {
            let a = (rest % n_actions as u64) as usize;
            rest /= n_actions as u64;
            a
        })
        .collect()
}

/// Evaluates every deterministic stationary policy exactly.
pub fn enumerate_policies(spec: &CmdpSpec) -> Result<Vec<PolicyValuePoint>, OracleError> {
    let spec = validate_cmdp(spec.clone())?;
    let count = spec.deterministic_policy_count();
    if count > MAX_POLICIES {
        return Err(OracleError::TooLarge { count });
    }
    let start = spec.start_distribution();
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count as u64 {
        let actions = policy_actions(index, spec.n_states, spec.n_actions);
        let policy = StationaryPolicy::deterministic(&actions, spec.n_actions);
        let (value_reward, value_cost) = exact_policy_values(&spec, &policy)?.at(&start);
        out.push(PolicyValuePoint {
            policy,
            actions,
            value_reward,
            value_cost,
            deterministic: true,
        });
    }
    Ok(out)
}

/// Best policy for `reward - lambda * cost`; ties go to the lower cost, then
/// to the lower enumeration index.
fn best_scalarized(points: &[PolicyValuePoint], lambda: f64) -> usize {
    let mut best = 0;
    let score = |p: &PolicyValuePoint| p.value_reward - lambda * p.value_cost;
    for (i, p) in points.iter().enumerate().skip(1) {
        let (s, b) = (score(p), score(&points[best]));
        if s > b || (s == b && p.value_cost < points[best].value_cost) {
            best = i;
        }
    }
    best
}

/// Constrained optimum at the spec's own threshold.
pub fn constrained_optimum(spec: &CmdpSpec) -> Result<ConstrainedSolution, OracleError> {
    let points = enumerate_policies(spec)?;
    constrained_optimum_over(&points, spec.threshold_d)
}

/// Constrained optimum over an enumerated policy table.
///
/// Bisects the multiplier between a value whose scalarized optimum is
/// infeasible and one whose optimum is feasible, then mixes the two
/// bracketing policies so the mixed cost equals the threshold.
pub fn constrained_optimum_over(
    points: &[PolicyValuePoint],
    threshold_d: f64,
) -> Result<ConstrainedSolution, OracleError> {
    let min_cost = points
        .iter()
        .map(|p| p.value_cost)
        .fold(f64::INFINITY, f64::min);
    if points.is_empty() || min_cost > threshold_d + FEASIBLE_TOL {
        return Err(OracleError::Infeasible {
            min_cost,
            threshold_d,
        });
    }
    let feasible = |i: usize| points[i].value_cost <= threshold_d + FEASIBLE_TOL;
    let deterministic = |i: usize, lambda: f64| ConstrainedSolution {
        optimal_value: points[i].value_reward,
        optimal_cost: points[i].value_cost,
        mixing: Mixing::Deterministic {
            policy: points[i].clone(),
        },
        lambda_star: lambda,
    };

    let unconstrained = best_scalarized(points, 0.0);
    if feasible(unconstrained) {
        return Ok(deterministic(unconstrained, 0.0));
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    while !feasible(best_scalarized(points, hi)) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            // Only reachable when the cheapest policies tie within rounding.
            let cheapest = (0..points.len())
                .filter(|&i| feasible(i))
                .max_by(|&a, &b| points[a].value_reward.total_cmp(&points[b].value_reward))
                .expect("feasible set is nonempty");
            return Ok(deterministic(cheapest, lo));
        }
    }
    for _ in 0..BISECTION_ITERS {
        let i_hi = best_scalarized(points, hi);
        if (points[i_hi].value_cost - threshold_d).abs() <= COST_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(best_scalarized(points, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let i_hi = best_scalarized(points, hi);
    let i_lo = best_scalarized(points, lo);
    let lambda_star = 0.5 * (lo + hi);
    let (c_hi, c_lo) = (points[i_hi].value_cost, points[i_lo].value_cost);
    if (c_hi - threshold_d).abs() <= COST_TOL || c_lo <= c_hi {
        return Ok(deterministic(i_hi, lambda_star));
    }
    let weight = ((threshold_d - c_hi) / (c_lo - c_hi)).clamp(0.0, 1.0);
    let (primary, secondary) = (&points[i_lo], &points[i_hi]);
    let mix = |x: f64, y: f64| weight * x + (1.0 - weight) * y;
    Ok(ConstrainedSolution {
        optimal_value: mix(primary.value_reward, secondary.value_reward),
        optimal_cost: mix(primary.value_cost, secondary.value_cost),
        mixing: Mixing::Mixture {
            primary: primary.clone(),
            secondary: secondary.clone(),
            weight,
        },
        lambda_star,
    })
}

/// Policies not dominated in (higher reward, lower cost), sorted by cost.
pub fn exact_pareto_front(spec: &CmdpSpec) -> Result<Vec<PolicyValuePoint>, OracleError> {
    Ok(pareto_front_of(&enumerate_policies(spec)?))
}

pub fn pareto_front_of(points: &[PolicyValuePoint]) -> Vec<PolicyValuePoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .value_cost
            .total_cmp(&points[b].value_cost)
            .then(points[b].value_reward.total_cmp(&points[a].value_reward))
            .then(a.cmp(&b))
    });
    let mut front: Vec<PolicyValuePoint> = Vec::new();
    for i in order {
        let p = &points[i];
        let keep = match front.last() {
            None => true,
            Some(last) => p.value_reward > last.value_reward + DEDUP_TOL,
        };
        if keep {
            front.push(p.clone());
        }
    }
    // Rewards now rise by more than the tolerance along the front; a point
    // whose successor costs no more up to the tolerance is dominated.
    let mut kept: Vec<PolicyValuePoint> = Vec::with_capacity(front.len());
    for p in front.into_iter().rev() {
        match kept.last() {
            Some(next) if next.value_cost <= p.value_cost + DEDUP_TOL => {}
            _ => kept.push(p),
        }
    }
    kept.reverse();
    kept
}
