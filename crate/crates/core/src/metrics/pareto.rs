//! Pareto efficiency index: each point's exclusive share of the hypervolume
//! dominated by the non-dominated set, with all objectives maximized.

use super::MetricsError;

pub type Point3 = [f64; 3];

fn weakly_dominates(p: &Point3, q: &Point3) -> bool {
    p.iter().zip(q).all(|(a, b)| a >= b)
}

/// `p` is at least as good everywhere and better somewhere.
pub fn dominates(p: &Point3, q: &Point3) -> bool {
    weakly_dominates(p, q) && p != q
}

/// Componentwise worst value minus a 5% margin of the observed range, or of
/// `max(|worst|, 1)` on axes with no spread.
pub fn default_reference(points: &[Point3]) -> Point3 {
    let mut reference = [0.0; 3];
    for (k, r) in reference.iter_mut().enumerate() {
        let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        *r = lo - 0.05 * span;
    }
    reference
}

fn check(points: &[Point3], reference: &Point3) -> Result<(), MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::EmptyCollection);
    }
    for (index, p) in points.iter().enumerate() {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(MetricsError::NonFinitePoint { index });
        }
        if reference.iter().any(|v| !v.is_finite()) || !weakly_dominates(p, reference) {
            return Err(MetricsError::InvalidReference {
                reference: *reference,
                index,
                point: *p,
            });
        }
    }
    Ok(())
}

/// Sorted distinct coordinates per axis, reference first.
fn grid(points: &[Point3], reference: &Point3) -> [Vec<f64>; 3] {
    std::array::from_fn(|k| {
        let mut axis: Vec<f64> = points.iter().map(|p| p[k]).collect();
        axis.push(reference[k]);
        axis.sort_by(f64::total_cmp);
        axis.dedup();
        axis
    })
}

/// Calls `visit(cell_volume, upper_corner)` for every cell of the compressed
/// grid spanned by the points and the reference.
fn for_each_cell(points: &[Point3], reference: &Point3, mut visit: impl FnMut(f64, Point3)) {
    let [gx, gy, gz] = grid(points, reference);
    for i in 1..gx.len() {
        let dx = gx[i] - gx[i - 1];
        for j in 1..gy.len() {
            let dy = gy[j] - gy[j - 1];
            for l in 1..gz.len() {
                let dz = gz[l] - gz[l - 1];
                visit(dx * dy * dz, [gx[i], gy[j], gz[l]]);
            }
        }
    }
}

/// Volume dominated by the union of the points' boxes above `reference`.
pub fn hypervolume(points: &[Point3], reference: Point3) -> Result<f64, MetricsError> {
    check(points, &reference)?;
    let mut total = 0.0;
    for_each_cell(points, &reference, |vol, corner| {
        if points.iter().any(|p| weakly_dominates(p, &corner)) {
            total += vol;
        }
    });
    Ok(total)
}

/// Raw exclusive hypervolume contribution per point.
///
/// Dominated points get 0 and are excluded before contributions are
/// computed, so adding a dominated point leaves every other value unchanged.
/// Exact duplicates share their common contribution equally.
pub fn exclusive_contributions(
    points: &[Point3],
    reference: Point3,
) -> Result<Vec<f64>, MetricsError> {
    check(points, &reference)?;
    let front: Vec<usize> = (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect();
    // Group exact duplicates on the front under their first occurrence.
    let mut group_of = vec![usize::MAX; points.len()];
    let mut groups: Vec<usize> = Vec::new();
    for &i in &front {
        match groups.iter().position(|&g| points[g] == points[i]) {
            Some(g) => group_of[i] = g,
            None => {
                group_of[i] = groups.len();
                groups.push(i);
            }
        }
    }
    let reps: Vec<Point3> = groups.iter().map(|&g| points[g]).collect();
    let mut group_volume = vec![0.0; reps.len()];
    for_each_cell(&reps, &reference, |vol, corner| {
        let mut owner = None;
        for (g, p) in reps.iter().enumerate() {
            if weakly_dominates(p, &corner) {
                if owner.is_some() {
                    return;
                }
                owner = Some(g);
            }
        }
        if let Some(g) = owner {
            group_volume[g] += vol;
        }
    });
    let mut sizes = vec![0usize; reps.len()];
    for &i in &front {
        sizes[group_of[i]] += 1;
    }
    Ok((0..points.len())
        .map(|i| match group_of[i] {
            usize::MAX => 0.0,
            g => group_volume[g] / sizes[g] as f64,
        })
        .collect())
}

/// Exclusive contributions normalized to sum to 1 over the non-dominated
/// points. When every contribution is zero the non-dominated points share
/// equally.
pub fn pareto_index(points: &[Point3], reference: Point3) -> Result<Vec<f64>, MetricsError> {
    let raw = exclusive_contributions(points, reference)?;
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        return Ok(raw.iter().map(|v| v / total).collect());
    }
    let on_front: Vec<bool> = (0..points.len())
        .map(|i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect();
    let n = on_front.iter().filter(|&&f| f).count() as f64;
    Ok(on_front
        .iter()
        .map(|&f| if f { 1.0 / n } else { 0.0 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ORIGIN: Point3 = [0.0, 0.0, 0.0];

    #[test]
    fn single_point_gets_everything() {
        assert_eq!(pareto_index(&[[1.0, 2.0, 3.0]], ORIGIN).unwrap(), vec![1.0]);
        assert_eq!(hypervolume(&[[1.0, 2.0, 3.0]], ORIGIN).unwrap(), 6.0);
        let r = default_reference(&[[0.5, 0.5, -1.0]]);
        assert_eq!(pareto_index(&[[0.5, 0.5, -1.0]], r).unwrap(), vec![1.0]);
    }

    #[test]
    fn dominated_point_gets_zero() {
        let idx = pareto_index(&[[2.0, 2.0, 2.0], [1.0, 1.0, 1.0]], ORIGIN).unwrap();
        assert_eq!(idx, vec![1.0, 0.0]);
    }

    #[test]
    fn two_boxes_by_hand() {
        // Boxes 2x1x1 and 1x2x1 overlap in a unit cube.
        let pts = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0]];
        assert_eq!(exclusive_contributions(&pts, ORIGIN).unwrap(), vec![1.0, 1.0]);
        assert_eq!(hypervolume(&pts, ORIGIN).unwrap(), 3.0);
        assert_eq!(pareto_index(&pts, ORIGIN).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn duplicates_share() {
        let pts = [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [0.5, 2.0, 1.0]];
        let raw = exclusive_contributions(&pts, ORIGIN).unwrap();
        assert_eq!(raw[0], raw[1]);
        assert!((raw[0] - 0.25).abs() < 1e-15);
        assert!((raw[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_reference() {
        assert!(matches!(
            pareto_index(&[[1.0, 1.0, 1.0]], [2.0, 0.0, 0.0]),
            Err(MetricsError::InvalidReference { .. })
        ));
        assert!(pareto_index(&[], ORIGIN).is_err());
    }

    fn point() -> impl Strategy<Value = Point3> {
        proptest::array::uniform3(0.0f64..10.0)
    }

    proptest! {
        #[test]
        fn sums_to_one_on_front(pts in proptest::collection::vec(point(), 1..8)) {
            let idx = pareto_index(&pts, ORIGIN).unwrap();
            let total: f64 = idx.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(idx.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn dominated_addition_is_inert(
            pts in proptest::collection::vec(point(), 1..6),
            which in 0usize..6,
            shrink in proptest::array::uniform3(0.01f64..1.0),
        ) {
            let base = pts[which % pts.len()];
            let extra = [base[0] * shrink[0], base[1] * shrink[1], base[2] * shrink[2]];
            prop_assume!(dominates(&base, &extra));
            let before = pareto_index(&pts, ORIGIN).unwrap();
            let mut more = pts.clone();
            more.push(extra);
            let after = pareto_index(&more, ORIGIN).unwrap();
            prop_assert_eq!(after[pts.len()], 0.0);
            prop_assert_eq!(&after[..pts.len()], &before[..]);
        }
    }
}
