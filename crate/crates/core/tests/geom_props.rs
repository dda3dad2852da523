mod common;

use pminimal::geom::{
    directions::sphere_grid, family_convexity_violation, hull_contains, hull_distance, min_enclosing_ball,
    support_value, Point, PointCloud,
};
use proptest::prelude::*;

fn cloud(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0..10.0f64, dim), 1..=10)
}

fn to_cloud(v: &[Vec<f64>]) -> PointCloud {
    PointCloud::new(v.iter().map(|p| Point::new(p.clone())).collect()).unwrap()
}

fn agrees_with_brute_force(pts: &[Vec<f64>]) -> Result<(), TestCaseError> {
    let ball = min_enclosing_ball(&to_cloud(pts)).unwrap();
    let (_, r) = common::brute_force_ball(pts);
    prop_assert!((ball.radius - r).abs() <= 1e-9 * (1.0 + r), "{} vs {}", ball.radius, r);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ball_matches_brute_force_2d(pts in cloud(2)) { agrees_with_brute_force(&pts)?; }

    #[test]
    fn ball_matches_brute_force_3d(pts in cloud(3)) { agrees_with_brute_force(&pts)?; }

    #[test]
    fn ball_matches_brute_force_4d(pts in cloud(4)) { agrees_with_brute_force(&pts)?; }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ball_is_rigid_and_homogeneous(pts in cloud(3), shift in prop::collection::vec(-5.0..5.0f64, 3), s in 0.1..10.0f64) {
        let c = to_cloud(&pts);
        let base = min_enclosing_ball(&c).unwrap();
        let v = Point::new(shift);
        let moved = min_enclosing_ball(&c.translated(&v)).unwrap();
        prop_assert!((moved.radius - base.radius).abs() <= 1e-9 * (1.0 + base.radius));
        prop_assert!(moved.center.distance(&base.center.add(&v)) <= 1e-7 * (1.0 + base.radius));
        let scaled = min_enclosing_ball(&c.scaled(s)).unwrap();
        prop_assert!((scaled.radius - s * base.radius).abs() <= 1e-9 * (1.0 + s * base.radius));
    }

    #[test]
    fn ball_contains_its_cloud(pts in cloud(4)) {
        let c = to_cloud(&pts);
        let b = min_enclosing_ball(&c).unwrap();
        for p in c.iter() {
            prop_assert!(p.distance(&b.center) <= b.radius * (1.0 + 1e-9) + 1e-12);
        }
    }

    /// Support functions add under Minkowski sums, so the pointwise sums of
    /// two clouds form a family member with zero violation.
    #[test]
    fn minkowski_support_identity(a in cloud(2), b in cloud(2), t in 0.0..=1.0f64) {
        let (ca, cb) = (to_cloud(&a), to_cloud(&b));
        let sum: Vec<Point> = ca.iter()
            .flat_map(|p| cb.iter().map(move |q| p.scale(t).add(&q.scale(1.0 - t))))
            .collect();
        let sum = PointCloud::new(sum).unwrap();
        let dirs = sphere_grid(2, 64).unwrap();
        for u in &dirs {
            let lhs = support_value(&sum, u).unwrap();
            let rhs = t * support_value(&ca, u).unwrap() + (1.0 - t) * support_value(&cb, u).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
        let v = family_convexity_violation(&sum, &ca, &cb, t, &dirs).unwrap();
        prop_assert!(v.abs() <= 1e-9 * 20.0);
    }

    #[test]
    fn hull_contains_convex_combinations(pts in cloud(3), w in prop::collection::vec(0.0..1.0f64, 10)) {
        let c = to_cloud(&pts);
        let total: f64 = w.iter().take(c.len()).sum::<f64>() + 1e-3;
        let q = c.iter().zip(&w).fold(Point::zeros(3), |acc, (p, wi)| acc.axpy(wi / total, p))
            .axpy(1e-3 / total, &c.points()[0]);
        prop_assert!(hull_contains(&c, &q, 1e-8).unwrap());
    }

    /// A point pushed beyond the support plane in a direction is at least
    /// that far from the hull.
    #[test]
    fn hull_distance_bounds_support_excess(pts in cloud(3), k in 0usize..200, gap in 0.01..5.0f64) {
        let c = to_cloud(&pts);
        let u = sphere_grid(3, 200).unwrap()[k].clone();
        let h = support_value(&c, &u).unwrap();
        let q = c.points()[0].axpy(h - c.points()[0].dot(&u) + gap, &u);
        let d = hull_distance(&c, &q).unwrap();
        prop_assert!(d >= gap - 1e-9);
        prop_assert!(!hull_contains(&c, &q, 0.5 * gap).unwrap());
    }
}
