//! Property suites for the Minkowski layer: every covariance claim the rest
//! of the crate leans on is checked here on randomized geometry.

use proptest::prelude::*;
use qcone::spacetime::{boost, interval, lightlike_tolerance, relation, Boost, Event};

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn velocity(max: f64) -> impl Strategy<Value = f64> {
    (-max..max).prop_filter("subluminal", move |v| v.abs() <= max)
}

/// Keeps a pair comfortably outside the lightlike tolerance band, with slack
/// for the band's growth under boosts up to |v| = 0.99 (γ² ≈ 50).
fn outside_band(a: &Event, b: &Event) -> bool {
    interval(a, b).abs() > 1e-4 * f64::max(1.0, lightlike_tolerance(a, b) / 1e-9)
}

proptest! {
    #[test]
    fn interval_is_boost_invariant(
        (t1, x1, t2, x2) in (coord(), coord(), coord(), coord()),
        v in velocity(0.99),
    ) {
        let a = Event::new(t1, x1);
        let b = Event::new(t2, x2);
        let bo = Boost::new(v).unwrap();
        let s_before = interval(&a, &b);
        let s_after = interval(&boost(&a, bo).unwrap(), &boost(&b, bo).unwrap());
        let tol = 1e-9 * f64::max(1.0, s_before.abs());
        prop_assert!((s_after - s_before).abs() <= tol,
            "interval drifted: {s_before} -> {s_after} under v = {v}");
    }

    #[test]
    fn causal_relation_is_boost_invariant(
        (t1, x1, t2, x2) in (coord(), coord(), coord(), coord()),
        v in velocity(0.99),
    ) {
        let a = Event::new(t1, x1);
        let b = Event::new(t2, x2);
        prop_assume!(outside_band(&a, &b));
        let bo = Boost::new(v).unwrap();
        let before = relation(&a, &b);
        let after = relation(&boost(&a, bo).unwrap(), &boost(&b, bo).unwrap());
        prop_assert_eq!(before, after);
    }

    #[test]
    fn relation_mirrors_between_endpoints(
        (t1, x1, t2, x2) in (coord(), coord(), coord(), coord()),
    ) {
        let a = Event::new(t1, x1);
        let b = Event::new(t2, x2);
        prop_assert_eq!(relation(&a, &b).mirror(), relation(&b, &a));
    }

    #[test]
    fn boost_round_trips_through_its_inverse(
        (t, x) in (coord(), coord()),
        v in velocity(0.99),
    ) {
        let e = Event::new(t, x);
        let bo = Boost::new(v).unwrap();
        let back = boost(&boost(&e, bo).unwrap(), bo.inverse()).unwrap();
        prop_assert!((back.t - e.t).abs() <= 1e-9, "t: {} vs {}", back.t, e.t);
        prop_assert!((back.x - e.x).abs() <= 1e-9, "x: {} vs {}", back.x, e.x);
    }

    #[test]
    fn composition_is_associative(
        v1 in velocity(0.9),
        v2 in velocity(0.9),
        v3 in velocity(0.9),
    ) {
        let (b1, b2, b3) = (
            Boost::new(v1).unwrap(),
            Boost::new(v2).unwrap(),
            Boost::new(v3).unwrap(),
        );
        let left = b1.compose(&b2).compose(&b3).velocity();
        let right = b1.compose(&b2.compose(&b3)).velocity();
        prop_assert!((left - right).abs() <= 1e-12);
    }

    #[test]
    fn composition_agrees_with_sequential_boosts(
        (t, x) in (coord(), coord()),
        v1 in velocity(0.9),
        v2 in velocity(0.9),
    ) {
        let e = Event::new(t, x);
        let b1 = Boost::new(v1).unwrap();
        let b2 = Boost::new(v2).unwrap();
        let two_step = boost(&boost(&e, b1).unwrap(), b2).unwrap();
        let one_step = boost(&e, b2.compose(&b1)).unwrap();
        prop_assert!((two_step.t - one_step.t).abs() <= 1e-8);
        prop_assert!((two_step.x - one_step.x).abs() <= 1e-8);
    }

    #[test]
    fn strict_past_cone_matches_the_interval_inequality(
        (qt, qx, vt, vx) in (coord(), coord(), coord(), coord()),
    ) {
        let query = Event::new(qt, qx);
        let vertex = Event::new(vt, vx);
        prop_assume!(outside_band(&query, &vertex));
        let by_hand = (vt - qt) > 0.0 && (vt - qt).abs() > (vx - qx).abs();
        prop_assert_eq!(
            qcone::spacetime::in_strict_past_cone(&query, &vertex),
            by_hand
        );
    }
}
