//! Property suites for the reduction engine: commutation, frame invariance,
//! cone monotonicity, and the marginal bookkeeping of sequential reductions.

use proptest::prelude::*;
use qcone::collapse::{
    applicable_observations, consistency_check, effective_state, region_of, Observation,
    RegionLabel,
};
use qcone::hilbert::{particle, singlet, Basis, Outcome, Projector, StateVector};
use qcone::spacetime::{boost, in_strict_past_cone, interval, Boost, Event};

const TOL: f64 = 1e-12;

fn fig3_observations() -> Vec<Observation> {
    vec![
        Observation::new(
            Event::labeled(0.0, -1.0, "A"),
            Projector::z(particle(1), Outcome::Up),
        ),
        Observation::new(
            Event::labeled(0.0, 1.0, "B"),
            Projector::z(particle(2), Outcome::Down),
        ),
    ]
}

fn coord() -> impl Strategy<Value = f64> {
    -20.0..20.0f64
}

proptest! {
    #[test]
    fn observation_input_order_is_irrelevant(
        (qt, qx) in (coord(), coord()),
        swap in any::<bool>(),
    ) {
        let query = Event::new(qt, qx);
        let mut obs = fig3_observations();
        if swap {
            obs.reverse();
        }
        let report = effective_state(&singlet(), &query, &obs).unwrap();
        let reference = effective_state(&singlet(), &query, &fig3_observations()).unwrap();
        prop_assert_eq!(
            report.effective_ket.amplitudes(),
            reference.effective_ket.amplitudes()
        );
        prop_assert_eq!(report.effective_ket.labels(), reference.effective_ket.labels());
    }

    #[test]
    fn projector_application_orders_commute(
        a_basis in prop_oneof![Just(Basis::Z), Just(Basis::X)],
        b_basis in prop_oneof![Just(Basis::Z), Just(Basis::X)],
        a_out in prop_oneof![Just(Outcome::Up), Just(Outcome::Down)],
        b_out in prop_oneof![Just(Outcome::Up), Just(Outcome::Down)],
    ) {
        let pa = Projector::new(particle(1), a_basis, a_out);
        let pb = Projector::new(particle(2), b_basis, b_out);
        let ab = singlet().project(&pa).unwrap().project(&pb).unwrap();
        let ba = singlet().project(&pb).unwrap().project(&pa).unwrap();
        prop_assert!((ab.amplitude(0) - ba.amplitude(0)).norm() <= TOL);
    }

    #[test]
    fn regions_are_frame_invariant(
        (qt, qx) in (coord(), coord()),
        v in -0.99..0.99f64,
    ) {
        let a = Event::new(0.0, -1.0);
        let b = Event::new(0.0, 1.0);
        let q = Event::new(qt, qx);
        // keep the query off both cone surfaces with slack for the boost
        prop_assume!(interval(&q, &a).abs() > 1e-3);
        prop_assume!(interval(&q, &b).abs() > 1e-3);
        let bo = Boost::new(v).unwrap();
        let before = region_of(&q, &a, &b).unwrap();
        let after = region_of(
            &boost(&q, bo).unwrap(),
            &boost(&a, bo).unwrap(),
            &boost(&b, bo).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn applied_sets_grow_along_causal_order(
        (ot, ox) in (coord(), coord()),
        (qt, qx) in (coord(), coord()),
        dt in 0.0..10.0f64,
        dx_frac in -1.0..1.0f64,
    ) {
        let obs = vec![Observation::new(
            Event::new(ot, ox),
            Projector::z(particle(1), Outcome::Up),
        )];
        let q1 = Event::new(qt, qx);
        // q2 strictly inside q1's future cone, with margin
        let dx = dx_frac * dt * 0.9;
        let q2 = Event::new(qt + dt + 1e-3, qx + dx);
        let applied1 = applicable_observations(&q1, &obs).len();
        let applied2 = applicable_observations(&q2, &obs).len();
        prop_assert!(applied1 <= applied2,
            "observation fell out of the applied set along a future-directed step");
        // equivalently, once outside the strict past cone, always outside
        if !in_strict_past_cone(&q1, &obs[0].event) {
            prop_assert!(!in_strict_past_cone(&q2, &obs[0].event));
        }
    }
}

#[test]
fn marginal_weights_are_consistent_across_reduction_depth() {
    // at a doubly reduced query, summing over B's two outcomes while holding
    // A's outcome fixed recovers the weight of A's single reduction
    let query = Event::new(0.0, 5.0);
    let a_only = vec![fig3_observations()[0].clone()];
    let single = effective_state(&singlet(), &query, &a_only).unwrap();

    let mut total = 0.0;
    for b_out in [Outcome::Up, Outcome::Down] {
        let obs = vec![
            fig3_observations()[0].clone(),
            Observation::new(
                Event::labeled(0.0, 1.0, "B"),
                Projector::z(particle(2), b_out),
            ),
        ];
        total += effective_state(&singlet(), &query, &obs)
            .unwrap()
            .probability_weight;
    }
    assert!((total - single.probability_weight).abs() <= TOL);
    assert!((single.probability_weight - 0.5).abs() <= TOL);
}

#[test]
fn a_only_regions_carry_the_reduced_particle_two_factor() {
    // wherever A's reduction applies and B's does not, the effective ket is
    // the unrenormalized |↓⟩₂ factor of weight 0.5
    let obs = fig3_observations();
    let expected = singlet()
        .project(&Projector::z(particle(1), Outcome::Up))
        .unwrap();
    for q in [
        Event::new(-0.5, 0.8),
        Event::new(-0.4, 0.7),
        Event::new(-0.9, 0.11), // barely outside A's past cone, barely inside B's
    ] {
        let report = effective_state(&singlet(), &q, &obs).unwrap();
        if report.region == Some(RegionLabel::ReducedByA) {
            assert_eq!(report.effective_ket.labels(), expected.labels());
            for (x, y) in report
                .effective_ket
                .amplitudes()
                .iter()
                .zip(expected.amplitudes())
            {
                assert!((x - y).norm() <= TOL);
            }
        } else {
            panic!("query {q} was expected to land in region II, got {:?}", report.region);
        }
    }
}

#[test]
fn consistency_check_accepts_fig3_and_rejects_impossible_records() {
    assert!(consistency_check(&singlet(), &fig3_observations()));

    let impossible = vec![
        fig3_observations()[0].clone(),
        Observation::new(
            Event::labeled(0.0, 1.0, "B"),
            Projector::z(particle(2), Outcome::Up),
        ),
    ];
    assert!(!consistency_check(&singlet(), &impossible));
}

#[test]
fn reduction_weight_stays_a_probability_under_boosts() {
    // boosting the whole scenario leaves every query's weight unchanged
    let obs = fig3_observations();
    let queries = [
        Event::new(-3.0, 0.0),
        Event::new(-0.5, 0.8),
        Event::new(-0.5, -0.8),
        Event::new(0.0, 5.0),
    ];
    for v in [-0.9, -0.6, -0.3, 0.3, 0.6, 0.9] {
        let bo = Boost::new(v).unwrap();
        let boosted_obs: Vec<Observation> = obs
            .iter()
            .map(|o| Observation::new(boost(&o.event, bo).unwrap(), o.projector))
            .collect();
        for q in &queries {
            let base = effective_state(&singlet(), q, &obs).unwrap();
            let moved =
                effective_state(&singlet(), &boost(q, bo).unwrap(), &boosted_obs).unwrap();
            assert_eq!(base.region, moved.region);
            assert!((base.probability_weight - moved.probability_weight).abs() <= TOL);
        }
    }
}

fn assert_send_sync<T: Send + Sync>() {}

#[test]
fn engine_types_are_shareable_across_threads() {
    assert_send_sync::<Observation>();
    assert_send_sync::<StateVector>();
    assert_send_sync::<qcone::collapse::ReductionReport>();
}
