//! Cross-checks the cycle engine against an independent oracle: a toy
//! simulator that stores amplitudes in a map keyed by explicit basis labels
//! and applies the interaction truth table directly, with none of the
//! bit-packing machinery the engine uses.

use std::collections::HashMap;

use qcone::hilbert::{detector, particle, singlet, Basis};
use qcone::nondemolition::{
    classify_pair, search_alternative_preparation, state_at, CycleState, Definiteness,
    DetectorOutcomes, Epoch, OutcomeSelector, Verdict,
};

const TOL: f64 = 1e-12;

/// Basis label (p1, p2, d1, d2); bit 0 is ↑ for particles, |0⟩ for detectors.
type Key = (u8, u8, u8, u8);

/// Real amplitudes are enough for every state this protocol reaches.
type ToyState = HashMap<Key, f64>;

fn toy_preparation() -> ToyState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // singlet (↑↓ − ↓↑)/√2 times the detector pair (00 + 11)/√2
    let mut s = ToyState::new();
    for (p1, p2, sign) in [(0u8, 1u8, 1.0), (1, 0, -1.0)] {
        for d in [0u8, 1u8] {
            s.insert((p1, p2, d, d), sign * h * h);
        }
    }
    s
}

/// The interaction rule, stated directly: particle i in ↑ flips detector i.
fn toy_interact(s: &ToyState, which: u8) -> ToyState {
    let mut out = ToyState::new();
    for (&(p1, p2, d1, d2), &a) in s {
        let key = match which {
            1 if p1 == 0 => (p1, p2, 1 - d1, d2),
            2 if p2 == 0 => (p1, p2, d1, 1 - d2),
            _ => (p1, p2, d1, d2),
        };
        *out.entry(key).or_insert(0.0) += a;
    }
    out
}

fn toy_state_at(k1: u8, k2: u8) -> ToyState {
    let mut s = toy_preparation();
    for _ in 0..k1 {
        s = toy_interact(&s, 1);
    }
    for _ in 0..k2 {
        s = toy_interact(&s, 2);
    }
    s
}

/// Amplitude of the engine's global state at an explicit basis label.
fn engine_amplitude(state: &CycleState, key: Key) -> f64 {
    let labels = [particle(1), particle(2), detector(1), detector(2)];
    assert_eq!(state.global().labels(), labels);
    let idx = ((key.0 as usize) << 3) | ((key.1 as usize) << 2) | ((key.2 as usize) << 1)
        | key.3 as usize;
    let a = state.global().amplitude(idx);
    assert!(a.im.abs() <= TOL, "protocol states stay real");
    a.re
}

#[test]
fn engine_matches_the_toy_oracle_at_every_epoch() {
    let prep = CycleState::prepare();
    for k1 in 0..=2u8 {
        for k2 in 0..=2u8 {
            let engine = state_at(&prep, Epoch::new(k1, k2).unwrap()).unwrap();
            let toy = toy_state_at(k1, k2);
            for p1 in 0..2u8 {
                for p2 in 0..2u8 {
                    for d1 in 0..2u8 {
                        for d2 in 0..2u8 {
                            let key = (p1, p2, d1, d2);
                            let expected = toy.get(&key).copied().unwrap_or(0.0);
                            let got = engine_amplitude(&engine, key);
                            assert!(
                                (got - expected).abs() <= TOL,
                                "epoch ({k1},{k2}), key {key:?}: engine {got}, oracle {expected}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn parity_law_across_epochs() {
    let prep = CycleState::prepare();

    // whole-cycle epochs: XOR fixed by the cycle count parity
    for ((k1, k2), want_xor) in [((0, 0), 0u8), ((1, 1), 1), ((2, 2), 0)] {
        let s = state_at(&prep, Epoch::new(k1, k2).unwrap()).unwrap();
        for trial in 0..32u64 {
            let (out, _) = s
                .observe(OutcomeSelector::Sampled { seed: 1234, trial })
                .unwrap();
            assert_eq!(out.xor(), want_xor, "epoch ({k1},{k2})");
        }
    }

    // individual detector marginals are flat at every epoch
    for k1 in 0..=2u8 {
        for k2 in 0..=2u8 {
            let s = state_at(&prep, Epoch::new(k1, k2).unwrap()).unwrap();
            for d in [detector(1), detector(2)] {
                let p = s.global().probabilities(&[d], Basis::Z).unwrap();
                assert!((p[0] - 0.5).abs() <= TOL, "epoch ({k1},{k2}), {d}");
                assert!((p[1] - 0.5).abs() <= TOL, "epoch ({k1},{k2}), {d}");
            }
        }
    }
}

/// Every detector outcome with nonzero probability at the given epoch,
/// found by exhaustive enumeration.
fn supported_outcomes(s: &CycleState) -> Vec<(DetectorOutcomes, CycleState)> {
    let mut hits = Vec::new();
    for d1 in 0..2u8 {
        for d2 in 0..2u8 {
            if let Ok((out, post)) = s.observe(OutcomeSelector::Fixed { d1, d2 }) {
                hits.push((out, post));
            }
        }
    }
    hits
}

#[test]
fn demolition_criterion_equivalence_by_enumeration() {
    let prep = CycleState::prepare();
    for k1 in 0..=2u8 {
        for k2 in 0..=2u8 {
            let s = state_at(&prep, Epoch::new(k1, k2).unwrap()).unwrap();
            let indefinite = s.compare() == Definiteness::Indefinite;
            let some_outcome_demolishes = supported_outcomes(&s)
                .iter()
                .any(|(_, post)| post.singlet_fidelity() < 1.0 - 1e-9);
            assert_eq!(
                indefinite, some_outcome_demolishes,
                "criterion equivalence failed at epoch ({k1},{k2})"
            );
        }
    }
}

#[test]
fn every_mid_cycle_outcome_lands_on_fidelity_one_half() {
    let prep = CycleState::prepare();
    let s = state_at(&prep, Epoch::new(1, 0).unwrap()).unwrap();
    let hits = supported_outcomes(&s);
    assert_eq!(hits.len(), 4, "all four outcomes are possible at (1,0)");
    for (out, post) in hits {
        let f = post.singlet_fidelity();
        assert!(
            (f - 0.5).abs() <= TOL,
            "outcome ({}, {}): fidelity {f}",
            out.d1,
            out.d2
        );
        // and the particles are left in a product state
        assert!(post
            .global()
            .is_separable(&[particle(1)])
            .unwrap());
    }
}

#[test]
fn no_continuation_recovers_from_a_mid_cycle_observation() {
    let prep = CycleState::prepare();
    let mid = state_at(&prep, Epoch::new(1, 0).unwrap()).unwrap();
    // remaining interactions: one for detector 1, two for detector 2
    let continuations: [[u8; 3]; 3] = [[1, 2, 2], [2, 1, 2], [2, 2, 1]];
    for (out, post) in supported_outcomes(&mid) {
        for order in continuations {
            let mut s = post.clone();
            for det in order {
                s = s.interact(det).unwrap();
                assert!(
                    s.singlet_fidelity() < 1.0 - 1e-9,
                    "outcome ({}, {}), order {order:?}: fidelity climbed back to {}",
                    out.d1,
                    out.d2,
                    s.singlet_fidelity()
                );
            }
            assert_eq!(s.epoch(), Epoch::new(2, 2).unwrap());
        }
    }
}

#[test]
fn observing_a_whole_cycle_epoch_verifies_and_preserves_the_singlet() {
    let prep = CycleState::prepare();
    for (k1, k2) in [(1, 1), (2, 2)] {
        let s = state_at(&prep, Epoch::new(k1, k2).unwrap()).unwrap();
        for (_, post) in supported_outcomes(&s) {
            assert!((post.singlet_fidelity() - 1.0).abs() <= TOL);
        }
    }
}

#[test]
fn classification_agrees_with_comparison_definiteness() {
    for k1 in 0..=2u8 {
        for k2 in 0..=2u8 {
            let epoch = Epoch::new(k1, k2).unwrap();
            let c = classify_pair(epoch).unwrap();
            let d = state_at(&CycleState::prepare(), epoch).unwrap().compare();
            match d {
                Definiteness::Definite => assert_eq!(c.verdict, Verdict::Nondemolitional),
                Definiteness::Indefinite => assert_eq!(c.verdict, Verdict::Demolitional),
            }
        }
    }
}

#[test]
fn alternative_preparation_search_is_deterministic_and_valid() {
    let a = search_alternative_preparation().expect("a preparation exists");
    let b = search_alternative_preparation().unwrap();
    assert_eq!(a.amplitudes(), b.amplitudes());

    let prep = CycleState::prepare_with(&a, Basis::Z).unwrap();
    assert_eq!(
        state_at(&prep, Epoch::new(1, 0).unwrap()).unwrap().compare(),
        Definiteness::Definite
    );
    assert_eq!(
        state_at(&prep, Epoch::new(1, 1).unwrap()).unwrap().compare(),
        Definiteness::Indefinite
    );
    // the standard preparation has the opposite pattern at both epochs
    let std_prep = CycleState::prepare();
    assert_eq!(
        state_at(&std_prep, Epoch::new(1, 0).unwrap())
            .unwrap()
            .compare(),
        Definiteness::Indefinite
    );
    assert_eq!(
        state_at(&std_prep, Epoch::new(1, 1).unwrap())
            .unwrap()
            .compare(),
        Definiteness::Definite
    );
}

#[test]
fn x_parity_run_verifies_x_parity() {
    // conjugated interactions record the singlet's x-parity: outcomes at a
    // whole-cycle epoch still XOR to 1 and the singlet survives untouched
    let prep = CycleState::prepare_with(
        &qcone::nondemolition::standard_detector_preparation(),
        Basis::X,
    )
    .unwrap();
    let s = state_at(&prep, Epoch::new(1, 1).unwrap()).unwrap();
    assert_eq!(s.compare(), Definiteness::Definite);
    for (out, post) in supported_outcomes(&s) {
        assert_eq!(out.xor(), 1);
        assert!((post.singlet_fidelity() - 1.0).abs() <= TOL);
        let f = post
            .global()
            .marginal_fidelity(&[particle(1), particle(2)], &singlet())
            .unwrap();
        assert!((f - 1.0).abs() <= TOL);
    }
}
