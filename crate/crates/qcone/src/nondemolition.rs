//! The nonlocal nondemolition protocol at desk scale.
//!
//! Two spin-1/2 particles sit in the singlet while two detector qubits,
//! prepared in the correlated pair (|00⟩ + |11⟩)/√2, interact with them.
//! Each interaction is a CNOT from a particle onto its detector; two
//! interactions per detector make one full cycle. Mid-cycle the global state
//! is not separable into particles ⊗ detectors, so the combined detector
//! variables are indefinite there; at whole-cycle epochs they are definite
//! and record the singlet's z-parity (outcome XOR) without demolishing it.
//!
//! Comparing detector records is free of consequence. *Observing* the
//! compared records projects the detectors, and whether that observation
//! demolishes the particle state depends only on the pair of worldline
//! epochs it captured, a verdict that survives any Lorentz boost, which
//! [`frame_sweep`] checks by brute force.

use crate::hilbert::{
    detector, particle, singlet, Basis, HilbertError, Outcome, Projector, StateVector, Unitary2Q,
};
use crate::nosignal::trial_rng;
use crate::spacetime::{boost, relation, Boost, CausalRelation, Event, SpacetimeError};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Maximum interactions per detector in one run; longer repetitions compose
/// two-cycle runs.
pub const MAX_INTERACTIONS: u8 = 2;

const AMPLITUDE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CycleError {
    #[error("detector index must be 1 or 2, got {0}")]
    InvalidDetector(u8),
    #[error("detector {0} has already completed its {MAX_INTERACTIONS} interactions")]
    EpochExhausted(u8),
    #[error("epoch ({k1}, {k2}) is not reachable by any valid schedule")]
    UnreachableEpoch { k1: u8, k2: u8 },
    #[error("outcome bits must be 0 or 1, got ({d1}, {d2})")]
    InvalidOutcomeBits { d1: u8, d2: u8 },
    #[error("detector outcome ({d1}, {d2}) has zero amplitude at this epoch")]
    ZeroProbabilityOutcome { d1: u8, d2: u8 },
    #[error("detector preparation must be a nonzero state over detectors 1 and 2")]
    InvalidDetectorPreparation,
    #[error("events {left} and {right} must be spacelike separated, found {relation}")]
    GeometryNotSpacelike {
        left: String,
        right: String,
        relation: CausalRelation,
    },
    #[error("detector {detector}'s interaction events must be timelike-ordered on its worldline")]
    WorldlineOrder { detector: u8 },
    #[error("schedule gives detector {detector} {count} interactions, the maximum is {MAX_INTERACTIONS}")]
    TooManyInteractions { detector: u8, count: usize },
    #[error("epoch ({k1}, {k2}) exceeds the schedule's interaction counts")]
    EpochBeyondSchedule { k1: u8, k2: u8 },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
}

/// How many interactions each detector has completed: the coordinates that
/// locate a comparison or observation on the two worldlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epoch {
    k1: u8,
    k2: u8,
}

impl Epoch {
    pub const START: Epoch = Epoch { k1: 0, k2: 0 };

    pub fn new(k1: u8, k2: u8) -> Result<Self, CycleError> {
        if k1 > MAX_INTERACTIONS || k2 > MAX_INTERACTIONS {
            return Err(CycleError::UnreachableEpoch { k1, k2 });
        }
        Ok(Epoch { k1, k2 })
    }

    pub fn k1(&self) -> u8 {
        self.k1
    }

    pub fn k2(&self) -> u8 {
        self.k2
    }

    pub fn count(&self, detector_index: u8) -> u8 {
        if detector_index == 1 {
            self.k1
        } else {
            self.k2
        }
    }
}

impl std::fmt::Display for Epoch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// Whether the combined detector variables have a definite value, decided by
/// separability of the particles ⊗ detectors partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Definiteness {
    Definite,
    Indefinite,
}

/// Verdict on observing a pair of worldline epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The observation confirms the singlet and leaves it intact.
    Nondemolitional,
    /// The observation irreversibly decouples the particles.
    Demolitional,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Nondemolitional => f.write_str("nondemolitional"),
            Verdict::Demolitional => f.write_str("demolitional"),
        }
    }
}

/// Classification of one epoch pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClassification {
    pub epoch: Epoch,
    pub verdict: Verdict,
}

/// The two recorded detector bits of a joint observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectorOutcomes {
    pub d1: u8,
    pub d2: u8,
}

impl DetectorOutcomes {
    pub fn xor(&self) -> u8 {
        self.d1 ^ self.d2
    }
}

/// How an observation picks its outcome: fixed bits for deterministic
/// replay, or sampling with the counter-based (seed, trial) generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeSelector {
    Fixed { d1: u8, d2: u8 },
    Sampled { seed: u64, trial: u64 },
}

/// The detectors' initial correlation (|00⟩ + |11⟩)/√2: individually
/// indefinite, jointly definite.
pub fn standard_detector_preparation() -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    StateVector::new(vec![detector(1), detector(2)], vec![h, zero, zero, h])
        .expect("fixed-size preparation")
}

/// Global state of the protocol: singlet ⊗ detector pair, plus the epoch.
///
/// Immutable; every operation returns a new state. The global vector keeps
/// the canonical label order particle 1, particle 2, detector 1, detector 2
/// and stays normalized at every epoch (interactions are unitary).
#[derive(Debug, Clone, PartialEq)]
pub struct CycleState {
    global: StateVector,
    epoch: Epoch,
    parity_basis: Basis,
}

impl CycleState {
    /// Standard preparation: singlet ⊗ (|00⟩ + |11⟩)/√2 at epoch (0, 0),
    /// cycling in the Z basis.
    pub fn prepare() -> CycleState {
        Self::prepare_with(&standard_detector_preparation(), Basis::Z)
            .expect("standard preparation is valid")
    }

    /// Preparation with an explicit detector state and parity basis.
    ///
    /// `detector_prep` must be a nonzero state over detectors 1 and 2 (any
    /// label order); it is normalized on entry. `Basis::X` runs the x-parity
    /// variant of the cycle: every interaction CNOT is conjugated by the
    /// X-basis rotation on its particle, so the detectors record x-parity
    /// instead of z-parity.
    pub fn prepare_with(
        detector_prep: &StateVector,
        parity_basis: Basis,
    ) -> Result<CycleState, CycleError> {
        let mut wanted = [detector(1), detector(2)];
        wanted.sort();
        let mut got: Vec<_> = detector_prep.labels().to_vec();
        got.sort();
        if got != wanted {
            return Err(CycleError::InvalidDetectorPreparation);
        }
        let prep = detector_prep
            .permuted(&[detector(1), detector(2)])?
            .normalized()
            .map_err(|_| CycleError::InvalidDetectorPreparation)?;
        let global = singlet().tensor(&prep)?;
        Ok(CycleState {
            global,
            epoch: Epoch::START,
            parity_basis,
        })
    }

    pub fn global(&self) -> &StateVector {
        &self.global
    }

    pub fn epoch(&self) -> Epoch {
        self.epoch
    }

    pub fn parity_basis(&self) -> Basis {
        self.parity_basis
    }

    /// One detector-particle interaction: CNOT from particle `detector_index`
    /// onto its detector, advancing that detector's epoch count.
    pub fn interact(&self, detector_index: u8) -> Result<CycleState, CycleError> {
        if detector_index != 1 && detector_index != 2 {
            return Err(CycleError::InvalidDetector(detector_index));
        }
        if self.epoch.count(detector_index) >= MAX_INTERACTIONS {
            return Err(CycleError::EpochExhausted(detector_index));
        }
        let p = particle(detector_index);
        let d = detector(detector_index);
        let gate = Unitary2Q::cnot(p, d)?;
        let global = match self.parity_basis {
            Basis::Z => self.global.apply(&gate)?,
            Basis::X => self
                .global
                .hadamard(p)?
                .apply(&gate)?
                .hadamard(p)?,
        };
        let epoch = if detector_index == 1 {
            Epoch::new(self.epoch.k1 + 1, self.epoch.k2)?
        } else {
            Epoch::new(self.epoch.k1, self.epoch.k2 + 1)?
        };
        Ok(CycleState {
            global,
            epoch,
            parity_basis: self.parity_basis,
        })
    }

    /// Brings the detector records together without observing them.
    ///
    /// Definite iff the global state is separable into particles ⊗
    /// detectors. No state change: comparison by itself produces no
    /// reduction.
    pub fn compare(&self) -> Definiteness {
        let separable = self
            .global
            .is_separable(&[particle(1), particle(2)])
            .expect("global state is nonzero with a proper partition");
        if separable {
            Definiteness::Definite
        } else {
            Definiteness::Indefinite
        }
    }

    /// Externally observes the compared records: a joint projective
    /// Z-measurement of both detector qubits, renormalizing the remainder.
    ///
    /// Returns the recorded bits and the post-observation state (detectors
    /// re-prepared in the observed basis states so the cycle can continue).
    pub fn observe(
        &self,
        selector: OutcomeSelector,
    ) -> Result<(DetectorOutcomes, CycleState), CycleError> {
        let outcomes = match selector {
            OutcomeSelector::Fixed { d1, d2 } => {
                if d1 > 1 || d2 > 1 {
                    return Err(CycleError::InvalidOutcomeBits { d1, d2 });
                }
                DetectorOutcomes { d1, d2 }
            }
            OutcomeSelector::Sampled { seed, trial } => {
                let probs = self
                    .global
                    .probabilities(&[detector(1), detector(2)], Basis::Z)?;
                let mut rng = trial_rng(seed, trial);
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = 3usize;
                for (k, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = k;
                        break;
                    }
                }
                DetectorOutcomes {
                    d1: (pick >> 1) as u8,
                    d2: (pick & 1) as u8,
                }
            }
        };

        let reduced = self
            .global
            .project(&Projector::z(detector(1), Outcome::from_bit(outcomes.d1 as usize)))?
            .project(&Projector::z(detector(2), Outcome::from_bit(outcomes.d2 as usize)))?;
        if reduced.norm_sqr() <= AMPLITUDE_TOLERANCE {
            return Err(CycleError::ZeroProbabilityOutcome {
                d1: outcomes.d1,
                d2: outcomes.d2,
            });
        }
        let particles = reduced.normalized()?;
        let d1_ket =
            StateVector::basis_ket(detector(1), Basis::Z, Outcome::from_bit(outcomes.d1 as usize));
        let d2_ket =
            StateVector::basis_ket(detector(2), Basis::Z, Outcome::from_bit(outcomes.d2 as usize));
        let global = particles
            .tensor(&d1_ket)?
            .tensor(&d2_ket)?
            .permuted(&[particle(1), particle(2), detector(1), detector(2)])?;
        Ok((
            outcomes,
            CycleState {
                global,
                epoch: self.epoch,
                parity_basis: self.parity_basis,
            },
        ))
    }

    /// Fidelity of the particle marginal with the singlet.
    pub fn singlet_fidelity(&self) -> f64 {
        self.global
            .marginal_fidelity(&[particle(1), particle(2)], &singlet())
            .expect("singlet and global are nonzero")
    }

    /// Fidelity of the detector marginal with a given two-detector state.
    pub fn detector_fidelity(&self, target: &StateVector) -> f64 {
        self.global
            .marginal_fidelity(&[detector(1), detector(2)], target)
            .expect("detector marginal is well defined")
    }
}

/// The state reached from a preparation after `k1` interactions of detector 1
/// and `k2` of detector 2 (order across detectors is irrelevant: the two
/// CNOTs commute).
pub fn state_at(prep: &CycleState, epoch: Epoch) -> Result<CycleState, CycleError> {
    let mut s = prep.clone();
    for _ in 0..epoch.k1 {
        s = s.interact(1)?;
    }
    for _ in 0..epoch.k2 {
        s = s.interact(2)?;
    }
    Ok(s)
}

/// Verdict for observing the detector records at the given epoch pair,
/// starting from the standard preparation.
pub fn classify_pair(epoch: Epoch) -> Result<PairClassification, CycleError> {
    classify_pair_from(&CycleState::prepare(), epoch)
}

/// Verdict for an arbitrary preparation: demolitional iff a comparison at
/// that epoch is indefinite.
pub fn classify_pair_from(
    prep: &CycleState,
    epoch: Epoch,
) -> Result<PairClassification, CycleError> {
    let verdict = match state_at(prep, epoch)?.compare() {
        Definiteness::Definite => Verdict::Nondemolitional,
        Definiteness::Indefinite => Verdict::Demolitional,
    };
    Ok(PairClassification { epoch, verdict })
}

/// The spacetime layout of the interaction events: each detector's
/// interactions in worldline order, with every left event spacelike from
/// every right event.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSchedule {
    detector1: Vec<Event>,
    detector2: Vec<Event>,
}

impl InteractionSchedule {
    pub fn new(detector1: Vec<Event>, detector2: Vec<Event>) -> Result<Self, CycleError> {
        for (idx, events) in [(1u8, &detector1), (2u8, &detector2)] {
            if events.len() > MAX_INTERACTIONS as usize {
                return Err(CycleError::TooManyInteractions {
                    detector: idx,
                    count: events.len(),
                });
            }
            for pair in events.windows(2) {
                if relation(&pair[0], &pair[1]) != CausalRelation::TimelikeFuture {
                    return Err(CycleError::WorldlineOrder { detector: idx });
                }
            }
        }
        for left in &detector1 {
            for right in &detector2 {
                let rel = relation(left, right);
                if rel != CausalRelation::Spacelike {
                    return Err(CycleError::GeometryNotSpacelike {
                        left: left.display_name(),
                        right: right.display_name(),
                        relation: rel,
                    });
                }
            }
        }
        Ok(InteractionSchedule {
            detector1,
            detector2,
        })
    }

    pub fn detector1(&self) -> &[Event] {
        &self.detector1
    }

    pub fn detector2(&self) -> &[Event] {
        &self.detector2
    }

    /// The interactions included at `epoch`, tagged with their detector and
    /// ordered by the given frame's time coordinate.
    fn ordered_interactions(
        &self,
        epoch: Epoch,
        frame: Option<Boost>,
    ) -> Result<Vec<(u8, Event)>, CycleError> {
        if epoch.k1 as usize > self.detector1.len() || epoch.k2 as usize > self.detector2.len() {
            return Err(CycleError::EpochBeyondSchedule {
                k1: epoch.k1,
                k2: epoch.k2,
            });
        }
        let mut events: Vec<(u8, Event)> = Vec::new();
        for e in &self.detector1[..epoch.k1 as usize] {
            events.push((1, e.clone()));
        }
        for e in &self.detector2[..epoch.k2 as usize] {
            events.push((2, e.clone()));
        }
        if let Some(b) = frame {
            for (_, e) in &mut events {
                *e = boost(e, b)?;
            }
        }
        events.sort_by(|a, b| a.1.t.partial_cmp(&b.1.t).expect("finite coordinates"));
        Ok(events)
    }
}

/// Checks that the verdict for an epoch pair is the same in every boosted
/// frame, replaying the interactions in each frame's own time order.
///
/// Interactions on disjoint subsystem pairs commute, so the global state
/// must come out identical; any amplitude drifting past 1e−12, or any
/// verdict flip, returns false.
pub fn frame_sweep(
    schedule: &InteractionSchedule,
    epoch: Epoch,
    boosts: &[Boost],
) -> Result<bool, CycleError> {
    frame_sweep_from(&CycleState::prepare(), schedule, epoch, boosts)
}

/// [`frame_sweep`] from an explicit preparation.
pub fn frame_sweep_from(
    prep: &CycleState,
    schedule: &InteractionSchedule,
    epoch: Epoch,
    boosts: &[Boost],
) -> Result<bool, CycleError> {
    let replay = |frame: Option<Boost>| -> Result<CycleState, CycleError> {
        let mut s = prep.clone();
        for (det, _) in schedule.ordered_interactions(epoch, frame)? {
            s = s.interact(det)?;
        }
        Ok(s)
    };
    let base = replay(None)?;
    let base_verdict = classify_pair_from(prep, epoch)?.verdict;
    if verdict_of(&base) != base_verdict {
        return Ok(false);
    }
    for b in boosts {
        let boosted = replay(Some(*b))?;
        if verdict_of(&boosted) != base_verdict {
            return Ok(false);
        }
        let drift = base
            .global()
            .amplitudes()
            .iter()
            .zip(boosted.global().amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if drift > AMPLITUDE_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verdict_of(s: &CycleState) -> Verdict {
    match s.compare() {
        Definiteness::Definite => Verdict::Nondemolitional,
        Definiteness::Indefinite => Verdict::Demolitional,
    }
}

/// Searches the two-detector preparation space for a state that swaps the
/// definite/indefinite pattern: epoch (1, 0) definite, epoch (1, 1)
/// indefinite.
///
/// Scans a fixed grid of amplitudes in {0, ±1/2, ±1/√2, ±1} and returns the
/// first (normalized) hit; deterministic, so the exhibited preparation is
/// stable across runs.
pub fn search_alternative_preparation() -> Option<StateVector> {
    const VALUES: [f64; 7] = [
        0.0,
        0.5,
        -0.5,
        std::f64::consts::FRAC_1_SQRT_2,
        -std::f64::consts::FRAC_1_SQRT_2,
        1.0,
        -1.0,
    ];
    let labels = vec![detector(1), detector(2)];
    for a0 in VALUES {
        for a1 in VALUES {
            for a2 in VALUES {
                for a3 in VALUES {
                    let amps: Vec<Complex64> =
                        [a0, a1, a2, a3].iter().map(|&re| Complex64::new(re, 0.0)).collect();
                    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                    if norm_sqr < 1e-9 {
                        continue;
                    }
                    let candidate = StateVector::new(labels.clone(), amps).expect("grid state");
                    let prep = match CycleState::prepare_with(&candidate, Basis::Z) {
                        Ok(p) => p,
                        Err(_) => continue,
                    };
                    let after_one = prep.interact(1).expect("epoch 0 -> 1");
                    if after_one.compare() != Definiteness::Definite {
                        continue;
                    }
                    let after_two = after_one.interact(2).expect("epoch 1 -> (1,1)");
                    if after_two.compare() == Definiteness::Indefinite {
                        return Some(candidate.normalized().expect("nonzero candidate"));
                    }
                }
            }
        }
    }
    None
}
