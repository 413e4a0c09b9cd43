//! Exact complex state vectors over labeled two-level subsystems.
//!
//! States live in the tensor product of up to eight qubits, each tagged as a
//! particle or a detector. The basis convention is fixed once: bit 0 of a
//! subsystem is |↑⟩ for particles and |0⟩ for detectors, bit 1 is |↓⟩ / |1⟩,
//! and the first label in a state's label list is the most significant bit of
//! the amplitude index.
//!
//! States may be unnormalized. Projections return the unrenormalized reduced
//! ket so its squared norm is directly the outcome probability of a
//! normalized input; renormalization is always an explicit, separate step.

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on subsystem count (amplitude vectors of length 2⁸ = 256).
pub const MAX_SUBSYSTEMS: usize = 8;

/// Reduced-density-matrix purity at or above 1 − this bound counts as
/// Schmidt rank one, i.e. separable across the partition.
pub const SEPARABILITY_TOLERANCE: f64 = 1e-9;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("subsystem {0} is not part of this state")]
    UnknownLabel(SubsystemLabel),
    #[error("subsystem {0} appears more than once")]
    DuplicateLabel(SubsystemLabel),
    #[error("amplitude vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state would have {0} subsystems, the maximum is {MAX_SUBSYSTEMS}")]
    TooManySubsystems(usize),
    #[error("operation undefined on the zero vector")]
    ZeroState,
    #[error("partition must be a proper nonempty subset of the state's subsystems")]
    TrivialPartition,
    #[error("control and target must differ, both are {0}")]
    ControlEqualsTarget(SubsystemLabel),
    #[error("states are over different subsystem sets")]
    LabelSetMismatch,
}

/// What a two-level subsystem stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsystemKind {
    Particle,
    Detector,
}

/// Identity of one two-level subsystem: a kind plus a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsystemLabel {
    kind: SubsystemKind,
    index: u8,
}

impl SubsystemLabel {
    pub fn new(kind: SubsystemKind, index: u8) -> Self {
        assert!(index >= 1, "subsystem indices start at 1");
        SubsystemLabel { kind, index }
    }

    pub fn kind(&self) -> SubsystemKind {
        self.kind
    }

    pub fn index(&self) -> u8 {
        self.index
    }
}

/// Shorthand for the particle with the given 1-based index.
pub fn particle(index: u8) -> SubsystemLabel {
    SubsystemLabel::new(SubsystemKind::Particle, index)
}

/// Shorthand for the detector with the given 1-based index.
pub fn detector(index: u8) -> SubsystemLabel {
    SubsystemLabel::new(SubsystemKind::Detector, index)
}

impl std::fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            SubsystemKind::Particle => write!(f, "particle {}", self.index),
            SubsystemKind::Detector => write!(f, "detector {}", self.index),
        }
    }
}

/// Measurement basis for a two-level subsystem.
///
/// Z is the computational basis; X uses |±⟩ = (|↑⟩ ± |↓⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

/// One of the two outcomes of a subsystem measurement.
///
/// `Up` is bit 0 (particle |↑⟩, detector |0⟩, or |+⟩ in the X basis);
/// `Down` is bit 1. The detector-flavored aliases [`Outcome::ZERO`] and
/// [`Outcome::ONE`] name the same two values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub const ZERO: Outcome = Outcome::Up;
    pub const ONE: Outcome = Outcome::Down;

    pub fn bit(self) -> usize {
        match self {
            Outcome::Up => 0,
            Outcome::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }
}

/// Rank-one projector ⟨outcome| on a single subsystem, in the Z or X basis.
///
/// Applying it removes the subsystem from the state and leaves the
/// unrenormalized partial inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    target: SubsystemLabel,
    basis: Basis,
    outcome: Outcome,
}

impl Projector {
    pub fn new(target: SubsystemLabel, basis: Basis, outcome: Outcome) -> Self {
        Projector {
            target,
            basis,
            outcome,
        }
    }

    pub fn z(target: SubsystemLabel, outcome: Outcome) -> Self {
        Self::new(target, Basis::Z, outcome)
    }

    pub fn x(target: SubsystemLabel, outcome: Outcome) -> Self {
        Self::new(target, Basis::X, outcome)
    }

    pub fn target(&self) -> SubsystemLabel {
        self.target
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    /// The single-subsystem ket this projector selects, e.g. |↓⟩ or |+⟩.
    pub fn selected_ket(&self) -> StateVector {
        StateVector::basis_ket(self.target, self.basis, self.outcome)
    }
}

impl std::fmt::Display for Projector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sym = match (self.target.kind(), self.basis, self.outcome) {
            (SubsystemKind::Particle, Basis::Z, Outcome::Up) => "up",
            (SubsystemKind::Particle, Basis::Z, Outcome::Down) => "down",
            (_, Basis::X, Outcome::Up) => "plus",
            (_, Basis::X, Outcome::Down) => "minus",
            (SubsystemKind::Detector, Basis::Z, Outcome::Up) => "0",
            (SubsystemKind::Detector, Basis::Z, Outcome::Down) => "1",
        };
        write!(f, "<{sym}| on {}", self.target)
    }
}

/// Two-subsystem unitary; the only kind this model needs is the CNOT whose
/// flipping control value is bit 0 (particle |↑⟩).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unitary2Q {
    control: SubsystemLabel,
    target: SubsystemLabel,
    kind: UnitaryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitaryKind {
    /// Flips the target's bit when the control is in its bit-0 state.
    ///
    /// The |↑⟩-controls-a-flip convention is what makes the detector parity
    /// model come out with the usual 0/1 bookkeeping; the opposite convention
    /// works identically with relabeled detector outcomes, so one had to be
    /// fixed and documented.
    Cnot,
}

impl Unitary2Q {
    pub fn cnot(control: SubsystemLabel, target: SubsystemLabel) -> Result<Self, HilbertError> {
        if control == target {
            return Err(HilbertError::ControlEqualsTarget(control));
        }
        Ok(Unitary2Q {
            control,
            target,
            kind: UnitaryKind::Cnot,
        })
    }

    pub fn control(&self) -> SubsystemLabel {
        self.control
    }

    pub fn target(&self) -> SubsystemLabel {
        self.target
    }

    pub fn kind(&self) -> UnitaryKind {
        self.kind
    }
}

/// A (possibly unnormalized) complex amplitude vector over a labeled tensor
/// product of two-level subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<SubsystemLabel>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from explicit labels and amplitudes.
    ///
    /// The amplitude vector must have length 2ⁿ for n labels, the labels must
    /// be distinct, and n may not exceed [`MAX_SUBSYSTEMS`].
    pub fn new(labels: Vec<SubsystemLabel>, amps: Vec<Complex64>) -> Result<Self, HilbertError> {
        if labels.len() > MAX_SUBSYSTEMS {
            return Err(HilbertError::TooManySubsystems(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(HilbertError::DuplicateLabel(*l));
            }
        }
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(HilbertError::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        Ok(StateVector { labels, amps })
    }

    /// Single-subsystem basis ket: |↑⟩/|↓⟩ in Z, |+⟩/|−⟩ in X.
    pub fn basis_ket(label: SubsystemLabel, basis: Basis, outcome: Outcome) -> Self {
        let amps = match (basis, outcome) {
            (Basis::Z, Outcome::Up) => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            (Basis::Z, Outcome::Down) => vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            (Basis::X, Outcome::Up) => vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
            (Basis::X, Outcome::Down) => vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ],
        };
        StateVector {
            labels: vec![label],
            amps,
        }
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn num_subsystems(&self) -> usize {
        self.labels.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Position of a label in the label list, if present.
    pub fn position(&self, label: SubsystemLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    /// Bit shift for the label at `pos` (first label is most significant).
    fn shift(&self, pos: usize) -> usize {
        self.labels.len() - 1 - pos
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }

    /// Unit-norm copy; the zero vector cannot be normalized.
    pub fn normalized(&self) -> Result<StateVector, HilbertError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(HilbertError::ZeroState);
        }
        let amps = self.amps.iter().map(|a| a / n).collect();
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Inner product ⟨self|other⟩. The states must cover the same subsystem
    /// set; `other` is reordered to this state's label order first.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, HilbertError> {
        let aligned = other.permuted(&self.labels)?;
        Ok(self
            .amps
            .iter()
            .zip(aligned.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap |⟨self|other⟩|² of the normalized states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, HilbertError> {
        let ns = self.norm_sqr();
        let no = other.norm_sqr();
        if ns == 0.0 || no == 0.0 {
            return Err(HilbertError::ZeroState);
        }
        Ok(self.inner(other)?.norm_sqr() / (ns * no))
    }

    /// Tensor product. Label sets must be disjoint; this state's labels come
    /// first (most significant).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, HilbertError> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(HilbertError::DuplicateLabel(*l));
            }
        }
        let n = self.labels.len() + other.labels.len();
        if n > MAX_SUBSYSTEMS {
            return Err(HilbertError::TooManySubsystems(n));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { labels, amps })
    }

    /// Partial inner product with ⟨outcome| on the projector's target.
    ///
    /// The target subsystem is removed from the label list and the result is
    /// left unrenormalized, so for a normalized input its squared norm is the
    /// probability of that outcome.
    pub fn project(&self, p: &Projector) -> Result<StateVector, HilbertError> {
        let pos = self
            .position(p.target())
            .ok_or(HilbertError::UnknownLabel(p.target()))?;
        let shift = self.shift(pos);
        let half = self.amps.len() / 2;
        let mut amps = vec![Complex64::new(0.0, 0.0); half];
        let low_mask = (1usize << shift) - 1;
        for (i, a) in self.amps.iter().enumerate() {
            let bit = (i >> shift) & 1;
            let reduced = ((i >> (shift + 1)) << shift) | (i & low_mask);
            let coeff = match p.basis() {
                Basis::Z => {
                    if bit == p.outcome().bit() {
                        1.0
                    } else {
                        0.0
                    }
                }
                // ⟨±| has components (1, ±1)/√2
                Basis::X => {
                    if bit == 1 && p.outcome() == Outcome::Down {
                        -FRAC_1_SQRT_2
                    } else {
                        FRAC_1_SQRT_2
                    }
                }
            };
            if coeff != 0.0 {
                amps[reduced] += coeff * a;
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok(StateVector { labels, amps })
    }

    /// Applies the CNOT truth table: the target bit flips exactly when the
    /// control is in its bit-0 state. A pure permutation of amplitudes, so
    /// the norm is preserved bit for bit.
    pub fn apply(&self, u: &Unitary2Q) -> Result<StateVector, HilbertError> {
        let cpos = self
            .position(u.control())
            .ok_or(HilbertError::UnknownLabel(u.control()))?;
        let tpos = self
            .position(u.target())
            .ok_or(HilbertError::UnknownLabel(u.target()))?;
        let cshift = self.shift(cpos);
        let tshift = self.shift(tpos);
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = if (i >> cshift) & 1 == 0 {
                i ^ (1usize << tshift)
            } else {
                i
            };
            amps[j] = *a;
        }
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Hadamard rotation on one subsystem, exchanging the Z and X bases.
    pub fn hadamard(&self, target: SubsystemLabel) -> Result<StateVector, HilbertError> {
        let pos = self
            .position(target)
            .ok_or(HilbertError::UnknownLabel(target))?;
        let shift = self.shift(pos);
        let mut amps = self.amps.clone();
        for i in 0..self.amps.len() {
            if (i >> shift) & 1 == 0 {
                let j = i | (1usize << shift);
                let a0 = amps[i];
                let a1 = amps[j];
                amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
                amps[j] = (a0 - a1) * FRAC_1_SQRT_2;
            }
        }
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Reorders the subsystems to `new_order`, which must be a permutation of
    /// the current labels.
    pub fn permuted(&self, new_order: &[SubsystemLabel]) -> Result<StateVector, HilbertError> {
        if new_order.len() != self.labels.len() {
            return Err(HilbertError::LabelSetMismatch);
        }
        // old position of each new slot
        let mut from = Vec::with_capacity(new_order.len());
        for l in new_order {
            let pos = self.position(*l).ok_or(HilbertError::LabelSetMismatch)?;
            if from.contains(&pos) {
                return Err(HilbertError::DuplicateLabel(*l));
            }
            from.push(pos);
        }
        let n = self.labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (new_pos, old_pos) in from.iter().enumerate() {
                let bit = (i >> (n - 1 - old_pos)) & 1;
                j |= bit << (n - 1 - new_pos);
            }
            amps[j] = *a;
        }
        Ok(StateVector {
            labels: new_order.to_vec(),
            amps,
        })
    }

    /// Outcome distribution for measuring `targets` in the given basis.
    ///
    /// Index `k` of the result is the probability of the outcome pattern whose
    /// bits follow the order of `targets`, first target most significant. The
    /// state is normalized internally; probabilities sum to one.
    pub fn probabilities(
        &self,
        targets: &[SubsystemLabel],
        basis: Basis,
    ) -> Result<Vec<f64>, HilbertError> {
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(HilbertError::ZeroState);
        }
        let mut rotated;
        let state = match basis {
            Basis::Z => self,
            Basis::X => {
                rotated = self.clone();
                for t in targets {
                    rotated = rotated.hadamard(*t)?;
                }
                &rotated
            }
        };
        let mut shifts = Vec::with_capacity(targets.len());
        for t in targets {
            let pos = state.position(*t).ok_or(HilbertError::UnknownLabel(*t))?;
            if shifts.contains(&state.shift(pos)) {
                return Err(HilbertError::DuplicateLabel(*t));
            }
            shifts.push(state.shift(pos));
        }
        let mut probs = vec![0.0; 1 << targets.len()];
        for (i, a) in state.amps.iter().enumerate() {
            let mut k = 0usize;
            for (out_pos, shift) in shifts.iter().enumerate() {
                let bit = (i >> shift) & 1;
                k |= bit << (targets.len() - 1 - out_pos);
            }
            probs[k] += a.norm_sqr();
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(probs)
    }

    /// Purity Tr(ρ²) of the reduced density matrix on `partition`.
    ///
    /// One for product states across the cut, 1/2ᵏ at maximal entanglement.
    pub fn purity(&self, partition: &[SubsystemLabel]) -> Result<f64, HilbertError> {
        let (rows, cols, reshaped) = self.reshape(partition)?;
        // rho = M M† / norm²; purity = Σ |rho_{rr'}|²
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(HilbertError::ZeroState);
        }
        let mut purity = 0.0;
        for r in 0..rows {
            for rp in 0..rows {
                let mut entry = Complex64::new(0.0, 0.0);
                for c in 0..cols {
                    entry += reshaped[r * cols + c] * reshaped[rp * cols + c].conj();
                }
                purity += entry.norm_sqr();
            }
        }
        Ok(purity / (total * total))
    }

    /// True iff the state factorizes across `partition` | complement, decided
    /// by reduced-state purity within [`SEPARABILITY_TOLERANCE`].
    pub fn is_separable(&self, partition: &[SubsystemLabel]) -> Result<bool, HilbertError> {
        if self.is_zero() {
            return Err(HilbertError::ZeroState);
        }
        if partition.is_empty() || partition.len() >= self.labels.len() {
            return Err(HilbertError::TrivialPartition);
        }
        Ok(self.purity(partition)? >= 1.0 - SEPARABILITY_TOLERANCE)
    }

    /// ⟨target|ρ|target⟩ for the reduced state ρ on `partition`.
    ///
    /// `target` must be a (nonzero) state over exactly the partition labels.
    /// Equals ordinary fidelity when the state factorizes, and measures how
    /// much of the marginal sits on `target` otherwise.
    pub fn marginal_fidelity(
        &self,
        partition: &[SubsystemLabel],
        target: &StateVector,
    ) -> Result<f64, HilbertError> {
        let (rows, cols, reshaped) = self.reshape(partition)?;
        let total = self.norm_sqr();
        let target_norm = target.norm_sqr();
        if total == 0.0 || target_norm == 0.0 {
            return Err(HilbertError::ZeroState);
        }
        let aligned = target.permuted(partition)?;
        debug_assert_eq!(aligned.amps.len(), rows);
        let mut overlap = 0.0;
        for c in 0..cols {
            let mut dot = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                dot += aligned.amps[r].conj() * reshaped[r * cols + c];
            }
            overlap += dot.norm_sqr();
        }
        Ok(overlap / (total * target_norm))
    }

    /// Rearranges amplitudes into a (partition × complement) matrix, row
    /// index over the partition labels in the order given.
    fn reshape(
        &self,
        partition: &[SubsystemLabel],
    ) -> Result<(usize, usize, Vec<Complex64>), HilbertError> {
        if partition.is_empty() || partition.len() >= self.labels.len() {
            return Err(HilbertError::TrivialPartition);
        }
        let mut row_shifts = Vec::with_capacity(partition.len());
        for l in partition {
            let pos = self.position(*l).ok_or(HilbertError::UnknownLabel(*l))?;
            let s = self.shift(pos);
            if row_shifts.contains(&s) {
                return Err(HilbertError::DuplicateLabel(*l));
            }
            row_shifts.push(s);
        }
        let col_shifts: Vec<usize> = (0..self.labels.len())
            .map(|pos| self.shift(pos))
            .filter(|s| !row_shifts.contains(s))
            .collect();
        let rows = 1usize << row_shifts.len();
        let cols = 1usize << col_shifts.len();
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        for (i, a) in self.amps.iter().enumerate() {
            let mut r = 0usize;
            for (k, s) in row_shifts.iter().enumerate() {
                r |= ((i >> s) & 1) << (row_shifts.len() - 1 - k);
            }
            let mut c = 0usize;
            for (k, s) in col_shifts.iter().enumerate() {
                c |= ((i >> s) & 1) << (col_shifts.len() - 1 - k);
            }
            out[r * cols + c] = *a;
        }
        Ok((rows, cols, out))
    }
}

/// The two-particle spin singlet |0,0⟩ = (|↑⟩₁|↓⟩₂ − |↓⟩₁|↑⟩₂)/√2.
///
/// Total angular momentum zero: anti-correlated in every measurement basis,
/// and the canonical maximally entangled state of this crate.
pub fn singlet() -> StateVector {
    let zero = Complex64::new(0.0, 0.0);
    StateVector {
        labels: vec![particle(1), particle(2)],
        amps: vec![
            zero,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
            zero,
        ],
    }
}
