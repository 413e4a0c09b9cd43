//! No-signaling statistics for two spacelike observers of an entangled pair.
//!
//! Observer A may observe their particle (in Z or X) or skip the
//! observation; observer B always measures in Z. The exact engine computes
//! B's marginal by summing joint reduction weights, and it must come out
//! {0.5, 0.5} no matter what A does: parameter independence. Conditioning
//! on A's actual *outcome* is a different question: for the singlet that
//! conditional is degenerate. That is outcome dependence, the correlation that
//! carries no message.
//!
//! A seeded Monte Carlo layer demonstrates the ensemble version of the same
//! claims. Every trial draws from its own counter-based generator keyed by
//! (seed, trial index), so runs are reproducible bit for bit no matter how
//! trials are scheduled.

use crate::collapse::{effective_state, CollapseError, Observation};
use crate::hilbert::{particle, singlet, Basis, HilbertError, Outcome, Projector, StateVector};
use crate::spacetime::{relation, CausalRelation, Event};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tolerance for the exact engine's equalities.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NosignalError {
    #[error("the initial state must contain particles 1 and 2")]
    MissingParticles,
    #[error("observation sites must be spacelike separated, found {0}")]
    NotSpacelike(CausalRelation),
    #[error("conditioning outcome has probability zero")]
    ZeroProbabilityCondition,
    #[error("trial count must be at least {required}, got {got}")]
    TooFewTrials { required: usize, got: usize },
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derived sub-seed for one trial: a pure function of (seed, trial index).
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// The per-trial generator. Trials never share generator state, so
/// trial-level parallelism cannot change results.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, trial))
}

/// A's free choices: whether to observe at all, and in which basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub a_observes: bool,
    pub a_basis: Basis,
}

impl Strategy {
    pub fn observing(basis: Basis) -> Self {
        Strategy {
            a_observes: true,
            a_basis: basis,
        }
    }

    pub fn silent() -> Self {
        Strategy {
            a_observes: false,
            a_basis: Basis::Z,
        }
    }
}

/// One simulated run of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub strategy: Strategy,
    /// Present exactly when the strategy observes at A.
    pub a_outcome: Option<Outcome>,
    pub b_outcome: Outcome,
    /// The derived sub-seed this trial's generator was keyed with.
    pub seed: u64,
}

/// Aggregated output of [`Experiment::run_trials`].
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub records: Vec<TrialRecord>,
    /// Empirical P(B = up), P(B = down).
    pub b_frequency: [f64; 2],
    /// Empirical joint frequencies `[a_bit][b_bit]` when A observes.
    pub joint_frequency: Option<[[f64; 2]; 2]>,
}

/// Verdict of the two-sample signaling test.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingReport {
    pub trials_per_arm: usize,
    pub seed: u64,
    /// Largest exact-engine marginal deviation across all strategies.
    pub exact_difference: f64,
    /// Empirical P(B = down) with A observing and with A silent.
    pub empirical_b_down: [f64; 2],
    pub observed_difference: f64,
    /// Combined standard error of the difference of proportions.
    pub standard_error: f64,
    /// Pooled two-sample proportion statistic (z²).
    pub chi_square: f64,
    pub within_three_sigma: bool,
    pub exact_pass: bool,
    pub passed: bool,
}

enum TrialWeights {
    Joint([[f64; 2]; 2]),
    Marginal([f64; 2]),
}

/// A fixed experimental arrangement: an initial two-particle state and the
/// spacelike observation sites of A and B.
#[derive(Debug, Clone)]
pub struct Experiment {
    initial: StateVector,
    a_event: Event,
    b_event: Event,
}

impl Experiment {
    /// The canonical arrangement: the singlet with A at (0, −1), B at (0, 1).
    pub fn standard() -> Experiment {
        Experiment::new(
            singlet(),
            Event::labeled(0.0, -1.0, "A"),
            Event::labeled(0.0, 1.0, "B"),
        )
        .expect("standard arrangement is valid")
    }

    /// Arbitrary arrangement. The state must contain both particles and is
    /// normalized on entry; the sites must be spacelike separated.
    pub fn new(
        initial: StateVector,
        a_event: Event,
        b_event: Event,
    ) -> Result<Experiment, NosignalError> {
        if initial.position(particle(1)).is_none() || initial.position(particle(2)).is_none() {
            return Err(NosignalError::MissingParticles);
        }
        let rel = relation(&a_event, &b_event);
        if rel != CausalRelation::Spacelike {
            return Err(NosignalError::NotSpacelike(rel));
        }
        let initial = initial.normalized()?;
        Ok(Experiment {
            initial,
            a_event,
            b_event,
        })
    }

    /// Joint reduction weights w[a][b] for A observing in `a_basis`,
    /// computed through the reduction engine at B's site.
    fn joint_weights(&self, a_basis: Basis) -> Result<[[f64; 2]; 2], NosignalError> {
        let mut w = [[0.0; 2]; 2];
        for a_out in [Outcome::Up, Outcome::Down] {
            let obs = Observation::new(
                self.a_event.clone(),
                Projector::new(particle(1), a_basis, a_out),
            );
            let report = effective_state(&self.initial, &self.b_event, &[obs])?;
            for b_out in [Outcome::Up, Outcome::Down] {
                let ket = report
                    .effective_ket
                    .project(&Projector::z(particle(2), b_out))?;
                w[a_out.bit()][b_out.bit()] = ket.norm_sqr();
            }
        }
        Ok(w)
    }

    /// B's exact marginal distribution [P(up), P(down)] under a strategy.
    ///
    /// With A observing this sums joint reduction weights over A's outcomes;
    /// with A silent it reads the unreduced state directly. Sums to one.
    pub fn exact_marginal_b(&self, strategy: Strategy) -> Result<[f64; 2], NosignalError> {
        if strategy.a_observes {
            let w = self.joint_weights(strategy.a_basis)?;
            Ok([w[0][0] + w[1][0], w[0][1] + w[1][1]])
        } else {
            let p = self.initial.probabilities(&[particle(2)], Basis::Z)?;
            Ok([p[0], p[1]])
        }
    }

    /// B's exact conditional distribution given A's outcome in `a_basis`.
    pub fn exact_conditional_b(
        &self,
        a_basis: Basis,
        a_outcome: Outcome,
    ) -> Result<[f64; 2], NosignalError> {
        let w = self.joint_weights(a_basis)?;
        let row = w[a_outcome.bit()];
        let total = row[0] + row[1];
        if total <= EXACT_TOLERANCE {
            return Err(NosignalError::ZeroProbabilityCondition);
        }
        Ok([row[0] / total, row[1] / total])
    }

    fn sample_trial(
        weights: &TrialWeights,
        rng: &mut ChaCha8Rng,
        bias: f64,
    ) -> (Option<Outcome>, Outcome) {
        match weights {
            TrialWeights::Joint(w) => {
                // A's outcome first, then B's conditional (with the optional
                // injected leak shifting B toward down).
                let p_a_up = w[0][0] + w[0][1];
                let u: f64 = rng.gen();
                let a_out = if u < p_a_up { Outcome::Up } else { Outcome::Down };
                let row = w[a_out.bit()];
                let total = row[0] + row[1];
                let mut p_down = if total > 0.0 { row[1] / total } else { 0.0 };
                p_down = (p_down + bias).clamp(0.0, 1.0);
                let v: f64 = rng.gen();
                let b_out = if v < p_down { Outcome::Down } else { Outcome::Up };
                (Some(a_out), b_out)
            }
            TrialWeights::Marginal(m) => {
                let u: f64 = rng.gen();
                let b_out = if u < m[1] { Outcome::Down } else { Outcome::Up };
                (None, b_out)
            }
        }
    }

    /// Runs `n` seeded trials. Output is a pure function of
    /// (strategy, n, seed).
    pub fn run_trials(
        &self,
        strategy: Strategy,
        n: usize,
        seed: u64,
    ) -> Result<TrialRun, NosignalError> {
        if n < 1 {
            return Err(NosignalError::TooFewTrials { required: 1, got: n });
        }
        self.run_trials_with_bias(strategy, n, seed, 0.0)
    }

    fn run_trials_with_bias(
        &self,
        strategy: Strategy,
        n: usize,
        seed: u64,
        bias: f64,
    ) -> Result<TrialRun, NosignalError> {
        // the exact distributions are computed once; trials only consume them
        let weights = if strategy.a_observes {
            TrialWeights::Joint(self.joint_weights(strategy.a_basis)?)
        } else {
            TrialWeights::Marginal(self.exact_marginal_b(strategy)?)
        };
        let mut records = Vec::with_capacity(n);
        let mut b_counts = [0usize; 2];
        let mut joint_counts = [[0usize; 2]; 2];
        for trial in 0..n as u64 {
            let sub = trial_seed(seed, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(sub);
            let (a_outcome, b_outcome) = Self::sample_trial(&weights, &mut rng, bias);
            b_counts[b_outcome.bit()] += 1;
            if let Some(a) = a_outcome {
                joint_counts[a.bit()][b_outcome.bit()] += 1;
            }
            records.push(TrialRecord {
                strategy,
                a_outcome,
                b_outcome,
                seed: sub,
            });
        }
        let nf = n as f64;
        Ok(TrialRun {
            records,
            b_frequency: [b_counts[0] as f64 / nf, b_counts[1] as f64 / nf],
            joint_frequency: strategy.a_observes.then(|| {
                [
                    [
                        joint_counts[0][0] as f64 / nf,
                        joint_counts[0][1] as f64 / nf,
                    ],
                    [
                        joint_counts[1][0] as f64 / nf,
                        joint_counts[1][1] as f64 / nf,
                    ],
                ]
            }),
        })
    }

    /// The full signaling check: exact marginals across every strategy, plus
    /// a two-sample proportion test between the A-observes and A-silent
    /// Monte Carlo arms, passing within three combined standard errors.
    pub fn signaling_test(&self, n: usize, seed: u64) -> Result<SignalingReport, NosignalError> {
        self.signaling_test_with_bias(n, seed, 0.0)
    }

    /// Test fixture: same as [`Experiment::signaling_test`] but leaking A's
    /// choice into B's sampled marginal by `bias`. Exists to prove the test
    /// has the power to catch a genuine violation; physics keeps bias at 0.
    pub fn signaling_test_with_bias(
        &self,
        n: usize,
        seed: u64,
        bias: f64,
    ) -> Result<SignalingReport, NosignalError> {
        if n < 100 {
            return Err(NosignalError::TooFewTrials {
                required: 100,
                got: n,
            });
        }

        let baseline = self.exact_marginal_b(Strategy::silent())?;
        let mut exact_difference: f64 = 0.0;
        for strategy in [
            Strategy::observing(Basis::Z),
            Strategy::observing(Basis::X),
            Strategy {
                a_observes: false,
                a_basis: Basis::X,
            },
        ] {
            let m = self.exact_marginal_b(strategy)?;
            exact_difference = exact_difference
                .max((m[0] - baseline[0]).abs())
                .max((m[1] - baseline[1]).abs());
        }
        let exact_pass = exact_difference <= EXACT_TOLERANCE;

        let observing = self.run_trials_with_bias(
            Strategy::observing(Basis::Z),
            n,
            trial_seed(seed, 0xA),
            bias,
        )?;
        let silent =
            self.run_trials_with_bias(Strategy::silent(), n, trial_seed(seed, 0xB), 0.0)?;

        let p1 = observing.b_frequency[1];
        let p2 = silent.b_frequency[1];
        let nf = n as f64;
        let observed_difference = (p1 - p2).abs();
        let standard_error = (p1 * (1.0 - p1) / nf + p2 * (1.0 - p2) / nf).sqrt();
        let pooled = (p1 + p2) / 2.0;
        let pooled_var = pooled * (1.0 - pooled) * (2.0 / nf);
        let chi_square = if pooled_var > 0.0 {
            (p1 - p2) * (p1 - p2) / pooled_var
        } else {
            0.0
        };
        let within_three_sigma = if standard_error > 0.0 {
            observed_difference <= 3.0 * standard_error
        } else {
            observed_difference == 0.0
        };

        Ok(SignalingReport {
            trials_per_arm: n,
            seed,
            exact_difference,
            empirical_b_down: [p1, p2],
            observed_difference,
            standard_error,
            chi_square,
            within_three_sigma,
            exact_pass,
            passed: exact_pass && within_three_sigma,
        })
    }
}
