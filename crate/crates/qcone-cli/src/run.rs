//! Dispatches a validated scenario to the engines and assembles the report.

use crate::report::*;
use crate::scenario::{
    ClassifyPlan, CycleOutcome, CyclesPlan, DetectorPrep, NosignalPlan, Plan, ReductionPlan,
    Scenario,
};
use qcone::collapse::{effective_state, CollapseError, Observation};
use qcone::hilbert::{Basis, HilbertError, Outcome, StateVector};
use qcone::nondemolition::{
    classify_pair_from, frame_sweep_from, search_alternative_preparation,
    standard_detector_preparation, state_at, CycleError, CycleState, Definiteness,
    OutcomeSelector, Verdict,
};
use qcone::nosignal::{trial_seed, Experiment, NosignalError, Strategy};
use qcone::spacetime::{boost, Boost, SpacetimeError};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("engine failure in {mode} mode: {source}")]
pub struct RunError {
    pub mode: &'static str,
    #[source]
    pub source: EngineError,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Nosignal(#[from] NosignalError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
    #[error("the alternative-preparation search found no candidate")]
    NoAlternativePreparation,
}

/// A finished run: the report plus whether a statistical gate failed (which
/// maps to its own exit code rather than an error).
#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    pub statistical_failure: bool,
}

/// Runs a scenario. `extra_boosts` come from the command line and are
/// appended to the scenario's own list; `seed_override` takes precedence
/// over the scenario's seed.
pub fn run(
    scenario: &Scenario,
    extra_boosts: &[Boost],
    seed_override: Option<u64>,
) -> Result<RunOutput, RunError> {
    let seed = seed_override.unwrap_or(scenario.seed);
    let mode = scenario.mode;
    let wrap = |source: EngineError| RunError {
        mode: mode.as_str(),
        source,
    };

    let mut report = Report {
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        mode: mode.as_str().to_string(),
        seed,
        scenario: scenario.doc.clone(),
        queries: None,
        boosts: None,
        pairs: None,
        frame_sweep: None,
        cycle: None,
        statistics: None,
    };
    let mut statistical_failure = false;

    match &scenario.plan {
        Plan::Regions(plan) | Plan::EffectiveState(plan) => {
            let (queries, boosts) =
                run_reduction(plan, extra_boosts).map_err(wrap)?;
            report.queries = Some(queries);
            report.boosts = Some(boosts);
        }
        Plan::Cycles(plan) => {
            report.cycle = Some(run_cycles(plan, seed).map_err(wrap)?);
        }
        Plan::Classify(plan) => {
            let (pairs, sweep) = run_classify(plan, extra_boosts).map_err(wrap)?;
            report.pairs = Some(pairs);
            report.frame_sweep = Some(sweep);
        }
        Plan::Nosignal(plan) => {
            let stats = run_nosignal(plan, seed).map_err(wrap)?;
            statistical_failure = !stats.monte_carlo.passed;
            report.statistics = Some(stats);
        }
    }
    Ok(RunOutput {
        report,
        statistical_failure,
    })
}

fn ket_report(ket: &StateVector) -> KetReport {
    KetReport {
        labels: ket.labels().iter().map(|l| l.to_string()).collect(),
        amplitudes: ket.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    }
}

fn applied_labels(applied: &[Observation]) -> Vec<String> {
    applied.iter().map(|o| o.event.display_name()).collect()
}

fn run_reduction(
    plan: &ReductionPlan,
    extra_boosts: &[Boost],
) -> Result<(Vec<QueryReport>, Vec<BoostReport>), EngineError> {
    let mut queries = Vec::with_capacity(plan.queries.len());
    for q in &plan.queries {
        let r = effective_state(&plan.initial, q, &plan.observations)?;
        queries.push(QueryReport {
            label: q.display_name(),
            t: q.t,
            x: q.x,
            region: r.region.map(|l| l.to_string()),
            applied: applied_labels(&r.applied),
            weight: r.probability_weight,
            effective_ket: ket_report(&r.effective_ket),
        });
    }

    let mut boost_reports = Vec::new();
    for b in plan.boosts.iter().chain(extra_boosts) {
        let moved_obs: Vec<Observation> = plan
            .observations
            .iter()
            .map(|o| Ok(Observation::new(boost(&o.event, *b)?, o.projector)))
            .collect::<Result<_, SpacetimeError>>()?;
        let mut boosted = Vec::with_capacity(plan.queries.len());
        let mut matches_base = true;
        for (q, base) in plan.queries.iter().zip(&queries) {
            let r = effective_state(&plan.initial, &boost(q, *b)?, &moved_obs)?;
            let region = r.region.map(|l| l.to_string());
            let applied = applied_labels(&r.applied);
            if region != base.region || applied != base.applied {
                matches_base = false;
            }
            boosted.push(BoostedQueryReport {
                label: base.label.clone(),
                region,
                applied,
            });
        }
        boost_reports.push(BoostReport {
            velocity: b.velocity(),
            queries: boosted,
            matches_base,
        });
    }
    Ok((queries, boost_reports))
}

fn run_cycles(plan: &CyclesPlan, seed: u64) -> Result<CycleReport, EngineError> {
    let detector_prep = match plan.preparation {
        DetectorPrep::Standard => standard_detector_preparation(),
        DetectorPrep::AlternativeSearch => {
            search_alternative_preparation().ok_or(EngineError::NoAlternativePreparation)?
        }
    };
    let prep = CycleState::prepare_with(&detector_prep, plan.parity_basis)?;

    let mut steps = Vec::with_capacity(plan.interactions.len());
    let mut state = prep.clone();
    for (det, event) in &plan.interactions {
        state = state.interact(*det)?;
        steps.push(CycleStepReport {
            event: event.display_name(),
            detector: *det,
            epoch: [state.epoch().k1(), state.epoch().k2()],
            comparison: definiteness_name(state.compare()).to_string(),
            singlet_fidelity: state.singlet_fidelity(),
        });
    }

    let comparisons = plan
        .comparisons
        .iter()
        .map(|&epoch| {
            let s = state_at(&prep, epoch)?;
            Ok(ComparisonReport {
                epoch: [epoch.k1(), epoch.k2()],
                verdict: definiteness_name(s.compare()).to_string(),
            })
        })
        .collect::<Result<Vec<_>, CycleError>>()?;

    let observation = match &plan.observation {
        None => None,
        Some(o) => {
            let s = state_at(&prep, o.epoch)?;
            let selector = match o.outcome {
                CycleOutcome::Sample => OutcomeSelector::Sampled { seed, trial: 0 },
                CycleOutcome::Fixed(d1, d2) => OutcomeSelector::Fixed { d1, d2 },
            };
            let (outcomes, post) = s.observe(selector)?;
            let verdict = classify_pair_from(&prep, o.epoch)?.verdict;
            Some(ObservationReport {
                event: o.event.display_name(),
                epoch: [o.epoch.k1(), o.epoch.k2()],
                outcomes: [outcomes.d1, outcomes.d2],
                xor: outcomes.xor(),
                post_singlet_fidelity: post.singlet_fidelity(),
                verdict: verdict_name(verdict).to_string(),
            })
        }
    };

    Ok(CycleReport {
        preparation: match plan.preparation {
            DetectorPrep::Standard => "standard".to_string(),
            DetectorPrep::AlternativeSearch => "alternative-search".to_string(),
        },
        parity_basis: match plan.parity_basis {
            Basis::Z => "z".to_string(),
            Basis::X => "x".to_string(),
        },
        detector_preparation: ket_report(&detector_prep),
        steps,
        comparisons,
        observation,
    })
}

fn run_classify(
    plan: &ClassifyPlan,
    extra_boosts: &[Boost],
) -> Result<(Vec<PairReport>, FrameSweepReport), EngineError> {
    let boosts: Vec<Boost> = plan.boosts.iter().chain(extra_boosts).copied().collect();
    let prep = CycleState::prepare();
    let mut pairs = Vec::with_capacity(plan.pairs.len());
    let mut all_invariant = true;
    for &epoch in &plan.pairs {
        let c = classify_pair_from(&prep, epoch)?;
        let invariant = frame_sweep_from(&prep, &plan.schedule, epoch, &boosts)?;
        all_invariant &= invariant;
        pairs.push(PairReport {
            epoch: [epoch.k1(), epoch.k2()],
            verdict: verdict_name(c.verdict).to_string(),
            frame_invariant: invariant,
        });
    }
    Ok((
        pairs,
        FrameSweepReport {
            velocities: boosts.iter().map(|b| b.velocity()).collect(),
            all_invariant,
        },
    ))
}

fn run_nosignal(plan: &NosignalPlan, seed: u64) -> Result<StatisticsReport, EngineError> {
    let exp = Experiment::new(
        plan.initial.clone(),
        plan.a_event.clone(),
        plan.b_event.clone(),
    )?;

    let m_z = exp.exact_marginal_b(Strategy::observing(Basis::Z))?;
    let m_x = exp.exact_marginal_b(Strategy::observing(Basis::X))?;
    let m_silent = exp.exact_marginal_b(Strategy::silent())?;
    let c_up = exp.exact_conditional_b(Basis::Z, Outcome::Up)?;
    let c_down = exp.exact_conditional_b(Basis::Z, Outcome::Down)?;
    let tv = 0.5 * ((c_up[0] - m_z[0]).abs() + (c_up[1] - m_z[1]).abs());

    let test = exp.signaling_test(plan.trials, seed)?;
    // mirror of the test's observing arm, for the joint correlation figure
    let observing_arm = exp.run_trials(
        Strategy::observing(Basis::Z),
        plan.trials,
        trial_seed(seed, 0xA),
    )?;
    let joint = observing_arm.joint_frequency.expect("arm observes")[0][1];

    Ok(StatisticsReport {
        exact: ExactStatistics {
            marginal_b_observing_z: m_z,
            marginal_b_observing_x: m_x,
            marginal_b_silent: m_silent,
            max_marginal_difference: test.exact_difference,
            conditional_b_given_up: c_up,
            conditional_b_given_down: c_down,
            tv_distance_conditional_vs_marginal: tv,
        },
        monte_carlo: MonteCarloStatistics {
            trials_per_arm: test.trials_per_arm,
            b_down_observing: test.empirical_b_down[0],
            b_down_silent: test.empirical_b_down[1],
            difference: test.observed_difference,
            standard_error: test.standard_error,
            chi_square: test.chi_square,
            within_three_sigma: test.within_three_sigma,
            joint_up_down_frequency: joint,
            passed: test.passed,
        },
    })
}

fn definiteness_name(d: Definiteness) -> &'static str {
    match d {
        Definiteness::Definite => "definite",
        Definiteness::Indefinite => "indefinite",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Nondemolitional => "nondemolitional",
        Verdict::Demolitional => "demolitional",
    }
}
