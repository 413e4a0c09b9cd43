//! Scenario documents: the JSON schema, its validation, and the translation
//! into engine-level plans.
//!
//! A scenario is a versioned JSON object with a `mode` field selecting one of
//! the five engines. Validation resolves every label, checks the geometry a
//! mode requires, and fills defaults, so the echoed document in a report is
//! already normalized: parsing the echo reproduces it byte for byte.

use qcone::collapse::Observation;
use qcone::hilbert::{particle, singlet, Basis, Outcome, Projector, StateVector};
use qcone::nondemolition::{Epoch, InteractionSchedule};
use qcone::spacetime::{relation, Boost, CausalRelation, Event};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// The scenario schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Default trial count for nosignal scenarios that omit `trials`.
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported scenario version {0}; this build reads version {SCHEMA_VERSION}")]
    Version(u32),
    #[error("unknown mode '{0}' (expected regions, effective-state, cycles, classify, or nosignal)")]
    UnknownMode(String),
    #[error("every entry in 'events' needs a label")]
    UnlabeledEvent,
    #[error("event label '{0}' is defined more than once")]
    DuplicateLabel(String),
    #[error("event '{0}' has non-finite coordinates")]
    BadCoordinates(String),
    #[error("event label '{0}' does not resolve to anything in 'events'")]
    UnresolvedLabel(String),
    #[error("boost velocity {0} is not strictly inside (-1, 1)")]
    BadBoost(f64),
    #[error("initial state '{0}' is not supported (expected 'singlet')")]
    UnknownInitialState(String),
    #[error("{mode} mode requires {what}")]
    Missing { mode: &'static str, what: &'static str },
    #[error("unknown target '{0}' (expected particle1, particle2, or detectors)")]
    UnknownTarget(String),
    #[error("unknown outcome '{0}' (expected up, down, plus, minus, or sample)")]
    UnknownOutcome(String),
    #[error("outcome 'sample' needs cycles mode; reduction observations are deterministic inputs")]
    SampleNotAllowed,
    #[error("a detector outcome pair needs the 'detectors' target of cycles mode")]
    BitsNotAllowed,
    #[error("outcome bits must be 0 or 1, got [{0}, {1}]")]
    BadOutcomeBits(u8, u8),
    #[error("observations target subsystem '{0}' more than once")]
    DuplicateTarget(String),
    #[error("events '{a}' and '{b}' must be spacelike separated, found {rel}")]
    NotSpacelike {
        a: String,
        b: String,
        rel: CausalRelation,
    },
    #[error("detector {detector}'s interactions are not timelike-ordered: '{a}' then '{b}'")]
    WorldlineOrder { detector: u8, a: String, b: String },
    #[error("detector index must be 1 or 2, got {0}")]
    BadDetectorIndex(u8),
    #[error("detector {detector} has {count} interactions, the maximum is 2")]
    TooManyInteractions { detector: u8, count: usize },
    #[error("epoch ({0}, {1}) is out of range for this scenario's interactions")]
    BadEpoch(u8, u8),
    #[error("observation event '{event}' must causally follow interaction event '{interaction}'")]
    ObservationTooEarly { event: String, interaction: String },
    #[error("preparation event '{event}' must causally precede interaction event '{interaction}'")]
    PreparationTooLate { event: String, interaction: String },
    #[error("nosignal mode needs at least 100 trials, got {0}")]
    TooFewTrials(usize),
    #[error("unknown parity basis '{0}' (expected 'z' or 'x')")]
    BadParityBasis(String),
    #[error("unknown detector preparation '{0}' (expected 'standard' or 'alternative-search')")]
    BadDetectorPreparation(String),
}

// ---------------------------------------------------------------------------
// Raw document types (the JSON schema)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub version: u32,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preparation_event: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<ObservationDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interactions: Vec<InteractionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<EventDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<[u8; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<[u8; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boosts: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity_basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_preparation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationDoc {
    pub event: String,
    pub target: String,
    pub outcome: OutcomeDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<[u8; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeDoc {
    Named(String),
    Bits([u8; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionDoc {
    pub event: String,
    pub detector: u8,
}

// ---------------------------------------------------------------------------
// Validated plans
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Regions,
    EffectiveState,
    Cycles,
    Classify,
    Nosignal,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Regions => "regions",
            Mode::EffectiveState => "effective-state",
            Mode::Cycles => "cycles",
            Mode::Classify => "classify",
            Mode::Nosignal => "nosignal",
        }
    }
}

/// A parsed, validated scenario: the normalized document for echoing plus the
/// engine-level plan.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    pub mode: Mode,
    pub seed: u64,
    pub plan: Plan,
}

#[derive(Debug, Clone)]
pub enum Plan {
    Regions(ReductionPlan),
    EffectiveState(ReductionPlan),
    Cycles(CyclesPlan),
    Classify(ClassifyPlan),
    Nosignal(NosignalPlan),
}

#[derive(Debug, Clone)]
pub struct ReductionPlan {
    pub initial: StateVector,
    pub observations: Vec<Observation>,
    pub queries: Vec<Event>,
    pub boosts: Vec<Boost>,
}

#[derive(Debug, Clone)]
pub struct CyclesPlan {
    /// Interactions in base-frame time order: (detector index, event).
    pub interactions: Vec<(u8, Event)>,
    pub comparisons: Vec<Epoch>,
    pub observation: Option<CycleObservationPlan>,
    pub parity_basis: Basis,
    pub preparation: DetectorPrep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorPrep {
    Standard,
    AlternativeSearch,
}

#[derive(Debug, Clone)]
pub struct CycleObservationPlan {
    pub event: Event,
    pub epoch: Epoch,
    pub outcome: CycleOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleOutcome {
    Sample,
    Fixed(u8, u8),
}

#[derive(Debug, Clone)]
pub struct ClassifyPlan {
    pub schedule: InteractionSchedule,
    pub pairs: Vec<Epoch>,
    pub boosts: Vec<Boost>,
}

#[derive(Debug, Clone)]
pub struct NosignalPlan {
    pub initial: StateVector,
    pub a_event: Event,
    pub b_event: Event,
    pub trials: usize,
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut doc: ScenarioDoc =
        serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    if doc.version != SCHEMA_VERSION {
        return Err(ScenarioError::Version(doc.version));
    }
    let mode = match doc.mode.as_str() {
        "regions" => Mode::Regions,
        "effective-state" => Mode::EffectiveState,
        "cycles" => Mode::Cycles,
        "classify" => Mode::Classify,
        "nosignal" => Mode::Nosignal,
        other => return Err(ScenarioError::UnknownMode(other.to_string())),
    };

    let events = resolve_events(&doc)?;
    let boosts = doc
        .boosts
        .iter()
        .map(|&v| Boost::new(v).map_err(|_| ScenarioError::BadBoost(v)))
        .collect::<Result<Vec<_>, _>>()?;
    let initial = match doc.initial_state.get_or_insert_with(|| "singlet".into()).as_str() {
        "singlet" => singlet(),
        other => return Err(ScenarioError::UnknownInitialState(other.to_string())),
    };

    let plan = match mode {
        Mode::Regions | Mode::EffectiveState => {
            let plan = reduction_plan(&mut doc, &events, initial, boosts, mode)?;
            if mode == Mode::Regions {
                Plan::Regions(plan)
            } else {
                Plan::EffectiveState(plan)
            }
        }
        Mode::Cycles => Plan::Cycles(cycles_plan(&mut doc, &events)?),
        Mode::Classify => Plan::Classify(classify_plan(&doc, &events, boosts)?),
        Mode::Nosignal => Plan::Nosignal(nosignal_plan(&mut doc, &events, initial)?),
    };

    Ok(Scenario {
        seed: doc.seed.unwrap_or(0),
        doc,
        mode,
        plan,
    })
}

fn resolve_events(doc: &ScenarioDoc) -> Result<HashMap<String, Event>, ScenarioError> {
    let mut map = HashMap::new();
    for e in &doc.events {
        let label = e.label.clone().ok_or(ScenarioError::UnlabeledEvent)?;
        let event = Event::try_new(e.t, e.x, Some(label.clone()))
            .map_err(|_| ScenarioError::BadCoordinates(label.clone()))?;
        if map.insert(label.clone(), event).is_some() {
            return Err(ScenarioError::DuplicateLabel(label));
        }
    }
    Ok(map)
}

fn lookup<'a>(
    events: &'a HashMap<String, Event>,
    label: &str,
) -> Result<&'a Event, ScenarioError> {
    events
        .get(label)
        .ok_or_else(|| ScenarioError::UnresolvedLabel(label.to_string()))
}

fn parse_queries(
    doc: &ScenarioDoc,
    events: &HashMap<String, Event>,
) -> Result<Vec<Event>, ScenarioError> {
    let mut seen: Vec<&String> = Vec::new();
    for q in &doc.queries {
        if let Some(label) = &q.label {
            if events.contains_key(label) || seen.contains(&label) {
                return Err(ScenarioError::DuplicateLabel(label.clone()));
            }
            seen.push(label);
        }
    }
    doc.queries
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let label = q.label.clone().unwrap_or_else(|| format!("q{}", i + 1));
            Event::try_new(q.t, q.x, Some(label.clone()))
                .map_err(|_| ScenarioError::BadCoordinates(label))
        })
        .collect()
}

/// Maps an outcome word onto (basis, outcome) for a particle projector.
fn particle_outcome(word: &str) -> Result<(Basis, Outcome), ScenarioError> {
    match word {
        "up" => Ok((Basis::Z, Outcome::Up)),
        "down" => Ok((Basis::Z, Outcome::Down)),
        "plus" => Ok((Basis::X, Outcome::Up)),
        "minus" => Ok((Basis::X, Outcome::Down)),
        other => Err(ScenarioError::UnknownOutcome(other.to_string())),
    }
}

fn reduction_plan(
    doc: &mut ScenarioDoc,
    events: &HashMap<String, Event>,
    initial: StateVector,
    boosts: Vec<Boost>,
    mode: Mode,
) -> Result<ReductionPlan, ScenarioError> {
    if mode == Mode::Regions && doc.observations.len() != 2 {
        return Err(ScenarioError::Missing {
            mode: "regions",
            what: "exactly two observations",
        });
    }
    let mut observations = Vec::new();
    let mut seen_targets: Vec<String> = Vec::new();
    for o in &doc.observations {
        let event = lookup(events, &o.event)?.clone();
        let target = match o.target.as_str() {
            "particle1" => particle(1),
            "particle2" => particle(2),
            other => return Err(ScenarioError::UnknownTarget(other.to_string())),
        };
        if seen_targets.contains(&o.target) {
            return Err(ScenarioError::DuplicateTarget(o.target.clone()));
        }
        seen_targets.push(o.target.clone());
        let (basis, outcome) = match &o.outcome {
            OutcomeDoc::Named(w) if w == "sample" => return Err(ScenarioError::SampleNotAllowed),
            OutcomeDoc::Named(w) => particle_outcome(w)?,
            OutcomeDoc::Bits(_) => return Err(ScenarioError::BitsNotAllowed),
        };
        observations.push(Observation::new(
            event,
            Projector::new(target, basis, outcome),
        ));
    }
    if mode == Mode::Regions {
        let (a, b) = (&observations[0].event, &observations[1].event);
        let rel = relation(a, b);
        if rel != CausalRelation::Spacelike {
            return Err(ScenarioError::NotSpacelike {
                a: a.display_name(),
                b: b.display_name(),
                rel,
            });
        }
    }
    Ok(ReductionPlan {
        initial,
        observations,
        queries: parse_queries(doc, events)?,
        boosts,
    })
}

/// Splits the interaction list by detector, enforcing worldline order and the
/// cross-detector spacelike requirement, and returns them in base-frame time
/// order.
fn split_interactions(
    doc: &ScenarioDoc,
    events: &HashMap<String, Event>,
) -> Result<(Vec<Event>, Vec<Event>), ScenarioError> {
    let mut per_detector: [Vec<Event>; 2] = [Vec::new(), Vec::new()];
    for i in &doc.interactions {
        if i.detector != 1 && i.detector != 2 {
            return Err(ScenarioError::BadDetectorIndex(i.detector));
        }
        per_detector[(i.detector - 1) as usize].push(lookup(events, &i.event)?.clone());
    }
    for (d, list) in per_detector.iter().enumerate() {
        if list.len() > 2 {
            return Err(ScenarioError::TooManyInteractions {
                detector: d as u8 + 1,
                count: list.len(),
            });
        }
        for w in list.windows(2) {
            if relation(&w[0], &w[1]) != CausalRelation::TimelikeFuture {
                return Err(ScenarioError::WorldlineOrder {
                    detector: d as u8 + 1,
                    a: w[0].display_name(),
                    b: w[1].display_name(),
                });
            }
        }
    }
    for left in &per_detector[0] {
        for right in &per_detector[1] {
            let rel = relation(left, right);
            if rel != CausalRelation::Spacelike {
                return Err(ScenarioError::NotSpacelike {
                    a: left.display_name(),
                    b: right.display_name(),
                    rel,
                });
            }
        }
    }
    let [d1, d2] = per_detector;
    Ok((d1, d2))
}

fn cycles_plan(
    doc: &mut ScenarioDoc,
    events: &HashMap<String, Event>,
) -> Result<CyclesPlan, ScenarioError> {
    let (d1, d2) = split_interactions(doc, events)?;
    let counts = (d1.len() as u8, d2.len() as u8);

    if let Some(prep_label) = &doc.preparation_event {
        let prep = lookup(events, prep_label)?;
        for e in d1.iter().chain(&d2) {
            let rel = relation(prep, e);
            if rel != CausalRelation::TimelikeFuture && rel != CausalRelation::LightlikeFuture {
                return Err(ScenarioError::PreparationTooLate {
                    event: prep.display_name(),
                    interaction: e.display_name(),
                });
            }
        }
    }

    let parse_epoch = |pair: [u8; 2]| -> Result<Epoch, ScenarioError> {
        if pair[0] > counts.0 || pair[1] > counts.1 {
            return Err(ScenarioError::BadEpoch(pair[0], pair[1]));
        }
        Epoch::new(pair[0], pair[1]).map_err(|_| ScenarioError::BadEpoch(pair[0], pair[1]))
    };
    let comparisons = doc
        .comparisons
        .iter()
        .map(|&p| parse_epoch(p))
        .collect::<Result<Vec<_>, _>>()?;

    let observation = match doc.observations.len() {
        0 => None,
        1 => {
            let o = &mut doc.observations[0];
            if o.target != "detectors" {
                return Err(ScenarioError::UnknownTarget(o.target.clone()));
            }
            let event = lookup(events, &o.event)?.clone();
            let epoch = parse_epoch(*o.epoch.get_or_insert([counts.0, counts.1]))?;
            // every captured interaction record must be able to reach the
            // observation site
            for (list, k) in [(&d1, epoch.k1()), (&d2, epoch.k2())] {
                for e in &list[..k as usize] {
                    let rel = relation(&event, e);
                    if rel != CausalRelation::TimelikePast && rel != CausalRelation::LightlikePast
                    {
                        return Err(ScenarioError::ObservationTooEarly {
                            event: event.display_name(),
                            interaction: e.display_name(),
                        });
                    }
                }
            }
            let outcome = match &o.outcome {
                OutcomeDoc::Named(w) if w == "sample" => CycleOutcome::Sample,
                OutcomeDoc::Named(w) => return Err(ScenarioError::UnknownOutcome(w.clone())),
                OutcomeDoc::Bits([a, b]) => {
                    if *a > 1 || *b > 1 {
                        return Err(ScenarioError::BadOutcomeBits(*a, *b));
                    }
                    CycleOutcome::Fixed(*a, *b)
                }
            };
            Some(CycleObservationPlan {
                event,
                epoch,
                outcome,
            })
        }
        _ => {
            return Err(ScenarioError::Missing {
                mode: "cycles",
                what: "at most one joint detector observation",
            })
        }
    };

    let parity_basis = match doc
        .parity_basis
        .get_or_insert_with(|| "z".into())
        .as_str()
    {
        "z" => Basis::Z,
        "x" => Basis::X,
        other => return Err(ScenarioError::BadParityBasis(other.to_string())),
    };
    let preparation = match doc
        .detector_preparation
        .get_or_insert_with(|| "standard".into())
        .as_str()
    {
        "standard" => DetectorPrep::Standard,
        "alternative-search" => DetectorPrep::AlternativeSearch,
        other => return Err(ScenarioError::BadDetectorPreparation(other.to_string())),
    };

    let mut interactions: Vec<(u8, Event)> = d1
        .into_iter()
        .map(|e| (1u8, e))
        .chain(d2.into_iter().map(|e| (2u8, e)))
        .collect();
    interactions.sort_by(|a, b| a.1.t.partial_cmp(&b.1.t).expect("finite coordinates"));

    Ok(CyclesPlan {
        interactions,
        comparisons,
        observation,
        parity_basis,
        preparation,
    })
}

fn classify_plan(
    doc: &ScenarioDoc,
    events: &HashMap<String, Event>,
    boosts: Vec<Boost>,
) -> Result<ClassifyPlan, ScenarioError> {
    let (d1, d2) = split_interactions(doc, events)?;
    if doc.pairs.is_empty() {
        return Err(ScenarioError::Missing {
            mode: "classify",
            what: "a nonempty 'pairs' list of epoch pairs",
        });
    }
    let counts = (d1.len() as u8, d2.len() as u8);
    let pairs = doc
        .pairs
        .iter()
        .map(|&[k1, k2]| {
            if k1 > counts.0 || k2 > counts.1 {
                return Err(ScenarioError::BadEpoch(k1, k2));
            }
            Epoch::new(k1, k2).map_err(|_| ScenarioError::BadEpoch(k1, k2))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let schedule = InteractionSchedule::new(d1, d2)
        .expect("geometry was validated while splitting interactions");
    Ok(ClassifyPlan {
        schedule,
        pairs,
        boosts,
    })
}

fn nosignal_plan(
    doc: &mut ScenarioDoc,
    events: &HashMap<String, Event>,
    initial: StateVector,
) -> Result<NosignalPlan, ScenarioError> {
    let a_event = events
        .get("A")
        .ok_or(ScenarioError::Missing {
            mode: "nosignal",
            what: "an event labeled 'A'",
        })?
        .clone();
    let b_event = events
        .get("B")
        .ok_or(ScenarioError::Missing {
            mode: "nosignal",
            what: "an event labeled 'B'",
        })?
        .clone();
    let rel = relation(&a_event, &b_event);
    if rel != CausalRelation::Spacelike {
        return Err(ScenarioError::NotSpacelike {
            a: a_event.display_name(),
            b: b_event.display_name(),
            rel,
        });
    }
    let trials = *doc.trials.get_or_insert(DEFAULT_TRIALS);
    if trials < 100 {
        return Err(ScenarioError::TooFewTrials(trials));
    }
    Ok(NosignalPlan {
        initial,
        a_event,
        b_event,
        trials,
    })
}
