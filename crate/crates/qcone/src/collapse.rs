//! The covariant reduction engine.
//!
//! A Hellwig-Kraus reduction puts its vertex at an observation event and
//! reduces the state on the surface of that event's backward light cone and
//! at every event outside it. The only region an observation does *not*
//! reach is the strict interior of its own backward cone, so the rule here
//! is a single predicate: an observation applies at a query event unless the
//! query sits strictly inside the observation's past cone.
//!
//! Forward cones get no special casing: the same uniform rule covers them,
//! which keeps reductions monotone along causal order.

use crate::hilbert::{HilbertError, Projector, StateVector, SubsystemLabel};
use crate::spacetime::{in_strict_past_cone, relation, CausalRelation, Event};
use thiserror::Error;

/// Squared-norm floor below which a fully reduced state counts as impossible.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollapseError {
    #[error("events {a} and {b} must be spacelike separated, found {relation}")]
    NotSpacelike {
        a: String,
        b: String,
        relation: CausalRelation,
    },
    #[error("more than one observation targets {0}")]
    DuplicateSubsystem(SubsystemLabel),
    #[error("observation events {a} and {b} coincide")]
    CoincidentObservations { a: String, b: String },
    #[error("the initial state is the zero vector")]
    ZeroInitialState,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// A recorded measurement: where it happened and which outcome projector it
/// fixed. Observations are scenario inputs; nothing here samples outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub event: Event,
    pub projector: Projector,
}

impl Observation {
    pub fn new(event: Event, projector: Projector) -> Self {
        Observation { event, projector }
    }
}

/// Which of the two observations A and B has reduced the state at a query
/// event, in the canonical two-observation geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// Strictly inside both backward cones: neither reduction is felt.
    Unreduced,
    /// Outside A's backward cone only (region II).
    ReducedByA,
    /// Outside B's backward cone only (region I).
    ReducedByB,
    /// Outside both cones (region III and both forward cones).
    ReducedByBoth,
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionLabel::Unreduced => "unreduced",
            RegionLabel::ReducedByA => "reduced-by-A",
            RegionLabel::ReducedByB => "reduced-by-B",
            RegionLabel::ReducedByBoth => "reduced-by-both",
        };
        f.write_str(s)
    }
}

/// Everything the engine can say about one query event.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub query: Event,
    /// The observations whose reductions reach the query, in input order.
    pub applied: Vec<Observation>,
    /// Named region when the scenario has exactly two spacelike observations.
    pub region: Option<RegionLabel>,
    /// The unrenormalized ket after applying every applicable projector.
    pub effective_ket: StateVector,
    /// Squared norm of the effective ket; a probability when the initial
    /// state is normalized.
    pub probability_weight: f64,
}

/// The observations whose reduction reaches `query`: all those for which the
/// query is NOT strictly inside the observation's backward cone. Input order
/// is preserved.
pub fn applicable_observations<'a>(query: &Event, obs: &'a [Observation]) -> Vec<&'a Observation> {
    obs.iter()
        .filter(|o| !in_strict_past_cone(query, &o.event))
        .collect()
}

/// Classifies a query event against two spacelike observation sites.
pub fn region_of(query: &Event, a: &Event, b: &Event) -> Result<RegionLabel, CollapseError> {
    let rel = relation(a, b);
    if rel != CausalRelation::Spacelike {
        return Err(CollapseError::NotSpacelike {
            a: a.display_name(),
            b: b.display_name(),
            relation: rel,
        });
    }
    let inside_a = in_strict_past_cone(query, a);
    let inside_b = in_strict_past_cone(query, b);
    Ok(match (inside_a, inside_b) {
        (true, true) => RegionLabel::Unreduced,
        (false, true) => RegionLabel::ReducedByA,
        (true, false) => RegionLabel::ReducedByB,
        (false, false) => RegionLabel::ReducedByBoth,
    })
}

/// Applies every applicable observation's projector to the initial state and
/// reports the effective ket at the query event.
///
/// Projectors on distinct subsystems commute, so the application order does
/// not matter; the input order is used. With exactly two spacelike
/// observations the report also carries the named region.
pub fn effective_state(
    initial: &StateVector,
    query: &Event,
    obs: &[Observation],
) -> Result<ReductionReport, CollapseError> {
    if initial.is_zero() {
        return Err(CollapseError::ZeroInitialState);
    }
    validate_observations(obs)?;

    let applied: Vec<Observation> = applicable_observations(query, obs)
        .into_iter()
        .cloned()
        .collect();
    // Projectors on distinct subsystems commute; applying them in a canonical
    // order makes the report bit-identical for any input ordering.
    let mut ordered: Vec<&Observation> = applied.iter().collect();
    ordered.sort_by_key(|o| o.projector.target());
    let mut ket = initial.clone();
    for o in ordered {
        ket = ket.project(&o.projector)?;
    }
    let region = if obs.len() == 2 {
        region_of(query, &obs[0].event, &obs[1].event).ok()
    } else {
        None
    };
    Ok(ReductionReport {
        query: query.clone(),
        probability_weight: ket.norm_sqr(),
        applied,
        region,
        effective_ket: ket,
    })
}

/// Checks that a scenario's observations can be realized at all: the applied
/// set grows monotonically along causal order and the fully reduced state
/// has nonzero weight (the recorded outcomes are jointly possible).
///
/// Monotonicity is probed on a deterministic lattice spanning the
/// observations' neighborhood; it holds by cone geometry, so a failure here
/// means the geometry itself is broken. Malformed inputs (duplicate
/// subsystems, coincident events, unknown targets) are inconsistent rather
/// than errors.
pub fn consistency_check(initial: &StateVector, obs: &[Observation]) -> bool {
    if initial.is_zero() || validate_observations(obs).is_err() {
        return false;
    }
    if obs.is_empty() {
        return true;
    }

    let mut ket = initial.clone();
    for o in obs {
        ket = match ket.project(&o.projector) {
            Ok(k) => k,
            Err(_) => return false,
        };
    }
    if ket.norm_sqr() <= WEIGHT_FLOOR {
        return false;
    }

    // Lattice around the observation sites, wide enough to straddle every
    // cone boundary.
    let ts: Vec<f64> = obs.iter().map(|o| o.event.t).collect();
    let xs: Vec<f64> = obs.iter().map(|o| o.event.x).collect();
    let span = |vals: &[f64]| {
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    };
    let (tmin, tmax) = span(&ts);
    let (xmin, xmax) = span(&xs);
    let margin = 2.0 * f64::max(1.0, f64::max(tmax - tmin, xmax - xmin));
    let steps = 9;
    let mut grid = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for j in 0..steps {
            let t = tmin - margin + (tmax - tmin + 2.0 * margin) * (i as f64) / (steps - 1) as f64;
            let x = xmin - margin + (xmax - xmin + 2.0 * margin) * (j as f64) / (steps - 1) as f64;
            grid.push(Event::new(t, x));
        }
    }
    let applied_mask = |q: &Event| -> u64 {
        obs.iter()
            .enumerate()
            .filter(|(_, o)| !in_strict_past_cone(q, &o.event))
            .fold(0u64, |m, (i, _)| m | (1 << i))
    };
    for q1 in &grid {
        let m1 = applied_mask(q1);
        for q2 in &grid {
            let r = relation(q1, q2);
            if r == CausalRelation::TimelikeFuture || r == CausalRelation::LightlikeFuture {
                let m2 = applied_mask(q2);
                if m1 & !m2 != 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn validate_observations(obs: &[Observation]) -> Result<(), CollapseError> {
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[..i] {
            if a.projector.target() == b.projector.target() {
                return Err(CollapseError::DuplicateSubsystem(a.projector.target()));
            }
            if relation(&a.event, &b.event) == CausalRelation::Coincident {
                return Err(CollapseError::CoincidentObservations {
                    a: a.event.display_name(),
                    b: b.event.display_name(),
                });
            }
        }
    }
    Ok(())
}
