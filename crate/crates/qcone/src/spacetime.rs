//! 1+1-dimensional Minkowski geometry: events, intervals, causal relations,
//! light cones, and Lorentz boosts.
//!
//! Units are chosen with c = 1, so timelike separation means |Δt| > |Δx|.
//! One spatial axis is enough for every scenario this crate models; the
//! covariance checks boost whole scenarios and re-evaluate them wholesale.

use thiserror::Error;

/// Scale-relative tolerance factor for lightlike classification.
///
/// A pair of events with |s²| < `LIGHTLIKE_EPSILON` · max(1, Δt² + Δx²) is
/// classified as lightlike. Scenario authors must keep intentional events
/// outside this band; the property-test generators exclude it.
pub const LIGHTLIKE_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("event coordinates must be finite, got (t = {t}, x = {x})")]
    NonFiniteCoordinates { t: f64, x: f64 },
    #[error("boost velocity must satisfy |v| < 1, got {0}")]
    SuperluminalVelocity(f64),
    #[error("boost with v = {v} overflowed on event {event}")]
    BoostOverflow { v: f64, event: String },
}

/// A point in 1+1 Minkowski space, optionally carrying a scenario label.
///
/// Geometry never looks at the label; it exists so that reports and error
/// messages can name the event the way a scenario file does.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub label: Option<String>,
}

impl Event {
    /// Unlabeled event. Panics on non-finite coordinates; use [`Event::try_new`]
    /// for untrusted input.
    pub fn new(t: f64, x: f64) -> Self {
        assert!(
            t.is_finite() && x.is_finite(),
            "event coordinates must be finite"
        );
        Event { t, x, label: None }
    }

    pub fn labeled(t: f64, x: f64, label: impl Into<String>) -> Self {
        let mut e = Event::new(t, x);
        e.label = Some(label.into());
        e
    }

    pub fn try_new(t: f64, x: f64, label: Option<String>) -> Result<Self, SpacetimeError> {
        if !(t.is_finite() && x.is_finite()) {
            return Err(SpacetimeError::NonFiniteCoordinates { t, x });
        }
        Ok(Event { t, x, label })
    }

    /// The label if present, otherwise the coordinates.
    pub fn display_name(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("({}, {})", self.t, self.x),
        }
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}({}, {})", self.t, self.x),
            None => write!(f, "({}, {})", self.t, self.x),
        }
    }
}

/// Causal relation of event `b` as seen from event `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalRelation {
    TimelikeFuture,
    TimelikePast,
    LightlikeFuture,
    LightlikePast,
    Spacelike,
    Coincident,
}

impl CausalRelation {
    /// The relation seen from the other end: futures and pasts swap,
    /// spacelike and coincident are symmetric.
    pub fn mirror(self) -> Self {
        use CausalRelation::*;
        match self {
            TimelikeFuture => TimelikePast,
            TimelikePast => TimelikeFuture,
            LightlikeFuture => LightlikePast,
            LightlikePast => LightlikeFuture,
            Spacelike => Spacelike,
            Coincident => Coincident,
        }
    }

    pub fn is_lightlike(self) -> bool {
        matches!(
            self,
            CausalRelation::LightlikeFuture | CausalRelation::LightlikePast
        )
    }
}

impl std::fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CausalRelation::TimelikeFuture => "timelike future",
            CausalRelation::TimelikePast => "timelike past",
            CausalRelation::LightlikeFuture => "lightlike future",
            CausalRelation::LightlikePast => "lightlike past",
            CausalRelation::Spacelike => "spacelike",
            CausalRelation::Coincident => "coincident",
        };
        f.write_str(s)
    }
}

/// An active Lorentz boost with velocity strictly inside (−1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boost {
    v: f64,
}

impl Boost {
    pub const IDENTITY: Boost = Boost { v: 0.0 };

    pub fn new(v: f64) -> Result<Self, SpacetimeError> {
        if !v.is_finite() || v.abs() >= 1.0 {
            return Err(SpacetimeError::SuperluminalVelocity(v));
        }
        Ok(Boost { v })
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.v * self.v).sqrt()
    }

    pub fn inverse(&self) -> Boost {
        Boost { v: -self.v }
    }

    /// Relativistic velocity addition: applying `self` after `other` equals
    /// one boost of velocity (v₁ + v₂)/(1 + v₁v₂).
    ///
    /// The quotient is mathematically inside (−1, 1) but rounding can land it
    /// exactly on ±1 for near-luminal inputs, so the result is nudged back
    /// into the open interval.
    pub fn compose(&self, other: &Boost) -> Boost {
        let raw = (self.v + other.v) / (1.0 + self.v * other.v);
        let v = if raw >= 1.0 {
            1.0_f64.next_down()
        } else if raw <= -1.0 {
            (-1.0_f64).next_up()
        } else {
            raw
        };
        Boost { v }
    }
}

/// Squared Minkowski interval s² = Δt² − Δx² between two events.
///
/// Positive for timelike, negative for spacelike, zero on the light cone.
/// Symmetric in its arguments.
pub fn interval(a: &Event, b: &Event) -> f64 {
    let dt = b.t - a.t;
    let dx = b.x - a.x;
    dt * dt - dx * dx
}

/// The absolute tolerance below which |s²| counts as lightlike for this pair.
pub fn lightlike_tolerance(a: &Event, b: &Event) -> f64 {
    let dt = b.t - a.t;
    let dx = b.x - a.x;
    LIGHTLIKE_EPSILON * f64::max(1.0, dt * dt + dx * dx)
}

/// Classifies event `b` relative to event `a`.
///
/// Coincident requires both |Δt| and |Δx| below the pair's tolerance; a pair
/// whose |s²| falls inside the tolerance band is lightlike by fiat. Within
/// that band a Δt of exactly zero is broken by the sign of Δx so that
/// `relation(a, b)` and `relation(b, a)` stay mirror images.
pub fn relation(a: &Event, b: &Event) -> CausalRelation {
    let dt = b.t - a.t;
    let dx = b.x - a.x;
    let s2 = dt * dt - dx * dx;
    let eps = LIGHTLIKE_EPSILON * f64::max(1.0, dt * dt + dx * dx);

    if dt.abs() < eps && dx.abs() < eps {
        return CausalRelation::Coincident;
    }
    if s2.abs() < eps {
        let future = if dt != 0.0 { dt > 0.0 } else { dx > 0.0 };
        return if future {
            CausalRelation::LightlikeFuture
        } else {
            CausalRelation::LightlikePast
        };
    }
    if s2 > 0.0 {
        if dt > 0.0 {
            CausalRelation::TimelikeFuture
        } else {
            CausalRelation::TimelikePast
        }
    } else {
        CausalRelation::Spacelike
    }
}

/// True iff `query` lies in the strict interior of `vertex`'s backward cone.
///
/// A state reduction at `vertex` is felt on the surface of its backward cone
/// and everywhere outside it, so the strict interior is exactly the region a
/// reduction does NOT reach. Surface events return false.
pub fn in_strict_past_cone(query: &Event, vertex: &Event) -> bool {
    relation(vertex, query) == CausalRelation::TimelikePast
}

/// Active Lorentz boost of an event: (t, x) ↦ (γ(t − vx), γ(x − vt)).
///
/// The label is carried along. Fails only if the transformed coordinates
/// overflow, which requires near-luminal v on astronomically large inputs.
pub fn boost(e: &Event, b: Boost) -> Result<Event, SpacetimeError> {
    let g = b.gamma();
    let v = b.velocity();
    let t = g * (e.t - v * e.x);
    let x = g * (e.x - v * e.t);
    if !(t.is_finite() && x.is_finite()) {
        return Err(SpacetimeError::BoostOverflow {
            v,
            event: e.display_name(),
        });
    }
    Ok(Event {
        t,
        x,
        label: e.label.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, x: f64) -> Event {
        Event::new(t, x)
    }

    #[test]
    fn interval_examples() {
        assert_eq!(interval(&ev(0.0, 0.0), &ev(1.0, 0.0)), 1.0);
        assert_eq!(interval(&ev(0.0, 0.0), &ev(0.0, 1.0)), -1.0);
        assert_eq!(interval(&ev(0.0, 0.0), &ev(1.0, 1.0)), 0.0);
        // symmetric in arguments
        assert_eq!(
            interval(&ev(2.0, -1.0), &ev(-0.5, 3.0)),
            interval(&ev(-0.5, 3.0), &ev(2.0, -1.0))
        );
    }

    #[test]
    fn relation_examples() {
        assert_eq!(
            relation(&ev(0.0, 0.0), &ev(2.0, 1.0)),
            CausalRelation::TimelikeFuture
        );
        assert_eq!(
            relation(&ev(0.0, 0.0), &ev(0.0, 5.0)),
            CausalRelation::Spacelike
        );
        assert_eq!(
            relation(&ev(0.0, 0.0), &ev(-1.0, -1.0)),
            CausalRelation::LightlikePast
        );
        assert_eq!(
            relation(&ev(0.0, 0.0), &ev(0.0, 0.0)),
            CausalRelation::Coincident
        );
    }

    #[test]
    fn strict_past_cone_examples() {
        let vertex = ev(0.0, 0.0);
        assert!(in_strict_past_cone(&ev(-2.0, 0.0), &vertex));
        assert!(!in_strict_past_cone(&ev(0.0, 5.0), &vertex));
        // the cone surface itself is excluded by strictness
        assert!(!in_strict_past_cone(&ev(-1.0, 1.0), &vertex));
    }

    #[test]
    fn boost_examples() {
        let id = Boost::new(0.0).unwrap();
        assert_eq!(boost(&ev(1.0, 0.0), id).unwrap(), ev(1.0, 0.0));

        // v = 0.6 gives gamma = 1.25 in closed form
        let b = Boost::new(0.6).unwrap();
        let e = boost(&ev(1.0, 0.0), b).unwrap();
        assert!((e.t - 1.25).abs() < 1e-12);
        assert!((e.x + 0.75).abs() < 1e-12);

        let e = boost(&ev(0.0, 1.0), b).unwrap();
        assert!((e.t + 0.75).abs() < 1e-12);
        assert!((e.x - 1.25).abs() < 1e-12);
    }

    #[test]
    fn boost_rejects_superluminal() {
        assert!(Boost::new(1.0).is_err());
        assert!(Boost::new(-1.2).is_err());
        assert!(Boost::new(f64::NAN).is_err());
        assert!(Boost::new(0.999_999).is_ok());
    }

    #[test]
    fn boost_overflow_is_reported() {
        let b = Boost::new(1.0_f64.next_down()).unwrap();
        let huge = ev(1e308, -1e308);
        assert!(matches!(
            boost(&huge, b),
            Err(SpacetimeError::BoostOverflow { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let half = Boost::new(0.5).unwrap();
        assert_eq!(Boost::IDENTITY.compose(&half).velocity(), 0.5);
        assert!((half.compose(&half).velocity() - 0.8).abs() < 1e-15);
        assert_eq!(half.compose(&half.inverse()).velocity(), 0.0);
    }

    #[test]
    fn compose_stays_subluminal_at_the_edge() {
        let near = Boost::new(1.0_f64.next_down()).unwrap();
        let v = near.compose(&near).velocity();
        assert!(v < 1.0, "composed velocity {v} escaped (−1, 1)");
        let v = near.inverse().compose(&near.inverse()).velocity();
        assert!(v > -1.0);
    }

    #[test]
    fn relation_mirror_holds_near_the_band_tiebreak() {
        // dt exactly zero inside the lightlike band: broken by the sign of dx
        let a = ev(0.0, 0.0);
        let b = ev(0.0, 1e-6);
        let r = relation(&a, &b);
        assert!(r.is_lightlike());
        assert_eq!(relation(&b, &a), r.mirror());
    }

    #[test]
    fn event_validation() {
        assert!(Event::try_new(f64::INFINITY, 0.0, None).is_err());
        assert!(Event::try_new(0.0, f64::NAN, None).is_err());
        assert_eq!(Event::labeled(1.0, 2.0, "A").display_name(), "A");
    }
}
