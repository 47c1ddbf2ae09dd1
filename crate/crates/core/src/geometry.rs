//! Flat spacetime with signature (-, +, ..., +) and unit light speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in (1 + d)-dimensional Minkowski spacetime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: Vec<f64>,
}

impl Event {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Event { t, x: x.into() }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    Timelike,
    Lightlike,
    Spacelike,
}

/// The invariant interval `-Δt² + Δx·Δx`.
pub fn interval(a: &Event, b: &Event) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let dt = a.t - b.t;
    Ok(-dt * dt + squared_distance(&a.x, &b.x))
}

pub fn classify(a: &Event, b: &Event) -> Result<Separation> {
    let s2 = interval(a, b)?;
    Ok(if s2 < 0.0 {
        Separation::Timelike
    } else if s2 == 0.0 {
        Separation::Lightlike
    } else {
        Separation::Spacelike
    })
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Squared proper time from a past event, if it lies in the causal past.
///
/// `dt` is `t_query - t_other`. The predicate is `dt > 0 && dt >= D`, the
/// exact negation of the violation rule used during enforcement.
#[inline]
pub(crate) fn past_tau2(dt: f64, dist_sq: f64) -> Option<f64> {
    if dt > 0.0 && dt >= dist_sq.sqrt() {
        Some((dt * dt - dist_sq).max(0.0))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_signs() {
        let o = Event::new(0.0, [0.0, 0.0]);
        assert_eq!(interval(&o, &Event::new(1.0, [0.0, 0.0])).unwrap(), -1.0);
        assert_eq!(interval(&o, &Event::new(1.0, [1.0, 0.0])).unwrap(), 0.0);
        assert_eq!(interval(&o, &Event::new(0.0, [3.0, 4.0])).unwrap(), 25.0);
        assert_eq!(
            classify(&o, &Event::new(1.0, [1.0, 0.0])).unwrap(),
            Separation::Lightlike
        );
        assert_eq!(
            classify(&o, &Event::new(0.0, [1.0, 0.0])).unwrap(),
            Separation::Spacelike
        );
    }

    #[test]
    fn dimension_mismatch() {
        let a = Event::new(0.0, [0.0]);
        let b = Event::new(0.0, [0.0, 1.0]);
        assert!(matches!(
            interval(&a, &b),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn past_predicate_boundaries() {
        assert_eq!(past_tau2(1.0, 1.0), Some(0.0));
        assert_eq!(past_tau2(0.0, 0.0), None);
        assert_eq!(past_tau2(-1.0, 0.0), None);
        assert_eq!(past_tau2(0.5, 0.36), None);
    }

    proptest! {
        #[test]
        fn interval_is_symmetric(
            t1 in -10.0f64..10.0, t2 in -10.0f64..10.0,
            x1 in proptest::collection::vec(-5.0f64..5.0, 3),
            x2 in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            let a = Event::new(t1, x1);
            let b = Event::new(t2, x2);
            prop_assert_eq!(interval(&a, &b).unwrap(), interval(&b, &a).unwrap());
        }
    }
}
