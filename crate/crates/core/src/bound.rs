//! Bound values tagged with how far they can be trusted.

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Every input was computed exactly.
    Certified,
    /// Depends on a heuristic cut value; not a proven bound.
    Heuristic,
    /// Hypotheses of the bound fail; no finite value.
    Vacuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue<S> {
    /// `None` when vacuous.
    pub value: Option<S>,
    pub certification: Certification,
}

impl<S: Scalar> BoundValue<S> {
    pub fn certified(value: S) -> Self {
        Self {
            value: Some(value),
            certification: Certification::Certified,
        }
    }

    pub fn heuristic(value: S) -> Self {
        Self {
            value: Some(value),
            certification: Certification::Heuristic,
        }
    }

    pub fn vacuous() -> Self {
        Self {
            value: None,
            certification: Certification::Vacuous,
        }
    }

    pub fn with_certification(value: S, certified: bool) -> Self {
        if !value.is_finite() {
            Self::vacuous()
        } else if certified {
            Self::certified(value)
        } else {
            Self::heuristic(value)
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certification == Certification::Certified
    }

    /// Whether the bound covers `actual` up to `tol`. Vacuous bounds cover
    /// everything.
    pub fn covers(&self, actual: S, tol: S) -> bool {
        self.value.is_none_or(|v| actual <= v + tol)
    }
}
