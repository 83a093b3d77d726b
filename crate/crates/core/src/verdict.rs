//! Outcomes of semidecidable queries.

use std::fmt;

use num_bigint::BigUint;

use crate::rational::{render_decimal, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Decided(T),
    /// The evidence splits the indices into two recurring classes; the
    /// answer depends on which class the ultrafilter contains.
    UndecidedUltrafilter,
    /// No stable pattern was visible up to the horizon.
    UndecidedHorizon,
}

impl<T> Outcome<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Decided(_) => "Decided",
            Outcome::UndecidedUltrafilter => "UndecidedUltrafilter",
            Outcome::UndecidedHorizon => "UndecidedHorizon",
        }
    }
}

/// Sample indices backing a verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    /// First sampled index of the final stable run (Decided verdicts).
    pub stable_from: Option<BigUint>,
    /// Indices exhibiting the oscillation or disagreement.
    pub witnesses: Vec<BigUint>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<T> {
    pub outcome: Outcome<T>,
    pub evidence: Evidence,
    /// Horizon actually sampled (may be below the requested one when the
    /// stream cannot be evaluated that far).
    pub horizon: BigUint,
}

impl<T> Verdict<T> {
    pub fn decided(&self) -> Option<&T> {
        match &self.outcome {
            Outcome::Decided(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self.outcome, Outcome::Decided(_))
    }
}

/// An approximate real: `value ± radius`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Estimate {
    pub value: Q,
    pub radius: Q,
}

impl Estimate {
    pub fn contains(&self, v: &Q) -> bool {
        let d = &self.value - v;
        d.clone() * d <= self.radius.clone() * &self.radius
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places = crate::coeff::Coefficient::approx(self.value.clone(), self.radius.clone()).meaningful_places();
        write!(f, "{} ± {}", crate::rational::render_rounded(&self.value, places), render_decimal(&self.radius, 20))
    }
}

/// Whether a tested property holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Holds,
    Fails,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Holds => "holds",
            Property::Fails => "fails",
        }
    }
}
