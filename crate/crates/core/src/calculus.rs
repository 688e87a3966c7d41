//! Negation, conjunction and disjunction of confidence levels under the five
//! combination modes.
//!
//! Each closed form is applied literally and clamped to `[0,1]`. Terms of the
//! shape `max(0, x + y - 1)` are additionally capped by `min(x, y)` and terms
//! of the shape `1 - (1 - x)(1 - y)` are floored at `max(x, y)`. Both are
//! identities over the reals; in floating point they keep the bounding and
//! absorption laws exact.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::trilattice::{ConfidenceLevel, SUM_SLACK};

/// Interdependence assumption used when combining two events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Ignorance,
    Independence,
    PositiveCorrelation,
    NegativeCorrelation,
    MutualExclusion,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Ignorance,
        Mode::Independence,
        Mode::PositiveCorrelation,
        Mode::NegativeCorrelation,
        Mode::MutualExclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Ignorance => "ign",
            Mode::Independence => "ind",
            Mode::PositiveCorrelation => "pc",
            Mode::NegativeCorrelation => "nc",
            Mode::MutualExclusion => "me",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown combination mode `{0}` (expected ign, ind, pc, nc or me)")]
pub struct UnknownMode(pub String);

impl FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMode(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CombinationError {
    #[error("mutual exclusion needs a1+a2 <= b1+b2 <= 1, got {0} and {1}")]
    MutualExclusionInapplicable(ConfidenceLevel, ConfidenceLevel),
}

pub fn negate(c: &ConfidenceLevel) -> ConfidenceLevel {
    ConfidenceLevel::clamped(c.gamma(), c.delta(), c.alpha(), c.beta())
}

/// `max(0, x + y - 1)`, never above either argument.
#[inline]
fn lower_sum(x: f64, y: f64) -> f64 {
    (x + y - 1.0).max(0.0).min(x.min(y))
}

/// `min(1, x + y)`.
#[inline]
fn capped_sum(x: f64, y: f64) -> f64 {
    (x + y).min(1.0)
}

/// `1 - (1 - x)(1 - y)`, never below either argument.
#[inline]
fn noisy_or(x: f64, y: f64) -> f64 {
    (1.0 - (1.0 - x) * (1.0 - y)).max(x.max(y))
}

fn check_me(c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> Result<(), CombinationError> {
    let lo = c1.alpha() + c2.alpha();
    let hi = c1.beta() + c2.beta();
    if lo <= hi + SUM_SLACK && hi <= 1.0 + SUM_SLACK {
        Ok(())
    } else {
        Err(CombinationError::MutualExclusionInapplicable(*c1, *c2))
    }
}

pub fn conjoin(
    mode: Mode,
    c1: &ConfidenceLevel,
    c2: &ConfidenceLevel,
) -> Result<ConfidenceLevel, CombinationError> {
    if c1.is_false() || c2.is_false() {
        return Ok(ConfidenceLevel::FALSE);
    }
    if c1.is_true() {
        return Ok(*c2);
    }
    if c2.is_true() {
        return Ok(*c1);
    }
    let [a1, b1, g1, d1] = c1.components();
    let [a2, b2, g2, d2] = c2.components();
    let (a, b, g, d) = match mode {
        Mode::Ignorance => (lower_sum(a1, a2), b1.min(b2), g1.max(g2), capped_sum(d1, d2)),
        Mode::Independence => (a1 * a2, b1 * b2, noisy_or(g1, g2), noisy_or(d1, d2)),
        Mode::PositiveCorrelation => (a1.min(a2), b1.min(b2), g1.max(g2), d1.max(d2)),
        Mode::NegativeCorrelation => (
            lower_sum(a1, a2),
            lower_sum(b1, b2),
            capped_sum(g1, g2),
            capped_sum(d1, d2),
        ),
        Mode::MutualExclusion => {
            check_me(c1, c2)?;
            (0.0, 0.0, capped_sum(g1, g2), capped_sum(d1, d2))
        }
    };
    Ok(ConfidenceLevel::clamped(a, b, g, d))
}

pub fn disjoin(
    mode: Mode,
    c1: &ConfidenceLevel,
    c2: &ConfidenceLevel,
) -> Result<ConfidenceLevel, CombinationError> {
    if c1.is_true() || c2.is_true() {
        return Ok(ConfidenceLevel::TRUE);
    }
    if c1.is_false() {
        return Ok(*c2);
    }
    if c2.is_false() {
        return Ok(*c1);
    }
    let [a1, b1, g1, d1] = c1.components();
    let [a2, b2, g2, d2] = c2.components();
    let (a, b, g, d) = match mode {
        Mode::Ignorance => (a1.max(a2), capped_sum(b1, b2), lower_sum(g1, g2), d1.min(d2)),
        Mode::Independence => (noisy_or(a1, a2), noisy_or(b1, b2), g1 * g2, d1 * d2),
        Mode::PositiveCorrelation => (a1.max(a2), b1.max(b2), g1.min(g2), d1.min(d2)),
        Mode::NegativeCorrelation => (
            capped_sum(a1, a2),
            capped_sum(b1, b2),
            lower_sum(g1, g2),
            lower_sum(d1, d2),
        ),
        Mode::MutualExclusion => {
            check_me(c1, c2)?;
            (
                capped_sum(a1, a2),
                capped_sum(b1, b2),
                lower_sum(g1, g2),
                lower_sum(d1, d2),
            )
        }
    };
    Ok(ConfidenceLevel::clamped(a, b, g, d))
}

/// Left fold of [`conjoin`]; the empty conjunction is `TRUE`.
pub fn conjoin_all<'a, I>(mode: Mode, items: I) -> Result<ConfidenceLevel, CombinationError>
where
    I: IntoIterator<Item = &'a ConfidenceLevel>,
{
    let mut iter = items.into_iter();
    let Some(first) = iter.next() else {
        return Ok(ConfidenceLevel::TRUE);
    };
    let mut acc = *first;
    for c in iter {
        acc = conjoin(mode, &acc, c)?;
    }
    Ok(acc)
}

/// Left fold of [`disjoin`]; the empty disjunction is `FALSE`.
pub fn disjoin_all<'a, I>(mode: Mode, items: I) -> Result<ConfidenceLevel, CombinationError>
where
    I: IntoIterator<Item = &'a ConfidenceLevel>,
{
    let mut iter = items.into_iter();
    let Some(first) = iter.next() else {
        return Ok(ConfidenceLevel::FALSE);
    };
    let mut acc = *first;
    for c in iter {
        acc = disjoin(mode, &acc, c)?;
    }
    Ok(acc)
}
