//! Confidence levels and the truth / knowledge / precision trilattice.
//!
//! A confidence level `<[a,b],[g,d]>` carries an interval of belief and an
//! interval of doubt. Elements with an empty interval (for instance the
//! precision top `<[1,0],[1,0]>`) are legitimate lattice elements; whether a
//! level describes a realizable probability assignment is the job of
//! [`ConfidenceLevel::is_consistent`] and [`ConfidenceLevel::is_reduced`].

use std::fmt;

use thiserror::Error;

/// Slack used by the sum constraints of the consistency and reduction
/// predicates. Every formula is exact over the reals; the slack absorbs
/// the final rounding of `a + g` and friends.
pub const SUM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfidenceError {
    #[error("probability {0} is outside [0,1]")]
    OutOfRange(f64),
    #[error("confidence level {0} is inconsistent")]
    Inconsistent(ConfidenceLevel),
}

/// A pair of probability intervals: belief `[alpha, beta]` and doubt
/// `[gamma, delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceLevel {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

/// The three partial orders of the trilattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeOrder {
    /// Belief up, doubt down.
    Truth,
    /// Belief and doubt both up.
    Knowledge,
    /// Intervals narrower.
    Precision,
}

impl LatticeOrder {
    pub const ALL: [LatticeOrder; 3] = [Self::Truth, Self::Knowledge, Self::Precision];
}

#[inline]
pub(crate) fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

impl ConfidenceLevel {
    /// `<[1,1],[0,0]>`, the truth top.
    pub const TRUE: ConfidenceLevel = ConfidenceLevel::from_raw(1.0, 1.0, 0.0, 0.0);
    /// `<[0,0],[1,1]>`, the truth bottom.
    pub const FALSE: ConfidenceLevel = ConfidenceLevel::from_raw(0.0, 0.0, 1.0, 1.0);

    const fn from_raw(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        ConfidenceLevel {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// Builds a level from raw endpoints, rejecting anything outside `[0,1]`
    /// (including NaN). Empty intervals are accepted.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self, ConfidenceError> {
        for x in [alpha, beta, gamma, delta] {
            if !(0.0..=1.0).contains(&x) {
                return Err(ConfidenceError::OutOfRange(x));
            }
        }
        Ok(Self::from_raw(alpha, beta, gamma, delta))
    }

    /// Result of an arithmetic formula: each endpoint is clamped to `[0,1]`.
    #[inline]
    pub(crate) fn clamped(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self::from_raw(clamp01(alpha), clamp01(beta), clamp01(gamma), clamp01(delta))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn belief(&self) -> [f64; 2] {
        [self.alpha, self.beta]
    }

    pub fn doubt(&self) -> [f64; 2] {
        [self.gamma, self.delta]
    }

    pub fn components(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Bitwise equality of all four endpoints.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.components()
            .iter()
            .zip(other.components().iter())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Componentwise equality up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_false(&self) -> bool {
        self.bits_eq(&Self::FALSE)
    }

    pub fn is_true(&self) -> bool {
        self.bits_eq(&Self::TRUE)
    }

    /// Both intervals nonempty and `alpha + gamma <= 1`.
    pub fn is_consistent(&self) -> bool {
        self.alpha <= self.beta
            && self.gamma <= self.delta
            && self.alpha + self.gamma <= 1.0 + SUM_SLACK
    }

    /// Nonempty intervals with `alpha + delta <= 1` and `beta + gamma <= 1`.
    pub fn is_reduced(&self) -> bool {
        self.alpha <= self.beta
            && self.gamma <= self.delta
            && self.alpha + self.delta <= 1.0 + SUM_SLACK
            && self.beta + self.gamma <= 1.0 + SUM_SLACK
    }

    /// Trims unattainable upper bounds: `<[a, min(b, 1-g)], [g, min(d, 1-a)]>`.
    ///
    /// An upper bound is only replaced when it exceeds its complement by
    /// more than the rounding slack, so a reduced level comes back
    /// bit-identical.
    pub fn reduce(&self) -> Result<Self, ConfidenceError> {
        if !self.is_consistent() {
            return Err(ConfidenceError::Inconsistent(*self));
        }
        let beta = if self.beta + self.gamma > 1.0 + SUM_SLACK {
            (1.0 - self.gamma).max(self.alpha)
        } else {
            self.beta
        };
        let delta = if self.alpha + self.delta > 1.0 + SUM_SLACK {
            (1.0 - self.alpha).max(self.gamma)
        } else {
            self.delta
        };
        Ok(Self::clamped(self.alpha, beta, self.gamma, delta))
    }

    pub fn leq(&self, order: LatticeOrder, other: &Self) -> bool {
        leq(order, self, other)
    }
}

pub fn leq(order: LatticeOrder, c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> bool {
    let belief_lo = c1.alpha <= c2.alpha;
    match order {
        LatticeOrder::Truth => {
            belief_lo && c1.beta <= c2.beta && c2.gamma <= c1.gamma && c2.delta <= c1.delta
        }
        LatticeOrder::Knowledge => {
            belief_lo && c1.beta <= c2.beta && c1.gamma <= c2.gamma && c1.delta <= c2.delta
        }
        LatticeOrder::Precision => {
            belief_lo && c2.beta <= c1.beta && c1.gamma <= c2.gamma && c2.delta <= c1.delta
        }
    }
}

pub fn meet(order: LatticeOrder, c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> ConfidenceLevel {
    let (a, b, g, d) = match order {
        LatticeOrder::Truth => (
            c1.alpha.min(c2.alpha),
            c1.beta.min(c2.beta),
            c1.gamma.max(c2.gamma),
            c1.delta.max(c2.delta),
        ),
        LatticeOrder::Knowledge => (
            c1.alpha.min(c2.alpha),
            c1.beta.min(c2.beta),
            c1.gamma.min(c2.gamma),
            c1.delta.min(c2.delta),
        ),
        LatticeOrder::Precision => (
            c1.alpha.min(c2.alpha),
            c1.beta.max(c2.beta),
            c1.gamma.min(c2.gamma),
            c1.delta.max(c2.delta),
        ),
    };
    ConfidenceLevel::from_raw(a, b, g, d)
}

pub fn join(order: LatticeOrder, c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> ConfidenceLevel {
    let (a, b, g, d) = match order {
        LatticeOrder::Truth => (
            c1.alpha.max(c2.alpha),
            c1.beta.max(c2.beta),
            c1.gamma.min(c2.gamma),
            c1.delta.min(c2.delta),
        ),
        LatticeOrder::Knowledge => (
            c1.alpha.max(c2.alpha),
            c1.beta.max(c2.beta),
            c1.gamma.max(c2.gamma),
            c1.delta.max(c2.delta),
        ),
        LatticeOrder::Precision => (
            c1.alpha.max(c2.alpha),
            c1.beta.min(c2.beta),
            c1.gamma.max(c2.gamma),
            c1.delta.min(c2.delta),
        ),
    };
    ConfidenceLevel::from_raw(a, b, g, d)
}

pub fn top(order: LatticeOrder) -> ConfidenceLevel {
    match order {
        LatticeOrder::Truth => ConfidenceLevel::TRUE,
        LatticeOrder::Knowledge => ConfidenceLevel::from_raw(1.0, 1.0, 1.0, 1.0),
        LatticeOrder::Precision => ConfidenceLevel::from_raw(1.0, 0.0, 1.0, 0.0),
    }
}

pub fn bottom(order: LatticeOrder) -> ConfidenceLevel {
    match order {
        LatticeOrder::Truth => ConfidenceLevel::FALSE,
        LatticeOrder::Knowledge => ConfidenceLevel::from_raw(0.0, 0.0, 0.0, 0.0),
        LatticeOrder::Precision => ConfidenceLevel::from_raw(0.0, 1.0, 0.0, 1.0),
    }
}

/// Formats a probability with at most six significant decimals.
pub fn format_probability(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.5e}", x).parse().unwrap_or(x);
    let plain = format!("{}", rounded);
    if plain.len() > 12 {
        format!("{:e}", rounded)
    } else {
        plain
    }
}

impl fmt::Display for ConfidenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<[{},{}],[{},{}]>",
            format_probability(self.alpha),
            format_probability(self.beta),
            format_probability(self.gamma),
            format_probability(self.delta)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LatticeOrder::*;

    fn cl(a: f64, b: f64, g: f64, d: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(a, b, g, d).unwrap()
    }

    #[test]
    fn truth_bottom_is_least() {
        for c in [cl(0.3, 0.4, 0.2, 0.5), cl(1.0, 1.0, 0.0, 0.0), cl(0.0, 1.0, 0.0, 1.0)] {
            assert!(leq(Truth, &bottom(Truth), &c));
        }
    }

    #[test]
    fn least_valuation_below_satisfying_one() {
        assert!(leq(Truth, &cl(0.45, 0.8, 0.1, 0.4), &cl(0.5, 0.9, 0.0, 0.0)));
    }

    #[test]
    fn incomparable_levels() {
        let a = cl(0.5, 0.7, 0.1, 0.2);
        let b = cl(0.6, 0.8, 0.3, 0.45);
        assert!(!leq(Truth, &a, &b));
        assert!(!leq(Truth, &b, &a));
    }

    #[test]
    fn truth_join_matches_hand_computation() {
        let j = join(Truth, &cl(0.45, 0.665, 0.3, 0.505), &cl(0.3, 0.8, 0.1, 0.4));
        assert_eq!(j, cl(0.45, 0.8, 0.1, 0.4));
        let c = cl(0.2, 0.3, 0.4, 0.5);
        assert_eq!(meet(Truth, &c, &c), c);
    }

    #[test]
    fn precision_meet() {
        let m = meet(Precision, &cl(0.4, 0.6, 0.2, 0.3), &cl(0.5, 0.7, 0.1, 0.4));
        assert_eq!(m, cl(0.4, 0.7, 0.1, 0.4));
    }

    #[test]
    fn tops_and_bottoms() {
        assert_eq!(top(Truth).components(), [1.0, 1.0, 0.0, 0.0]);
        assert_eq!(bottom(Truth).components(), [0.0, 0.0, 1.0, 1.0]);
        assert_eq!(top(Knowledge).components(), [1.0, 1.0, 1.0, 1.0]);
        assert_eq!(bottom(Knowledge).components(), [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(top(Precision).components(), [1.0, 0.0, 1.0, 0.0]);
        assert_eq!(bottom(Precision).components(), [0.0, 1.0, 0.0, 1.0]);
        assert!(leq(Knowledge, &bottom(Knowledge), &top(Knowledge)));
    }

    #[test]
    fn consistency() {
        assert!(cl(1.0, 1.0, 0.0, 0.0).is_consistent());
        assert!(!cl(1.0, 1.0, 1.0, 1.0).is_consistent());
        assert!(!cl(0.6, 0.7, 0.5, 0.6).is_consistent());
        assert!(!top(Precision).is_consistent());
    }

    #[test]
    fn reducedness() {
        assert!(cl(0.5, 0.53, 0.35, 0.41).is_reduced());
        assert!(!cl(0.3, 0.9, 0.2, 0.8).is_reduced());
        assert!(cl(0.0, 0.0, 1.0, 1.0).is_reduced());
    }

    #[test]
    fn reduction() {
        let r = cl(0.3, 0.9, 0.2, 0.8).reduce().unwrap();
        assert!(r.approx_eq(&cl(0.3, 0.8, 0.2, 0.7), 1e-12));
        assert!(r.is_reduced());
        let t = cl(1.0, 1.0, 0.0, 0.0);
        assert!(t.reduce().unwrap().bits_eq(&t));
        assert!(r.reduce().unwrap().bits_eq(&r));
        assert!(matches!(
            cl(0.6, 0.7, 0.5, 0.6).reduce(),
            Err(ConfidenceError::Inconsistent(_))
        ));
    }

    #[test]
    fn raw_construction_rejects_out_of_range() {
        assert!(ConfidenceLevel::new(1.2, 1.0, 0.0, 0.0).is_err());
        assert!(ConfidenceLevel::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
        assert!(ConfidenceLevel::new(-0.1, 1.0, 0.0, 0.0).is_err());
        // empty intervals are valid raw elements
        assert!(ConfidenceLevel::new(1.0, 0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn display() {
        assert_eq!(cl(0.5, 0.53, 0.35, 0.41).to_string(), "<[0.5,0.53],[0.35,0.41]>");
        assert_eq!(cl(1.0, 1.0, 0.0, 0.0).to_string(), "<[1,1],[0,0]>");
        assert_eq!(cl(1.0 / 3.0, 0.5, 0.0, 0.1).to_string(), "<[0.333333,0.5],[0,0.1]>");
    }
}
