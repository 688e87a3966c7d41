#![allow(dead_code)]

use pddb_core::ConfidenceLevel;
use proptest::prelude::*;

/// A probability, biased towards the interesting endpoints.
pub fn prob() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        1 => Just(1.0),
        1 => Just(0.5),
        2 => (0u32..=100).prop_map(|n| n as f64 / 100.0),
        5 => 0.0..=1.0f64,
    ]
}

/// Any raw element of `[0,1]^4`, not necessarily consistent.
pub fn raw() -> impl Strategy<Value = ConfidenceLevel> {
    (prob(), prob(), prob(), prob()).prop_map(|(a, b, g, d)| ConfidenceLevel::new(a, b, g, d).unwrap())
}

/// Scales four unit samples into a level satisfying the reduced constraints.
pub fn reduced_from(u: (f64, f64, f64, f64)) -> ConfidenceLevel {
    let a = u.0;
    let g = (u.1 * (1.0 - a)).min(1.0 - a);
    let b = (a + u.2 * (1.0 - g - a)).clamp(a, (1.0 - g).max(a));
    let d = (g + u.3 * (1.0 - a - g)).clamp(g, (1.0 - a).max(g));
    ConfidenceLevel::new(a, b, g, d).unwrap()
}

pub fn reduced() -> impl Strategy<Value = ConfidenceLevel> {
    prop_oneof![
        1 => Just(ConfidenceLevel::TRUE),
        1 => Just(ConfidenceLevel::FALSE),
        1 => Just(ConfidenceLevel::new(0.0, 1.0, 0.0, 1.0).unwrap()),
        12 => (prob(), prob(), prob(), prob()).prop_map(reduced_from),
    ]
}

/// Consistent levels, most of them not reduced.
pub fn consistent() -> impl Strategy<Value = ConfidenceLevel> {
    prop_oneof![
        1 => reduced(),
        3 => (prob(), prob(), prob(), prob()).prop_map(|(u0, u1, u2, u3)| {
            let a = u0;
            let g = (u1 * (1.0 - a)).min(1.0 - a);
            let b = a + u2 * (1.0 - a);
            let d = g + u3 * (1.0 - g);
            ConfidenceLevel::new(a, b.min(1.0), g, d.min(1.0)).unwrap()
        }),
    ]
}
