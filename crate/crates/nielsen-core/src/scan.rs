//! Exhaustive injectivity scan for the invariant element `Pi(a, b, r)`.
//!
//! Enumerates all triples with `a` a unit mod `q`, `b` a unit mod `p` and
//! `r` from a finite rational set, groups the exactly computed values, and
//! reports any collision class that mixes residues with `a != +-a' mod q`.
//! Equality of `Pi` values forces `a = +-a' mod q`; the scan spot-checks
//! this over the requested parameter box with exact arithmetic.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;
use serde::Serialize;

use crate::cyclo::CycNumber;
use crate::ring::{pi_product, RingError};

/// One enumerated parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub a: i64,
    pub b: i64,
    /// `r` as (numerator, denominator).
    pub r: (i64, i64),
}

/// Triples sharing one exact `Pi` value.
#[derive(Debug, Clone, Serialize)]
pub struct CollisionClass {
    pub members: Vec<Triple>,
}

/// A collision incompatible with `a = +-a' mod q`.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub first: Triple,
    pub second: Triple,
}

/// Structured scan outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub p: u32,
    pub q: u64,
    pub r_values: Vec<(i64, i64)>,
    pub triple_count: usize,
    /// Classes with at least two members.
    pub classes: Vec<CollisionClass>,
    pub violations: Vec<Violation>,
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Enumerates `Pi(a, b, r)` over the full unit box and groups equal values.
pub fn pi_injectivity_scan(p: u32, q: u64, r_set: &[(i64, i64)]) -> Result<ScanReport, RingError> {
    if p < 3 {
        return Err(RingError::PreconditionViolated("p must be at least 3"));
    }
    if q % p as u64 != 0 {
        return Err(RingError::PreconditionViolated("p must divide q"));
    }
    if r_set.is_empty() {
        return Err(RingError::PreconditionViolated("r set must be nonempty"));
    }
    if r_set.iter().any(|&(num, den)| num == 0 || den == 0) {
        return Err(RingError::PreconditionViolated("r set must exclude zero"));
    }

    let zeta = CycNumber::zeta_power(q, 1);
    let mut groups: BTreeMap<String, Vec<Triple>> = BTreeMap::new();
    let mut count = 0usize;
    for a in 1..q as i64 {
        if gcd64(a, q as i64) != 1 {
            continue;
        }
        for b in 1..p as i64 {
            if gcd64(b, p as i64) != 1 {
                continue;
            }
            for &(num, den) in r_set {
                let r = CycNumber::from_ratio(num, den);
                let value = pi_product(a, b, &r, p, q, &zeta)?;
                let key: String = value
                    .coeffs()
                    .iter()
                    .map(|c| c.canonical_key(q))
                    .collect();
                groups.entry(key).or_default().push(Triple { a, b, r: (num, den) });
                count += 1;
            }
        }
    }

    let mut classes = Vec::new();
    let mut violations = Vec::new();
    for members in groups.into_values() {
        if members.len() < 2 {
            continue;
        }
        for (i, x) in members.iter().enumerate() {
            for y in &members[i + 1..] {
                let sum = (x.a + y.a).rem_euclid(q as i64);
                let diff = (x.a - y.a).rem_euclid(q as i64);
                if sum != 0 && diff != 0 {
                    violations.push(Violation { first: *x, second: *y });
                }
            }
        }
        classes.push(CollisionClass { members });
    }

    Ok(ScanReport {
        p,
        q,
        r_values: r_set.to_vec(),
        triple_count: count,
        classes,
        violations,
    })
}
