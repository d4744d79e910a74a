//! Exceptional primes, pairs and triples, the exceptional-level
//! predicate, and enumeration of the minimal exceptional family.
//!
//! A level is exceptional when every prime whose square divides it is
//! one of {2, 3, 5, 7, 13} and every square-below descent to an
//! almost-squarefree level `p^k q_1 ... q_s` has all subtuples of
//! `(p, q_1, ..., q_s)` starting with `p` in the exceptional tables.
//! The minimal exceptional family collects the exceptional levels of
//! positive star genus (plus the prime powers 125 and 169), pruned so
//! that no member is square-above another member.

use crate::arith::{factorize, square_below_descents};
use crate::genus::genus_star;
use serde::Serialize;
use thiserror::Error;

/// Errors for exceptional-level queries.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExceptionalError {
    /// A tuple with repeated primes.
    #[error("repeated prime {0} in tuple")]
    RepeatedPrime(i64),
    /// The level is squarefree.
    #[error("{0} is squarefree")]
    Squarefree(i64),
    /// The level is a prime power.
    #[error("{0} is a prime power")]
    PrimePower(i64),
    /// A non-exceptional level passed where an exceptional one is required.
    #[error("{0} is not an exceptional level")]
    NotExceptional(i64),
}

/// The exceptional primes.
pub const EXCEPTIONAL_PRIMES: [i64; 5] = [2, 3, 5, 7, 13];

/// The exceptional pairs `(p, q)`.
pub const EXCEPTIONAL_PAIRS: [(i64, i64); 10] = [
    (2, 3),
    (2, 5),
    (2, 7),
    (2, 11),
    (2, 23),
    (3, 2),
    (3, 5),
    (3, 11),
    (5, 2),
    (7, 3),
];

/// The exceptional triples (both listed orders).
pub const EXCEPTIONAL_TRIPLES: [(i64, i64, i64); 2] = [(2, 3, 5), (2, 5, 3)];

/// The minimal-level list of section 2 (kept verbatim as shipped data;
/// it contains 1125, which the family derivation does not produce).
pub const SECTION2_LEVELS: [i64; 37] = [
    40, 48, 72, 80, 88, 96, 100, 108, 112, 120, 135, 144, 147, 162, 176,
    180, 184, 196, 200, 216, 224, 225, 240, 250, 297, 368, 396, 405, 441,
    450, 486, 500, 891, 1029, 1125, 1225, 1250,
];

/// Classification outcome for one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelClassification {
    /// The level.
    pub level: i64,
    /// Is it exceptional?
    pub exceptional: bool,
    /// For a non-exceptional level, the first failing descent: the
    /// almost-squarefree level and the offending subtuple.
    pub witness: Option<(i64, Vec<i64>)>,
    /// For an exceptional level, the shape tag (1)-(5).
    pub shape: Option<u8>,
}

/// Is the tuple `(p, rest...)` exceptional? Table lookup; tuples of
/// length at least 4 are never exceptional.
pub fn exceptional_tuple(p: i64, rest: &[i64]) -> Result<bool, ExceptionalError> {
    let mut all = vec![p];
    all.extend_from_slice(rest);
    for (i, &a) in all.iter().enumerate() {
        if all[i + 1..].contains(&a) {
            return Err(ExceptionalError::RepeatedPrime(a));
        }
    }
    Ok(match rest.len() {
        0 => EXCEPTIONAL_PRIMES.contains(&p),
        1 => EXCEPTIONAL_PAIRS.contains(&(p, rest[0])),
        2 => EXCEPTIONAL_TRIPLES.contains(&(p, rest[0], rest[1])),
        _ => false,
    })
}

fn subtuples_starting_with_p(qs: &[i64]) -> Vec<Vec<i64>> {
    // all subsequences of qs, shortest first
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for &q in qs {
        let mut extended: Vec<Vec<i64>> = out
            .iter()
            .map(|s| {
                let mut s2 = s.clone();
                s2.push(q);
                s2
            })
            .collect();
        out.append(&mut extended);
    }
    out.sort_by_key(|s| s.len());
    out
}

/// Decide exceptionality of a non-squarefree, non-prime-power level.
pub fn is_exceptional_level(n: i64) -> Result<LevelClassification, ExceptionalError> {
    let fac = factorize(n);
    if fac.factors.iter().all(|&(_, e)| e == 1) {
        return Err(ExceptionalError::Squarefree(n));
    }
    if fac.factors.len() == 1 {
        return Err(ExceptionalError::PrimePower(n));
    }
    for &(p, e) in &fac.factors {
        if e >= 2 && !EXCEPTIONAL_PRIMES.contains(&p) {
            return Ok(LevelClassification {
                level: n,
                exceptional: false,
                witness: Some((n, vec![p])),
                shape: None,
            });
        }
    }
    for (m, p) in square_below_descents(n) {
        let qs: Vec<i64> = m
            .factors
            .iter()
            .map(|&(q, _)| q)
            .filter(|&q| q != p)
            .collect();
        for sub in subtuples_starting_with_p(&qs) {
            if !exceptional_tuple(p, &sub)? {
                let mut tuple = vec![p];
                tuple.extend(sub);
                return Ok(LevelClassification {
                    level: n,
                    exceptional: false,
                    witness: Some((m.value, tuple)),
                    shape: None,
                });
            }
        }
    }
    let shape = shape_tag(n);
    Ok(LevelClassification {
        level: n,
        exceptional: true,
        witness: None,
        shape,
    })
}

fn shape_tag(n: i64) -> Option<u8> {
    let fac = factorize(n);
    let powerful: Vec<(i64, u32)> = fac
        .factors
        .iter()
        .copied()
        .filter(|&(_, e)| e >= 2)
        .collect();
    let single: Vec<i64> = fac
        .factors
        .iter()
        .filter(|&&(_, e)| e == 1)
        .map(|&(p, _)| p)
        .collect();
    match (single.len(), powerful.len()) {
        (1, 1) | (2, 1) => Some(1),
        (0, 2) => {
            if powerful.iter().all(|&(_, e)| e % 2 == 0) {
                Some(4)
            } else {
                Some(2)
            }
        }
        (1, 2) => Some(3),
        (0, k) if k >= 3 => {
            if powerful.iter().all(|&(_, e)| e % 2 == 0) {
                Some(4)
            } else {
                Some(5)
            }
        }
        _ => None,
    }
}

/// Shape tag (1)-(5) of an exceptional level.
pub fn shape_classify(n: i64) -> Result<u8, ExceptionalError> {
    let cls = is_exceptional_level(n)?;
    if !cls.exceptional {
        return Err(ExceptionalError::NotExceptional(n));
    }
    cls.shape.ok_or(ExceptionalError::NotExceptional(n))
}

/// The half-valuation condition `v_p(M) <= ceil(v_p(N)/2)` as a
/// checked operation on a proper divisor.
pub fn hv_check(n: i64, m: i64) -> Result<bool, ExceptionalError> {
    if m <= 0 || n % m != 0 || m == n {
        return Err(ExceptionalError::NotExceptional(n));
    }
    Ok(crate::cusps::hv_holds(n, m))
}

/// Exceptional levels up to `cap` with positive star genus, plus the
/// prime powers 125 and 169, pruned so no member is square-above
/// another member. Reproduces the initial minimal family.
pub fn minimal_exceptional_family(cap: i64) -> Vec<i64> {
    assert!(cap >= 1372, "cap must be at least 1372");
    let mut candidates: Vec<i64> = Vec::new();
    for n in 2..=cap {
        let fac = factorize(n);
        if fac.factors.iter().all(|&(_, e)| e == 1) || fac.factors.len() == 1 {
            continue;
        }
        let cls = is_exceptional_level(n).expect("preconditions checked");
        if cls.exceptional && genus_star(n) > 0 {
            candidates.push(n);
        }
    }
    // prime powers of positive star genus with no rank-zero quotient
    candidates.push(125);
    candidates.push(169);
    candidates.sort_unstable();
    let mut kept: Vec<i64> = Vec::new();
    for &n in &candidates {
        let dominated = kept.iter().any(|&m| {
            n % m == 0 && {
                let q = n / m;
                let r = (q as f64).sqrt() as i64;
                (r - 1..=r + 1).any(|v| v >= 1 && v * v == q)
            }
        });
        if !dominated {
            kept.push(n);
        }
    }
    kept
}

/// The adjusted family: remove {99, 125, 169, 324, 1372} and add back
/// {396, 500, 891}.
pub fn adjusted_family(l0: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = l0
        .iter()
        .copied()
        .filter(|n| ![99, 125, 169, 324, 1372].contains(n))
        .collect();
    out.extend_from_slice(&[396, 500, 891]);
    out.sort_unstable();
    out
}
