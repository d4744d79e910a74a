//! Imaginary quadratic orders `O = Z[alpha_O]` and their admissible ideals.
//!
//! Exports [`ImagQuadOrder`], [`OrderIdeal`], [`order_from_disc`],
//! [`admissible_primepower`], [`admissible_ideals`], [`conjugate_ideal`]
//! and [`eta_hall_part`].
//!
//! An admissible ideal of norm `n` is an invertible ideal `(n, lambda -
//! alpha_O)` with cyclic quotient `O / eta` of order `n`. Per prime power
//! `p^k || n` these correspond to residues `lambda mod p^k` with
//! `P_O(lambda) = 0 mod p^k` such that the associated binary quadratic form
//! `(p^k, 2*lambda - t, P_O(lambda)/p^k)` is primitive; for `p | c` this
//! primitivity is equivalent to the exact-valuation criterion
//! `v_p(P_O(lambda)) = k`.

use crate::arith::{factorize, gcd, hall_divisors, kronecker, xgcd};
use thiserror::Error;

/// Errors for order construction and ideal manipulation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    /// Discriminant not negative or not congruent to 0, 1 mod 4.
    #[error("invalid imaginary quadratic discriminant {0}")]
    InvalidDiscriminant(i64),
    /// A Hall-part extraction with a non-Hall divisor.
    #[error("{0} is not a Hall divisor of the ideal norm {1}")]
    NotHall(i64, i64),
}

/// An imaginary quadratic order of discriminant `D = c^2 * D_K`.
///
/// The order is `Z[alpha]` where `alpha` has minimal polynomial
/// `P_O = X^2 - t X + m` with `t = 0, m = -D/4` when `4 | D`, and
/// `t = c, m = (c^2 - D)/4 = c^2 (1 - D_K)/4` when `D` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImagQuadOrder {
    /// Discriminant of the order.
    pub d: i64,
    /// Fundamental discriminant of the field.
    pub d_k: i64,
    /// Conductor, `d = c^2 * d_k`.
    pub c: i64,
    /// Trace of `alpha` (linear coefficient of `P_O` negated).
    pub t: i64,
    /// Norm of `alpha` (constant coefficient of `P_O`).
    pub m: i64,
}

impl ImagQuadOrder {
    /// Evaluate the minimal polynomial `P_O` at `x`.
    pub fn poly(&self, x: i64) -> i64 {
        x * x - self.t * x + self.m
    }
}

/// Split `D < 0` into `(D_K, c)` with `D_K` fundamental and `D = c^2 D_K`.
pub fn fundamental_part(d: i64) -> Result<(i64, i64), OrderError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(OrderError::InvalidDiscriminant(d));
    }
    let mut c = 1i64;
    for &(p, e) in &factorize(-d).factors {
        c *= p.pow(e / 2);
    }
    // shrink c until d / c^2 is a discriminant
    'outer: while d % (c * c) != 0 || !matches!((d / (c * c)).rem_euclid(4), 0 | 1) {
        for &(p, _) in &factorize(c).factors {
            let c2 = c / p;
            if d % (c2 * c2) == 0 && matches!((d / (c2 * c2)).rem_euclid(4), 0 | 1) {
                c = c2;
                continue 'outer;
            }
        }
        c = 1;
    }
    let mut dk = d / (c * c);
    // ensure dk is fundamental
    let mut changed = true;
    while changed {
        changed = false;
        for &(p, _) in &factorize(-dk).factors {
            if dk % (p * p) == 0 && matches!((dk / (p * p)).rem_euclid(4), 0 | 1) {
                dk /= p * p;
                c *= p;
                changed = true;
                break;
            }
        }
    }
    Ok((dk, c))
}

/// Build the order of discriminant `D` (negative, `= 0, 1 mod 4`).
pub fn order_from_disc(d: i64) -> Result<ImagQuadOrder, OrderError> {
    let (d_k, c) = fundamental_part(d)?;
    let (t, m) = if d.rem_euclid(4) == 0 {
        (0, -d / 4)
    } else {
        (c, (c * c - d) / 4)
    };
    Ok(ImagQuadOrder { d, d_k, c, t, m })
}

/// An admissible ideal `(n, lambda - alpha_O)` stored per prime component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderIdeal {
    /// The ambient order.
    pub order: ImagQuadOrder,
    /// Norm of the ideal.
    pub norm: i64,
    /// `lambda mod norm`, the CRT recombination of the components.
    pub lambda: i64,
    /// Per-prime components `(p, k, lambda mod p^k)`.
    pub components: Vec<(i64, u32, i64)>,
}

/// All admissible residues `lambda mod p^k` for the order `o`.
pub fn admissible_primepower(o: &ImagQuadOrder, p: i64, k: u32) -> Vec<i64> {
    let pk = p.pow(k);
    let mut out = Vec::new();
    for lam in 0..pk {
        let val = o.poly(lam);
        if val % pk != 0 {
            continue;
        }
        // primitivity of the form (p^k, 2*lambda - t, P(lambda)/p^k)
        if gcd(gcd(pk, 2 * lam - o.t), val / pk) % p == 0 {
            continue;
        }
        out.push(lam);
    }
    out
}

/// Chinese-remainder recombination of one residue per modulus.
fn crt(pairs: &[(i64, i64)]) -> i64 {
    let mut lam = 0i64;
    let mut modulus = 1i64;
    for &(pk, r) in pairs {
        let (g, inv, _) = xgcd(modulus, pk);
        debug_assert_eq!(g, 1);
        lam += modulus * ((inv as i128 * (r - lam) as i128).rem_euclid(pk as i128) as i64);
        modulus *= pk;
    }
    lam.rem_euclid(modulus)
}

fn rebuild(o: &ImagQuadOrder, components: Vec<(i64, u32, i64)>) -> OrderIdeal {
    let pairs: Vec<(i64, i64)> = components
        .iter()
        .map(|&(p, k, l)| (p.pow(k), l))
        .collect();
    let norm: i64 = pairs.iter().map(|&(pk, _)| pk).product();
    let lambda = if norm == 1 { 0 } else { crt(&pairs) };
    OrderIdeal {
        order: *o,
        norm,
        lambda,
        components,
    }
}

/// Assemble an ideal from per-prime components `(p, k, lambda mod p^k)`.
pub fn ideal_from_components(
    o: &ImagQuadOrder,
    components: Vec<(i64, u32, i64)>,
) -> OrderIdeal {
    rebuild(o, components)
}

/// All admissible ideals of norm `n` in `o` (CRT of per-prime choices).
pub fn admissible_ideals(o: &ImagQuadOrder, n: i64) -> Vec<OrderIdeal> {
    assert!(n >= 1);
    let mut partial: Vec<Vec<(i64, u32, i64)>> = vec![vec![]];
    for &(p, k) in &factorize(n).factors {
        let lams = admissible_primepower(o, p, k);
        if lams.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(partial.len() * lams.len());
        for comps in &partial {
            for &l in &lams {
                let mut c = comps.clone();
                c.push((p, k, l));
                next.push(c);
            }
        }
        partial = next;
    }
    partial.into_iter().map(|c| rebuild(o, c)).collect()
}

/// Complex conjugate of an admissible ideal: componentwise
/// `lambda -> t - lambda mod p^k` (i.e. `-lambda` when `4 | D_K`,
/// `c - lambda` otherwise). An involution.
pub fn conjugate_ideal(i: &OrderIdeal) -> OrderIdeal {
    let o = i.order;
    let components = i
        .components
        .iter()
        .map(|&(p, k, l)| (p, k, (o.t - l).rem_euclid(p.pow(k))))
        .collect();
    rebuild(&o, components)
}

/// Split `I` into its `Q`-part and its complement for a Hall divisor `Q` of
/// the norm; the product of the parts recombines to `I`.
pub fn eta_hall_part(i: &OrderIdeal, q: i64) -> Result<(OrderIdeal, OrderIdeal), OrderError> {
    if !hall_divisors(i.norm).contains(&q) {
        return Err(OrderError::NotHall(q, i.norm));
    }
    let (mut part, mut rest) = (Vec::new(), Vec::new());
    for &(p, k, l) in &i.components {
        if q % p == 0 {
            part.push((p, k, l));
        } else {
            rest.push((p, k, l));
        }
    }
    Ok((rebuild(&i.order, part), rebuild(&i.order, rest)))
}

/// Number of admissible ideals of norm `p^k` predicted by the
/// split/ramified/inert census when `p` does not divide the conductor.
pub fn census_count(o: &ImagQuadOrder, p: i64, k: u32) -> Option<usize> {
    if o.c % p == 0 {
        return None;
    }
    Some(match kronecker(o.d, p) {
        1 => 2,
        0 if k == 1 => 1,
        _ => 0,
    })
}
