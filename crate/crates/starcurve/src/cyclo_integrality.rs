//! Exact arithmetic in `Z[zeta_L]` and the integrality factors `m_{N,M}`
//! and `m'_{N,M}` attached to root-of-unity cotangent sums at width-1
//! cusps.
//!
//! For a width-1 cusp `c = a/b` of `X_0(N)` the sum
//! `S_c = sum_{d in R_c} eps(w_{d_M}) zeta_{r_d}^{k_d(c)}` collects one
//! root of unity per unramified Hall divisor `d` of `N/M`; the order
//! `r_d` and exponent `k_d(c)` are read off the upper-triangular
//! conjugate `gamma' W_d gamma^{-1} = +-[[r, k], [0, r]]`. The factor
//! `m_{N,M}` is the lcm over width-1 cusps of the smallest positive
//! integer `m` with `m / S_c` integral, and
//! `m' = m * lcm(radical(m), 2)`.

use crate::arith::{divisors, factorize, gcd, lcm, vp};
use crate::cusps::{
    act, al_matrix, cusp_matrix, cusp_width, matmul, numerators,
    unramified_hall_set, width_one_denominators, Cusp, CuspError,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors in integrality computations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntegralityError {
    /// The half-valuation condition fails.
    #[error("(HV) fails for N={0}, M={1}")]
    HalfValuation(i64, i64),
    /// No sign supplied for a prime dividing M.
    #[error("no sign supplied for prime {0}")]
    MissingSign(i64),
    /// A cusp sum vanished, so no finite multiple exists.
    #[error("cusp sum vanishes at {0}/{1}")]
    ZeroSum(i64, i64),
    /// Cusp-level failure.
    #[error(transparent)]
    Cusp(#[from] CuspError),
}

/// An element of `Z[zeta_L]` in the power basis modulo `Phi_L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicElement {
    /// Order of the root of unity.
    pub order: i64,
    /// Coefficients of `1, zeta, ..., zeta^(phi(L)-1)`.
    pub coefficients: Vec<i64>,
}

impl CyclotomicElement {
    /// Build from a list of `(exponent, coefficient)` terms in `zeta_L`.
    pub fn from_terms(l: i64, terms: &[(i64, i64)]) -> Self {
        let phi = cyclotomic_poly(l);
        let mut vec = vec![0i64; l as usize];
        for &(e, c) in terms {
            vec[e.rem_euclid(l) as usize] += c;
        }
        let coefficients = reduce_mod_phi(&vec, &phi);
        CyclotomicElement {
            order: l,
            coefficients,
        }
    }

    /// The rational integer `k` as an element of `Z[zeta_L]`.
    pub fn integer(l: i64, k: i64) -> Self {
        Self::from_terms(l, &[(0, k)])
    }

    /// Is this the zero element?
    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }
}

impl std::fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            }
            let a = c.abs();
            if i == 0 {
                write!(f, "{a}")?;
            } else {
                if a != 1 {
                    write!(f, "{a}*")?;
                }
                write!(f, "z{}^{}", self.order, i)?;
            }
        }
        Ok(())
    }
}

/// Atkin-Lehner eigenvalue signs `eps(w_q)` for the primes of a level `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignVector {
    /// The level the signs live on.
    pub m_level: i64,
    /// Map prime `q | M` to `+1` or `-1`.
    pub signs: BTreeMap<i64, i32>,
}

impl SignVector {
    /// Build from prime/sign pairs.
    pub fn new(m_level: i64, pairs: &[(i64, i32)]) -> Self {
        SignVector {
            m_level,
            signs: pairs.iter().copied().collect(),
        }
    }

    /// Sign at `q`, if present.
    pub fn get(&self, q: i64) -> Option<i32> {
        self.signs.get(&q).copied()
    }
}

/// One width-1 cusp with its root sum and minimal integer multiple.
#[derive(Debug, Clone, Serialize)]
pub struct CuspSum {
    /// The width-1 cusp.
    pub cusp: Cusp,
    /// The sum `S_c`.
    pub sum: CyclotomicElement,
    /// Smallest `m >= 1` with `m / S_c` integral.
    pub multiple: i64,
}

/// Full outcome of an integrality-factor computation.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralityReport {
    /// Upper level.
    pub n: i64,
    /// Lower level.
    pub m_level: i64,
    /// Per-cusp sums and multiples.
    pub per_cusp: Vec<CuspSum>,
    /// `m_{N,M}`: lcm of the per-cusp multiples.
    pub m: i64,
    /// `m' = m * lcm(radical(m), 2)`.
    pub m_prime: i64,
}

/// The `n`-th cyclotomic polynomial, coefficients lowest degree first,
/// computed by recursive exact division of `x^n - 1`.
pub fn cyclotomic_poly(n: i64) -> Vec<i64> {
    fn polymul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    fn polydiv_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
        let mut num = num.to_vec();
        let mut out = vec![0i64; num.len() - den.len() + 1];
        for i in (0..out.len()).rev() {
            let c = num[i + den.len() - 1] / den[den.len() - 1];
            out[i] = c;
            for (j, &dc) in den.iter().enumerate() {
                num[i + j] -= c * dc;
            }
        }
        assert!(num.iter().all(|&c| c == 0), "non-exact division");
        out
    }
    let mut phi: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    phi.insert(1, vec![-1, 1]);
    for m in divisors(n) {
        if m == 1 {
            continue;
        }
        let mut num = vec![0i64; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        let mut den = vec![1i64];
        for d in divisors(m) {
            if d < m {
                den = polymul(&den, &phi[&d]);
            }
        }
        phi.insert(m, polydiv_exact(&num, &den));
    }
    phi[&n].clone()
}

fn reduce_mod_phi(coeffs: &[i64], phi: &[i64]) -> Vec<i64> {
    let mut c = coeffs.to_vec();
    let dn = phi.len() - 1;
    for i in (dn..c.len()).rev() {
        let t = c[i];
        if t != 0 {
            c[i] = 0;
            for (j, &pc) in phi.iter().enumerate().take(dn) {
                c[i - dn + j] -= t * pc;
            }
        }
    }
    c.truncate(dn);
    c.resize(dn, 0);
    c
}

/// `(r, k)` such that the term for the Hall divisor `d` at the width-1
/// cusp `a/b` of `X_0(N)` is `zeta_r^k`: conjugating `W_D` (with `D` the
/// full Hall part of `N` over the primes of `d`) by cusp matrices gives
/// `+-[[r, k], [0, r]]`.
pub fn zeta_exponent(n: i64, a: i64, b: i64, d: i64) -> (i64, i64) {
    let fac = factorize(n);
    let mut big_d = 1i64;
    let mut r = 1i64;
    for &(p, _) in &factorize(d).factors {
        let e = fac.valuation(p);
        big_d *= p.pow(e);
        r *= p.pow(e / 2);
    }
    let mut w = al_matrix(n, big_d);
    let (mut u1, mut v1) = act(w, a, b);
    if v1 != b {
        let gam = crate::cusps::gamma0_move_to_denom(n, u1, v1, b)
            .unwrap_or_else(|| panic!("no transport for N={n} {a}/{b} d={d}"));
        w = matmul(gam, w);
        let moved = act(w, a, b);
        u1 = moved.0;
        v1 = moved.1;
        assert_eq!(v1, b);
    }
    let gm = cusp_matrix(a, b);
    let gmp = cusp_matrix(u1, b);
    let gminv = [[gm[1][1], -gm[0][1]], [-gm[1][0], gm[0][0]]];
    let mut u = matmul(matmul(gmp, w), gminv);
    assert_eq!(u[1][0], 0);
    if u[0][0] < 0 {
        u = [[-u[0][0], -u[0][1]], [-u[1][0], -u[1][1]]];
    }
    assert_eq!(u[0][0], r);
    assert_eq!(u[1][1], r);
    let k = u[0][1].rem_euclid(r);
    assert_eq!(gcd(k, r), 1);
    (r, k)
}

/// The terms `(r_d, k_d, eps_d)` of the cusp sum at `c`, one per
/// unramified Hall divisor `d` of `N/M`.
fn cusp_terms(
    n: i64,
    m: i64,
    c: &Cusp,
    signs: &SignVector,
) -> Result<Vec<(i64, i64, i64)>, IntegralityError> {
    let rset = unramified_hall_set(n, m, c).map_err(|e| match e {
        CuspError::HalfValuation(a, b) => IntegralityError::HalfValuation(a, b),
        other => IntegralityError::Cusp(other),
    })?;
    let mut terms = Vec::new();
    for d in rset {
        if d == 1 {
            terms.push((1, 0, 1));
            continue;
        }
        let (r, k) = zeta_exponent(n, c.a, c.b, d);
        let mut eps = 1i64;
        for &(p, _) in &factorize(d).factors {
            if m % p == 0 && vp(m, p) > 0 {
                eps *= signs
                    .get(p)
                    .ok_or(IntegralityError::MissingSign(p))?
                    as i64;
            }
        }
        terms.push((r, k, eps));
    }
    Ok(terms)
}

fn assemble(terms: &[(i64, i64, i64)]) -> CyclotomicElement {
    let l = terms.iter().fold(1i64, |acc, &(r, _, _)| lcm(acc, r));
    let parts: Vec<(i64, i64)> = terms
        .iter()
        .map(|&(r, k, eps)| ((l / r) * k % l, eps))
        .collect();
    CyclotomicElement::from_terms(l, &parts)
}

/// The root-of-unity sum `S_c = sum_{d in R_c} eps(w_{d_M})
/// zeta_{gcd(b,d)}` at a width-1 cusp, under the coherent convention
/// that every `zeta_n` is the power `zeta_L^(L/n)` of a single
/// primitive root.
///
/// This is the sum with each root taken at exponent 1; the factor
/// computation in [`integrality_factor`] refines each term to the
/// cusp-dependent exponent `k_d(c)` read off the Atkin-Lehner matrix.
pub fn root_sum(
    n: i64,
    m: i64,
    c: &Cusp,
    signs: &SignVector,
) -> Result<CyclotomicElement, IntegralityError> {
    let plain: Vec<(i64, i64, i64)> = cusp_terms(n, m, c, signs)?
        .into_iter()
        .map(|(r, _, eps)| (r, if r == 1 { 0 } else { 1 }, eps))
        .collect();
    Ok(assemble(&plain))
}

/// The refined sum actually used for the integrality factor, with the
/// matrix-extracted exponent `k_d(c)` on each term.
pub fn refined_root_sum(
    n: i64,
    m: i64,
    c: &Cusp,
    signs: &SignVector,
) -> Result<CyclotomicElement, IntegralityError> {
    Ok(assemble(&cusp_terms(n, m, c, signs)?))
}

fn solve_inverse(s: &CyclotomicElement) -> Option<Vec<BigRational>> {
    let phi = cyclotomic_poly(s.order);
    let n = phi.len() - 1;
    if s.is_zero() {
        return None;
    }
    // columns: S * x^j mod Phi
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut cur = s.coefficients.clone();
    for j in 0..n {
        if j > 0 {
            let mut shifted = vec![0i64];
            shifted.extend_from_slice(&cur);
            cur = reduce_mod_phi(&shifted, &phi);
        }
        cols.push(cur.clone());
    }
    let big = |x: i64| BigRational::from(BigInt::from(x));
    let mut mat: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| big(cols[j][i])).collect())
        .collect();
    let mut rhs: Vec<BigRational> = (0..n)
        .map(|i| big(if i == 0 { 1 } else { 0 }))
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let pv = mat[col][col].clone();
        for r in 0..n {
            if r != col && !mat[r][col].is_zero() {
                let f = &mat[r][col] / &pv;
                for cc in col..n {
                    let t = &f * &mat[col][cc];
                    mat[r][cc] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some(
        (0..n)
            .map(|i| &rhs[i] / &mat[i][i])
            .collect(),
    )
}

/// Smallest `m >= 1` such that `m / S` is an algebraic integer, i.e.
/// the lcm of the denominators of the power-basis coordinates of
/// `S^(-1)`. Returns `None` for `S = 0`.
pub fn smallest_integer_multiple(s: &CyclotomicElement) -> Option<i64> {
    let inv = solve_inverse(s)?;
    let mut m = BigInt::one();
    for w in inv {
        let d = w.denom().abs();
        let g = num_integer::Integer::gcd(&m, &d);
        m = m / g * d;
    }
    Some(i64::try_from(&m).expect("multiple fits in i64"))
}

/// `|Norm(S)|` computed as the resultant of `Phi_L` and the polynomial
/// of `S`.
pub fn norm_abs(s: &CyclotomicElement) -> BigInt {
    fn resultant(f: &[BigRational], g: &[BigRational]) -> BigRational {
        let df = f.len() - 1;
        if g.len() == 1 {
            return num_traits::pow::pow(g[0].clone(), df);
        }
        // r = f mod g
        let dg = g.len() - 1;
        let mut r = f.to_vec();
        for i in (dg..=df).rev() {
            let c = &r[i] / &g[dg];
            if c.is_zero() {
                continue;
            }
            for (j, gc) in g.iter().enumerate() {
                let t = &c * gc;
                r[i - dg + j] -= t;
            }
        }
        while r.len() > 1 && r.last().unwrap().is_zero() {
            r.pop();
        }
        if r.len() == 1 && r[0].is_zero() {
            return BigRational::zero();
        }
        let dr = r.len() - 1;
        let sign = if (df * dg) % 2 == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        sign * num_traits::pow::pow(g[dg].clone(), df - dr) * resultant(g, &r)
    }
    let big = |x: i64| BigRational::from(BigInt::from(x));
    let phi: Vec<BigRational> =
        cyclotomic_poly(s.order).into_iter().map(big).collect();
    let mut sp: Vec<BigRational> =
        s.coefficients.iter().map(|&c| big(c)).collect();
    while sp.len() > 1 && sp.last().unwrap().is_zero() {
        sp.pop();
    }
    let res = resultant(&phi, &sp);
    assert!(res.is_integer());
    res.to_integer().abs()
}

/// The radical-doubling step: `m' = m * lcm(radical(m), 2)`.
pub fn m_prime_from_m(m: i64) -> i64 {
    m * lcm(factorize(m).radical(), 2)
}

/// All width-1 cusps of `X_0(N)`.
pub fn width_one_cusps(n: i64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for b in width_one_denominators(n) {
        for a in numerators(n, b) {
            out.push(Cusp {
                n,
                a,
                b,
                width: cusp_width(n, b),
            });
        }
    }
    out
}

/// Compute `m_{N,M}` and `m'_{N,M}` for the pair `(N, M)` under the
/// given sign vector.
pub fn integrality_factor(
    n: i64,
    m: i64,
    signs: &SignVector,
) -> Result<IntegralityReport, IntegralityError> {
    let mut per_cusp = Vec::new();
    let mut mm = 1i64;
    for cusp in width_one_cusps(n) {
        let sum = refined_root_sum(n, m, &cusp, signs)?;
        let multiple = smallest_integer_multiple(&sum)
            .ok_or(IntegralityError::ZeroSum(cusp.a, cusp.b))?;
        mm = lcm(mm, multiple);
        per_cusp.push(CuspSum {
            cusp,
            sum,
            multiple,
        });
    }
    Ok(IntegralityReport {
        n,
        m_level: m,
        per_cusp,
        m: mm,
        m_prime: m_prime_from_m(mm),
    })
}

/// Exhaustive-roots mode: recompute `m` over every independent choice
/// of primitive root per term (each exponent `k` replaced by `u k` with
/// `u` a unit mod `r`, independently per term) and return the lcm of
/// the resulting factors.
pub fn integrality_factor_exhaustive(
    n: i64,
    m: i64,
    signs: &SignVector,
) -> Result<i64, IntegralityError> {
    let mut mm = 1i64;
    for cusp in width_one_cusps(n) {
        let terms = cusp_terms(n, m, &cusp, signs)?;
        let unit_lists: Vec<Vec<i64>> = terms
            .iter()
            .map(|&(r, _, _)| (1..=r).filter(|&u| gcd(u, r) == 1).collect())
            .collect();
        let mut stack = vec![0usize; terms.len()];
        'combos: loop {
            let varied: Vec<(i64, i64, i64)> = terms
                .iter()
                .enumerate()
                .map(|(i, &(r, k, eps))| (r, unit_lists[i][stack[i]] * k % r, eps))
                .collect();
            let sum = assemble(&varied);
            let mult = smallest_integer_multiple(&sum)
                .ok_or(IntegralityError::ZeroSum(cusp.a, cusp.b))?;
            mm = lcm(mm, mult);
            for i in 0..stack.len() {
                stack[i] += 1;
                if stack[i] < unit_lists[i].len() {
                    continue 'combos;
                }
                stack[i] = 0;
            }
            break;
        }
    }
    Ok(mm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta_term(l: i64, r: i64, k: i64, c: i64) -> (i64, i64) {
        ((l / r) * k % l, c)
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(7), vec![1; 7]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        for n in 1..=60i64 {
            assert_eq!(
                cyclotomic_poly(n).len() as i64 - 1,
                crate::arith::euler_phi(n)
            );
        }
        // product over d | n reconstructs x^n - 1
        for n in 1..=30i64 {
            let mut prod = vec![1i64];
            for d in divisors(n) {
                let ph = cyclotomic_poly(d);
                let mut out = vec![0i64; prod.len() + ph.len() - 1];
                for (i, &x) in prod.iter().enumerate() {
                    for (j, &y) in ph.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                prod = out;
            }
            let mut expect = vec![0i64; n as usize + 1];
            expect[0] = -1;
            expect[n as usize] = 1;
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn smallest_multiple_examples() {
        let s = CyclotomicElement::from_terms(7, &[(0, 1), (1, -1)]);
        assert_eq!(smallest_integer_multiple(&s), Some(7));
        assert_eq!(norm_abs(&s), BigInt::from(7));
        let s = CyclotomicElement::from_terms(3, &[(0, 1), (1, 1)]);
        assert_eq!(smallest_integer_multiple(&s), Some(1));
        let s = CyclotomicElement::integer(5, 2);
        assert_eq!(smallest_integer_multiple(&s), Some(2));
        let zero = CyclotomicElement::integer(5, 0);
        assert_eq!(smallest_integer_multiple(&zero), None);
        for p in [3i64, 5, 7, 11, 13] {
            let s = CyclotomicElement::from_terms(p, &[(0, 1), (1, -1)]);
            assert_eq!(smallest_integer_multiple(&s), Some(p));
            assert_eq!(norm_abs(&s), BigInt::from(p));
        }
    }

    #[test]
    fn multiple_divides_norm() {
        // deterministic pseudo-random small elements
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for l in [12i64, 15, 21] {
            let deg = cyclotomic_poly(l).len() - 1;
            for _ in 0..40 {
                let coeffs: Vec<(i64, i64)> = (0..deg as i64)
                    .map(|e| (e, (next() % 5) as i64 - 2))
                    .collect();
                let s = CyclotomicElement::from_terms(l, &coeffs);
                if s.is_zero() {
                    continue;
                }
                let m = smallest_integer_multiple(&s).unwrap();
                let nm = norm_abs(&s);
                assert!(
                    (&nm % BigInt::from(m)).is_zero(),
                    "m={m} norm={nm} L={l}"
                );
            }
        }
    }

    #[test]
    fn root_sum_examples() {
        let any = SignVector::new(21, &[(3, 1), (7, -1)]);
        let inf = Cusp {
            n: 441,
            a: 1,
            b: 441,
            width: 1,
        };
        assert_eq!(
            root_sum(441, 21, &inf, &any).unwrap(),
            CyclotomicElement::integer(1, 1)
        );
        // (250, 50): R_c = {1} at every width-1 cusp since v_5 is odd
        let s50 = SignVector::new(50, &[(2, 1), (5, -1)]);
        for c in width_one_cusps(250) {
            assert_eq!(
                root_sum(250, 50, &c, &s50).unwrap(),
                CyclotomicElement::integer(1, 1)
            );
        }
        // (441, 21) at any cusp over b = 21: 1 + zeta_3 - zeta_7 - zeta_21
        let expect = CyclotomicElement::from_terms(
            21,
            &[
                (0, 1),
                zeta_term(21, 3, 1, 1),
                zeta_term(21, 7, 1, -1),
                zeta_term(21, 21, 1, -1),
            ],
        );
        for a in numerators(441, 21) {
            let c = Cusp {
                n: 441,
                a,
                b: 21,
                width: 1,
            };
            assert_eq!(root_sum(441, 21, &c, &any).unwrap(), expect);
            // the refined sum has the same minimal multiple here
            let refined = refined_root_sum(441, 21, &c, &any).unwrap();
            assert_eq!(smallest_integer_multiple(&refined), Some(7));
        }
    }

    #[test]
    fn integrality_table_rows() {
        let r = integrality_factor(250, 50, &SignVector::new(50, &[(2, 1), (5, -1)]))
            .unwrap();
        assert_eq!((r.m, r.m_prime), (1, 2));
        let r = integrality_factor(441, 21, &SignVector::new(21, &[(3, 1), (7, -1)]))
            .unwrap();
        assert_eq!((r.m, r.m_prime), (7, 98));
        let r = integrality_factor(405, 45, &SignVector::new(45, &[(3, -1), (5, 1)]))
            .unwrap();
        assert_eq!((r.m, r.m_prime), (3, 18));
        let r = integrality_factor(486, 54, &SignVector::new(54, &[(2, 1), (3, -1)]))
            .unwrap();
        assert_eq!((r.m, r.m_prime), (1, 2));
    }

    #[test]
    fn m_prime_formula() {
        assert_eq!(m_prime_from_m(1), 2);
        assert_eq!(m_prime_from_m(2), 4);
        assert_eq!(m_prime_from_m(3), 18);
        assert_eq!(m_prime_from_m(7), 98);
        assert_eq!(m_prime_from_m(155), 48050);
        // the radical-doubling formula gives 100 at m = 10; the reference
        // table prints 200 on that row (a flagged discrepancy)
        assert_eq!(m_prime_from_m(10), 100);
    }

    #[test]
    fn galois_invariance_441() {
        let signs = SignVector::new(21, &[(3, 1), (7, -1)]);
        let base = integrality_factor(441, 21, &signs).unwrap().m;
        for u in 1..21i64 {
            if gcd(u, 21) != 1 {
                continue;
            }
            let mut mm = 1i64;
            for cusp in width_one_cusps(441) {
                let terms: Vec<(i64, i64, i64)> =
                    cusp_terms(441, 21, &cusp, &signs)
                        .unwrap()
                        .into_iter()
                        .map(|(r, k, eps)| (r, u % r * k % r, eps))
                        .collect();
                let s = assemble(&terms);
                mm = lcm(mm, smallest_integer_multiple(&s).unwrap());
            }
            assert_eq!(mm, base, "u={u}");
        }
    }

    #[test]
    fn exhaustive_roots_mode() {
        let signs = SignVector::new(21, &[(3, 1), (7, -1)]);
        let base = integrality_factor(441, 21, &signs).unwrap().m;
        let exh = integrality_factor_exhaustive(441, 21, &signs).unwrap();
        assert_eq!(exh % base, 0);
    }

    #[test]
    fn hv_violation_rejected() {
        let signs = SignVector::new(8, &[(2, -1)]);
        assert!(matches!(
            integrality_factor(16, 8, &signs),
            Err(IntegralityError::HalfValuation(16, 8))
        ));
    }
}
