//! Cusp combinatorics of `X_0(N)`: representatives, widths, Galois orbits,
//! the Atkin-Lehner action, star-quotient cusp classes and ramification of
//! degeneracy maps.
//!
//! Exports [`Cusp`], [`StarCuspClass`], [`cusp_representatives`],
//! [`galois_orbits`], [`al_on_cusp`], [`star_cusp_orbits`],
//! [`rational_star_cusps`], [`width_one_transport`],
//! [`degeneracy_unramified`], [`unramified_hall_set`] and the 2x2 matrix
//! helpers ([`al_matrix`], [`act`], [`cusp_matrix`]) shared with the
//! integrality machinery.

use crate::arith::{
    divisors, euler_phi, factorize, gcd, hall_divisors, vp, xgcd,
};
use serde::Serialize;
use thiserror::Error;

/// Errors for cusp-level operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CuspError {
    /// A divisor argument that must be a Hall divisor is not.
    #[error("{0} is not a Hall divisor of {1}")]
    NotHall(i64, i64),
    /// `d` does not divide `N/M`.
    #[error("{0} does not divide {1}")]
    NotDivisor(i64, i64),
    /// The half-valuation condition fails for `(N, M)`.
    #[error("(HV) fails for N={0}, M={1}")]
    HalfValuation(i64, i64),
}

/// A cusp `a/b` of `X_0(N)` with `b | N` and `gcd(a, N) = 1`, in the
/// canonical representative system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Cusp {
    /// Level.
    pub n: i64,
    /// Numerator, coprime to `n`.
    pub a: i64,
    /// Denominator, a divisor of `n`.
    pub b: i64,
    /// Width `n / gcd(n, b^2)`.
    pub width: i64,
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b == self.n {
            write!(f, "oo")
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

/// A `W(N) x Galois` orbit of cusps, i.e. one cusp class of the star
/// quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarCuspClass {
    /// Level.
    pub n: i64,
    /// Member cusps of `X_0(N)`.
    pub members: Vec<Cusp>,
    /// Does the class define a rational point of `X_0(N)*`?
    pub rational: bool,
    /// Field of definition label of an individual member cusp.
    pub field_label: String,
}

/// Canonical invariant of a point `u/v` of `P^1(Q)` as a cusp of
/// `Gamma_0(N)`: the pair `(gcd(v, N), u * (v/d) mod gcd(d, N/d))`.
pub fn canon_cusp(n: i64, u: i64, v: i64) -> (i64, i64) {
    let d = gcd(v, n);
    let g = gcd(d, n / d);
    let r = if g > 1 { (u * (v / d)).rem_euclid(g) } else { 0 };
    (d, r)
}

/// Width of the cusp with denominator `b` on `X_0(N)`.
pub fn cusp_width(n: i64, b: i64) -> i64 {
    n / gcd(n, b * b)
}

/// Numerator representatives for denominator `b`: the residues of
/// `(Z/gcd(b, N/b))^x` lifted greedily to the smallest positive integers
/// coprime to `N`.
pub fn numerators(n: i64, b: i64) -> Vec<i64> {
    let g = gcd(b, n / b);
    if g == 1 {
        return vec![1];
    }
    let mut out = Vec::new();
    for r in 1..g {
        if gcd(r, g) != 1 {
            continue;
        }
        let mut a = r;
        while gcd(a, n) != 1 {
            a += g;
        }
        out.push(a);
    }
    out
}

/// The full representative system of cusps of `X_0(N)`.
pub fn cusp_representatives(n: i64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for b in divisors(n) {
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

/// Galois orbits of cusps: one orbit per denominator `b | N`, of size
/// `phi(gcd(b, N/b))`.
pub fn galois_orbits(n: i64) -> Vec<Vec<Cusp>> {
    divisors(n)
        .into_iter()
        .map(|b| {
            numerators(n, b)
                .into_iter()
                .map(|a| Cusp {
                    n,
                    a,
                    b,
                    width: cusp_width(n, b),
                })
                .collect()
        })
        .collect()
}

/// 2x2 integer matrix as rows.
pub type Mat2 = [[i64; 2]; 2];

/// Multiply two 2x2 matrices.
pub fn matmul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// An integral Atkin-Lehner matrix for `w_D` on `X_0(N)`:
/// `[[D x, -y], [N, D]]` of determinant `D`, with `D x + (N/D) y = 1`.
pub fn al_matrix(n: i64, d: i64) -> Mat2 {
    let (g, x, y) = xgcd(d, n / d);
    assert_eq!(g, 1, "w_{d} needs a Hall divisor of {n}");
    [[d * x, -y], [n, d]]
}

/// Apply a matrix to `a/b` in lowest terms with nonnegative denominator.
pub fn act(w: Mat2, a: i64, b: i64) -> (i64, i64) {
    let mut u = w[0][0] * a + w[0][1] * b;
    let mut v = w[1][0] * a + w[1][1] * b;
    let g = gcd(u, v);
    if g != 0 {
        u /= g;
        v /= g;
    }
    if v < 0 {
        u = -u;
        v = -v;
    }
    (u, v)
}

/// `gamma = [[f, -e], [-b, a]]` with `f a - e b = 1`, sending `a/b` to
/// infinity.
pub fn cusp_matrix(a: i64, b: i64) -> Mat2 {
    let (g, f, me) = xgcd(a, b);
    assert_eq!(g, 1);
    let e = -me;
    [[f, -e], [-b, a]]
}

/// Find `gamma` in `Gamma_0(N)` with `gamma(u1/v1) = a'/b` exactly.
pub fn gamma0_move_to_denom(n: i64, u1: i64, v1: i64, b: i64) -> Option<Mat2> {
    for target in [b, -b] {
        let aa = n * u1;
        let bb = v1;
        let g0 = gcd(aa, bb);
        if g0 == 0 || target % g0 != 0 {
            continue;
        }
        let (mut g, mut x0, mut y0) = xgcd(aa, bb);
        if g < 0 {
            g = -g;
            x0 = -x0;
            y0 = -y0;
        }
        x0 *= target / g;
        y0 *= target / g;
        for k in -60..=60i64 {
            let ghat = x0 + k * (bb / g);
            let delt = y0 - k * (aa / g);
            if gcd(n * ghat, delt) != 1 {
                continue;
            }
            let (gg, al, be) = xgcd(delt, -n * ghat);
            let gamma = if gg == 1 {
                [[al, be], [n * ghat, delt]]
            } else if gg == -1 {
                let m = [[-al, -be], [n * ghat, delt]];
                if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
                    continue;
                }
                m
            } else {
                continue;
            };
            let (_, v2) = act(gamma, u1, v1);
            if v2 == b {
                return Some(gamma);
            }
        }
    }
    None
}

/// Image of a cusp under `w_Q`, renormalized into the representative
/// system.
pub fn al_on_cusp(n: i64, q: i64, c: &Cusp) -> Result<Cusp, CuspError> {
    if !hall_divisors(n).contains(&q) {
        return Err(CuspError::NotHall(q, n));
    }
    if q == 1 {
        return Ok(*c);
    }
    let w = al_matrix(n, q);
    let (u, v) = act(w, c.a, c.b);
    let key = canon_cusp(n, u, v);
    cusp_representatives(n)
        .into_iter()
        .find(|r| canon_cusp(n, r.a, r.b) == key)
        .ok_or(CuspError::NotHall(q, n))
}

fn star_denominator_classes(n: i64) -> Vec<Vec<i64>> {
    // merge denominators b, b' iff for each prime p | N,
    // v_p(b') is v_p(b) or v_p(N) - v_p(b)
    let fac = factorize(n);
    let bs = divisors(n);
    let key = |b: i64| -> Vec<u32> {
        fac.factors
            .iter()
            .map(|&(p, e)| {
                let v = if b % p == 0 { vp(b, p) } else { 0 };
                v.min(e - v)
            })
            .collect()
    };
    let mut classes: Vec<(Vec<u32>, Vec<i64>)> = Vec::new();
    for b in bs {
        let k = key(b);
        if let Some(entry) = classes.iter_mut().find(|(ck, _)| *ck == k) {
            entry.1.push(b);
        } else {
            classes.push((k, vec![b]));
        }
    }
    classes.into_iter().map(|(_, bs)| bs).collect()
}

fn field_label(g: i64) -> String {
    match g {
        1 | 2 => "Q".to_string(),
        3 => "Q(zeta3)".to_string(),
        4 => "Q(i)".to_string(),
        6 => "Q(zeta6)".to_string(),
        _ => format!("Q(zeta{g})"),
    }
}

/// Denominators `b` whose star class is a rational point of `X_0(N)*`,
/// per the six-case classification: `oo` always; `1/2` iff `4 | N`;
/// `1/3` iff `9 || N`; `1/4` iff `16 || N`; `1/6` iff `4 | N` and
/// `9 || N`; `1/12` iff `144 || N`.
pub fn rational_star_denominators(n: i64) -> Vec<i64> {
    let v2 = if n % 2 == 0 { vp(n, 2) } else { 0 };
    let v3 = if n % 3 == 0 { vp(n, 3) } else { 0 };
    let mut out = vec![n];
    if v2 >= 2 {
        out.push(2);
    }
    if v3 == 2 {
        out.push(3);
    }
    if v2 == 4 {
        out.push(4);
    }
    if v2 >= 2 && v3 == 2 {
        out.push(6);
    }
    if v2 == 4 && v3 == 2 {
        out.push(12);
    }
    out
}

/// All `W(N) x Galois` cusp classes; their number is
/// `prod_p ceil((v_p(N)+1)/2)`.
pub fn star_cusp_orbits(n: i64) -> Vec<StarCuspClass> {
    let rational = rational_star_denominators(n);
    star_denominator_classes(n)
        .into_iter()
        .map(|bs| {
            let is_rational = bs.iter().any(|b| rational.contains(b));
            let g = gcd(bs[0], n / bs[0]);
            let members: Vec<Cusp> = bs
                .iter()
                .flat_map(|&b| {
                    numerators(n, b).into_iter().map(move |a| Cusp {
                        n,
                        a,
                        b,
                        width: cusp_width(n, b),
                    })
                })
                .collect();
            StarCuspClass {
                n,
                members,
                rational: is_rational,
                field_label: field_label(g),
            }
        })
        .collect()
}

/// The rational cusp classes of `X_0(N)*` (six-case table).
pub fn rational_star_cusps(n: i64) -> Vec<StarCuspClass> {
    star_cusp_orbits(n)
        .into_iter()
        .filter(|c| c.rational)
        .collect()
}

/// The Atkin-Lehner element (as a Hall divisor `Q`) with `w_Q(c)` of
/// width 1: the product of `p^{v_p(N)}` over primes with
/// `v_p(b) < v_p(N)/2`.
pub fn width_one_transport(n: i64, c: &Cusp) -> i64 {
    let mut q = 1i64;
    for &(p, e) in &factorize(n).factors {
        let vb = if c.b % p == 0 { vp(c.b, p) } else { 0 };
        if 2 * vb < e {
            q *= p.pow(e);
        }
    }
    q
}

/// Is the degeneracy map `i^(d): X_0(N) -> X_0(N/d)` unramified at the
/// width-1 cusp `c`? True iff `d = 1`, or `d || N/M` and
/// `v_p(b) = v_p(N)/2` for every prime `p | d`.
pub fn degeneracy_unramified(
    n: i64,
    m: i64,
    d: i64,
    c: &Cusp,
) -> Result<bool, CuspError> {
    if (n / m) % d != 0 {
        return Err(CuspError::NotDivisor(d, n / m));
    }
    if d == 1 {
        return Ok(true);
    }
    if gcd(d, (n / m) / d) != 1 {
        return Ok(false);
    }
    let fac = factorize(n);
    for &(p, _) in &factorize(d).factors {
        let e = fac.valuation(p);
        let vb = if c.b % p == 0 { vp(c.b, p) } else { 0 };
        if e % 2 != 0 || vb != e / 2 || vp(n / m, p) != vp(d, p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does `(N, M)` satisfy the half-valuation condition
/// `v_p(M) <= ceil(v_p(N)/2)` for all `p | N`?
pub fn hv_holds(n: i64, m: i64) -> bool {
    if n % m != 0 {
        return false;
    }
    factorize(n)
        .factors
        .iter()
        .all(|&(p, e)| {
            let vm = if m % p == 0 { vp(m, p) } else { 0 };
            vm <= e.div_ceil(2)
        })
}

/// The set `R_c` of Hall divisors `d` of `N/M` at which the degeneracy
/// maps are unramified at the width-1 cusp `c`. Always contains 1.
pub fn unramified_hall_set(n: i64, m: i64, c: &Cusp) -> Result<Vec<i64>, CuspError> {
    if !hv_holds(n, m) {
        return Err(CuspError::HalfValuation(n, m));
    }
    let mut out = Vec::new();
    for d in hall_divisors(n / m) {
        if degeneracy_unramified(n, m, d, c)? {
            out.push(d);
        }
    }
    Ok(out)
}

/// Denominators of the width-1 cusps of `X_0(N)`.
pub fn width_one_denominators(n: i64) -> Vec<i64> {
    let fac = factorize(n);
    divisors(n)
        .into_iter()
        .filter(|&b| {
            fac.factors.iter().all(|&(p, e)| {
                let vb = if b % p == 0 { vp(b, p) } else { 0 };
                2 * vb >= e
            })
        })
        .collect()
}

/// Total number of cusps by the classical formula.
pub fn cusp_count(n: i64) -> i64 {
    divisors(n)
        .into_iter()
        .map(|b| euler_phi(gcd(b, n / b)))
        .sum()
}
