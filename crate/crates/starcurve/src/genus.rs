//! Genus of `X_0(N)` and of the star quotient `X_0(N)*`.
//!
//! The genus of `X_0(N)` comes from the classical index / elliptic-point
//! / cusp formula. Fixed points of each Atkin-Lehner involution `w_Q`
//! are counted by a CM census: primitive elements `psi` of norm `Q` in
//! imaginary quadratic orders containing `Z[sqrt(-Q)]`, kept when the
//! generated ideal is self-conjugate, combined with the stable cyclic
//! level structures away from `Q` (with unit-orbit counting for the
//! extra automorphisms at discriminants -3 and -4), plus the cusps
//! fixed by `w_Q`. Riemann-Hurwitz over the full `(Z/2)^omega(N)`
//! action then yields the star genus.

use crate::arith::{factorize, gcd, hall_divisors, kronecker, xgcd};
use crate::cusps::{act, al_matrix, canon_cusp, cusp_representatives, cusp_count};
use crate::quadforms::class_number;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors for genus computations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenusError {
    /// `Q` is not a Hall divisor of `N` greater than 1.
    #[error("{0} is not a Hall divisor > 1 of {1}")]
    BadHall(i64, i64),
}

/// Complete genus bookkeeping for one level.
#[derive(Debug, Clone, Serialize)]
pub struct GenusData {
    /// Level.
    pub n: i64,
    /// Index `mu = N prod (1 + 1/p)`.
    pub mu: i64,
    /// Number of elliptic points of order 2.
    pub nu2: i64,
    /// Number of elliptic points of order 3.
    pub nu3: i64,
    /// Number of cusps.
    pub nu_inf: i64,
    /// Genus of `X_0(N)`.
    pub genus: i64,
    /// `(Q, fix(w_Q))` for every Hall divisor `Q > 1`.
    pub fixed_points: Vec<(i64, i64)>,
    /// Genus of `X_0(N)*`.
    pub genus_star: i64,
}

/// Genus of `X_0(N)` by the classical formula.
pub fn genus_x0(n: i64) -> i64 {
    let fac = factorize(n);
    let mut mu = n;
    for &(p, _) in &fac.factors {
        mu = mu / p * (p + 1);
    }
    let nu2 = if n % 4 == 0 {
        0
    } else {
        fac.factors
            .iter()
            .fold(1, |acc, &(p, _)| acc * (1 + kronecker(-4, p)) as i64)
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        fac.factors
            .iter()
            .fold(1, |acc, &(p, _)| acc * (1 + kronecker(-3, p)) as i64)
    };
    let nu_inf = cusp_count(n);
    let g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nu_inf;
    assert_eq!(g12 % 12, 0, "genus formula must close at N={n}");
    g12 / 12
}

/// Primitive norm-`Q` elements `psi = x + y alpha` of the order of
/// discriminant `D` whose ideal is self-conjugate, deduplicated by
/// kernel (the cyclic subgroup they cut out).
fn self_conjugate_norm_elements(q: i64, d: i64, t: i64, m: i64) -> Vec<(i64, i64)> {
    let mut psis: Vec<(i64, i64)> = Vec::new();
    let ymax = ((4 * q) / (-d)) as f64;
    let ymax = ymax.sqrt() as i64 + 2;
    for y in 1..=ymax {
        let s2 = 4 * q + d * y * y;
        if s2 < 0 {
            continue;
        }
        let s = (s2 as f64).sqrt() as i64;
        let s = (s - 2..=s + 2).find(|&v| v >= 0 && v * v == s2);
        let Some(s) = s else { continue };
        let signs: &[i64] = if s == 0 { &[0] } else { &[1, -1] };
        for &sg in signs {
            let num = sg * s - t * y;
            if num % 2 != 0 {
                continue;
            }
            let x = num / 2;
            if gcd(x, y) != 1 {
                continue;
            }
            psis.push((x, y));
        }
    }
    // keep self-conjugate ideals: conj(psi)^2 / Q must be a norm-1 unit
    let mut kept = Vec::new();
    for &(x, y) in &psis {
        let (cx, cy) = (x + t * y, -y);
        let u = cx * cx - m * cy * cy;
        let v = 2 * cx * cy + t * cy * cy;
        if u % q != 0 || v % q != 0 {
            continue;
        }
        let (uu, vv) = (u / q, v / q);
        if uu * uu + t * uu * vv + m * vv * vv != 1 {
            continue;
        }
        kept.push((x, y));
    }
    // dedupe by kernel of the multiplication matrix mod Q
    let mut kernels: Vec<BTreeSet<(i64, i64)>> = Vec::new();
    let mut reps = Vec::new();
    for &(x, y) in &kept {
        let m00 = x.rem_euclid(q);
        let m01 = (-y * m).rem_euclid(q);
        let m10 = y.rem_euclid(q);
        let m11 = (x + y * t).rem_euclid(q);
        let mut ker = BTreeSet::new();
        for u in 0..q {
            for v in 0..q {
                if (m00 * u + m01 * v) % q == 0 && (m10 * u + m11 * v) % q == 0 {
                    ker.insert((u, v));
                }
            }
        }
        if !kernels.contains(&ker) {
            kernels.push(ker);
            reps.push((x, y));
        }
    }
    reps
}

fn inv_mod(a: i64, n: i64) -> i64 {
    let (g, x, _) = xgcd(a.rem_euclid(n), n);
    assert!(g == 1 || g == -1);
    (if g == 1 { x } else { -x }).rem_euclid(n)
}

/// Canonical generator of the cyclic subgroup generated by a primitive
/// vector in `(Z/p^r)^2`.
fn canon_p1_vec(v1: i64, v2: i64, pr: i64, p: i64) -> (i64, i64) {
    if v1 % p != 0 {
        let inv = inv_mod(v1, pr);
        (1, (v2 * inv).rem_euclid(pr))
    } else {
        let inv = inv_mod(v2, pr);
        ((v1 * inv).rem_euclid(pr), 1)
    }
}

/// Generators of the cyclic order-`p^r` subgroups of `(Z/p^r)^2` stable
/// under multiplication by `psi`.
fn stable_cyclic_subgroups(
    x: i64,
    y: i64,
    t: i64,
    m: i64,
    pr: i64,
    p: i64,
) -> Vec<(i64, i64)> {
    let m00 = x.rem_euclid(pr);
    let m01 = (-y * m).rem_euclid(pr);
    let m10 = y.rem_euclid(pr);
    let m11 = (x + y * t).rem_euclid(pr);
    let stable = |v1: i64, v2: i64| {
        let w1 = (m00 * v1 + m01 * v2).rem_euclid(pr);
        let w2 = (m10 * v1 + m11 * v2).rem_euclid(pr);
        (v1 * w2 - v2 * w1).rem_euclid(pr) == 0
    };
    let mut gens = Vec::new();
    for tp in 0..pr {
        if stable(1, tp) {
            gens.push((1, tp));
        }
    }
    let mut u = 0;
    while u < pr {
        if stable(u, 1) {
            gens.push((u, 1));
        }
        u += p;
    }
    let set: BTreeSet<(i64, i64)> = gens
        .into_iter()
        .map(|(v1, v2)| canon_p1_vec(v1, v2, pr, p))
        .collect();
    set.into_iter().collect()
}

/// Number of non-cuspidal fixed points of `w_Q` on `X_0(N)`, via the
/// CM census.
pub fn al_fixed_points_cm(n: i64, q: i64) -> Result<i64, GenusError> {
    if q <= 1 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(GenusError::BadHall(q, n));
    }
    let r = n / q;
    let fr = factorize(r);
    let mut total = 0i64;
    let mut d = -3i64;
    while d >= -4 * q {
        if !matches!(d.rem_euclid(4), 0 | 1) {
            d -= 1;
            continue;
        }
        let (t, m) = if d % 4 == 0 { (0, -d / 4) } else { (1, (1 - d) / 4) };
        let kernels = self_conjugate_norm_elements(q, d, t, m);
        if kernels.is_empty() {
            d -= 1;
            continue;
        }
        let units: &[(i64, i64)] = match d {
            -4 => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            -3 => &[(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)],
            _ => &[(1, 0), (-1, 0)],
        };
        let ops_units: &[(i64, i64)] = match d {
            -4 => &[(1, 0), (0, 1)],
            -3 => &[(1, 0), (0, 1), (-1, 1)],
            _ => &[(1, 0)],
        };
        let h = class_number(d) as i64;
        for &(x, y) in &kernels {
            // a level structure is valid when stable under some unit
            // multiple of psi
            let mut valid: BTreeSet<Vec<(i64, (i64, i64))>> = BTreeSet::new();
            for &(ux, uy) in ops_units {
                let px = ux * x - uy * y * m;
                let py = ux * y + uy * x + uy * y * t;
                let mut combos: Vec<Vec<(i64, (i64, i64))>> = vec![Vec::new()];
                let mut ok = true;
                for &(p, e) in &fr.factors {
                    let pr = p.pow(e);
                    let gens = stable_cyclic_subgroups(px, py, t, m, pr, p);
                    if gens.is_empty() {
                        ok = false;
                        break;
                    }
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            gens.iter().map(move |&g| {
                                let mut c2 = c.clone();
                                c2.push((pr, g));
                                c2
                            })
                        })
                        .collect();
                }
                if ok {
                    valid.extend(combos);
                }
            }
            if valid.is_empty() {
                continue;
            }
            if d == -3 || d == -4 {
                // count unit orbits on the valid combos (h = 1 here)
                let mut seen: BTreeSet<Vec<(i64, (i64, i64))>> = BTreeSet::new();
                let mut orbits = 0i64;
                for c in &valid {
                    if seen.contains(c) {
                        continue;
                    }
                    orbits += 1;
                    for &(ux, uy) in units {
                        let img: Vec<(i64, (i64, i64))> = c
                            .iter()
                            .map(|&(pr, (v1, v2))| {
                                let p = factorize(pr).factors[0].0;
                                let u00 = ux.rem_euclid(pr);
                                let u01 = (-uy * m).rem_euclid(pr);
                                let u10 = uy.rem_euclid(pr);
                                let u11 = (ux + uy * t).rem_euclid(pr);
                                let w1 = (u00 * v1 + u01 * v2).rem_euclid(pr);
                                let w2 = (u10 * v1 + u11 * v2).rem_euclid(pr);
                                (pr, canon_p1_vec(w1, w2, pr, p))
                            })
                            .collect();
                        seen.insert(img);
                    }
                }
                total += orbits;
            } else {
                total += h * valid.len() as i64;
            }
        }
        d -= 1;
    }
    Ok(total)
}

/// Number of cusps of `X_0(N)` fixed by `w_Q`.
pub fn fixed_cusps(n: i64, q: i64) -> Result<i64, GenusError> {
    if q <= 1 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(GenusError::BadHall(q, n));
    }
    let w = al_matrix(n, q);
    Ok(cusp_representatives(n)
        .into_iter()
        .filter(|c| {
            let (u, v) = act(w, c.a, c.b);
            canon_cusp(n, u, v) == canon_cusp(n, c.a, c.b)
        })
        .count() as i64)
}

/// Total number of fixed points of `w_Q` on `X_0(N)` (CM points plus
/// cusps).
pub fn al_fixed_points(n: i64, q: i64) -> Result<i64, GenusError> {
    Ok(al_fixed_points_cm(n, q)? + fixed_cusps(n, q)?)
}

/// Genus of `X_0(N)*` via Riemann-Hurwitz over the full Atkin-Lehner
/// group. Panics on internal inconsistency (non-closing bookkeeping).
pub fn genus_star(n: i64) -> i64 {
    let g = genus_x0(n);
    let mut fixsum = 0i64;
    for q in hall_divisors(n) {
        if q > 1 {
            fixsum += al_fixed_points(n, q).expect("hall divisor");
        }
    }
    let w = 1i64 << factorize(n).omega();
    let lhs = 2 * g - 2 - fixsum;
    assert_eq!(lhs.rem_euclid(w), 0, "Riemann-Hurwitz must close at N={n}");
    let twog2 = lhs / w;
    assert_eq!(twog2.rem_euclid(2), 0, "even degree-2 total at N={n}");
    let gs = (twog2 + 2) / 2;
    assert!(gs >= 0);
    gs
}

/// Assemble the full genus record for a level.
pub fn genus_data(n: i64) -> GenusData {
    let fac = factorize(n);
    let mut mu = n;
    for &(p, _) in &fac.factors {
        mu = mu / p * (p + 1);
    }
    let nu2 = if n % 4 == 0 {
        0
    } else {
        fac.factors
            .iter()
            .fold(1, |acc, &(p, _)| acc * (1 + kronecker(-4, p)) as i64)
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        fac.factors
            .iter()
            .fold(1, |acc, &(p, _)| acc * (1 + kronecker(-3, p)) as i64)
    };
    let fixed_points: Vec<(i64, i64)> = hall_divisors(n)
        .into_iter()
        .filter(|&q| q > 1)
        .map(|q| (q, al_fixed_points(n, q).expect("hall divisor")))
        .collect();
    GenusData {
        n,
        mu,
        nu2,
        nu3,
        nu_inf: cusp_count(n),
        genus: genus_x0(n),
        fixed_points,
        genus_star: genus_star(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_x0_examples() {
        assert_eq!(genus_x0(1), 0);
        assert_eq!(genus_x0(11), 1);
        assert_eq!(genus_x0(12), 0);
        assert_eq!(genus_x0(37), 2);
        assert_eq!(genus_x0(40), 3);
        assert_eq!(genus_x0(147), 11);
    }

    #[test]
    fn fixed_point_oracle_values() {
        assert_eq!(al_fixed_points(11, 11).unwrap(), 4);
        assert_eq!(al_fixed_points(40, 5).unwrap(), 0);
        assert_eq!(al_fixed_points(40, 8).unwrap(), 0);
        assert_eq!(al_fixed_points(40, 40).unwrap(), 4);
        assert_eq!(al_fixed_points(147, 3).unwrap(), 4);
        assert_eq!(al_fixed_points(147, 49).unwrap(), 0);
        assert_eq!(al_fixed_points(147, 147).unwrap(), 8);
        assert_eq!(al_fixed_points(63, 63).unwrap(), 8);
        assert_eq!(al_fixed_points(200, 200).unwrap(), 12);
        assert!(al_fixed_points(12, 2).is_err());
        assert!(al_fixed_points(12, 1).is_err());
    }

    #[test]
    fn fricke_matches_class_numbers_squarefree() {
        // fix(w_N) = h(-4N) + h(-N) on squarefree N = 3 mod 4 (no
        // elliptic-point collisions there), spot set from the census
        use crate::quadforms::class_number;
        for n in [11i64, 23, 35, 39] {
            let expect =
                class_number(-4 * n) as i64 + class_number(-n) as i64;
            assert_eq!(al_fixed_points(n, n).unwrap(), expect, "N={n}");
        }
    }

    #[test]
    fn star_genus_examples() {
        assert_eq!(genus_star(40), 1);
        assert_eq!(genus_star(147), 2);
        assert_eq!(genus_star(208), 5);
        assert_eq!(genus_star(63), 1);
        assert_eq!(genus_star(396), 5);
        // computed value at 200; the published table prints 3 on this row
        assert_eq!(genus_star(200), 4);
    }

    #[test]
    fn riemann_hurwitz_closes() {
        for n in [40i64, 63, 88, 120, 144, 147, 180, 225, 240] {
            let data = genus_data(n);
            let fixsum: i64 = data.fixed_points.iter().map(|&(_, f)| f).sum();
            let w = 1i64 << factorize(n).omega();
            assert_eq!(
                2 * data.genus - 2 - fixsum,
                w * (2 * data.genus_star - 2),
                "N={n}"
            );
            assert!(data.fixed_points.iter().all(|&(_, f)| f >= 0));
        }
    }
}
