//! Heegner points on `X_0(N)`: existence, enumeration, the
//! Atkin-Lehner and Galois actions, stabilizers, and the decision of
//! rationality on the star quotient.
//!
//! A Heegner point of level `N` and discriminant `D` is a triple
//! `(O, eta, [a])` with `O` the order of discriminant `D`, `eta` an
//! admissible ideal of norm `N` and `[a]` a class of `Pic(O)`.
//! The involution `w_Q` conjugates the `Q`-part of `eta` and composes
//! the class with `[eta_Q]^(-1)`; complex conjugation conjugates all of
//! `eta` and inverts the class; `sigma_b` composes with `[b]^(-1)`.
//! A `W(N)`-orbit descends to a rational point of `X_0(N)*` exactly
//! when the full Galois orbit stays inside the `W(N)`-orbit.

use crate::arith::{factorize, hall_divisors, kronecker};
use crate::quadforms::{
    class_group, ideal_to_form, is_principal, FormClassGroup,
};
use crate::quadorders::{
    admissible_ideals, admissible_primepower, conjugate_ideal,
    eta_hall_part, ideal_from_components, order_from_disc, ImagQuadOrder,
    OrderError, OrderIdeal,
};
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;
use thiserror::Error;

/// Errors for Heegner-point computations.
#[derive(Debug, Error)]
pub enum HeegnerError {
    /// Invalid or positive discriminant.
    #[error(transparent)]
    Order(#[from] OrderError),
    /// No Heegner point of this level and discriminant.
    #[error("no Heegner point of level {0} and discriminant {1}: {2}")]
    NoPoint(i64, i64, String),
    /// Candidate discriminant data could not be read.
    #[error("cannot read candidate discriminants: {0}")]
    MissingData(#[from] std::io::Error),
}

/// A Heegner point `(O, eta, [a])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeegnerTriple {
    /// The CM order.
    pub order: ImagQuadOrder,
    /// Admissible ideal of norm `N`.
    pub eta: OrderIdeal,
    /// Index of the class `[a]` in `class_group(D)`.
    pub a_class: usize,
}

/// A `W(N) x Galois` orbit of Heegner points.
#[derive(Debug, Clone, Serialize)]
pub struct HeegnerOrbit {
    /// Level.
    pub n: i64,
    /// Discriminant.
    pub discriminant: i64,
    /// Orbit size.
    pub size: usize,
    /// Does the orbit define a rational point of `X_0(N)*`?
    pub star_rational: bool,
    /// Stabilizer of a representative, as Hall divisors.
    pub stabilizer: Vec<i64>,
}

/// Existence decision with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Existence {
    /// Does a Heegner point exist?
    pub exists: bool,
    /// The deciding condition.
    pub reason: String,
}

/// Decide whether a Heegner point of level `N` and discriminant `D`
/// exists: every prime power `p^k || N` must carry an admissible ideal
/// component.
pub fn heegner_exists(n: i64, d: i64) -> Result<Existence, HeegnerError> {
    let o = order_from_disc(d)?;
    for &(p, k) in &factorize(n).factors {
        if admissible_primepower(&o, p, k).is_empty() {
            let reason = if o.c % p != 0 {
                match kronecker(o.d, p) {
                    -1 => format!("{p} inert in the order of discriminant {d}"),
                    0 => format!(
                        "{p} ramified but {p}^2 | {n} requires split"
                    ),
                    _ => format!("no admissible component at {p}^{k}"),
                }
            } else {
                format!(
                    "no admissible component at {p}^{k} (p divides the conductor)"
                )
            };
            return Ok(Existence {
                exists: false,
                reason,
            });
        }
    }
    Ok(Existence {
        exists: true,
        reason: "admissible ideal of norm N exists".to_string(),
    })
}

/// All Heegner points of level `N` and discriminant `D`; there are
/// exactly `N_N(D) h(D)` of them.
pub fn enumerate_heegner(n: i64, d: i64) -> Result<Vec<HeegnerTriple>, HeegnerError> {
    let ex = heegner_exists(n, d)?;
    if !ex.exists {
        return Err(HeegnerError::NoPoint(n, d, ex.reason));
    }
    let o = order_from_disc(d)?;
    let cg = class_group(d);
    let mut out = Vec::new();
    for eta in admissible_ideals(&o, n) {
        for a_class in 0..cg.order() {
            out.push(HeegnerTriple {
                order: o,
                eta: eta.clone(),
                a_class,
            });
        }
    }
    Ok(out)
}

/// The image of a Heegner point under `w_Q`.
pub fn al_act(
    g: &FormClassGroup,
    p: &HeegnerTriple,
    q: i64,
) -> Result<HeegnerTriple, HeegnerError> {
    if q == 1 {
        return Ok(p.clone());
    }
    let (eta_q, _) = eta_hall_part(&p.eta, q)?;
    let o = p.order;
    let components = p
        .eta
        .components
        .iter()
        .map(|&(pp, k, l)| {
            if q % pp == 0 {
                (pp, k, (o.t - l).rem_euclid(pp.pow(k)))
            } else {
                (pp, k, l)
            }
        })
        .collect();
    let eta2 = ideal_from_components(&o, components);
    let fq = ideal_to_form(&eta_q);
    let iq = g
        .index_of(crate::quadforms::reduce_form(fq))
        .expect("ideal class in group");
    let a_class = g.table[p.a_class][g.inverse_of(iq)];
    Ok(HeegnerTriple {
        order: o,
        eta: eta2,
        a_class,
    })
}

/// The Galois action: `sigma_b` composes the class with `[b]^(-1)`;
/// with the conjugation twist, `eta` is conjugated and the class
/// inverted first.
pub fn galois_act(
    g: &FormClassGroup,
    p: &HeegnerTriple,
    b_class: usize,
    with_conjugation: bool,
) -> HeegnerTriple {
    let (eta, a) = if with_conjugation {
        (conjugate_ideal(&p.eta), g.inverse_of(p.a_class))
    } else {
        (p.eta.clone(), p.a_class)
    };
    HeegnerTriple {
        order: p.order,
        eta,
        a_class: g.table[a][g.inverse_of(b_class)],
    }
}

/// The stabilizer of a Heegner point inside `W(N)`: Hall divisors `Q`
/// with `conj(eta_Q) = eta_Q` and `[eta_Q]` principal.
pub fn stabilizer(g: &FormClassGroup, p: &HeegnerTriple) -> Vec<i64> {
    let n = p.eta.norm;
    let mut out = Vec::new();
    for q in hall_divisors(n) {
        if q == 1 {
            out.push(1);
            continue;
        }
        let (eta_q, _) = eta_hall_part(&p.eta, q).expect("hall divisor");
        if conjugate_ideal(&eta_q) != eta_q {
            continue;
        }
        let f = crate::quadforms::reduce_form(ideal_to_form(&eta_q));
        if is_principal(g, f).unwrap_or(false) {
            out.push(q);
        }
    }
    out
}

type PointKey = (Vec<(i64, u32, i64)>, usize);

fn key_of(p: &HeegnerTriple) -> PointKey {
    (p.eta.components.clone(), p.a_class)
}

/// The `W(N)`-orbits of Heegner points of discriminant `D` that map to
/// rational points of `X_0(N)*`.
pub fn star_rational_orbits(n: i64, d: i64) -> Result<Vec<HeegnerOrbit>, HeegnerError> {
    let g = class_group(d);
    // a rational star point forces Pic(O) to be 2-torsion
    if !g.is_two_torsion() {
        return Ok(Vec::new());
    }
    let points = enumerate_heegner(n, d)?;
    let halls = hall_divisors(n);
    let mut seen: BTreeSet<PointKey> = BTreeSet::new();
    let mut out = Vec::new();
    for p in &points {
        if seen.contains(&key_of(p)) {
            continue;
        }
        let mut orbit: BTreeSet<PointKey> = BTreeSet::new();
        let mut members = Vec::new();
        for &q in &halls {
            let img = al_act(&g, p, q)?;
            if orbit.insert(key_of(&img)) {
                members.push(img);
            }
        }
        assert!(orbit.contains(&key_of(p)));
        seen.extend(orbit.iter().cloned());
        let mut rational = orbit.contains(&key_of(&galois_act(&g, p, g.identity, true)));
        if rational {
            for b in 0..g.order() {
                if !orbit.contains(&key_of(&galois_act(&g, p, b, false))) {
                    rational = false;
                    break;
                }
            }
        }
        if rational {
            out.push(HeegnerOrbit {
                n,
                discriminant: d,
                size: orbit.len(),
                star_rational: true,
                stabilizer: stabilizer(&g, p),
            });
        }
    }
    Ok(out)
}

/// Read candidate discriminants (one per line, `#` comments).
pub fn load_candidate_discriminants(path: &Path) -> std::io::Result<Vec<i64>> {
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for line in std::io::BufReader::new(f).lines() {
        let line = line?;
        let s = line.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        out.push(s.parse::<i64>().map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, e)
        })?);
    }
    Ok(out)
}

/// Multiset of discriminants of rational Heegner star points of level
/// `N`, over the candidate discriminant list (sorted by `|D|`, one
/// entry per rational star point).
pub fn rational_heegner_report(
    n: i64,
    candidates: &[i64],
) -> Result<Vec<i64>, HeegnerError> {
    let mut out = Vec::new();
    for &d in candidates {
        let ex = heegner_exists(n, d)?;
        if !ex.exists {
            continue;
        }
        for orb in star_rational_orbits(n, d)? {
            debug_assert!(orb.star_rational);
            out.push(d);
        }
    }
    out.sort_by_key(|&d| -d);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use crate::quadforms::class_number;

    fn candidates() -> Vec<i64> {
        load_candidate_discriminants(
            &crate::default_data_dir().join("discriminants.txt"),
        )
        .expect("bundled discriminant file")
    }

    #[test]
    fn existence_examples() {
        assert!(heegner_exists(40, -15).unwrap().exists);
        let e = heegner_exists(11, -3).unwrap();
        assert!(!e.exists);
        assert!(e.reason.contains("inert"));
        let e = heegner_exists(4, -4).unwrap();
        assert!(!e.exists);
        assert!(e.reason.contains("ramified"));
        assert!(heegner_exists(40, -5).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let pts = enumerate_heegner(40, -160).unwrap();
        assert_eq!(pts.len(), 8); // N = 2, h = 4
        assert_eq!(class_number(-160), 4);
        let pts = enumerate_heegner(96, -15).unwrap();
        assert_eq!(pts.len() % class_number(-15), 0);
        // generic invariant |points| = N_N(D) h(D)
        for (n, d) in [(40i64, -15i64), (147, -147), (108, -32)] {
            let o = order_from_disc(d).unwrap();
            let ideals = admissible_ideals(&o, n).len();
            assert_eq!(
                enumerate_heegner(n, d).unwrap().len(),
                ideals * class_number(d)
            );
        }
    }

    #[test]
    fn al_action_laws() {
        let g = class_group(-160);
        let pts = enumerate_heegner(40, -160).unwrap();
        let halls = hall_divisors(40);
        for p in &pts {
            assert_eq!(al_act(&g, p, 1).unwrap(), *p);
            for &q in &halls {
                let twice =
                    al_act(&g, &al_act(&g, p, q).unwrap(), q).unwrap();
                assert_eq!(key_of(&twice), key_of(p), "Q={q}");
                for &q2 in &halls {
                    let gq = gcd(q, q2);
                    let q3 = q * q2 / (gq * gq);
                    let lhs =
                        al_act(&g, &al_act(&g, p, q).unwrap(), q2).unwrap();
                    let rhs = al_act(&g, p, q3).unwrap();
                    assert_eq!(key_of(&lhs), key_of(&rhs));
                }
            }
        }
    }

    #[test]
    fn galois_action_laws() {
        for (n, d) in [(40i64, -160i64), (147, -147)] {
            let g = class_group(d);
            let pts = enumerate_heegner(n, d).unwrap();
            for p in &pts {
                assert_eq!(galois_act(&g, p, g.identity, false), *p);
                let twice = galois_act(
                    &g,
                    &galois_act(&g, p, g.identity, true),
                    g.identity,
                    true,
                );
                assert_eq!(key_of(&twice), key_of(p));
                // Galois and AL actions commute
                for &q in &hall_divisors(n) {
                    for b in 0..g.order() {
                        let lhs = galois_act(
                            &g,
                            &al_act(&g, p, q).unwrap(),
                            b,
                            false,
                        );
                        let rhs = al_act(&g, &galois_act(&g, p, b, false), q)
                            .unwrap();
                        assert_eq!(key_of(&lhs), key_of(&rhs));
                    }
                }
                // orbit under all (b, tau) has size <= 2h
                let mut orbit = BTreeSet::new();
                for b in 0..g.order() {
                    for &t in &[false, true] {
                        orbit.insert(key_of(&galois_act(&g, p, b, t)));
                    }
                }
                assert!(orbit.len() <= 2 * g.order());
            }
        }
    }

    #[test]
    fn stabilizer_examples() {
        // ramified prime with principal class: 2 in Z[i] at level 2
        let g4 = class_group(-4);
        for p in &enumerate_heegner(2, -4).unwrap() {
            assert_eq!(stabilizer(&g4, p), vec![1, 2]);
        }
        // at (40, -15) both components fail the criterion: the split
        // 2-part is never self-conjugate and the ramified 5-part has the
        // non-principal class (2, 1, 2)
        let g = class_group(-15);
        for p in &enumerate_heegner(40, -15).unwrap() {
            assert_eq!(stabilizer(&g, p), vec![1]);
        }
        // criterion agrees with direct fixing under the action
        for (n, d) in [(40i64, -15i64), (40, -160), (147, -147), (2, -4)] {
            let g = class_group(d);
            for p in &enumerate_heegner(n, d).unwrap() {
                let st = stabilizer(&g, p);
                for q in hall_divisors(n) {
                    let fixes =
                        key_of(&al_act(&g, p, q).unwrap()) == key_of(p);
                    assert_eq!(st.contains(&q), fixes, "N={n} D={d} Q={q}");
                }
            }
        }
    }

    #[test]
    fn star_rational_examples() {
        assert_eq!(star_rational_orbits(40, -160).unwrap().len(), 1);
        assert_eq!(star_rational_orbits(147, -147).unwrap().len(), 3);
        // Pic not 2-torsion: no rational orbits
        assert_eq!(star_rational_orbits(40, -47).unwrap().len(), 0);
    }

    #[test]
    fn report_examples() {
        let cand = candidates();
        assert_eq!(
            rational_heegner_report(40, &cand).unwrap(),
            vec![-15, -16, -60, -160]
        );
        assert_eq!(rational_heegner_report(144, &cand).unwrap(), Vec::<i64>::new());
        assert_eq!(
            rational_heegner_report(63, &cand).unwrap(),
            vec![-27, -35, -315]
        );
        assert_eq!(
            rational_heegner_report(147, &cand).unwrap(),
            vec![-3, -12, -24, -48, -75, -147, -147, -147]
        );
    }
}
