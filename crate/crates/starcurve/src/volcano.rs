//! Isogeny-volcano profiles for CM orders, certification of unique
//! cyclic `d`-isogenies, and the lifted-CM-point report explaining the
//! rational non-Heegner CM points of the star quotient.
//!
//! At a CM point with order `O` of discriminant `D`, the out-degrees of
//! the `l`-isogeny graph depend only on whether `l` divides the
//! conductor of `O`: if it does there is a unique ascending `l`-isogeny
//! and `l` descending ones; otherwise there are `1 + (D/l)` horizontal
//! and `1 - (D/l)` descending ones.  A cyclic `d`-isogeny from `E_D` to
//! an `h = 1` curve is certified unique by walking a forced path of
//! prime steps, ascending first and finishing with at most one
//! horizontal step per prime, all inside class number 1.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::arith::{factorize, divisors, hall_divisors, isqrt_exact, kronecker, vp};
use crate::heegner::{star_rational_orbits, HeegnerError};
use crate::quadforms::class_number;
use crate::quadorders::fundamental_part;

/// Out-degree profile of the `l`-isogeny graph at discriminant `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IsogenyProfile {
    /// Discriminant of the CM order.
    pub d: i64,
    /// The isogeny degree (prime).
    pub l: i64,
    /// Number of ascending `l`-isogenies.
    pub ascending: i64,
    /// Number of horizontal `l`-isogenies.
    pub horizontal: i64,
    /// Number of descending `l`-isogenies.
    pub descending: i64,
}

/// One forced step of a uniqueness certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsogenyStep {
    /// Ascending `l`-isogeny from the first discriminant to the second.
    Ascending(i64, i64, i64),
    /// Horizontal `l`-isogeny at the given discriminant.
    Horizontal(i64, i64),
}

/// Outcome of a uniqueness certification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Uniqueness {
    /// A unique cyclic isogeny exists; the forced path is attached.
    Yes(Vec<IsogenyStep>),
    /// No cyclic isogeny of this degree, with a counting witness.
    No(String),
    /// An intermediate discriminant has class number above 1, so the
    /// counting argument does not apply.
    Unknown(String),
}

impl Uniqueness {
    /// Is this a `Yes`?
    pub fn is_yes(&self) -> bool {
        matches!(self, Uniqueness::Yes(_))
    }
}

/// A certified lift of a star-rational CM point to a rational point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftEntry {
    /// The full level `N = d * M`.
    pub n: i64,
    /// Degree of the certified cyclic isogeny.
    pub d: i64,
    /// Quotient level carrying the star-rational source point.
    pub m_level: i64,
    /// Source discriminant (nonmaximal).
    pub source: i64,
    /// Target discriminant, of class number 1.
    pub target: i64,
    /// The forced path certifying uniqueness.
    pub certificate: Vec<IsogenyStep>,
}

/// The imaginary quadratic discriminants of class number 1, derived by
/// a reduced-form sweep (Heilbronn's bound puts them all above `-1000`
/// for our purposes; the sweep is exhaustive up to the stated limit).
pub fn class_number_one_discs(limit: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = -3;
    while d >= -limit {
        if matches!(d.rem_euclid(4), 0 | 1) && class_number(d) == 1 {
            out.push(d);
        }
        d -= 1;
    }
    out
}

/// The `l`-isogeny out-degree profile at discriminant `D`.
pub fn isogeny_profile(d: i64, l: i64) -> IsogenyProfile {
    let (_, c) = fundamental_part(d).expect("valid discriminant");
    if c % l == 0 {
        IsogenyProfile { d, l, ascending: 1, horizontal: 0, descending: l }
    } else {
        let s = kronecker(d, l) as i64;
        IsogenyProfile { d, l, ascending: 0, horizontal: 1 + s, descending: 1 - s }
    }
}

/// Certify that there is a unique cyclic `d`-isogeny from the curve of
/// CM discriminant `D` to the curve of CM discriminant `D0`.
///
/// Per prime `l | d` the path must climb `v_l(sqrt(D/D0))` ascending
/// steps (each forced: ascent count 1, no horizontal alternative) and
/// then take `v_l(d)` minus that many horizontal steps, of which at
/// most one composes cyclically.  Every visited discriminant other than
/// the source must have class number 1, otherwise the horizontal edges
/// connect distinct curves and counting alone cannot certify
/// uniqueness, so the answer degrades to `Unknown`.
pub fn unique_cyclic_isogeny(d: i64, d0: i64, deg: i64) -> Uniqueness {
    assert!(deg >= 2, "degree must be at least 2");
    if d0 == 0 || d % d0 != 0 {
        return Uniqueness::No("incompatible orders".into());
    }
    let r = d / d0;
    let s = match isqrt_exact(r) {
        Some(s) => s,
        None => return Uniqueness::No("conductor ratio not a square".into()),
    };
    let fd = factorize(deg);
    if factorize(s).factors.iter().any(|&(p, _)| vp(deg, p) == 0) {
        return Uniqueness::No("conductor ratio does not divide the degree".into());
    }
    let mut cert = Vec::new();
    let mut cur = d;
    for &(l, a) in &fd.factors {
        let asc = vp(s, l);
        if asc > a {
            return Uniqueness::No(format!(
                "needs {asc} ascending {l}-steps, degree allows {a}"
            ));
        }
        let hor = a - asc;
        if hor > 1 {
            return Uniqueness::No(format!(
                "{hor} horizontal {l}-steps compose non-cyclically"
            ));
        }
        for _ in 0..asc {
            let prof = isogeny_profile(cur, l);
            if prof.ascending != 1 {
                return Uniqueness::No(format!("no ascending {l}-isogeny at {cur}"));
            }
            let nxt = cur / (l * l);
            if nxt != d && class_number(nxt) != 1 {
                return Uniqueness::Unknown(format!(
                    "intermediate discriminant {nxt} has class number above 1"
                ));
            }
            cert.push(IsogenyStep::Ascending(l, cur, nxt));
            cur = nxt;
        }
        if hor == 1 {
            let prof = isogeny_profile(cur, l);
            if prof.horizontal != 1 {
                return Uniqueness::No(format!(
                    "{} horizontal {l}-isogenies at {cur}",
                    prof.horizontal
                ));
            }
            if class_number(cur) != 1 {
                return Uniqueness::Unknown(format!(
                    "horizontal step at {cur} with class number above 1"
                ));
            }
            cert.push(IsogenyStep::Horizontal(l, cur));
        }
    }
    debug_assert_eq!(d / (s * s), d0);
    Uniqueness::Yes(cert)
}

/// All certified lifts of star-rational CM points at level `N`.
///
/// For every coprime factorization `N = d * M` with `d, M > 1`, every
/// star-rational Heegner orbit of `X_0(M)*` with nonmaximal order `O`
/// is paired with every strictly larger order `O_0` of class number 1
/// admitting a certified unique cyclic `d`-isogeny; each such pair
/// yields a rational non-Heegner point of `X_0(N)*`.
pub fn cm_lift_report(n: i64, candidates: &[i64]) -> Result<Vec<LiftEntry>, HeegnerError> {
    let mut src_cache: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let mut out: Vec<LiftEntry> = Vec::new();
    for deg in hall_divisors(n) {
        if deg == 1 || deg == n {
            continue;
        }
        let m = n / deg;
        let discs = src_cache.entry(m).or_insert_with(Vec::new);
        if discs.is_empty() {
            for &d in candidates {
                if !crate::heegner::heegner_exists(m, d)?.exists {
                    continue;
                }
                for orb in star_rational_orbits(m, d)? {
                    debug_assert!(orb.star_rational);
                    if !discs.contains(&d) {
                        discs.push(d);
                    }
                }
            }
        }
        for &d in discs.iter() {
            let (_, c) = fundamental_part(d).expect("candidate discriminant");
            if c == 1 {
                continue;
            }
            for t in divisors(c) {
                if t == 1 {
                    continue;
                }
                let d0 = d / (t * t);
                if !matches!(d0.rem_euclid(4), 0 | 1) || class_number(d0) != 1 {
                    continue;
                }
                if let Uniqueness::Yes(cert) = unique_cyclic_isogeny(d, d0, deg) {
                    if !out.iter().any(|e| e.source == d && e.target == d0) {
                        out.push(LiftEntry {
                            n,
                            d: deg,
                            m_level: m,
                            source: d,
                            target: d0,
                            certificate: cert,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(|e| (-e.source, -e.target, e.d));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::default_data_dir;
    use crate::heegner::load_candidate_discriminants;

    fn candidates() -> Vec<i64> {
        load_candidate_discriminants(&default_data_dir().join("discriminants.txt"))
            .expect("discriminant data file")
    }

    #[test]
    fn class_number_one_list() {
        assert_eq!(
            class_number_one_discs(200),
            vec![-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163]
        );
    }

    #[test]
    fn profile_examples() {
        let p = isogeny_profile(-16, 2);
        assert_eq!((p.ascending, p.horizontal, p.descending), (1, 0, 2));
        let p = isogeny_profile(-4, 2);
        assert_eq!((p.ascending, p.horizontal, p.descending), (0, 1, 1));
        let p = isogeny_profile(-7, 2);
        assert_eq!((p.ascending, p.horizontal, p.descending), (0, 2, 0));
    }

    #[test]
    fn profile_counts_match_cases() {
        for d in [-3, -4, -7, -8, -11, -12, -15, -16, -20, -27, -32, -48, -75] {
            for l in [2i64, 3, 5, 7] {
                let (_, c) = fundamental_part(d).unwrap();
                let p = isogeny_profile(d, l);
                if c % l == 0 {
                    assert_eq!((p.ascending, p.horizontal, p.descending), (1, 0, l));
                } else {
                    let s = kronecker(d, l) as i64;
                    assert_eq!(
                        (p.ascending, p.horizontal, p.descending),
                        (0, 1 + s, 1 - s)
                    );
                }
            }
        }
    }

    #[test]
    fn uniqueness_examples() {
        assert!(unique_cyclic_isogeny(-16, -4, 4).is_yes());
        assert!(unique_cyclic_isogeny(-27, -3, 9).is_yes());
        assert_eq!(
            unique_cyclic_isogeny(-16, -16, 2),
            Uniqueness::No("0 horizontal 2-isogenies at -16".into())
        );
    }

    #[test]
    fn uniqueness_nine_cases() {
        // the nine certified arrow shapes of the golden tables
        let cases = [
            (-16, -4, 4),
            (-27, -3, 3),
            (-27, -3, 9),
            (-12, -3, 2),
            (-48, -3, 4),
            (-48, -12, 2),
            (-28, -7, 2),
            (-112, -7, 4),
            (-36, -4, 3),
        ];
        for (d, d0, deg) in cases {
            match unique_cyclic_isogeny(d, d0, deg) {
                Uniqueness::Yes(cert) => {
                    // ascending steps precede the optional horizontal tail
                    let mut seen_horizontal = false;
                    let mut cur = d;
                    for step in &cert {
                        match *step {
                            IsogenyStep::Ascending(l, from, to) => {
                                assert!(!seen_horizontal);
                                assert_eq!(from, cur);
                                assert_eq!(to, cur / (l * l));
                                cur = to;
                            }
                            IsogenyStep::Horizontal(_, at) => {
                                seen_horizontal = true;
                                assert_eq!(at, cur);
                            }
                        }
                    }
                    assert_eq!(cur, d0);
                }
                other => panic!("({d},{d0},{deg}) gave {other:?}"),
            }
        }
    }

    #[test]
    fn uniqueness_counting_refusals() {
        assert!(matches!(unique_cyclic_isogeny(-16, -4, 8), Uniqueness::No(_)));
        assert!(matches!(unique_cyclic_isogeny(-4, -16, 2), Uniqueness::No(_)));
        assert!(matches!(unique_cyclic_isogeny(-16, -7, 4), Uniqueness::No(_)));
        // two horizontal steps at the same prime never compose cyclically
        assert!(matches!(unique_cyclic_isogeny(-7, -7, 4), Uniqueness::No(_)));
    }

    #[test]
    fn uniqueness_unknown_above_class_number_one() {
        // -60 has h = 2, so a horizontal 7-step there is not certified
        assert!(matches!(
            unique_cyclic_isogeny(-240, -60, 14),
            Uniqueness::Unknown(_)
        ));
    }

    #[test]
    fn lift_report_examples() {
        let cands = candidates();
        let arrows = |n: i64| -> Vec<(i64, i64)> {
            cm_lift_report(n, &cands)
                .unwrap()
                .iter()
                .map(|e| (e.source, e.target))
                .collect()
        };
        assert_eq!(arrows(100), vec![(-16, -4)]);
        assert_eq!(arrows(147), vec![(-27, -3)]);
        assert_eq!(arrows(52), vec![(-16, -4)]);
        assert_eq!(arrows(294), vec![(-12, -3), (-48, -12)]);
        assert_eq!(arrows(242), vec![(-28, -7)]);
        assert_eq!(arrows(40), Vec::<(i64, i64)>::new());
        // level 100 lifts through the star-rational -16 point of X_0(25)*
        let r = cm_lift_report(100, &cands).unwrap();
        assert_eq!((r[0].m_level, r[0].d), (25, 4));
        // level 147 lifts through X_0(49)*
        let r = cm_lift_report(147, &cands).unwrap();
        assert_eq!((r[0].m_level, r[0].d), (49, 3));
    }
}
