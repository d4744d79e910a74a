//! Exact integer arithmetic utilities: factorization with certified prime
//! factors, divisor lattices, the Kronecker symbol, and the square-below
//! divisor relation.
//!
//! Exports [`FactoredInteger`], [`factorize`], [`divisors`],
//! [`hall_divisors`], [`kronecker`], [`square_below_descents`] and small
//! helpers (`gcd`, `xgcd`, `vp`, `euler_phi`, `isqrt_exact`).

use serde::{Deserialize, Serialize};

/// A positive integer together with its certified prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    /// The integer itself.
    pub value: i64,
    /// `(prime, exponent)` pairs with strictly increasing primes and
    /// exponents at least 1.
    pub factors: Vec<(i64, u32)>,
}

impl FactoredInteger {
    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p` in the factorization (0 when `p` does not divide).
    pub fn valuation(&self, p: i64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The radical (product of distinct prime factors).
    pub fn radical(&self) -> i64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }
}

/// Greatest common divisor of two (possibly negative) integers.
pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a.abs(), b.abs())
}

/// Least common multiple of `|a|` and `|b|`.
pub fn lcm(a: i64, b: i64) -> i64 {
    num_integer::lcm(a.abs(), b.abs())
}

/// Floor modulus (result has the sign of `b`, as in mathematical residues).
pub fn floor_mod(a: i64, b: i64) -> i64 {
    let r = a % b;
    if r != 0 && (r < 0) != (b < 0) {
        r + b
    } else {
        r
    }
}

/// Floor division paired with [`floor_mod`].
pub fn floor_div(a: i64, b: i64) -> i64 {
    (a - floor_mod(a, b)) / b
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g` and
/// `|g| = gcd(a,b)` (`g >= 0` whenever `b >= 0`); callers normalize the
/// sign when needed.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return (a, 1, 0);
    }
    let (g, x, y) = xgcd(b, floor_mod(a, b));
    (g, y, x - floor_div(a, b) * y)
}

/// p-adic valuation of `n` (requires `n != 0`).
pub fn vp(mut n: i64, p: i64) -> u32 {
    assert!(n != 0 && p >= 2);
    n = n.abs();
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Exact integer square root test: `Some(s)` with `s*s == n` if `n` is a
/// perfect square, else `None`.
pub fn isqrt_exact(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = (n as f64).sqrt() as i64;
    for c in [s - 1, s, s + 1] {
        if c >= 0 && c * c == n {
            return Some(c);
        }
    }
    None
}

/// Euler totient.
pub fn euler_phi(n: i64) -> i64 {
    let mut r = n;
    for &(p, _) in &factorize(n).factors {
        r = r / p * (p - 1);
    }
    r
}

/// Deterministic Miller-Rabin primality certification for `n < 3.3e24`
/// (the standard 13-base set, far beyond the ranges used here).
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a as i128, d as i128, n as i128);
        if x == 1 || x == (n - 1) as i128 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x * x % n as i128;
            if x == (n - 1) as i128 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut b: i128, mut e: i128, m: i128) -> i128 {
    let mut r = 1i128;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Factorize a positive integer by trial division, certifying every factor
/// (and any remaining cofactor) prime.
///
/// Panics on `n <= 0`.
pub fn factorize(n: i64) -> FactoredInteger {
    assert!(n >= 1, "factorize requires a positive integer, got {n}");
    let value = n;
    let mut n = n;
    let mut factors = Vec::new();
    let mut d = 2i64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            debug_assert!(is_prime(d));
            factors.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        assert!(is_prime(n));
        factors.push((n, 1));
    }
    FactoredInteger { value, factors }
}

/// All positive divisors of `n`, sorted.
pub fn divisors(n: i64) -> Vec<i64> {
    let f = factorize(n);
    let mut divs = vec![1i64];
    for &(p, e) in &f.factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pk = 1;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

/// Hall divisors of `n`: the `2^omega(n)` divisors `d` with
/// `gcd(d, n/d) = 1`, sorted.
pub fn hall_divisors(n: i64) -> Vec<i64> {
    let f = factorize(n);
    let mut out = vec![1i64];
    for &(p, e) in &f.factors {
        let pk = p.pow(e);
        let mut next = Vec::with_capacity(out.len() * 2);
        for &d in &out {
            next.push(d);
            next.push(d * pk);
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Kronecker symbol `(a/n)`, the standard extension of the Legendre symbol
/// to all integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if n < 0 {
        let r = kronecker(a, -n);
        return if a < 0 { -r } else { r };
    }
    let mut a = a;
    let mut n = n;
    let mut res = 1i32;
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        if matches!(a.rem_euclid(8), 3 | 5) {
            res = -res;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n.rem_euclid(8), 3 | 5) {
                res = -res;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            res = -res;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        res
    } else {
        0
    }
}

/// Is `n` almost squarefree: `n = p^k * q_1 ... q_s` with `k` in `{2,3}`,
/// the `q_i` distinct primes different from `p`? Returns the powerful prime
/// `p` when so. Prime powers `p^k` with `k` in `{2,3}` are the `s = 0` case.
pub fn almost_squarefree_prime(n: &FactoredInteger) -> Option<i64> {
    let mut powerful = None;
    for &(p, e) in &n.factors {
        match e {
            1 => {}
            2 | 3 => {
                if powerful.is_some() {
                    return None;
                }
                powerful = Some(p);
            }
            _ => return None,
        }
    }
    powerful
}

/// All square-below descents of `N`: divisors `M | N` with `N/M` a perfect
/// square and `M` almost squarefree (including the prime-power shapes
/// `p^2`, `p^3`). Each descent is returned with its powerful prime.
pub fn square_below_descents(n: i64) -> Vec<(FactoredInteger, i64)> {
    assert!(n >= 2);
    let mut out = Vec::new();
    for m in divisors(n) {
        if isqrt_exact(n / m).is_none() {
            continue;
        }
        let fm = factorize(m);
        if let Some(p) = almost_squarefree_prime(&fm) {
            out.push((fm, p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_hand_values() {
        assert_eq!(factorize(441).factors, vec![(3, 2), (7, 2)]);
        assert_eq!(factorize(1).factors, vec![]);
        assert_eq!(factorize(1250).factors, vec![(2, 1), (5, 4)]);
    }

    #[test]
    fn factorize_reconstructs() {
        for n in 1..=20_000i64 {
            let f = factorize(n);
            let prod: i64 = f
                .factors
                .iter()
                .map(|&(p, e)| p.pow(e))
                .product();
            assert_eq!(prod, n);
            for w in f.factors.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            for &(p, _) in &f.factors {
                assert!(is_prime(p));
            }
        }
    }

    #[test]
    fn hall_divisor_properties() {
        assert_eq!(hall_divisors(12), vec![1, 3, 4, 12]);
        assert_eq!(hall_divisors(7), vec![1, 7]);
        assert_eq!(hall_divisors(1), vec![1]);
        for n in 1..=2_000i64 {
            let hd = hall_divisors(n);
            assert_eq!(hd.len(), 1 << factorize(n).omega());
            for &d in &hd {
                assert_eq!(n % d, 0);
                assert_eq!(gcd(d, n / d), 1);
            }
            // cross-check against a brute filter over all divisors
            let brute: Vec<i64> = divisors(n)
                .into_iter()
                .filter(|&d| gcd(d, n / d) == 1)
                .collect();
            assert_eq!(hd, brute);
        }
    }

    #[test]
    fn kronecker_hand_values() {
        assert_eq!(kronecker(-3, 11), -1);
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(-7, 1), 1);
        assert_eq!(kronecker(-4, 2), 0);
    }

    #[test]
    fn kronecker_multiplicative() {
        for a in -30..30i64 {
            for n in 1..40i64 {
                for m in 1..40i64 {
                    assert_eq!(
                        kronecker(a, n * m),
                        kronecker(a, n) * kronecker(a, m)
                    );
                }
            }
        }
        for a in -20..20i64 {
            for b in -20..20i64 {
                for n in (1..40i64).step_by(2) {
                    assert_eq!(
                        kronecker(a * b, n),
                        kronecker(a, n) * kronecker(b, n)
                    );
                }
            }
        }
    }

    #[test]
    fn square_below_examples() {
        let d: Vec<(i64, i64)> = square_below_descents(1372)
            .into_iter()
            .map(|(m, p)| (m.value, p))
            .collect();
        assert_eq!(d, vec![(28, 2), (343, 7)]);
        let d: Vec<(i64, i64)> = square_below_descents(147)
            .into_iter()
            .map(|(m, p)| (m.value, p))
            .collect();
        assert_eq!(d, vec![(147, 7)]);
        assert!(square_below_descents(30).is_empty());
    }

    #[test]
    fn square_below_cofactors_are_squares() {
        for n in 2..=3_000i64 {
            for (m, p) in square_below_descents(n) {
                assert_eq!(n % m.value, 0);
                assert!(isqrt_exact(n / m.value).is_some());
                let e = m.valuation(p);
                assert!(e == 2 || e == 3);
            }
        }
    }

    #[test]
    fn xgcd_bezout() {
        for a in -50..50i64 {
            for b in -50..50i64 {
                let (g, x, y) = xgcd(a, b);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g.abs(), gcd(a, b));
            }
        }
    }
}
