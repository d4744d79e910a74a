//! Binary quadratic forms of negative discriminant: reduction, Gauss
//! composition via united forms, form class groups with full composition
//! tables, principality tests and the ideal-to-form dictionary.
//!
//! Exports [`QuadraticForm`], [`FormClassGroup`], [`reduce_form`],
//! [`compose`], [`class_group`], [`class_number`], [`is_principal`],
//! [`ideal_to_form`].

use crate::arith::{floor_div, gcd, xgcd};
use crate::quadorders::OrderIdeal;
use thiserror::Error;

/// Errors raised by form arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    /// Form is not positive definite or not primitive.
    #[error("form ({0}, {1}, {2}) is not positive definite primitive")]
    Invalid(i64, i64, i64),
    /// Composition of forms with different discriminants.
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
}

/// A primitive positive definite integral binary quadratic form
/// `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, FormError> {
        let f = QuadraticForm { a, b, c };
        if f.disc() >= 0 || a <= 0 || gcd(gcd(a, b), c) != 1 {
            return Err(FormError::Invalid(a, b, c));
        }
        Ok(f)
    }

    /// Discriminant `b^2 - 4ac`.
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Evaluate the form at `(x, y)`.
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// Is this form reduced (`-a < b <= a <= c`, with `b >= 0` when
    /// `a == c`)?
    pub fn is_reduced(&self) -> bool {
        -self.a < self.b
            && self.b <= self.a
            && self.a <= self.c
            && (self.a != self.c || self.b >= 0)
    }
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Reduce a positive definite primitive form to its unique reduced
/// representative.
pub fn reduce_form(f: QuadraticForm) -> QuadraticForm {
    let (mut a, mut b, mut c) = (f.a, f.b, f.c);
    loop {
        if -a < b && b <= a && a <= c {
            if a == c && b < 0 {
                b = -b;
            }
            return QuadraticForm { a, b, c };
        }
        if b > a || b <= -a {
            // normalize b into (-a, a]: b' = b - 2ka
            let k = -floor_div(a - b, 2 * a);
            let b2 = b - 2 * k * a;
            c -= k * (b + b2) / 2;
            b = b2;
            continue;
        }
        if a > c || (a == c && b < 0) {
            let (na, nb, nc) = (c, -b, a);
            a = na;
            b = nb;
            c = nc;
        }
    }
}

/// The principal (identity) form of discriminant `D`.
pub fn principal_form(d: i64) -> QuadraticForm {
    let t = d.rem_euclid(2);
    reduce_form(QuadraticForm {
        a: 1,
        b: t,
        c: (t * t - d) / 4,
    })
}

/// Inverse class: `(a, -b, c)` reduced.
pub fn inverse_form(f: QuadraticForm) -> QuadraticForm {
    reduce_form(QuadraticForm {
        a: f.a,
        b: -f.b,
        c: f.c,
    })
}

/// Find a form SL2-equivalent to `f` whose leading coefficient is coprime
/// to `n` (united-forms search).
fn equivalent_form_coprime_to(f: QuadraticForm, n: i64) -> QuadraticForm {
    if gcd(f.a, n) == 1 {
        return f;
    }
    for bound in [6i64, 12, 30, 80, 200] {
        for x in -bound..=bound {
            for y in -bound..=bound {
                if gcd(x, y) != 1 {
                    continue;
                }
                let q = f.eval(x, y);
                if q == 0 || gcd(q, n) != 1 {
                    continue;
                }
                // complete (x, y) to SL2: [[x, u], [y, v]], x v - y u = 1
                let (mut g, mut v, mut mu) = xgcd(x, y);
                if g == -1 {
                    g = 1;
                    v = -v;
                    mu = -mu;
                }
                debug_assert_eq!(g, 1);
                let u = -mu;
                debug_assert_eq!(x * v - y * u, 1);
                let na = q;
                let nb = 2 * (f.a * x * u + f.c * y * v) + f.b * (x * v + y * u);
                let nc = f.eval(u, v);
                debug_assert_eq!(nb * nb - 4 * na * nc, f.disc());
                return QuadraticForm {
                    a: na,
                    b: nb,
                    c: nc,
                };
            }
        }
    }
    unreachable!("no form coprime to {n} equivalent to {f}");
}

fn inv_mod(a: i64, m: i64) -> i64 {
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    debug_assert_eq!(g.abs(), 1);
    (x * g.signum()).rem_euclid(m)
}

/// Gauss composition of two primitive forms of the same discriminant,
/// returning the reduced representative of the composite class.
pub fn compose(f1: QuadraticForm, f2: QuadraticForm) -> Result<QuadraticForm, FormError> {
    let d = f1.disc();
    if f2.disc() != d {
        return Err(FormError::DiscriminantMismatch(d, f2.disc()));
    }
    let g2 = equivalent_form_coprime_to(f2, f1.a);
    let (a1, b1) = (f1.a, f1.b);
    let (a2, b2) = (g2.a, g2.b);
    debug_assert_eq!(gcd(a1, a2), 1);
    // B = b1 mod 2a1 and B = b2 mod 2a2; b2 - b1 is even
    let diff = (b2 - b1) / 2;
    let x = (diff as i128 * inv_mod(a1, a2) as i128).rem_euclid(a2 as i128) as i64;
    let bb = b1 + 2 * a1 * x;
    let aa = a1 * a2;
    let num = bb as i128 * bb as i128 - d as i128;
    debug_assert_eq!(num.rem_euclid(4 * aa as i128), 0);
    Ok(reduce_form(QuadraticForm {
        a: aa,
        b: bb,
        c: (num / (4 * aa as i128)) as i64,
    }))
}

/// The form class group of a negative discriminant with its composition
/// table.
#[derive(Debug, Clone)]
pub struct FormClassGroup {
    /// The (negative) discriminant.
    pub discriminant: i64,
    /// All reduced primitive forms, sorted.
    pub elements: Vec<QuadraticForm>,
    /// `table[i][j]` = index of `elements[i] * elements[j]`.
    pub table: Vec<Vec<usize>>,
    /// Index of the principal form.
    pub identity: usize,
}

impl FormClassGroup {
    /// Class number `h(D)`.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of a (not necessarily reduced) form's class.
    pub fn index_of(&self, f: QuadraticForm) -> Option<usize> {
        let r = reduce_form(f);
        self.elements.iter().position(|&g| g == r)
    }

    /// Index of the inverse class.
    pub fn inverse_of(&self, i: usize) -> usize {
        self.index_of(inverse_form(self.elements[i])).unwrap()
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut n = 1;
        while x != self.identity {
            x = self.table[x][i];
            n += 1;
        }
        n
    }

    /// Exponent of the group.
    pub fn exponent(&self) -> usize {
        (0..self.elements.len())
            .map(|i| self.element_order(i))
            .fold(1, num_integer::lcm)
    }

    /// Is every element 2-torsion?
    pub fn is_two_torsion(&self) -> bool {
        (0..self.elements.len()).all(|i| self.table[i][i] == self.identity)
    }
}

/// All reduced primitive forms of discriminant `D < 0`, sorted.
pub fn reduced_forms(d: i64) -> Vec<QuadraticForm> {
    assert!(d < 0 && matches!(d.rem_euclid(4), 0 | 1));
    let mut forms = Vec::new();
    let mut b = d.rem_euclid(2);
    while b * b <= -d / 3 {
        let m4 = b * b - d;
        debug_assert_eq!(m4 % 4, 0);
        let m = m4 / 4;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                if a >= b && gcd(gcd(a, b), c) == 1 {
                    forms.push(QuadraticForm { a, b, c });
                    if b != 0 && a != b && a != c {
                        forms.push(QuadraticForm { a, b: -b, c });
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort_unstable();
    forms
}

/// Class number `h(D)` by the reduced-form sweep.
pub fn class_number(d: i64) -> usize {
    reduced_forms(d).len()
}

/// Build the full form class group of discriminant `D < 0`.
pub fn class_group(d: i64) -> FormClassGroup {
    let elements = reduced_forms(d);
    let identity = elements
        .iter()
        .position(|&f| f == principal_form(d))
        .expect("principal form present");
    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i..n {
            let p = compose(elements[i], elements[j]).unwrap();
            let k = elements.iter().position(|&g| g == p).unwrap();
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    FormClassGroup {
        discriminant: d,
        elements,
        table,
        identity,
    }
}

/// Is `f` in the principal class of `g`?
pub fn is_principal(g: &FormClassGroup, f: QuadraticForm) -> Result<bool, FormError> {
    if f.disc() != g.discriminant {
        return Err(FormError::DiscriminantMismatch(f.disc(), g.discriminant));
    }
    Ok(reduce_form(f) == g.elements[g.identity])
}

/// The primitive positive definite form attached to an admissible ideal
/// `(n, lambda - alpha)`: `(n, 2*lambda - t, P(lambda)/n)`, reduced.
pub fn ideal_to_form(i: &OrderIdeal) -> QuadraticForm {
    let o = &i.order;
    if i.norm == 1 {
        return principal_form(o.d);
    }
    let val = o.poly(i.lambda);
    debug_assert_eq!(val % i.norm, 0);
    reduce_form(QuadraticForm {
        a: i.norm,
        b: 2 * i.lambda - o.t,
        c: val / i.norm,
    })
}
