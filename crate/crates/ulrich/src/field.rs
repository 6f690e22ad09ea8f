//! Exact coefficient arithmetic over Q and over cyclotomic extensions Q(zeta_D).
//!
//! Elements of Q(zeta_D) are stored as coordinate vectors over Q with respect to
//! the power basis 1, zeta, ..., zeta^(phi(D)-1), reduced modulo the D-th
//! cyclotomic polynomial. D = 1 (and D = 2, where zeta = -1) degenerate to plain
//! rationals, so every coefficient in the crate is a `FieldElement` regardless of
//! whether a root of unity is in play.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Convenience constructor for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for an integer rational.
pub fn rat_int(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

/// Coefficients of the D-th cyclotomic polynomial, ascending, monic.
///
/// Computed by dividing x^D - 1 by the product of the lower cyclotomic
/// polynomials. Coefficients fit in i64 comfortably for the supported range.
pub fn cyclotomic_polynomial(d: u32) -> Vec<i64> {
    assert!(d >= 1 && d <= 64, "cyclotomic order out of supported range");
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    let poly = if d == 1 {
        vec![-1, 1]
    } else {
        // x^d - 1
        let mut num = vec![0i64; d as usize + 1];
        num[0] = -1;
        num[d as usize] = 1;
        for q in 1..d {
            if d % q == 0 {
                num = divide_int_poly(&num, &cyclotomic_polynomial(q));
            }
        }
        num
    };
    cache.lock().unwrap().insert(d, poly.clone());
    poly
}

/// Exact division of integer polynomials (ascending coefficients, monic divisor).
fn divide_int_poly(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem: Vec<i64> = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let nd = rem.len() - 1;
    assert!(nd >= dd);
    let mut quot = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for j in 0..=dd {
                rem[k + j] -= c * den[j];
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact cyclotomic division");
    quot
}

/// Euler phi, i.e. the degree of the D-th cyclotomic polynomial.
pub fn cyclotomic_degree(d: u32) -> usize {
    cyclotomic_polynomial(d).len() - 1
}

/// An element of Q(zeta_D), held as a reduced coordinate vector over Q.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    d: u32,
    coords: Vec<Rat>,
}

impl FieldElement {
    /// The zero element of Q(zeta_D).
    pub fn zero(d: u32) -> Self {
        FieldElement {
            d,
            coords: vec![Rat::zero(); cyclotomic_degree(d)],
        }
    }

    /// The unit element of Q(zeta_D).
    pub fn one(d: u32) -> Self {
        Self::from_rat(d, Rat::one())
    }

    /// Embed a rational into Q(zeta_D).
    pub fn from_rat(d: u32, value: Rat) -> Self {
        let mut coords = vec![Rat::zero(); cyclotomic_degree(d)];
        coords[0] = value;
        FieldElement { d, coords }
    }

    /// Embed an integer into Q(zeta_D).
    pub fn from_int(d: u32, value: i64) -> Self {
        Self::from_rat(d, rat_int(value))
    }

    /// The chosen primitive D-th root of unity (the class of x).
    pub fn zeta(d: u32) -> Self {
        let deg = cyclotomic_degree(d);
        let mut coords = vec![Rat::zero(); deg + 1];
        coords[1] = Rat::one();
        reduce(d, &mut coords);
        coords.truncate(deg);
        FieldElement { d, coords }
    }

    /// Cyclotomic order of the ambient field.
    pub fn field_order(&self) -> u32 {
        self.d
    }

    /// Raw power-basis coordinates.
    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// Build from explicit coordinates (reduced representation expected).
    pub fn from_coords(d: u32, coords: Vec<Rat>) -> Self {
        assert_eq!(coords.len(), cyclotomic_degree(d), "coordinate length");
        FieldElement { d, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// Some(r) when the element lies in the rational subfield.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Re-embed into Q(zeta_to), which requires the current order to divide `to`.
    pub fn promote(&self, to: u32) -> FieldElement {
        assert!(
            to % self.d == 0,
            "cannot promote Q(zeta_{}) into Q(zeta_{})",
            self.d,
            to
        );
        if to == self.d {
            return self.clone();
        }
        // zeta_d = zeta_to^(to/d)
        let step = FieldElement::zeta(to).pow((to / self.d) as u64);
        let mut acc = FieldElement::zero(to);
        for (j, c) in self.coords.iter().enumerate().rev() {
            let _ = j;
            acc = acc.mul(&step).add(&FieldElement::from_rat(to, c.clone()));
        }
        acc
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.d, other.d,
            "mixed cyclotomic orders; promote before combining"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement { d: self.d, coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        FieldElement { d: self.d, coords }
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            d: self.d,
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let deg = self.coords.len();
        let mut prod = vec![Rat::zero(); 2 * deg - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        reduce(self.d, &mut prod);
        prod.truncate(deg);
        FieldElement {
            d: self.d,
            coords: prod,
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        FieldElement {
            d: self.d,
            coords: self.coords.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Phi_D.
    ///
    /// # Panics
    ///
    /// Panics on zero input.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(zeta_D)");
        if let Some(r) = self.as_rational() {
            return Self::from_rat(self.d, r.recip());
        }
        let phi: Vec<Rat> = cyclotomic_polynomial(self.d)
            .iter()
            .map(|&c| rat_int(c))
            .collect();
        let (g, u) = ext_gcd_mod(&self.coords, &phi);
        // g is a nonzero constant since Phi_D is irreducible over Q.
        debug_assert_eq!(poly_deg(&g), Some(0));
        let scale = g[0].recip();
        let mut coords: Vec<Rat> = u.iter().map(|c| c * &scale).collect();
        coords.resize(cyclotomic_degree(self.d), Rat::zero());
        reduce(self.d, &mut coords);
        coords.truncate(cyclotomic_degree(self.d));
        FieldElement {
            d: self.d,
            coords,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElement::one(self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Least common multiple of denominators across the coordinates.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for c in &self.coords {
            l = num::integer::lcm(l, c.denom().clone());
        }
        l
    }
}

/// Reduce a coordinate vector modulo Phi_D in place (length may exceed deg).
fn reduce(d: u32, coords: &mut Vec<Rat>) {
    let phi = cyclotomic_polynomial(d);
    let deg = phi.len() - 1;
    while coords.len() > deg {
        let top = coords.pop().unwrap();
        if !top.is_zero() {
            let k = coords.len() - deg;
            for j in 0..deg {
                let adj = &top * rat_int(phi[j]);
                coords[k + j] -= adj;
            }
        }
    }
    while coords.len() < deg {
        coords.push(Rat::zero());
    }
}

fn poly_deg(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Extended gcd of a against m over Q[x]: returns (g, u) with u*a = g mod m.
fn ext_gcd_mod(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    let mut u0 = vec![Rat::zero()];
    let mut u1 = vec![Rat::one()];
    while poly_deg(&r1).is_some() {
        let (q, r) = poly_quot_rem(&r0, &r1);
        let u2 = poly_sub(&u0, &poly_mul(&q, &u1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
    }
    (r0, u0)
}

fn poly_quot_rem(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = poly_deg(den).expect("division by zero polynomial");
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    let nd = match poly_deg(&rem) {
        Some(n) if n >= dd => n,
        _ => return (vec![Rat::zero()], rem),
    };
    let mut quot = vec![Rat::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = &rem[k + dd] / &lead;
        if !c.is_zero() {
            for j in 0..=dd {
                let adj = &c * &den[j];
                rem[k + j] -= adj;
            }
        }
        quot[k] = c;
    }
    (quot, rem)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match j {
                0 => format!("{}", mag),
                1 if mag.is_one() => "zeta".to_string(),
                1 => format!("{}*zeta", mag),
                _ if mag.is_one() => format!("zeta^{}", j),
                _ => format!("{}*zeta^{}", mag, j),
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{}", body)
                } else {
                    body
                });
            } else {
                parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, body));
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement(d={}, {})", self.d, self)
    }
}

/// True when the rational is a square of another rational.
pub fn rational_sqrt(c: &Rat) -> Option<Rat> {
    if c.is_negative() {
        return None;
    }
    if c.is_zero() {
        return Some(Rat::zero());
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_values() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_satisfies_cyclotomic_relation() {
        for d in [1u32, 2, 3, 4, 5, 6, 8, 12] {
            let z = FieldElement::zeta(d);
            // zeta^d = 1
            assert!(z.pow(d as u64).is_one(), "zeta_{}^{} != 1", d, d);
            // Phi_d(zeta) = 0
            let phi = cyclotomic_polynomial(d);
            let mut acc = FieldElement::zero(d);
            for (j, &c) in phi.iter().enumerate() {
                acc = acc.add(&z.pow(j as u64).scale(&rat_int(c)));
            }
            assert!(acc.is_zero(), "Phi_{} does not vanish at zeta", d);
        }
    }

    #[test]
    fn cube_root_sum_vanishes() {
        // 1 + zeta + zeta^2 = 0 for a primitive cube root.
        let z = FieldElement::zeta(3);
        let s = FieldElement::one(3).add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let z = FieldElement::zeta(5);
        let a = z.scale(&rat(3, 7)).add(&FieldElement::from_int(5, 2));
        assert!(a.mul(&a.inv()).is_one());
        let b = FieldElement::from_rat(1, rat(-4, 9));
        assert!(b.mul(&b.inv()).is_one());
    }

    #[test]
    fn promotion_is_consistent() {
        // zeta_2 = -1 seen inside Q(zeta_4).
        let m1 = FieldElement::zeta(2).promote(4);
        assert_eq!(m1, FieldElement::from_int(4, -1));
        // zeta_3 inside Q(zeta_6): zeta_6^2.
        let z3 = FieldElement::zeta(3).promote(6);
        assert_eq!(z3, FieldElement::zeta(6).pow(2));
    }

    #[test]
    fn rational_square_detection() {
        assert_eq!(rational_sqrt(&rat(4, 9)), Some(rat(2, 3)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-4, 1)), None);
    }
}
