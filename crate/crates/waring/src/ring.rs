//! Exact arithmetic in the finite quotient ring Z_p[w]/(w^N) with w^e = p.
//!
//! An element is a canonical digit vector (c_0, ..., c_{N-1}) with every
//! digit in [0, p), standing for the sum c_0 + c_1 w + ... + c_{N-1} w^{N-1}.
//! The single carry rule is p * w^i = w^{i+e}; carries propagating past
//! position N-1 are discarded, so every operation is exact arithmetic
//! mod w^N. Canonical digits give O(1) equality and hashing, and the dense
//! index Sum c_i p^i enumerates the whole ring.
//!
//! All values are immutable and every operation is a pure function, so
//! everything here is safe to share across threads.

use std::fmt;

use crate::error::Error;

/// Largest supported number of w-digits. Keeps every u64 accumulator in the
/// digit convolution comfortably below overflow.
pub const MAX_PRECISION: u32 = 64;

const MAX_PRIME: u32 = 1 << 20;

/// w-adic valuation: the position of the first nonzero digit, or
/// `Infinite` for the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// The tuple (p, e, k) plus the working precision N in w-digits.
///
/// All arithmetic is relative to one spec: p is the residue characteristic,
/// e the ramification degree (w^e = p), k the exponent under study, and N
/// the number of digits kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    p: u32,
    e: u32,
    k: u32,
    precision: u32,
}

/// A ring element in canonical form: exactly `precision` digits, each in
/// [0, p). Equality and hashing are digitwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    digits: Vec<u32>,
}

impl Element {
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn precision(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Interchange form: space-separated digits, position ascending.
    pub fn digit_string(&self) -> String {
        let strs: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        strs.join(" ")
    }

    /// Parse the interchange form produced by [`Element::digit_string`].
    pub fn from_digit_string(s: &str, spec: &RingSpec) -> Result<Element, Error> {
        let digits: Result<Vec<u32>, _> = s.split_whitespace().map(str::parse::<u32>).collect();
        let digits =
            digits.map_err(|_| Error::BadRecord(format!("bad digit string {s:?}")))?;
        spec.element_from_digits(&digits)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.digit_string())
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl RingSpec {
    /// Validate and build a spec. p must be prime (trial division), and
    /// e, k, N must all be at least 1.
    pub fn new(p: u32, e: u32, k: u32, precision: u32) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > MAX_PRIME {
            return Err(Error::InvalidParameter(format!(
                "p = {p} exceeds the supported limit {MAX_PRIME}"
            )));
        }
        if e == 0 {
            return Err(Error::InvalidParameter("e must be >= 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidParameter(format!(
                "precision must be in 1..={MAX_PRECISION}, got {precision}"
            )));
        }
        Ok(RingSpec { p, e, k, precision })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same (p, e, k) at a different digit count.
    pub fn with_precision(&self, precision: u32) -> Result<Self, Error> {
        RingSpec::new(self.p, self.e, self.k, precision)
    }

    /// p^N, when it fits in a u64.
    pub fn ring_size(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.precision)
    }

    pub fn zero(&self) -> Element {
        Element {
            digits: vec![0; self.precision as usize],
        }
    }

    pub fn one(&self) -> Element {
        let mut digits = vec![0; self.precision as usize];
        digits[0] = 1;
        Element { digits }
    }

    /// w^j for j < N.
    pub fn omega_pow(&self, j: u32) -> Element {
        assert!(j < self.precision, "omega_pow: {j} >= N = {}", self.precision);
        let mut digits = vec![0; self.precision as usize];
        digits[j as usize] = 1;
        Element { digits }
    }

    /// Canonical embedding of a signed integer: base-p digits of |n| placed
    /// at positions 0, e, 2e, ... (using p = w^e), negated if n < 0.
    pub fn from_integer(&self, n: i128) -> Element {
        let n_pos = self.precision.div_ceil(self.e);
        let mut digits = vec![0u32; self.precision as usize];
        let mut mag = n.unsigned_abs();
        let p = self.p as u128;
        for j in 0..n_pos {
            if mag == 0 {
                break;
            }
            digits[(j * self.e) as usize] = (mag % p) as u32;
            mag /= p;
        }
        let el = Element { digits };
        if n < 0 {
            self.neg(&el)
        } else {
            el
        }
    }

    /// Build an element from explicit digits; rejects wrong length or
    /// out-of-range digits.
    pub fn element_from_digits(&self, digits: &[u32]) -> Result<Element, Error> {
        if digits.len() != self.precision as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {} digits, got {}",
                self.precision,
                digits.len()
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= self.p) {
            return Err(Error::InvalidParameter(format!(
                "digit {d} out of range for p = {}",
                self.p
            )));
        }
        Ok(Element {
            digits: digits.to_vec(),
        })
    }

    fn check(&self, a: &Element) {
        debug_assert_eq!(a.digits.len(), self.precision as usize);
        debug_assert!(a.digits.iter().all(|&d| d < self.p));
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        self.check(a);
        self.check(b);
        let mut out = vec![0u32; self.precision as usize];
        add_digits(self.p, self.e as usize, &a.digits, &b.digits, &mut out);
        Element { digits: out }
    }

    /// Additive inverse: add(a, neg(a)) = zero.
    pub fn neg(&self, a: &Element) -> Element {
        self.check(a);
        let mut out = vec![0u32; self.precision as usize];
        neg_digits(self.p, self.e as usize, &a.digits, &mut out);
        Element { digits: out }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// Schoolbook digit convolution followed by carry normalization; exact.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        self.check(a);
        self.check(b);
        let mut out = vec![0u32; self.precision as usize];
        mul_digits(self.p, self.e as usize, &a.digits, &b.digits, &mut out);
        Element { digits: out }
    }

    /// a^m by square-and-multiply; pow(a, 0) = one.
    pub fn pow(&self, a: &Element, m: u64) -> Element {
        self.check(a);
        let mut out = vec![0u32; self.precision as usize];
        pow_digits(self.p, self.e as usize, &a.digits, m, &mut out);
        Element { digits: out }
    }

    pub fn valuation(&self, a: &Element) -> Valuation {
        self.check(a);
        match a.digits.iter().position(|&d| d != 0) {
            Some(i) => Valuation::Finite(i as u32),
            None => Valuation::Infinite,
        }
    }

    /// Units are exactly the elements of valuation 0.
    pub fn is_unit(&self, a: &Element) -> bool {
        a.digits[0] != 0
    }

    /// Multiply by w^j: digits shift up, truncating at N.
    pub fn shift_up(&self, a: &Element, j: u32) -> Element {
        self.check(a);
        let n = self.precision as usize;
        let j = j as usize;
        let mut digits = vec![0u32; n];
        for i in 0..n.saturating_sub(j) {
            digits[i + j] = a.digits[i];
        }
        Element { digits }
    }

    /// Exact division by w^j; requires valuation(a) >= j.
    pub fn shift_down(&self, a: &Element, j: u32) -> Result<Element, Error> {
        self.check(a);
        let v = self.valuation(a);
        let ok = match v {
            Valuation::Infinite => true,
            Valuation::Finite(x) => x >= j,
        };
        if !ok {
            return Err(Error::DivisionByOmega {
                valuation: v,
                shift: j,
            });
        }
        let n = self.precision as usize;
        let j = j as usize;
        let mut digits = vec![0u32; n];
        for i in j..n {
            digits[i - j] = a.digits[i];
        }
        Ok(Element { digits })
    }

    /// Projection onto the first `new_precision` digits; a ring homomorphism
    /// O/(w^N) -> O/(w^N'). The result belongs to
    /// `self.with_precision(new_precision)`.
    pub fn truncate(&self, a: &Element, new_precision: u32) -> Result<Element, Error> {
        self.check(a);
        if new_precision == 0 || new_precision > self.precision {
            return Err(Error::InvalidParameter(format!(
                "truncate: new precision {new_precision} not in 1..={}",
                self.precision
            )));
        }
        Ok(Element {
            digits: a.digits[..new_precision as usize].to_vec(),
        })
    }

    /// Dense index Sum c_i p^i. Requires p^N to fit in a u64.
    pub fn index_of(&self, a: &Element) -> u64 {
        self.check(a);
        debug_assert!(self.ring_size().is_some());
        let p = self.p as u64;
        let mut idx = 0u64;
        for &d in a.digits.iter().rev() {
            idx = idx * p + d as u64;
        }
        idx
    }

    /// Inverse of [`RingSpec::index_of`].
    pub fn element_of_index(&self, mut idx: u64) -> Element {
        let p = self.p as u64;
        let mut digits = vec![0u32; self.precision as usize];
        for d in digits.iter_mut() {
            *d = (idx % p) as u32;
            idx /= p;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        Element { digits }
    }

    /// w-power form, e.g. "1 + w^2 + 2w^6".
    pub fn pretty(&self, a: &Element) -> String {
        self.check(a);
        let mut terms: Vec<String> = Vec::new();
        for (i, &c) in a.digits.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(term(c as u64, i as u32));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Folded form with integer coefficients per power of w below e,
    /// e.g. "3 + 2w" for 1 + w^2 + w^3 when e = 2 (using w^e = p).
    pub fn pretty_folded(&self, a: &Element) -> String {
        self.check(a);
        let mut terms: Vec<String> = Vec::new();
        let p = self.p as u64;
        for r in 0..self.e.min(self.precision) {
            let mut coeff = 0u64;
            let mut scale = 1u64;
            let mut i = r;
            while i < self.precision {
                coeff += a.digits[i as usize] as u64 * scale;
                scale *= p;
                i += self.e;
            }
            if coeff == 0 {
                continue;
            }
            terms.push(term(coeff, r));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn term(coeff: u64, power: u32) -> String {
    match (coeff, power) {
        (c, 0) => c.to_string(),
        (1, 1) => "w".into(),
        (c, 1) => format!("{c}w"),
        (1, i) => format!("w^{i}"),
        (c, i) => format!("{c}w^{i}"),
    }
}

// Low-level digit routines shared with the set-enumeration hot paths.
// All of them work on canonical inputs and produce canonical outputs.

pub(crate) fn add_digits(p: u32, e: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    let n = a.len();
    let mut carry = [0u32; MAX_PRECISION as usize];
    for i in 0..n {
        let mut t = a[i] + b[i] + carry[i];
        let mut c = 0;
        while t >= p {
            t -= p;
            c += 1;
        }
        if i + e < n {
            carry[i + e] += c;
        }
        out[i] = t;
    }
}

pub(crate) fn neg_digits(p: u32, e: usize, a: &[u32], out: &mut [u32]) {
    let n = a.len();
    let mut borrow = [0u32; MAX_PRECISION as usize];
    for i in 0..n {
        let t = a[i] + borrow[i];
        if t == 0 {
            out[i] = 0;
        } else {
            out[i] = p - t;
            if i + e < n {
                borrow[i + e] += 1;
            }
        }
    }
}

pub(crate) fn carry_normalize(p: u64, e: usize, acc: &mut [u64], out: &mut [u32]) {
    let n = out.len();
    for i in 0..n {
        let v = acc[i];
        out[i] = (v % p) as u32;
        let q = v / p;
        if q > 0 && i + e < n {
            acc[i + e] += q;
        }
    }
}

pub(crate) fn mul_digits(p: u32, e: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    let n = a.len();
    let mut acc = [0u64; MAX_PRECISION as usize];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let ai = ai as u64;
        for (j, &bj) in b.iter().take(n - i).enumerate() {
            acc[i + j] += ai * bj as u64;
        }
    }
    carry_normalize(p as u64, e, &mut acc[..n], out);
}

pub(crate) fn pow_digits(p: u32, e: usize, base: &[u32], mut m: u64, out: &mut [u32]) {
    let n = base.len();
    let mut result = [0u32; MAX_PRECISION as usize];
    let mut square = [0u32; MAX_PRECISION as usize];
    let mut tmp = [0u32; MAX_PRECISION as usize];
    result[0] = 1;
    square[..n].copy_from_slice(base);
    while m > 0 {
        if m & 1 == 1 {
            mul_digits(p, e, &result[..n], &square[..n], &mut tmp[..n]);
            result[..n].copy_from_slice(&tmp[..n]);
        }
        m >>= 1;
        if m > 0 {
            mul_digits(p, e, &square[..n], &square[..n], &mut tmp[..n]);
            square[..n].copy_from_slice(&tmp[..n]);
        }
    }
    out.copy_from_slice(&result[..n]);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u32, e: u32, k: u32, n: u32) -> RingSpec {
        RingSpec::new(p, e, k, n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert_eq!(RingSpec::new(4, 1, 2, 5), Err(Error::NotPrime(4)));
        assert_eq!(RingSpec::new(1, 1, 2, 5), Err(Error::NotPrime(1)));
        assert!(RingSpec::new(2, 0, 2, 5).is_err());
        assert!(RingSpec::new(2, 1, 0, 5).is_err());
        assert!(RingSpec::new(2, 1, 2, 0).is_err());
        assert!(RingSpec::new(2, 1, 2, 65).is_err());
        assert!(RingSpec::new(7919, 3, 6, 10).is_ok());
    }

    #[test]
    fn from_integer_places_base_p_digits_at_stride_e() {
        let s = spec(2, 2, 6, 5);
        assert_eq!(s.from_integer(2).digits(), &[0, 0, 1, 0, 0]);
        let s = spec(2, 1, 6, 5);
        assert_eq!(s.from_integer(17).digits(), &[1, 0, 0, 0, 1]);
        let s = spec(3, 3, 6, 7);
        assert_eq!(s.from_integer(7).digits(), &[1, 0, 0, 2, 0, 0, 0]);
    }

    #[test]
    fn add_carries_p_to_position_plus_e() {
        let s = spec(2, 2, 6, 5);
        let a = s.add(&s.one(), &s.omega_pow(1));
        let sum = s.add(&a, &a);
        // (1+w) + (1+w) = w^2 + w^3
        assert_eq!(sum.digits(), &[0, 0, 1, 1, 0]);

        let s = spec(3, 3, 6, 5);
        let three = s.add(&s.add(&s.one(), &s.one()), &s.one());
        assert_eq!(three.digits(), &[0, 0, 0, 1, 0]); // 1+1+1 = 3 = w^3

        let s = spec(5, 2, 3, 6);
        let a = s.from_integer(123);
        assert_eq!(s.add(&a, &s.zero()), a);
    }

    #[test]
    fn neg_is_additive_inverse() {
        let s = spec(2, 1, 6, 5);
        assert_eq!(s.neg(&s.zero()), s.zero());
        assert_eq!(s.neg(&s.one()).digits(), &[1, 1, 1, 1, 1]); // -1 = 31 mod 32

        let s = spec(3, 1, 3, 3);
        // 8 + 19 = 27 = 0 mod 27, so -8 = 19
        assert_eq!(s.neg(&s.from_integer(8)), s.from_integer(19));
        assert_eq!(s.add(&s.from_integer(8), &s.from_integer(19)), s.zero());
        assert_eq!(s.from_integer(-8), s.from_integer(19));
    }

    #[test]
    fn mul_examples() {
        let s = spec(2, 2, 6, 5);
        let w = s.omega_pow(1);
        assert_eq!(s.mul(&w, &w), s.from_integer(2)); // w * w = w^2 = 2

        let s = spec(2, 1, 4, 5);
        let three = s.from_integer(3);
        let mut x = three.clone();
        for _ in 0..3 {
            x = s.mul(&x, &three);
        }
        assert_eq!(x, s.from_integer(17)); // 3^4 = 81 = 17 mod 32

        let s = spec(7, 3, 2, 6);
        let a = s.from_integer(29);
        assert_eq!(s.mul(&a, &s.one()), a);
    }

    #[test]
    fn pow_of_one_plus_omega_matches_exact_integer_pair_expansion() {
        // Independent oracle: compute (1 + sqrt(2))^6 = a + b*sqrt(2) exactly
        // over integer pairs, then reduce to digits mod w^5.
        let (mut a, mut b) = (1i64, 0i64);
        for _ in 0..6 {
            let (na, nb) = (a + 2 * b, a + b); // (a + b*sqrt2)(1 + sqrt2)
            a = na;
            b = nb;
        }
        assert_eq!((a, b), (99, 70));

        let s = spec(2, 2, 6, 5);
        let x = s.add(&s.one(), &s.omega_pow(1));
        let got = s.pow(&x, 6);
        let expected = s.add(
            &s.from_integer(a as i128),
            &s.mul(&s.from_integer(b as i128), &s.omega_pow(1)),
        );
        assert_eq!(got, expected);
        assert_eq!(got.digits(), &[1, 0, 1, 1, 0]); // 3 + 2*sqrt(2)
    }

    #[test]
    fn pow_examples() {
        let s = spec(2, 3, 6, 7);
        assert_eq!(s.pow(&s.omega_pow(1), 6), s.omega_pow(6));
        assert_eq!(s.pow(&s.omega_pow(1), 6), s.from_integer(4)); // w^6 = 4

        let s = spec(3, 1, 3, 3);
        assert_eq!(s.pow(&s.from_integer(2), 3), s.from_integer(8));
        let a = s.from_integer(14);
        assert_eq!(s.pow(&a, 0), s.one());
    }

    #[test]
    fn valuation_examples() {
        let s = spec(2, 3, 10, 10);
        assert_eq!(s.valuation(&s.zero()), Valuation::Infinite);
        assert_eq!(s.valuation(&s.from_integer(2)), Valuation::Finite(3));
        assert_eq!(s.valuation(&s.from_integer(8)), Valuation::Finite(9)); // 8 = w^9

        let s = spec(5, 2, 2, 6);
        assert_eq!(s.valuation(&s.from_integer(5)), Valuation::Finite(2));
    }

    #[test]
    fn shift_examples() {
        let s = spec(2, 2, 6, 5);
        assert_eq!(s.shift_up(&s.one(), 3), s.omega_pow(3));
        assert_eq!(s.shift_down(&s.omega_pow(4), 2).unwrap(), s.omega_pow(2));
        assert_eq!(
            s.shift_down(&s.one(), 1),
            Err(Error::DivisionByOmega {
                valuation: Valuation::Finite(0),
                shift: 1
            })
        );
        assert!(s.shift_down(&s.zero(), 3).is_ok());
    }

    #[test]
    fn truncate_examples() {
        let s = spec(2, 1, 4, 5);
        let a = s.from_integer(17);
        assert_eq!(s.truncate(&a, 4).unwrap().digits(), &[1, 0, 0, 0]);
        assert_eq!(s.truncate(&a, 5).unwrap(), a);
        assert!(s.truncate(&a, 6).is_err());
        assert!(s.truncate(&a, 0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = spec(3, 2, 6, 5);
        for idx in 0..s.ring_size().unwrap() {
            let el = s.element_of_index(idx);
            assert_eq!(s.index_of(&el), idx);
        }
    }

    #[test]
    fn text_forms() {
        let s = spec(2, 2, 6, 5);
        let x = s.element_from_digits(&[1, 0, 1, 1, 0]).unwrap();
        assert_eq!(x.digit_string(), "1 0 1 1 0");
        assert_eq!(s.pretty(&x), "1 + w^2 + w^3");
        assert_eq!(s.pretty_folded(&x), "3 + 2w");
        assert_eq!(s.pretty(&s.zero()), "0");
        assert_eq!(Element::from_digit_string("1 0 1 1 0", &s).unwrap(), x);

        let s3 = spec(3, 6, 6, 9);
        let y = s3
            .element_from_digits(&[1, 0, 0, 2, 0, 0, 1, 2, 2])
            .unwrap();
        assert_eq!(s3.pretty(&y), "1 + 2w^3 + w^6 + 2w^7 + 2w^8");
    }

    #[test]
    fn element_from_digits_validates() {
        let s = spec(3, 1, 2, 4);
        assert!(s.element_from_digits(&[0, 1, 2, 3]).is_err());
        assert!(s.element_from_digits(&[0, 1, 2]).is_err());
        assert!(s.element_from_digits(&[0, 1, 2, 1]).is_ok());
    }
}
