//! Exact real quadratic numbers `a + b·√r` with rational `a, b` and a positive
//! integer radicand `r`.
//!
//! Sign tests never use floating point: they square both sides after a sign
//! analysis. Numbers over different radicands can still be compared exactly
//! (the comparison reduces to the sign of `x + y√p + z√q`), but arithmetic is
//! only defined when the radicands agree or one operand is rational.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::num::{exact_isqrt, format_rational, Rational};

/// Arithmetic between incompatible quadratic numbers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadraticError {
    #[error("cannot combine numbers over √{0} and √{1}")]
    RadicandMismatch(BigInt, BigInt),
    #[error("square root of a negative rational")]
    NegativeRadicand,
    #[error("division by zero")]
    DivisionByZero,
}

/// The real number `a + b·√r`.
///
/// Invariants: `r ≥ 1`; `r = 1` exactly when the number is rational (then
/// `b = 0`). The radicand is reduced by removing square factors found by trial
/// division, which is only a normalisation: correctness of sign tests never
/// depends on `r` being square-free.
#[derive(Clone, Debug)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
    r: BigInt,
}

/// Splits `n = s²·t` removing square factors of primes below `10^6` plus a
/// possible remaining perfect square. Exactly square-free for `n < 10^18`.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut t = n.clone();
    if let Some(root) = exact_isqrt(&t) {
        return (root, BigInt::one());
    }
    let mut p: u64 = 2;
    while p < 1_000_000 {
        let pp = BigInt::from(p) * BigInt::from(p);
        if pp > t {
            break;
        }
        let bp = BigInt::from(p);
        while (&t % &pp).is_zero() {
            t /= &pp;
            s *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if let Some(root) = exact_isqrt(&t) {
        s *= root;
        t = BigInt::one();
    }
    (s, t)
}

impl QuadraticNumber {
    /// Builds `a + b√r`, normalising the radicand. Requires `r ≥ 0`.
    pub fn new(a: Rational, b: Rational, r: BigInt) -> Result<Self, QuadraticError> {
        if r.is_negative() {
            return Err(QuadraticError::NegativeRadicand);
        }
        if r.is_zero() || b.is_zero() {
            return Ok(Self::from_rational(a));
        }
        let (s, t) = square_free_split(&r);
        let b = b * Rational::from_integer(s);
        if t.is_one() {
            Ok(Self::from_rational(a + b))
        } else {
            Ok(Self { a, b, r: t })
        }
    }

    /// The rational number `a`.
    pub fn from_rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), r: BigInt::one() }
    }

    /// `√x` for a nonnegative rational `x = p/q`, represented as `(1/q)·√(pq)`.
    pub fn sqrt_of(x: &Rational) -> Result<Self, QuadraticError> {
        if x.is_negative() {
            return Err(QuadraticError::NegativeRadicand);
        }
        let q = x.denom().clone();
        let pq = x.numer() * &q;
        Self::new(Rational::zero(), Rational::new(BigInt::one(), q), pq)
    }

    /// Rational part `a`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Irrational coefficient `b`.
    pub fn surd_coefficient(&self) -> &Rational {
        &self.b
    }

    /// Radicand `r` (1 for rational numbers).
    pub fn radicand(&self) -> &BigInt {
        &self.r
    }

    /// True when the number is rational.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i8 {
        sign_one_surd(&self.a, &self.b, &self.r)
    }

    fn common_radicand(&self, other: &Self) -> Result<BigInt, QuadraticError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(BigInt::one()),
            (true, false) => Ok(other.r.clone()),
            (false, true) => Ok(self.r.clone()),
            (false, false) if self.r == other.r => Ok(self.r.clone()),
            _ => Err(QuadraticError::RadicandMismatch(self.r.clone(), other.r.clone())),
        }
    }

    /// Sum; fails if both operands are irrational over different radicands.
    pub fn try_add(&self, other: &Self) -> Result<Self, QuadraticError> {
        let r = self.common_radicand(other)?;
        Self::new(&self.a + &other.a, &self.b + &other.b, r)
    }

    /// Difference; see [`QuadraticNumber::try_add`].
    pub fn try_sub(&self, other: &Self) -> Result<Self, QuadraticError> {
        let r = self.common_radicand(other)?;
        Self::new(&self.a - &other.a, &self.b - &other.b, r)
    }

    /// Product; see [`QuadraticNumber::try_add`].
    pub fn try_mul(&self, other: &Self) -> Result<Self, QuadraticError> {
        let r = self.common_radicand(other)?;
        let rr = Rational::from_integer(r.clone());
        let a = &self.a * &other.a + &self.b * &other.b * rr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::new(a, b, r)
    }

    /// Reciprocal `1/(a + b√r) = (a − b√r)/(a² − b²r)`.
    pub fn recip(&self) -> Result<Self, QuadraticError> {
        let norm = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.r.clone());
        if norm.is_zero() {
            return Err(QuadraticError::DivisionByZero);
        }
        Self::new(&self.a / &norm, -(&self.b) / &norm, self.r.clone())
    }

    /// The square, always defined.
    pub fn square(&self) -> Self {
        self.try_mul(self).expect("a number shares its own radicand")
    }

    /// Adds a rational.
    pub fn add_rational(&self, x: &Rational) -> Self {
        Self { a: &self.a + x, b: self.b.clone(), r: self.r.clone() }
    }

    /// Multiplies by a rational.
    pub fn scale(&self, x: &Rational) -> Self {
        if x.is_zero() {
            return Self::from_rational(Rational::zero());
        }
        Self { a: &self.a * x, b: &self.b * x, r: self.r.clone() }
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Self { a: -(&self.a), b: -(&self.b), r: self.r.clone() }
    }

    /// Lossy conversion for display purposes.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        a + b * r.sqrt()
    }

    /// Decimal approximation with `digits` fractional digits.
    ///
    /// The value is bracketed between exact rational bounds before rounding,
    /// so the result is correct up to one unit in the last place.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_rational() {
            return crate::num::format_decimal(&self.a, digits);
        }
        let bits = (digits as f64 * 3.33) as u32 + 16;
        let b2r = &self.b * &self.b * Rational::from_integer(self.r.clone());
        let root = crate::num::sqrt_lower(&b2r, bits);
        let approx = if self.b.is_negative() { &self.a - root } else { &self.a + root };
        crate::num::format_decimal(&approx, digits)
    }
}

/// Sign of `x + y√p` for `p ≥ 1`.
fn sign_one_surd(x: &Rational, y: &Rational, p: &BigInt) -> i8 {
    let sx = sign(x);
    let sy = sign(y);
    if sy == 0 || p.is_zero() {
        return sx;
    }
    if sx == 0 || sx == sy {
        return sy;
    }
    let lhs = x * x;
    let rhs = y * y * Rational::from_integer(p.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => 0,
    }
}

/// Sign of `x + y√p + z√q` for positive integers `p, q`.
fn sign_two_surds(x: &Rational, y: &Rational, p: &BigInt, z: &Rational, q: &BigInt) -> i8 {
    // Sign of the irrational part y√p + z√q.
    let s_surds = {
        let sy = sign(y);
        let sz = sign(z);
        if sy == 0 {
            sz
        } else if sz == 0 || sy == sz {
            sy
        } else {
            let ly = y * y * Rational::from_integer(p.clone());
            let lz = z * z * Rational::from_integer(q.clone());
            match ly.cmp(&lz) {
                Ordering::Greater => sy,
                Ordering::Less => sz,
                Ordering::Equal => 0,
            }
        }
    };
    let sx = sign(x);
    if s_surds == 0 {
        return sx;
    }
    if sx == 0 || sx == s_surds {
        return if sx == 0 { s_surds } else { sx };
    }
    // Opposite signs: compare x² with (y√p + z√q)² = y²p + z²q + 2yz√(pq).
    let pr = Rational::from_integer(p.clone());
    let qr = Rational::from_integer(q.clone());
    let rest = x * x - y * y * &pr - z * z * &qr;
    let cross = -(Rational::from_integer(BigInt::from(2)) * y * z);
    match sign_one_surd(&rest, &cross, &(p * q)) {
        1 => sx,
        -1 => s_surds,
        _ => 0,
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl From<Rational> for QuadraticNumber {
    fn from(a: Rational) -> Self {
        Self::from_rational(a)
    }
}

impl PartialEq for QuadraticNumber {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QuadraticNumber {}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        let x = &self.a - &other.a;
        let s = if self.r == other.r || other.is_rational() || self.is_rational() {
            let r = if self.is_rational() { &other.r } else { &self.r };
            let coeff = &self.b - &other.b;
            sign_one_surd(&x, &coeff, r)
        } else {
            sign_two_surds(&x, &self.b, &self.r, &-(&other.b), &other.r)
        };
        s.cmp(&0)
    }
}

impl PartialEq<Rational> for QuadraticNumber {
    fn eq(&self, other: &Rational) -> bool {
        self.is_rational() && &self.a == other
    }
}

impl PartialOrd<Rational> for QuadraticNumber {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(sign_one_surd(&(&self.a - other), &self.b, &self.r).cmp(&0))
    }
}

impl fmt::Display for QuadraticNumber {
    /// `p/q` for rationals, `sqrt(x)` for pure positive square roots, and
    /// `a+b*sqrt(r)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.a));
        }
        if self.a.is_zero() && self.b.is_positive() {
            let inside = &self.b * &self.b * Rational::from_integer(self.r.clone());
            return write!(f, "sqrt({})", format_rational(&inside));
        }
        let (op, mag) = if self.b.is_negative() { ("-", -(&self.b)) } else { ("+", self.b.clone()) };
        let coeff = if mag.is_one() { String::new() } else { format!("{}*", format_rational(&mag)) };
        if self.a.is_zero() {
            let lead = if op == "-" { "-" } else { "" };
            write!(f, "{lead}{coeff}sqrt({})", self.r)
        } else {
            write!(f, "{}{op}{coeff}sqrt({})", format_rational(&self.a), self.r)
        }
    }
}
