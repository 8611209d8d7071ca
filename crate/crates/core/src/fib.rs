//! Fibonacci and Lucas sequences and the three-point verifier for quadratic
//! Fibonacci identities.
//!
//! Conventions: `f_0 = 0, f_1 = 1`; `g_n = f_{2n−1}` (odd Fibonacci),
//! `h_n = f_{2n}` (even Fibonacci), `ℓ_k = f_{k−1} + f_{k+1}` (Lucas),
//! `F_k = f_{4k}/3`, `L_k = ℓ_{4k+2}/3`, `H_k = f_{2k} f_{2k+2}/3`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::num::Rational;
pub use crate::report::NamedCheck;

fn table() -> &'static RwLock<Vec<BigInt>> {
    static TABLE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigInt::zero(), BigInt::one()]))
}

fn fib_nonneg(n: usize) -> BigInt {
    {
        let t = table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(x) = t.get(n) {
            return x.clone();
        }
    }
    let mut t = table().write().unwrap_or_else(|e| e.into_inner());
    while t.len() <= n {
        let k = t.len();
        let next = &t[k - 1] + &t[k - 2];
        t.push(next);
    }
    t[n].clone()
}

/// `f_n`, extended to negative indices by `f_{−n} = (−1)^{n+1} f_n`.
pub fn fib(n: i64) -> BigInt {
    let x = fib_nonneg(n.unsigned_abs() as usize);
    if n < 0 && n % 2 == 0 {
        -x
    } else {
        x
    }
}

/// The odd Fibonacci number `g_n = f_{2n−1}`: `g_0 = g_1 = 1, g_2 = 2, g_3 = 5, …`.
pub fn g(n: i64) -> BigInt {
    fib(2 * n - 1)
}

/// The even Fibonacci number `h_n = f_{2n}`: `h_1 = 1, h_2 = 3, h_3 = 8, …`.
pub fn h(n: i64) -> BigInt {
    fib(2 * n)
}

/// The Lucas number `ℓ_k = f_{k−1} + f_{k+1}`.
pub fn lucas(k: i64) -> BigInt {
    fib(k - 1) + fib(k + 1)
}

fn third(x: BigInt) -> BigInt {
    let (q, r) = x.div_rem(&BigInt::from(3));
    assert!(r.is_zero(), "value is not divisible by 3");
    q
}

/// `F_k = f_{4k}/3`: `1, 7, 48, 329, …` for `k = 1, 2, 3, 4`.
pub fn big_f(k: i64) -> BigInt {
    third(fib(4 * k))
}

/// `L_k = ℓ_{4k+2}/3`: `1, 6, 41, 281, 1926, …` for `k = 0, 1, 2, …`.
pub fn big_l(k: i64) -> BigInt {
    third(lucas(4 * k + 2))
}

/// `H_k = f_{2k} f_{2k+2}/3`: `0, 1, 8, 56, 385, 2640, …`.
pub fn big_h(k: i64) -> BigInt {
    third(fib(2 * k) * fib(2 * k + 2))
}

/// A quadratic Fibonacci identity
/// `Q(s) = Σ a_ij f_{s+i} f_{s+j} + Σ b_j f_{2s+j} + (−1)^s c = 0`.
///
/// Shifts may be negative; `Q(s)` is only evaluated at `s` for which every
/// index is nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFibIdentity {
    pub quadratic: Vec<((i64, i64), Rational)>,
    pub linear: Vec<(i64, Rational)>,
    pub sign: Rational,
}

impl QuadraticFibIdentity {
    /// Builds an identity from integer coefficients.
    pub fn new(quadratic: &[((i64, i64), i64)], linear: &[(i64, i64)], sign: i64) -> Self {
        let r = |x: i64| Rational::from_integer(BigInt::from(x));
        QuadraticFibIdentity {
            quadratic: quadratic.iter().map(|&(ij, a)| (ij, r(a))).collect(),
            linear: linear.iter().map(|&(j, b)| (j, r(b))).collect(),
            sign: r(sign),
        }
    }

    /// True when every index occurring in `Q(s)` is nonnegative.
    pub fn is_valid_at(&self, s: i64) -> bool {
        self.quadratic.iter().all(|&((i, j), _)| s + i >= 0 && s + j >= 0)
            && self.linear.iter().all(|&(j, _)| 2 * s + j >= 0)
    }

    /// `Q(s)`, or `None` if `s` is not a valid point.
    pub fn eval(&self, s: i64) -> Option<Rational> {
        if !self.is_valid_at(s) {
            return None;
        }
        let mut total = Rational::zero();
        for ((i, j), a) in &self.quadratic {
            total += a * Rational::from_integer(fib(s + i) * fib(s + j));
        }
        for (j, b) in &self.linear {
            total += b * Rational::from_integer(fib(2 * s + j));
        }
        if s % 2 == 0 {
            total += &self.sign;
        } else {
            total -= &self.sign;
        }
        Some(total)
    }

    /// `self + λ·other`.
    pub fn combine(&self, lambda: &Rational, other: &Self) -> Self {
        let mut out = self.clone();
        out.quadratic.extend(other.quadratic.iter().map(|(ij, a)| (*ij, a * lambda)));
        out.linear.extend(other.linear.iter().map(|(j, b)| (*j, b * lambda)));
        out.sign = &out.sign + &other.sign * lambda;
        out
    }

    /// The identity with `s` replaced by `s + t`.
    pub fn shifted(&self, t: i64) -> Self {
        QuadraticFibIdentity {
            quadratic: self.quadratic.iter().map(|((i, j), a)| ((i + t, j + t), a.clone())).collect(),
            linear: self.linear.iter().map(|(j, b)| (j + 2 * t, b.clone())).collect(),
            sign: if t % 2 == 0 { self.sign.clone() } else { -self.sign.clone() },
        }
    }

    /// True if the identity has no quadratic terms and no sign term.
    pub fn is_homogeneous_linear(&self) -> bool {
        self.quadratic.iter().all(|(_, a)| a.is_zero()) && self.sign.is_zero()
    }
}

/// Outcome of [`verify_identity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    /// `Q(s) = 0` at every valid `s ≤ s_max`.
    pub holds: bool,
    /// The valid points that were checked.
    pub checked: Vec<i64>,
    /// The first valid point where `Q(s) ≠ 0`.
    pub first_failure: Option<i64>,
    /// The points the certificate uses: the first three valid points
    /// (two for homogeneous linear identities).
    pub certificate_points: Vec<i64>,
    /// `Q` vanishes at all certificate points.
    pub certificate_holds: bool,
}

impl IdentityReport {
    /// The certificate predicts the full-range verdict.
    pub fn certificate_consistent(&self) -> bool {
        self.certificate_holds == self.holds
    }
}

/// Error from [`verify_identity`]: too few valid points below `s_max`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("identity has only {valid} valid points in 0..={s_max}; at least 3 are required")]
pub struct TooFewPoints {
    pub valid: usize,
    pub s_max: i64,
}

/// Checks `Q(s) = 0` for all valid `s = 0, …, s_max`, and records whether the
/// three-point (two-point for homogeneous linear identities) certificate
/// gives the same verdict.
pub fn verify_identity(id: &QuadraticFibIdentity, s_max: i64) -> Result<IdentityReport, TooFewPoints> {
    let checked: Vec<i64> = (0..=s_max).filter(|&s| id.is_valid_at(s)).collect();
    if checked.len() < 3 {
        return Err(TooFewPoints { valid: checked.len(), s_max });
    }
    let first_failure = checked.iter().copied().find(|&s| id.eval(s).is_some_and(|v| !v.is_zero()));
    let n_cert = if id.is_homogeneous_linear() { 2 } else { 3 };
    let certificate_points = checked[..n_cert].to_vec();
    let certificate_holds = certificate_points.iter().all(|&s| id.eval(s).is_some_and(|v| v.is_zero()));
    Ok(IdentityReport { holds: first_failure.is_none(), checked, first_failure, certificate_points, certificate_holds })
}

/// `5 f_s² = −f_{2s} + 2 f_{2s+1} − 2(−1)^s`, written as `Q(s) = 0`.
pub fn identity_square() -> QuadraticFibIdentity {
    QuadraticFibIdentity::new(&[((0, 0), 5)], &[(0, 1), (1, -2)], 2)
}

/// `5 f_{s+2} f_s = f_{2s+1} + f_{2s+3} − 3(−1)^s`, written as `Q(s) = 0`.
pub fn identity_shift_two() -> QuadraticFibIdentity {
    QuadraticFibIdentity::new(&[((2, 0), 5)], &[(1, -1), (3, -1)], 3)
}

/// Cassini: `f_s² − f_{s+1} f_{s−1} + (−1)^s = 0`.
pub fn identity_cassini() -> QuadraticFibIdentity {
    QuadraticFibIdentity::new(&[((0, 0), 1), ((1, -1), -1)], &[], 1)
}

/// Odd doubling: `f_{2s−1} = f_s² + f_{s−1}²`.
pub fn identity_doubling_odd() -> QuadraticFibIdentity {
    QuadraticFibIdentity::new(&[((0, 0), 1), ((-1, -1), 1)], &[(-1, -1)], 0)
}

/// Even doubling: `f_{2s} = f_{s+1}² − f_{s−1}²`.
pub fn identity_doubling_even() -> QuadraticFibIdentity {
    QuadraticFibIdentity::new(&[((1, 1), 1), ((-1, -1), -1)], &[(0, -1)], 0)
}

/// The decomposition `f_{s+i} f_s = Σ_j a_ij f_{2s+j} + (−1)^s c_i` with
/// `c_i = −Σ_j a_ij f_j`, obtained by solving for `(a_i0, a_i1)` from the
/// values at `s = 0, 1, 2` and returned as an identity to be checked.
pub fn product_decomposition(i: i64) -> QuadraticFibIdentity {
    // Unknowns x = a_i0, y = a_i1, c. Q(s) = f_{s+i} f_s − x f_{2s} − y f_{2s+1} − (−1)^s c.
    // s = 0: −y − c = 0.  s = 1: f_{i+1} − x − 2y + c = 0.  s = 2: f_{i+2} − 3x − 5y − c = 0.
    let r = |x: BigInt| Rational::from_integer(x);
    let p1 = r(fib(i + 1));
    let p2 = r(fib(i + 2));
    // With c = −y: p1 − x − 3y = 0 and p2 − 3x − 4y = 0.
    let y = (Rational::from_integer(BigInt::from(3)) * &p1 - &p2) / Rational::from_integer(BigInt::from(5));
    let x = &p1 - Rational::from_integer(BigInt::from(3)) * &y;
    let c = -y.clone();
    QuadraticFibIdentity {
        quadratic: vec![((i, 0), Rational::one())],
        linear: vec![(0, -x), (1, -y)],
        sign: -c,
    }
}

fn check(name: &str, passed: bool, detail: String) -> NamedCheck {
    NamedCheck::new(name, passed, detail)
}

fn first_bad(range: impl IntoIterator<Item = i64>, ok: impl Fn(i64) -> bool) -> Option<i64> {
    range.into_iter().find(|&k| !ok(k))
}

fn detail(bad: Option<i64>, what: &str) -> String {
    match bad {
        None => format!("holds for all checked {what}"),
        Some(k) => format!("fails at {what} = {k}"),
    }
}

/// The sequence-level identities between `F`, `L`, `H` for `k = 0, …, k_max`:
/// `F_{k+1} = L_k + F_k`, `L_{k+1} = 5F_{k+1} + L_k`, `H_{k+1} = H_k + F_{k+1}`,
/// `H_{k+1} = Σ_{i ≤ k+1} F_i`, `L_k = 5H_k + 1`, `F_{k+1}² − F_k F_{k+2} = 1`.
pub fn flh_identities(k_max: i64) -> Vec<NamedCheck> {
    let ks = || 0..=k_max;
    let five = BigInt::from(5);
    let mut out = Vec::new();
    let bad = first_bad(ks(), |k| big_f(k + 1) == big_l(k) + big_f(k));
    out.push(check("F(k+1) = L(k) + F(k)", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(ks(), |k| big_l(k + 1) == &five * big_f(k + 1) + big_l(k));
    out.push(check("L(k+1) = 5F(k+1) + L(k)", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(ks(), |k| big_h(k + 1) == big_h(k) + big_f(k + 1));
    out.push(check("H(k+1) = H(k) + F(k+1)", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(ks(), |k| big_h(k + 1) == (1..=k + 1).map(big_f).sum::<BigInt>());
    out.push(check("H(k+1) = sum F(i)", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(ks(), |k| big_l(k) == &five * big_h(k) + 1);
    out.push(check("L(k) = 5H(k) + 1", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(ks(), |k| big_f(k + 1) * big_f(k + 1) - big_f(k) * big_f(k + 2) == BigInt::one());
    out.push(check("F(k+1)^2 - F(k)F(k+2) = 1", bad.is_none(), detail(bad, "k")));
    out
}

/// The left side minus the right side of
/// `(L_k + jF_{k+1})² − 7(L_{k−1} + jF_k)(L_k + jF_{k+1}) + (L_{k−1} + jF_k)² = j² − 5j − 5`.
pub fn lucas_quadratic_defect(k: i64, j: i64) -> BigInt {
    let jj = BigInt::from(j);
    let p = big_l(k) + &jj * big_f(k + 1);
    let q = big_l(k - 1) + &jj * big_f(k);
    &p * &p - BigInt::from(7) * &q * &p + &q * &q - (&jj * &jj - BigInt::from(5) * &jj - 5)
}

/// Every identity used by the staircase constructions, checked for indices
/// up to `max_index`, plus the three-point certificate consistency of the
/// quadratic identities.
pub fn identity_suite(max_index: i64) -> Vec<NamedCheck> {
    let mut out = Vec::new();
    let ns = || 1..=max_index;
    let bad = first_bad(ns(), |n| g(n + 1) == BigInt::from(3) * g(n) - g(n - 1));
    out.push(check("g(n+1) = 3g(n) - g(n-1)", bad.is_none(), detail(bad, "n")));
    let bad = first_bad(ns(), |n| g(n) * g(n) + 1 == g(n - 1) * g(n + 1));
    out.push(check("g(n)^2 + 1 = g(n-1)g(n+1)", bad.is_none(), detail(bad, "n")));
    let named = [
        ("cassini", identity_cassini()),
        ("doubling (odd)", identity_doubling_odd()),
        ("doubling (even)", identity_doubling_even()),
        ("5f(s)^2 = -f(2s) + 2f(2s+1) - 2(-1)^s", identity_square()),
        ("5f(s+2)f(s) = f(2s+1) + f(2s+3) - 3(-1)^s", identity_shift_two()),
    ];
    for (name, id) in named {
        match verify_identity(&id, max_index) {
            Ok(rep) => out.push(check(
                name,
                rep.holds && rep.certificate_consistent(),
                detail(rep.first_failure, "s"),
            )),
            Err(e) => out.push(check(name, false, e.to_string())),
        }
    }
    for i in 0..=6 {
        let name = format!("f(s+{i})f(s) decomposition");
        match verify_identity(&product_decomposition(i), max_index) {
            Ok(rep) => out.push(check(&name, rep.holds, detail(rep.first_failure, "s"))),
            Err(e) => out.push(check(&name, false, e.to_string())),
        }
    }
    out.extend(flh_identities(max_index));
    let mut bad = None;
    'outer: for j in 1..=12 {
        for k in 1..=max_index {
            if !lucas_quadratic_defect(k, j).is_zero() {
                bad = Some((k, j));
                break 'outer;
            }
        }
    }
    out.push(check(
        "Lucas quadratic form = j^2 - 5j - 5 (j <= 12)",
        bad.is_none(),
        match bad {
            None => "holds for all checked (k, j)".to_string(),
            Some((k, j)) => format!("fails at k = {k}, j = {j}"),
        },
    ));
    // 3d_k(i) = F_{k+2} + (j−5)F_{k+1} + (j−6)F_k with j = 1 + 3i, for i = 0..=5.
    let bad = first_bad(1..=max_index, |k| {
        (0..=5).all(|i: i64| {
            let j = BigInt::from(1 + 3 * i);
            let lhs = big_f(k + 2) + (&j - 5) * big_f(k + 1) + (&j - 6) * big_f(k);
            lhs == BigInt::from(3) * (h(2 * k + 2) + BigInt::from(i - 2) * h(2 * k + 1))
        })
    });
    out.push(check("3d_k(i) = 3h(2k+2) + 3(i-2)h(2k+1)", bad.is_none(), detail(bad, "k")));
    let bad = first_bad(0..=max_index, |k| fib(4 * k + 8) + fib(4 * k + 4) == BigInt::from(3) * fib(4 * k + 6));
    out.push(check("f(4k+8) + f(4k+4) = 3f(4k+6)", bad.is_none(), detail(bad, "k")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn sequences() {
        let gs: Vec<BigInt> = (1..=11).map(g).collect();
        let expect = [1, 2, 5, 13, 34, 89, 233, 610, 1597, 4181, 10946];
        assert_eq!(gs, expect.iter().map(|&x| bi(x)).collect::<Vec<_>>());
        assert_eq!(g(0), bi(1));
        let hs: Vec<BigInt> = (1..=6).map(h).collect();
        assert_eq!(hs, [1, 3, 8, 21, 55, 144].iter().map(|&x| bi(x)).collect::<Vec<_>>());
        assert_eq!((1..=4).map(big_f).collect::<Vec<_>>(), vec![bi(1), bi(7), bi(48), bi(329)]);
        assert_eq!((0..=4).map(big_l).collect::<Vec<_>>(), vec![bi(1), bi(6), bi(41), bi(281), bi(1926)]);
        assert_eq!((0..=5).map(big_h).collect::<Vec<_>>(), vec![bi(0), bi(1), bi(8), bi(56), bi(385), bi(2640)]);
        assert_eq!(fib(-1), bi(1));
        assert_eq!(fib(-2), bi(-1));
        assert_eq!(fib(-5), bi(5));
        assert_eq!(lucas(1), bi(1));
        assert_eq!(lucas(2), bi(3));
    }

    #[test]
    fn identities_verify() {
        assert!(verify_identity(&identity_square(), 40).unwrap().holds);
        assert!(verify_identity(&identity_shift_two(), 40).unwrap().holds);
        let perturbed = QuadraticFibIdentity::new(&[((0, 0), 5)], &[(0, 1), (1, -2)], 3);
        let rep = verify_identity(&perturbed, 40).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.first_failure, Some(0));
        assert!(rep.certificate_consistent());
    }

    #[test]
    fn too_few_points() {
        let id = QuadraticFibIdentity::new(&[((-10, -10), 1)], &[], 0);
        assert_eq!(verify_identity(&id, 11), Err(TooFewPoints { valid: 2, s_max: 11 }));
    }

    #[test]
    fn suite_passes() {
        for c in identity_suite(30) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn shift_and_combine() {
        let id = identity_square().shifted(3).combine(&Rational::from_integer(bi(-2)), &identity_cassini());
        assert!(verify_identity(&id, 30).unwrap().holds);
    }
}
