//! The lattice-point side of the capacity problem: the sequences `N(a,b)`,
//! point counts in the triangles `T^a_{A,B}`, the numbers `k_{A,B}(a)` and
//! lower bounds for their supremum `K(a)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::num::{format_rational, Rational};
use crate::report::NamedCheck;
use crate::tables::{self, HIDDEN_TABLE, LATTICE_TABLE};

/// Invalid lattice-counting input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EchError {
    #[error("slope must be a positive rational, got {0}")]
    NonPositiveSlope(String),
    #[error("sequence generators must be positive, got {0} and {1}")]
    NonPositiveGenerators(String, String),
    #[error("anchor ({0}, {1}) lies below the origin's level line")]
    NegativeLevel(i64, i64),
    #[error("slope {0} has numerator or denominator outside the supported range")]
    SlopeTooLarge(String),
    #[error("the slant edge through ({0}, {1}) contains no lattice point of the quadrant")]
    EmptySlantEdge(i64, i64),
    #[error("row count {rows} and subdivision count {parts} disagree")]
    CountMismatch { rows: i128, parts: i128 },
}

/// The first `count` terms of `N(a,b)`: all `ma + nb` with `m, n ≥ 0`,
/// sorted nondecreasingly with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchSequence {
    pub a: Rational,
    pub b: Rational,
    pub terms: Vec<Rational>,
}

impl EchSequence {
    /// `self ⪯ other` on the common prefix: each term is no greater than the
    /// corresponding term of `other`.
    pub fn precedes(&self, other: &EchSequence) -> bool {
        self.terms.iter().zip(&other.terms).all(|(x, y)| x <= y)
    }
}

/// The first `count` terms of `N(a,b)`.
pub fn ech_sequence(a: &Rational, b: &Rational, count: usize) -> Result<EchSequence, EchError> {
    if !a.is_positive() || !b.is_positive() {
        return Err(EchError::NonPositiveGenerators(format_rational(a), format_rational(b)));
    }
    let mut bound = if a > b { a.clone() } else { b.clone() };
    loop {
        let mut terms = Vec::new();
        let mut m = Rational::zero();
        while m <= bound {
            let mut v = m.clone();
            while v <= bound {
                terms.push(v.clone());
                v += b;
            }
            m += a;
        }
        if terms.len() >= count {
            terms.sort();
            terms.truncate(count);
            return Ok(EchSequence { a: a.clone(), b: b.clone(), terms });
        }
        bound = &bound * Rational::from_integer(BigInt::from(2));
    }
}

/// The closed triangle `{x, y ≥ 0, x + a·y ≤ A + a·B}` for rational `a = p/q`.
///
/// The anchor `(A, B)` only fixes the level of the slant edge; it may lie
/// outside the quadrant (e.g. `A = −1`) as long as the level is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeTriangle {
    p: i64,
    q: i64,
    anchor: (i64, i64),
}

/// Point counts of a triangle, by region of the five-part subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubdivisionCounts {
    /// `0 ≤ x < A₁`, `y ≥ B₁`.
    pub alpha: i128,
    /// `0 ≤ x < A₁`, `0 ≤ y < B₁`.
    pub beta: i128,
    /// `A₁ ≤ x ≤ A₂`, `B₂ ≤ y ≤ B₁`, including the whole slant edge.
    pub gamma: i128,
    /// `A₁ ≤ x < A₂`, `0 ≤ y < B₂`.
    pub delta: i128,
    /// `x ≥ A₂`, `0 ≤ y < B₂`.
    pub epsilon: i128,
}

impl SubdivisionCounts {
    pub fn total(&self) -> i128 {
        self.alpha + self.beta + self.gamma + self.delta + self.epsilon
    }
}

/// Result of [`lattice_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeCount {
    /// `#(T ∩ Z²)`.
    pub total: i128,
    /// Number of lattice points on the slant edge.
    pub s: i128,
    /// The slant-edge point with the smallest `x`.
    pub first: (i64, i64),
    /// The slant-edge point with the largest `x`.
    pub last: (i64, i64),
    pub parts: SubdivisionCounts,
}

impl LatticeTriangle {
    /// The triangle of slope parameter `a` whose slant edge passes through `(A, B)`.
    pub fn new(a: &Rational, anchor_a: i64, anchor_b: i64) -> Result<Self, EchError> {
        if !a.is_positive() {
            return Err(EchError::NonPositiveSlope(format_rational(a)));
        }
        let (p, q) = match (a.numer().to_i64(), a.denom().to_i64()) {
            (Some(p), Some(q)) if p < (1 << 40) && q < (1 << 40) => (p, q),
            _ => return Err(EchError::SlopeTooLarge(format_rational(a))),
        };
        let t = LatticeTriangle { p, q, anchor: (anchor_a, anchor_b) };
        if t.level_numer() < 0 {
            return Err(EchError::NegativeLevel(anchor_a, anchor_b));
        }
        Ok(t)
    }

    /// The slope parameter `a`.
    pub fn slope(&self) -> Rational {
        Rational::new(BigInt::from(self.p), BigInt::from(self.q))
    }

    pub fn anchor(&self) -> (i64, i64) {
        self.anchor
    }

    /// `q·(A + aB) = qA + pB`.
    fn level_numer(&self) -> i128 {
        self.anchor.0 as i128 * self.q as i128 + self.anchor.1 as i128 * self.p as i128
    }

    /// The level `A + aB` of the slant edge.
    pub fn level(&self) -> Rational {
        Rational::new(BigInt::from(self.level_numer()), BigInt::from(self.q))
    }

    /// `⌊(level − a·y)⌋`, the largest `x` in row `y` (negative if the row is empty).
    fn row_max(&self, y: i128) -> i128 {
        Integer::div_floor(&(self.level_numer() - self.p as i128 * y), &(self.q as i128))
    }

    fn top_row(&self) -> i128 {
        Integer::div_floor(&self.level_numer(), &(self.p as i128))
    }

    /// `#(T ∩ Z²)` by summing over rows.
    pub fn count_by_rows(&self) -> i128 {
        (0..=self.top_row()).map(|y| self.row_max(y) + 1).sum()
    }

    /// The lattice points of the slant edge, in order of increasing `y`
    /// (so decreasing `x`).
    pub fn slant_points(&self) -> Vec<(i64, i64)> {
        // x·q + y·p = level·q forces y ≡ B (mod q).
        let q = self.q as i128;
        let mut y = (self.anchor.1 as i128).rem_euclid(q);
        let mut out = Vec::new();
        while y <= self.top_row() {
            let x = self.level_numer() - self.p as i128 * y;
            debug_assert!(x % q == 0);
            out.push(((x / q) as i64, y as i64));
            y += q;
        }
        out
    }

    /// Counts by the five-part subdivision.
    pub fn count_by_subdivision(&self) -> Result<(SubdivisionCounts, Vec<(i64, i64)>), EchError> {
        let slant = self.slant_points();
        let (&(a2, b2), &(a1, b1)) = match (slant.first(), slant.last()) {
            (Some(l), Some(f)) => (l, f),
            _ => return Err(EchError::EmptySlantEdge(self.anchor.0, self.anchor.1)),
        };
        let (a1, b1, a2, b2) = (a1 as i128, b1 as i128, a2 as i128, b2 as i128);
        let s = slant.len() as i128;
        let alpha = (b1..=self.top_row()).map(|y| (self.row_max(y) + 1).clamp(0, a1)).sum();
        let beta = a1 * b1;
        let gamma = ((a2 - a1 + 1) * (b1 - b2 + 1) - s) / 2 + s;
        let delta = (a2 - a1) * b2;
        let epsilon = (0..b2).map(|y| (self.row_max(y) - a2 + 1).max(0)).sum();
        Ok((SubdivisionCounts { alpha, beta, gamma, delta, epsilon }, slant))
    }
}

/// Counts the lattice points of `t` by rows and by the subdivision, which
/// must agree.
pub fn lattice_count(t: &LatticeTriangle) -> Result<LatticeCount, EchError> {
    let rows = t.count_by_rows();
    let (parts, slant) = t.count_by_subdivision()?;
    if parts.total() != rows {
        return Err(EchError::CountMismatch { rows, parts: parts.total() });
    }
    Ok(LatticeCount {
        total: rows,
        s: slant.len() as i128,
        first: *slant.last().expect("nonempty slant edge"),
        last: slant[0],
        parts,
    })
}

/// `N(d) = ½(d+1)(d+2) + s − 1`.
pub fn n_of_d(d: i64, s: i128) -> i128 {
    let d = d as i128;
    (d + 1) * (d + 2) / 2 + s - 1
}

/// The smallest positive `d` with `count ≤ ½(d+1)(d+2)`.
pub fn min_degree(count: i128) -> i64 {
    let mut d: i64 = ((2.0 * count.max(1) as f64).sqrt() as i64 - 2).max(1);
    while d > 1 && ((d as i128) * (d as i128 + 1) / 2) >= count {
        d -= 1;
    }
    while ((d as i128 + 1) * (d as i128 + 2) / 2) < count {
        d += 1;
    }
    d
}

/// `k_{A,B}(a) = (A + Ba)/d` with `d` the smallest positive integer such that
/// `#(T^a_{A,B} ∩ Z²) ≤ ½(d+1)(d+2)`.
pub fn k_ab(a: &Rational, anchor_a: i64, anchor_b: i64) -> Result<Rational, EchError> {
    let t = LatticeTriangle::new(a, anchor_a, anchor_b)?;
    let d = min_degree(t.count_by_rows());
    Ok(t.level() / Rational::from_integer(BigInt::from(d)))
}

/// The one-sided bounds at a rational `a` from the triangle through `(A, B)`:
/// just below (resp. above) `a` the triangle through the first (resp. last)
/// slant point loses its other `s − 1` slant points, so with `d` minimal for
/// `count − (s − 1)` one gets `K(z) ≥ (A₁ + zB₁)/d` for `z ↑ a` and
/// `K(z) ≥ (A₂ + zB₂)/d` for `z ↓ a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSidedBound {
    pub d: i64,
    pub left: (i64, i64),
    pub right: (i64, i64),
    /// The common value `(A₁ + aB₁)/d = (A₂ + aB₂)/d` at `a`.
    pub value: Rational,
    pub count: LatticeCount,
}

/// The one-sided bounds of [`OneSidedBound`] for the triangle through `(A, B)`.
pub fn one_sided_bound(a: &Rational, anchor_a: i64, anchor_b: i64) -> Result<OneSidedBound, EchError> {
    let t = LatticeTriangle::new(a, anchor_a, anchor_b)?;
    let count = lattice_count(&t)?;
    let d = min_degree(count.total - (count.s - 1));
    Ok(OneSidedBound {
        d,
        left: count.first,
        right: count.last,
        value: t.level() / Rational::from_integer(BigInt::from(d)),
        count,
    })
}

/// A lower bound for `K(a)` over a finite window of anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KBound {
    pub value: Rational,
    /// An anchor attaining the value (the smallest in lexicographic order).
    pub argmax: (i64, i64),
    pub d: i64,
    /// The scanned window `0 ≤ A ≤ A_max`, `0 ≤ B ≤ B_max`.
    pub window: (i64, i64),
}

fn best_in_row(p: i64, q: i64, a_val: i64, b_max: i64) -> Option<(Rational, (i64, i64), i64)> {
    let mut best: Option<(Rational, (i64, i64), i64)> = None;
    for b in 0..=b_max {
        let t = LatticeTriangle { p, q, anchor: (a_val, b) };
        let rows = t.count_by_rows();
        let s = t.slant_points().len() as i128;
        let d = min_degree(rows - (s - 1).max(0));
        let v = t.level() / Rational::from_integer(BigInt::from(d));
        if best.as_ref().is_none_or(|(bv, _, _)| &v > bv) {
            best = Some((v, (a_val, b), d));
        }
    }
    best
}

/// `max (A + aB)/d` over `0 ≤ A ≤ A_max`, `0 ≤ B ≤ B_max`, using the left
/// one-sided bound of each triangle, which is a lower bound for `K(a)`.
pub fn k_lower_bound(a: &Rational, a_max: i64, b_max: i64) -> Result<KBound, EchError> {
    let t0 = LatticeTriangle::new(a, 0, 0)?;
    let (p, q) = (t0.p, t0.q);
    let best = (0..=a_max.max(0))
        .into_par_iter()
        .filter_map(|av| best_in_row(p, q, av, b_max.max(0)))
        .reduce_with(|x, y| match x.0.cmp(&y.0) {
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        })
        .expect("window contains the origin");
    Ok(KBound { value: best.0, argmax: best.1, d: best.2, window: (a_max, b_max) })
}

/// [`k_lower_bound`] on square windows `8, 16, 32, …`, stopping once the
/// value has been unchanged for two consecutive doublings or the window
/// exceeds `max_window`.
pub fn k_lower_bound_auto(a: &Rational, max_window: i64) -> Result<KBound, EchError> {
    let mut w = 8;
    let mut best = k_lower_bound(a, w, w)?;
    let mut stable = 0;
    while stable < 2 && w * 2 <= max_window {
        w *= 2;
        let next = k_lower_bound(a, w, w)?;
        if next.value == best.value {
            stable += 1;
        } else {
            stable = 0;
        }
        best = next;
    }
    Ok(best)
}

/// The triangle `T_n` with vertices `(0,0)`, `(g_{n+2}, 0)`, `(0, g_n)` as
/// `T^{b_n}_{0, g_n}`.
pub fn staircase_triangle(n: i64) -> Result<LatticeTriangle, EchError> {
    let gn = crate::fib::g(n);
    let bn = Rational::new(crate::fib::g(n + 2), gn.clone());
    LatticeTriangle::new(&bn, 0, gn.to_i64().ok_or_else(|| EchError::SlopeTooLarge(format_rational(&bn)))?)
}

/// `½(g_n + 1)(g_{n+2} + 1) + 1`, the predicted number of points of `T_n`.
pub fn staircase_triangle_formula(n: i64) -> BigInt {
    let (a, b) = (crate::fib::g(n) + 1, crate::fib::g(n + 2) + 1);
    let prod = a * b;
    debug_assert!(Integer::is_even(&prod));
    prod / 2 + 1
}

fn check_row(
    center: (i64, i64),
    class: &str,
    anchor: (i64, i64),
    expected: (i64, i64),
    mu: Option<Rational>,
) -> Result<NamedCheck, EchError> {
    let a = tables::center(center);
    let d = tables::class(class).d;
    let t = LatticeTriangle::new(&a, anchor.0, anchor.1)?;
    let by_rows = t.count_by_rows();
    let (parts, slant) = t.count_by_subdivision()?;
    let s = slant.len() as i128;
    let formula = n_of_d(d, s);
    let mut bad = Vec::new();
    if by_rows != expected.0 as i128 || parts.total() != by_rows {
        bad.push(format!("count rows {by_rows} / parts {} ≠ {}", parts.total(), expected.0));
    }
    if s != expected.1 as i128 {
        bad.push(format!("s = {s} ≠ {}", expected.1));
    }
    if formula != by_rows {
        bad.push(format!("N(d) = {formula} ≠ {by_rows}"));
    }
    if let Some(mu) = mu {
        let bound = one_sided_bound(&a, anchor.0, anchor.1)?;
        if bound.value != mu {
            bad.push(format!("left value {} ≠ μ = {}", format_rational(&bound.value), format_rational(&mu)));
        }
        // The first slant point sits one column left of p and one row of
        // slope q below the anchor.
        let first = (center.0 - 1, anchor.1 - center.1);
        if bound.left != first {
            bad.push(format!("first slant point {:?} ≠ {:?}", bound.left, first));
        }
    }
    let detail = if bad.is_empty() {
        format!("N = {by_rows} = N({d}), s = {s}")
    } else {
        bad.join("; ")
    };
    Ok(NamedCheck::new(class, bad.is_empty(), detail))
}

/// Recomputes every lattice-table row: the point count of the triangle
/// at the tabulated anchor by rows and by the subdivision, the number `s`
/// of slant-edge points, and `N(A,B) = ½(d+1)(d+2) + s − 1`. Hidden-class rows
/// also check that the first slant point gives the one-sided value `μ`.
pub fn verify_table_t0() -> Result<Vec<NamedCheck>, EchError> {
    let mut out = Vec::new();
    for row in LATTICE_TABLE {
        let first_last = {
            let a = tables::center(row.center);
            lattice_count(&LatticeTriangle::new(&a, row.ab.0, row.ab.1)?)?
        };
        let mut check = check_row(row.center, row.class, row.ab, (row.count, row.s), None)?;
        if row.n_of_d != row.count {
            check.passed = false;
            check.detail = format!("printed N(d) = {} ≠ {}", row.n_of_d, row.count);
        } else if (first_last.first, first_last.last) != (row.ab, row.ab_prime) {
            check.passed = false;
            check.detail = format!("slant ends {:?}, {:?}", first_last.first, first_last.last);
        }
        out.push(check);
    }
    for row in HIDDEN_TABLE {
        let mu = Rational::new(BigInt::from(row.mu.0), BigInt::from(row.mu.1));
        out.push(check_row(row.center, row.class, row.ab, (row.count, row.s), Some(mu))?);
    }
    Ok(out)
}
