//! The enumeration programs: all solutions of `Σm = a, Σm² = b`, the point
//! search for classes obstructive at a given `a`, and the interval search on
//! `]7 + 1/(k+1), 7 + 1/k[`.
//!
//! All rounding is exact: `d/√x` is never formed in floating point.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::classes::{cmp_with_sqrt, is_member, ExceptionalClass};
use crate::num::{ceil_sqrt, floor_sqrt, format_rational, round_sqrt, Rational};
use crate::weights::{weight_expansion, WeightError};

/// Invalid search input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("interval index k must be in 1..=8, got {0}")]
    IntervalIndex(i64),
    #[error("degree bound must be positive, got {0}")]
    NonPositiveBound(i64),
    #[error("point searches need a > 1, got {0}")]
    PointTooSmall(String),
    #[error("value {0} does not fit the search's integer range")]
    Overflow(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn visit_solutions(a: i64, b: i64, cap: i64, prefix: &mut Vec<i64>, out: &mut dyn FnMut(&[i64])) {
    let a2 = a as i128 * a as i128;
    let b128 = b as i128;
    if a2 < b128 {
        return;
    }
    if a2 == b128 {
        if a <= cap {
            if a > 0 {
                prefix.push(a);
                out(prefix);
                prefix.pop();
            } else {
                out(prefix);
            }
        }
        return;
    }
    // Dead branches: entries ≥ 1 force b ≥ a, entries ≤ cap force b ≤ cap·a.
    if b < a || b128 > cap as i128 * a as i128 {
        return;
    }
    let top = (b as f64).sqrt() as i64 + 1;
    let top = (0..=top).rev().find(|&i| i as i128 * i as i128 <= b128).unwrap_or(0).min(cap);
    for i in 1..=top {
        prefix.push(i);
        visit_solutions(a - i, b - i * i, i, prefix, out);
        prefix.pop();
    }
}

/// All nonincreasing vectors of positive integers with entries at most `cap`,
/// sum `a` and sum of squares `b`, in lexicographic order.
///
/// `(0, 0)` has the single solution `()`, the empty vector.
pub fn solutions_dio(a: i64, b: i64, cap: i64) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    if a >= 0 && b >= 0 && cap >= 0 {
        visit_solutions(a, b, cap, &mut Vec::new(), &mut |v| {
            out.insert(v.to_vec());
        });
    }
    out.into_iter().collect()
}

/// [`solutions_dio`] with the natural cap `min(a, ⌊√b⌋)`.
pub fn solutions_all(a: i64, b: i64) -> Vec<Vec<i64>> {
    if a < 0 || b < 0 {
        return Vec::new();
    }
    let cap = BigInt::from(b).sqrt().to_i64().unwrap_or(0).min(a);
    solutions_dio(a, b, cap)
}

/// Every member of `E` with `0 ≤ d ≤ d_max` and at most `max_len` nonzero
/// entries, found by enumerating all Diophantine tuples and reducing each.
/// Sorted by `d`, then lexicographically.
pub fn enumerate_members(d_max: i64, max_len: usize) -> Vec<ExceptionalClass> {
    // d = 0 forces Σm² = 1 and Σm = −1, i.e. the single tuple (0; −1).
    let mut out = vec![ExceptionalClass::new(0, vec![-1])];
    for d in 1..=d_max {
        for m in solutions_all(3 * d - 1, d * d + 1) {
            if m.len() <= max_len {
                let c = ExceptionalClass::new(d, m);
                if is_member(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn to_i64(x: &BigInt) -> Result<i64, SearchError> {
    x.to_i64().ok_or_else(|| SearchError::Overflow(x.to_string()))
}

fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Candidate classes of degree `d` obstructive at `a` in the weak sense
/// `μ ≥ √a`, with `ℓ(m) = ℓ(a)`.
///
/// Each candidate is `⌊(d/√a)·w(a)⌋` plus, blockwise, one of the patterns
/// `0…0`, `10…0`, `1…1`, `1…10`, sorted; it must satisfy `Σm = 3d − 1`,
/// `Σm² = d² + 1` and have a positive last entry. Because the floor vector
/// is constant on blocks, a pattern only matters through its number of ones.
pub fn sol_at(a: &Rational, d: i64) -> Result<Vec<ExceptionalClass>, SearchError> {
    if *a <= Rational::one() {
        return Err(SearchError::PointTooSmall(format_rational(a)));
    }
    if d <= 0 {
        return Err(SearchError::NonPositiveBound(d));
    }
    let w = weight_expansion(a)?;
    let d2 = int(d) * int(d);
    let mut blocks = Vec::with_capacity(w.blocks().len());
    for (x, len) in w.blocks() {
        let f = to_i64(&floor_sqrt(&(&d2 * x * x / a)))?;
        blocks.push((f, *len as i64));
    }
    let base_sum: i128 = blocks.iter().map(|&(f, l)| f as i128 * l as i128).sum();
    let base_sq: i128 = blocks.iter().map(|&(f, l)| f as i128 * f as i128 * l as i128).sum();
    let target_sum = 3 * d as i128 - 1 - base_sum;
    let target_sq = d as i128 * d as i128 + 1 - base_sq;
    let mut max_rest = vec![0i128; blocks.len() + 1];
    for i in (0..blocks.len()).rev() {
        max_rest[i] = max_rest[i + 1] + blocks[i].1 as i128;
    }
    let flat = w.flatten();
    let mut found = BTreeSet::new();
    let mut ones = vec![0i64; blocks.len()];
    let mut ctx = SolCtx { blocks: &blocks, max_rest: &max_rest, flat: &flat, a, d, found: &mut found };
    ctx.choose(0, target_sum, target_sq, &mut ones);
    Ok(found.into_iter().collect())
}

struct SolCtx<'a> {
    blocks: &'a [(i64, i64)],
    max_rest: &'a [i128],
    flat: &'a [Rational],
    a: &'a Rational,
    d: i64,
    found: &'a mut BTreeSet<ExceptionalClass>,
}

impl SolCtx<'_> {
    fn choose(&mut self, b: usize, sum_left: i128, sq_left: i128, ones: &mut [i64]) {
        if sum_left < 0 || sum_left > self.max_rest[b] {
            return;
        }
        if b == self.blocks.len() {
            if sum_left == 0 && sq_left == 0 {
                self.accept(ones);
            }
            return;
        }
        let (f, len) = self.blocks[b];
        let mut options = vec![0, 1.min(len), len - 1, len];
        options.sort_unstable();
        options.dedup();
        for delta in options {
            ones[b] = delta;
            self.choose(b + 1, sum_left - delta as i128, sq_left - (2 * f as i128 + 1) * delta as i128, ones);
        }
        ones[b] = 0;
    }

    fn accept(&mut self, ones: &[i64]) {
        let mut v = Vec::with_capacity(self.flat.len());
        for (&(f, len), &delta) in self.blocks.iter().zip(ones) {
            v.extend(std::iter::repeat_n(f + 1, delta as usize));
            v.extend(std::iter::repeat_n(f, (len - delta) as usize));
        }
        v.sort_unstable_by(|x, y| y.cmp(x));
        if v.last().is_none_or(|&x| x <= 0) {
            return;
        }
        let mut dot = Rational::from_integer(BigInt::from(0));
        for (x, &m) in self.flat.iter().zip(&v) {
            dot += x * int(m);
        }
        let mu = dot / int(self.d);
        if cmp_with_sqrt(&mu, self.a) != std::cmp::Ordering::Less {
            self.found.insert(ExceptionalClass::new(self.d, v));
        }
    }
}

/// [`sol_at`] for `d = 1, …, d_max`, ordered by degree then entries.
pub fn sol_less(a: &Rational, d_max: i64) -> Result<Vec<ExceptionalClass>, SearchError> {
    if d_max <= 0 {
        return Err(SearchError::NonPositiveBound(d_max));
    }
    let per_d: Result<Vec<Vec<ExceptionalClass>>, SearchError> =
        (1..=d_max).into_par_iter().map(|d| sol_at(a, d)).collect();
    Ok(per_d?.into_iter().flatten().collect())
}

/// Tuning of the interval search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntervalSearchOptions {
    /// Extra slack added on both sides of the ranges for `m₁` and `m₈…m_{7+k}`.
    pub widen: i64,
}

/// The ranges `[m1, M1]` for `m₁ = … = m₇` and `[mx, Mx]` for
/// `m₈, …, m_{7+k}`, and the slack `f` of the second-block relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrelistBounds {
    pub m1: i64,
    pub big_m1: i64,
    pub mx: i64,
    pub big_mx: i64,
    pub f: i64,
}

fn check_k(k: i64) -> Result<(), SearchError> {
    if (1..=8).contains(&k) {
        Ok(())
    } else {
        Err(SearchError::IntervalIndex(k))
    }
}

/// The enumeration ranges for degree `d` on `]7 + 1/(k+1), 7 + 1/k[`:
/// `m1 = Round(d/√(7+v))`, `M1 = Round(d/√(7+u))`,
/// `mx = ⌊du/√(7+v)⌋ − 1`, `Mx = ⌈dv/√(7+u)⌉ + 1` with `u = 1/(k+1)`,
/// `v = 1/k`, and `f = ⌈√(k+2)⌉ − 1`.
pub fn prelist_bounds(k: i64, d: i64, opts: IntervalSearchOptions) -> Result<PrelistBounds, SearchError> {
    check_k(k)?;
    let u = Rational::new(BigInt::one(), BigInt::from(k + 1));
    let v = Rational::new(BigInt::one(), BigInt::from(k));
    let seven = int(7);
    let d2 = int(d) * int(d);
    let lo = &seven + &v;
    let hi = &seven + &u;
    let m1 = to_i64(&round_sqrt(&(&d2 / &lo)))? - opts.widen;
    let big_m1 = to_i64(&round_sqrt(&(&d2 / &hi)))? + opts.widen;
    let mx = to_i64(&floor_sqrt(&(&d2 * &u * &u / &lo)))? - 1 - opts.widen;
    let big_mx = to_i64(&ceil_sqrt(&(&d2 * &v * &v / &hi)))? + 1 + opts.widen;
    let f = to_i64(&ceil_sqrt(&int(k + 2)))? - 1;
    Ok(PrelistBounds { m1, big_m1, mx, big_mx, f })
}

/// The preliminary candidates of degree `d` for the interval `k`: the first
/// `7 + k + 1` entries from the ranges of [`prelist_bounds`], the rest from
/// [`solutions_dio`].
pub fn prelist(k: i64, d: i64, opts: IntervalSearchOptions) -> Result<Vec<Vec<i64>>, SearchError> {
    let mut out = BTreeSet::new();
    visit_prelist(k, d, opts, &mut |v| {
        out.insert(v.to_vec());
    })?;
    Ok(out.into_iter().collect())
}

fn visit_prelist(k: i64, d: i64, opts: IntervalSearchOptions, out: &mut dyn FnMut(&[i64])) -> Result<(), SearchError> {
    let b = prelist_bounds(k, d, opts)?;
    let ku = k as usize;
    for first in b.m1..=b.big_m1 {
        for second in b.mx..=b.big_mx {
            for pattern in 0..3 {
                for t in -b.f..=b.f {
                    let mut m: Vec<i64> = std::iter::repeat_n(first, 7).chain(std::iter::repeat_n(second, ku)).collect();
                    match pattern {
                        0 => m[6 + ku] -= 1,
                        2 => m[7] += 1,
                        _ => {}
                    }
                    let s: i64 = m[7..7 + ku].iter().sum();
                    m.push(m[6] - s + t);
                    let sorted = m.windows(2).all(|p| p[0] >= p[1]);
                    let last = *m.last().expect("nonempty");
                    if !sorted || last <= 0 {
                        continue;
                    }
                    let sum: i64 = m.iter().sum();
                    let sq: i64 = m.iter().map(|x| x * x).sum();
                    let (ra, rb) = (3 * d - 1 - sum, d * d + 1 - sq);
                    if ra < 0 || rb < 0 {
                        continue;
                    }
                    let mut prefix = m;
                    visit_solutions(ra, rb, last, &mut prefix, out);
                }
            }
        }
    }
    Ok(())
}

/// The filters that discard preliminary candidates which cannot be
/// obstructive somewhere in the open interval (other than at `z_k`).
pub fn passes_interval_filters(k: i64, m: &[i64]) -> bool {
    let l = m.len();
    let ku = k as usize;
    if l <= 9 + ku {
        return false;
    }
    if m[l - 2] - m[l - 1] > 1 {
        return false;
    }
    if m[l - 3] > m[l - 2] + 1 && (m[l - 3] - m[l - 2] - m[l - 1]).abs() > 1 {
        return false;
    }
    if k == 1 && l >= 10 && m[8] - m[9] > 1 && (m[7] - (m[8] + m[9])).abs() > 1 {
        return false;
    }
    let rest: i64 = m[7 + ku..].iter().sum();
    let x = m[6 + ku] - rest;
    let y = (l - ku - 6) as i64;
    // Reject when x ≥ √y.
    !(x >= 0 && x * x >= y)
}

/// Filtered candidates of degree `d` for interval `k`.
pub fn inter_sol(k: i64, d: i64, opts: IntervalSearchOptions) -> Result<Vec<ExceptionalClass>, SearchError> {
    let mut out = BTreeSet::new();
    visit_prelist(k, d, opts, &mut |v| {
        if passes_interval_filters(k, v) {
            out.insert(v.to_vec());
        }
    })?;
    Ok(out.into_iter().map(|m| ExceptionalClass::new(d, m)).collect())
}

/// [`inter_sol`] for `d = 1, …, d_max`, ordered by degree then entries.
pub fn inter_sol_less(k: i64, d_max: i64) -> Result<Vec<ExceptionalClass>, SearchError> {
    inter_sol_less_with(k, d_max, IntervalSearchOptions::default())
}

/// [`inter_sol_less`] with explicit options.
pub fn inter_sol_less_with(k: i64, d_max: i64, opts: IntervalSearchOptions) -> Result<Vec<ExceptionalClass>, SearchError> {
    check_k(k)?;
    if d_max <= 0 {
        return Err(SearchError::NonPositiveBound(d_max));
    }
    let per_d: Result<Vec<Vec<ExceptionalClass>>, SearchError> =
        (1..=d_max).into_par_iter().map(|d| inter_sol(k, d, opts)).collect();
    Ok(per_d?.into_iter().flatten().collect())
}

/// `(D(z_k), D_k)`: the degree bounds for the point search at `z_k` and the
/// interval search for `k`.
pub fn default_bounds(k: i64) -> Result<(i64, i64), SearchError> {
    crate::tables::default_bounds(k).ok_or(SearchError::IntervalIndex(k))
}
