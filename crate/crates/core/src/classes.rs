//! Exceptional classes `(d; m_1, …, m_M)`: Diophantine conditions, Cremona
//! reduction, intersection numbers, the obstruction `μ(d;m)(a) = m·w(a)/d`,
//! its one-sided linear forms near a point, and the exact search for the
//! centre of an obstruction interval.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::num::{sqrt_lower, sqrt_upper, Rational};
use crate::quadratic::QuadraticNumber;
use crate::weights::{one_sided_forms, weight_expansion, LinearForm, Side, WeightError};

/// Errors raised by class operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("cannot parse class `{0}` (expected `d;m1,m2,…` with optional `x^k` repetition)")]
    Parse(String),
    #[error("{0} is not Diophantine (needs Σm = 3d−1 and Σm² = d²+1)")]
    NotDiophantine(String),
    #[error("the obstruction of a class with d = 0 is undefined")]
    ZeroDegree,
    #[error("class {0} must have d > 0 and nonnegative entries for this operation")]
    Unsupported(String),
    #[error("class {0} has no centre: it is nowhere obstructive")]
    NoCenter(String),
    #[error("centre search for {class} exceeded its budget of {budget} nodes")]
    SearchBudget { class: String, budget: usize },
    #[error("reduction of {0} exceeded its iteration cap (this indicates a bug)")]
    IterationCap(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// A tuple `(d; m_1, …, m_M)`. Entries may be negative mid-reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExceptionalClass {
    pub d: i64,
    pub m: Vec<i64>,
}

impl ExceptionalClass {
    pub fn new(d: i64, m: Vec<i64>) -> Self {
        Self { d, m }
    }

    /// Builds a class from `(value, count)` runs, e.g. `[(3, 1), (2, 7)]`.
    pub fn from_runs(d: i64, runs: &[(i64, usize)]) -> Self {
        let mut m = Vec::new();
        for &(v, k) in runs {
            m.extend(std::iter::repeat_n(v, k));
        }
        Self { d, m }
    }

    /// True when the nonzero entries are nonincreasing and zeros trail them.
    pub fn is_ordered(&self) -> bool {
        let nz: Vec<i64> = self.m.iter().copied().filter(|&x| x != 0).collect();
        let nonzero_count = nz.len();
        nz.windows(2).all(|w| w[0] >= w[1]) && self.m[..nonzero_count].iter().all(|&x| x != 0)
    }

    /// The standard ordering: positives descending, then zeros, then negatives
    /// descending (a plain descending sort).
    pub fn ordered(&self) -> Self {
        let mut m = self.m.clone();
        m.sort_unstable_by(|a, b| b.cmp(a));
        Self { d: self.d, m }
    }

    /// The ordered class with trailing zeros removed.
    pub fn normalized(&self) -> Self {
        let mut c = self.ordered();
        while c.m.last() == Some(&0) {
            c.m.pop();
        }
        // Zeros in front of negatives are dropped as well.
        c.m.retain(|&x| x != 0);
        c
    }

    /// `ℓ(m)`: the number of positive entries.
    pub fn length(&self) -> usize {
        self.m.iter().filter(|&&x| x > 0).count()
    }

    /// The last positive entry of the ordered tuple.
    pub fn last_positive(&self) -> Option<i64> {
        self.m.iter().copied().filter(|&x| x > 0).min()
    }

    pub fn sum(&self) -> i128 {
        self.m.iter().map(|&x| x as i128).sum()
    }

    pub fn sum_sq(&self) -> i128 {
        self.m.iter().map(|&x| (x as i128) * (x as i128)).sum()
    }

    /// Compact rendering with `^k` runs, zeros omitted: `(6;3,2^7)`.
    pub fn compact(&self) -> String {
        let nz: Vec<i64> = self.m.iter().copied().filter(|&x| x != 0).collect();
        let mut parts = Vec::new();
        let mut i = 0;
        while i < nz.len() {
            let mut j = i;
            while j < nz.len() && nz[j] == nz[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(nz[i].to_string());
            } else {
                parts.push(format!("{}^{}", nz[i], j - i));
            }
            i = j;
        }
        format!("({};{})", self.d, parts.join(","))
    }

    /// Full rendering, zeros omitted: `(6;3,2,2,2,2,2,2,2)`.
    pub fn expanded(&self) -> String {
        let parts: Vec<String> = self.m.iter().filter(|&&x| x != 0).map(|x| x.to_string()).collect();
        format!("({};{})", self.d, parts.join(","))
    }

    /// JSON form `{"d": n, "m": [...]}` (zeros omitted).
    pub fn to_json_string(&self) -> String {
        let parts: Vec<String> = self.m.iter().filter(|&&x| x != 0).map(|x| x.to_string()).collect();
        format!("{{\"d\":{},\"m\":[{}]}}", self.d, parts.join(","))
    }
}

impl fmt::Display for ExceptionalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

impl FromStr for ExceptionalClass {
    type Err = ClassError;

    /// Parses `d;m1,m2,…` where each entry may be `x^k`; surrounding
    /// parentheses and whitespace are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ClassError::Parse(s.to_string());
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (d, rest) = body.split_once(';').ok_or_else(err)?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        let mut m = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (v, k) = match item.split_once('^') {
                Some((v, k)) => (v.trim(), k.trim().parse::<usize>().map_err(|_| err())?),
                None => (item, 1),
            };
            let v: i64 = v.parse().map_err(|_| err())?;
            m.extend(std::iter::repeat_n(v, k));
        }
        Ok(Self { d, m })
    }
}

/// `Σm = 3d − 1` and `Σm² = d² + 1`; `(0;−1)` satisfies both.
pub fn is_diophantine(c: &ExceptionalClass) -> bool {
    let d = c.d as i128;
    c.sum() == 3 * d - 1 && c.sum_sq() == d * d + 1
}

/// The Cremona transform of the first three entries (zero-padded).
pub fn cremona_transform(c: &ExceptionalClass) -> ExceptionalClass {
    let mut m = c.m.clone();
    while m.len() < 3 {
        m.push(0);
    }
    let (d, m1, m2, m3) = (c.d, m[0], m[1], m[2]);
    m[0] = d - m2 - m3;
    m[1] = d - m1 - m3;
    m[2] = d - m1 - m2;
    ExceptionalClass { d: 2 * d - m1 - m2 - m3, m }
}

/// Cremona transform followed by the standard ordering.
pub fn standard_move(c: &ExceptionalClass) -> ExceptionalClass {
    cremona_transform(c).ordered()
}

/// Why a class is not in `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NotInEReason {
    /// A state with `d > 0` has a negative entry.
    NegativeCoordinate,
    /// A reduced state `d > 0`, entries nonnegative, `m₁ + m₂ + m₃ ≤ d`.
    ReducedClass,
    /// A state with `d < 0` and entries other than the terminal `(0;−1)`.
    NegativeDegree,
}

impl NotInEReason {
    pub fn as_str(self) -> &'static str {
        match self {
            NotInEReason::NegativeCoordinate => "negative_coordinate",
            NotInEReason::ReducedClass => "reduced_class",
            NotInEReason::NegativeDegree => "negative_degree",
        }
    }
}

/// Outcome of Cremona reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    InE,
    NotInE(NotInEReason),
}

/// A verdict plus the ordered states visited, starting with the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub verdict: Verdict,
    pub trace: Vec<ExceptionalClass>,
}

fn terminal_verdict(c: &ExceptionalClass) -> Option<Verdict> {
    let nz: Vec<i64> = c.m.iter().copied().filter(|&x| x != 0).collect();
    if c.d == 0 {
        return Some(if nz == [-1] {
            Verdict::InE
        } else {
            Verdict::NotInE(NotInEReason::NegativeCoordinate)
        });
    }
    if c.d < 0 {
        return Some(Verdict::NotInE(NotInEReason::NegativeDegree));
    }
    if nz.iter().any(|&x| x < 0) {
        return Some(Verdict::NotInE(NotInEReason::NegativeCoordinate));
    }
    let top: i64 = c.m.iter().take(3).sum();
    if top <= c.d {
        return Some(Verdict::NotInE(NotInEReason::ReducedClass));
    }
    None
}

/// Decides membership in `E` by repeated standard Cremona moves.
///
/// Every move applied to a non-terminal state lowers `d` by
/// `m₁ + m₂ + m₃ − d > 0`, so the loop terminates; the cap `10·d + 10` only
/// guards against bugs.
pub fn reduce_class(c: &ExceptionalClass) -> Result<Reduction, ClassError> {
    if !is_diophantine(c) {
        return Err(ClassError::NotDiophantine(c.compact()));
    }
    let mut state = c.ordered();
    let cap = 10 * c.d.max(0) as u64 + 10;
    let mut trace = vec![state.clone()];
    for _ in 0..cap {
        if let Some(verdict) = terminal_verdict(&state) {
            return Ok(Reduction { verdict, trace });
        }
        state = standard_move(&state);
        trace.push(state.clone());
    }
    Err(ClassError::IterationCap(c.compact()))
}

/// The verdict only, without keeping the trace.
pub fn reduce_verdict(c: &ExceptionalClass) -> Result<Verdict, ClassError> {
    if !is_diophantine(c) {
        return Err(ClassError::NotDiophantine(c.compact()));
    }
    let mut state = c.ordered();
    let cap = 10 * c.d.max(0) as u64 + 10;
    for _ in 0..cap {
        if let Some(verdict) = terminal_verdict(&state) {
            return Ok(verdict);
        }
        state = standard_move(&state);
    }
    Err(ClassError::IterationCap(c.compact()))
}

fn membership_cache() -> &'static RwLock<HashMap<ExceptionalClass, bool>> {
    static CACHE: OnceLock<RwLock<HashMap<ExceptionalClass, bool>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Membership in `E` (false for non-Diophantine input), memoised in a
/// process-wide cache keyed by the normalized tuple.
pub fn is_member(c: &ExceptionalClass) -> bool {
    let key = c.normalized();
    if let Some(&v) = membership_cache().read().expect("cache lock").get(&key) {
        return v;
    }
    let v = matches!(reduce_verdict(&key), Ok(Verdict::InE));
    membership_cache().write().expect("cache lock").insert(key, v);
    v
}

/// The intersection number `d·d′ − m·m′` (zero-padded).
pub fn intersection(c1: &ExceptionalClass, c2: &ExceptionalClass) -> i128 {
    let dot: i128 = c1.m.iter().zip(&c2.m).map(|(&x, &y)| x as i128 * y as i128).sum();
    c1.d as i128 * c2.d as i128 - dot
}

/// `μ(d;m)(a) = m·w(a)/d`.
pub fn mu_at(c: &ExceptionalClass, a: &Rational) -> Result<Rational, ClassError> {
    if c.d == 0 {
        return Err(ClassError::ZeroDegree);
    }
    let w = weight_expansion(a)?;
    Ok(w.dot(&c.m) / Rational::from_integer(BigInt::from(c.d)))
}

/// Exact comparison of a rational `mu` against `√a`.
pub fn cmp_with_sqrt(mu: &Rational, a: &Rational) -> std::cmp::Ordering {
    if mu.is_negative() {
        return std::cmp::Ordering::Less;
    }
    (mu * mu).cmp(a)
}

/// `μ(d;m)(a) > √a`.
pub fn is_obstructive_at(c: &ExceptionalClass, a: &Rational) -> Result<bool, ClassError> {
    Ok(cmp_with_sqrt(&mu_at(c, a)?, a) == std::cmp::Ordering::Greater)
}

/// `μ(d;m)(a) ≥ √a` (the non-strict test of the enumeration programs).
pub fn is_weakly_obstructive_at(c: &ExceptionalClass, a: &Rational) -> Result<bool, ClassError> {
    Ok(cmp_with_sqrt(&mu_at(c, a)?, a) != std::cmp::Ordering::Less)
}

/// `d·μ(d;m)(z) = A + B z` for `z` close to `a` on `side`.
pub fn mu_one_sided_form(c: &ExceptionalClass, a: &Rational, side: Side) -> Result<LinearForm, ClassError> {
    if c.d == 0 {
        return Err(ClassError::ZeroDegree);
    }
    Ok(one_sided_forms(a, side)?.dot(&c.m))
}

/// The two linear pieces of `d·μ` at the centre `a_0 = p/q` of an
/// obstruction, and the interval cut out by `μ > √z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionLocalForm {
    pub center: Rational,
    pub d: i64,
    /// The last positive entry `m`.
    pub m_last: i64,
    /// `(A, B)`: `d·μ(z) = A + Bz` for `z < a_0`.
    pub below: LinearForm,
    /// `(A′, B′) = (A + mp, B − mq)` for `z > a_0`.
    pub above: LinearForm,
    /// `u`: the largest root `≤ a_0` of `(A + Bz)² = d²z`.
    pub lower_end: QuadraticNumber,
    /// `v`: the smallest root `≥ a_0` of `(A′ + B′z)² = d²z`.
    pub upper_end: QuadraticNumber,
}

impl ObstructionLocalForm {
    /// `μ(a_0)`.
    pub fn mu_at_center(&self) -> Rational {
        self.below.eval(&self.center) / Rational::from_integer(BigInt::from(self.d))
    }

    /// True when `A′ = A + mp` and `B′ = B − mq`.
    pub fn satisfies_crossing_rule(&self) -> bool {
        let m = BigInt::from(self.m_last);
        let (p, q) = (self.center.numer(), self.center.denom());
        self.above.alpha == &self.below.alpha + &m * p && self.above.beta == &self.below.beta - &m * q
    }
}

/// Roots of `(A + Bz)² = d² z`, i.e. `B²z² + (2AB − d²)z + A² = 0`, in
/// increasing order.
pub fn sqrt_crossings(form: &LinearForm, d: i64) -> Vec<QuadraticNumber> {
    let d2 = BigInt::from(d) * BigInt::from(d);
    let (a, b) = (&form.alpha, &form.beta);
    if b.is_zero() {
        return vec![QuadraticNumber::from(Rational::new(a * a, d2))];
    }
    let disc = &d2 - BigInt::from(4) * a * b;
    if disc.is_negative() {
        return Vec::new();
    }
    let two_b2 = BigInt::from(2) * b * b;
    let center = Rational::new(&d2 - BigInt::from(2) * a * b, two_b2.clone());
    let coeff = Rational::new(BigInt::from(d), two_b2);
    let root = QuadraticNumber::sqrt_of(&Rational::from_integer(disc)).expect("nonnegative");
    let lo = root.scale(&-coeff.clone()).add_rational(&center);
    let hi = root.scale(&coeff).add_rational(&center);
    vec![lo, hi]
}

/// The local linear structure of `μ` around the centre of `c`.
pub fn local_form(c: &ExceptionalClass) -> Result<ObstructionLocalForm, ClassError> {
    let center = find_center(c)?.ok_or_else(|| ClassError::NoCenter(c.compact()))?;
    local_form_at(c, &center)
}

/// The local structure of `μ` around a given point `a_0` with `ℓ(a_0) = ℓ(m)`.
pub fn local_form_at(c: &ExceptionalClass, center: &Rational) -> Result<ObstructionLocalForm, ClassError> {
    let below = mu_one_sided_form(c, center, Side::Below)?;
    let above = mu_one_sided_form(c, center, Side::Above)?;
    let m_last = c.last_positive().ok_or_else(|| ClassError::Unsupported(c.compact()))?;
    let a0 = QuadraticNumber::from(center.clone());
    let lower_end = sqrt_crossings(&below, c.d)
        .into_iter()
        .filter(|r| r <= &a0)
        .max()
        .ok_or_else(|| ClassError::NoCenter(c.compact()))?;
    let upper_end = sqrt_crossings(&above, c.d)
        .into_iter()
        .filter(|r| r >= &a0)
        .min()
        .ok_or_else(|| ClassError::NoCenter(c.compact()))?;
    Ok(ObstructionLocalForm { center: center.clone(), d: c.d, m_last, below, above, lower_end, upper_end })
}

/// Default node budget of the centre search.
pub const DEFAULT_CENTER_BUDGET: usize = 5_000_000;

/// The centre of `c`: among the points `a_0` with `ℓ(a_0) = ℓ(m)` at which
/// `c` is obstructive, the one where `μ(a_0)/√a_0` is largest (ties go to the
/// smaller point); `None` if `c` is nowhere obstructive.
///
/// Each obstruction interval contains exactly one such point, but a class
/// may have several obstruction intervals: `(8;3^7,1^2)` is obstructive both
/// near `20/3` and near `15/2`. The strongest one is the centre that matters
/// for the capacity.
pub fn find_center(c: &ExceptionalClass) -> Result<Option<Rational>, ClassError> {
    find_center_with_budget(c, DEFAULT_CENTER_BUDGET)
}

/// [`find_center`] with an explicit node budget.
pub fn find_center_with_budget(c: &ExceptionalClass, budget: usize) -> Result<Option<Rational>, ClassError> {
    let centers = find_centers_with_budget(c, budget)?;
    let mut best: Option<(Rational, Rational)> = None;
    for z in centers {
        let mu = mu_at(c, &z)?;
        let strength = &mu * &mu / &z;
        if best.as_ref().is_none_or(|(s, _)| &strength > s) {
            best = Some((strength, z));
        }
    }
    Ok(best.map(|(_, z)| z))
}

/// All points `a_0` with `ℓ(a_0) = ℓ(m)` at which `c` is obstructive, in
/// increasing order: one per obstruction interval.
pub fn find_centers(c: &ExceptionalClass) -> Result<Vec<Rational>, ClassError> {
    find_centers_with_budget(c, DEFAULT_CENTER_BUDGET)
}

/// Centre enumeration with an explicit node budget.
///
/// Rationals of weight length `M` are exactly the points where the
/// rectangle process (cut the largest squares off a `1 × z` rectangle),
/// run symbolically in `z`, first reaches a square remainder after `M − 1`
/// cuts. The search walks this process as a tree: a node records the cut
/// weights' linear forms only through their contribution `H(z)` to `m·w`, the
/// remaining sides `u(z), v(z)` and an open interval of `z` on which all
/// earlier comparisons are fixed. A node is discarded when even the
/// Cauchy–Schwarz bound `H + √(Σ_{i>k} m_i² · uv)` on `m·w` cannot exceed
/// `d√z` anywhere in its interval. The starting interval comes from
/// `|m₁ − d/√a| < 1`, valid for Diophantine classes obstructive at `a`.
pub fn find_centers_with_budget(c: &ExceptionalClass, budget: usize) -> Result<Vec<Rational>, ClassError> {
    if c.d <= 0 || c.m.iter().any(|&x| x < 0) {
        return Err(ClassError::Unsupported(c.compact()));
    }
    let norm = c.normalized();
    let m: Vec<i64> = norm.m.clone();
    let big_m = m.len();
    if big_m == 0 {
        return Ok(Vec::new());
    }
    let d = BigInt::from(c.d);
    let d2 = &d * &d;
    let m1 = m[0];
    let mut zl = Rational::new(d2.clone(), BigInt::from((m1 + 1) * (m1 + 1)));
    let mut zr = Rational::from_integer(BigInt::from(big_m as i64 + 1));
    if m1 > 1 {
        let hi = Rational::new(d2.clone(), BigInt::from((m1 - 1) * (m1 - 1)));
        if hi < zr {
            zr = hi;
        }
    }
    if zl < Rational::one() {
        zl = Rational::one();
    }
    if zl >= zr {
        return Ok(Vec::new());
    }
    let mut suffix_sq = vec![BigInt::zero(); big_m + 1];
    for i in (0..big_m).rev() {
        suffix_sq[i] = &suffix_sq[i + 1] + BigInt::from(m[i]) * BigInt::from(m[i]);
    }
    let mut search = CenterSearch {
        class: &norm,
        m: &m,
        d: Rational::from_integer(d),
        suffix_sq,
        nodes: 0,
        budget,
        found: Vec::new(),
    };
    let zero = LinearForm::new(BigInt::zero(), BigInt::zero());
    let u = LinearForm::new(BigInt::one(), BigInt::zero());
    let v = LinearForm::new(BigInt::zero(), BigInt::one());
    search.node(0, zero, u, v, zl, zr)?;
    Ok(search.found)
}

struct CenterSearch<'a> {
    class: &'a ExceptionalClass,
    m: &'a [i64],
    d: Rational,
    suffix_sq: Vec<BigInt>,
    nodes: usize,
    budget: usize,
    found: Vec<Rational>,
}

const PRUNE_BITS: u32 = 64;

impl CenterSearch<'_> {
    fn max_at_ends(f: &LinearForm, zl: &Rational, zr: &Rational) -> Rational {
        let (a, b) = (f.eval(zl), f.eval(zr));
        if a > b {
            a
        } else {
            b
        }
    }

    /// True if `m·w > d√z` is impossible on `(zl, zr)` for this node.
    fn pruned(&self, k: usize, h: &LinearForm, u: &LinearForm, v: &LinearForm, zl: &Rational, zr: &Rational) -> bool {
        let h_max = Self::max_at_ends(h, zl, zr);
        let uv = Self::max_at_ends(u, zl, zr) * Self::max_at_ends(v, zl, zr);
        let t2 = Rational::from_integer(self.suffix_sq[k].clone());
        let upper = h_max + sqrt_upper(&(t2 * uv), PRUNE_BITS);
        let lower = &self.d * sqrt_lower(zl, PRUNE_BITS);
        upper < lower
    }

    fn emit(&self, k: usize, h: &LinearForm, small: &LinearForm, big: &LinearForm) -> (LinearForm, LinearForm, LinearForm) {
        let h2 = h.add(&small.scale(&BigInt::from(self.m[k])));
        (h2, small.clone(), big.add(&small.neg()))
    }

    fn child(
        &mut self,
        k: usize,
        h: &LinearForm,
        u: &LinearForm,
        v: &LinearForm,
        zl: Rational,
        zr: Rational,
    ) -> Result<(), ClassError> {
        let mid = (&zl + &zr) / Rational::from_integer(BigInt::from(2));
        let (h2, s, b) = if u.eval(&mid) < v.eval(&mid) { self.emit(k, h, u, v) } else { self.emit(k, h, v, u) };
        self.node(k + 1, h2, s, b, zl, zr)
    }

    fn node(
        &mut self,
        k: usize,
        h: LinearForm,
        u: LinearForm,
        v: LinearForm,
        zl: Rational,
        zr: Rational,
    ) -> Result<(), ClassError> {
        let big_m = self.m.len();
        if k >= big_m {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(ClassError::SearchBudget { class: self.class.compact(), budget: self.budget });
        }
        if self.pruned(k, &h, &u, &v, &zl, &zr) {
            return Ok(());
        }
        let diff = u.add(&v.neg());
        let tie = (!diff.beta.is_zero())
            .then(|| Rational::new(-diff.alpha.clone(), diff.beta.clone()))
            .filter(|t| t > &zl && t < &zr);
        match tie {
            Some(t) if k + 1 == big_m => {
                // `t` has weight length k + 1 = ℓ(m): the only candidate here.
                if is_obstructive_at(self.class, &t)? {
                    self.found.push(t);
                }
                Ok(())
            }
            Some(t) => {
                self.child(k, &h, &u, &v, zl, t.clone())?;
                self.child(k, &h, &u, &v, t, zr)
            }
            None if k + 1 == big_m => Ok(()),
            None => self.child(k, &h, &u, &v, zl, zr),
        }
    }
}

/// Error-vector summaries at `a` as exact quadratic numbers in `√a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorSummary {
    /// `E = Σ ε_i²`.
    pub total: QuadraticNumber,
    /// `σ = Σ_{i > ℓ_0} ε_i²`.
    pub sigma: QuadraticNumber,
    /// `σ′ = Σ_{ℓ_0 < i ≤ M − ℓ_N} ε_i²`.
    pub sigma_prime: QuadraticNumber,
    /// `y(a) = a + 1 − 3√a`.
    pub y: QuadraticNumber,
    /// `δ = y(a) − 1/q`.
    pub delta: QuadraticNumber,
    /// `−Σ ε_i`.
    pub neg_error_sum: QuadraticNumber,
}

/// `ε_i = m_i − (d/√a) w_i`, summarised over index ranges.
pub fn error_summary(c: &ExceptionalClass, a: &Rational) -> Result<ErrorSummary, ClassError> {
    if c.d == 0 {
        return Err(ClassError::ZeroDegree);
    }
    let w = weight_expansion(a)?.flatten();
    let terms = w.len().max(c.m.len());
    let ell0 = weight_expansion(a)?.blocks()[0].1 as usize;
    let ell_n = weight_expansion(a)?.blocks().last().expect("nonempty").1 as usize;
    let s = QuadraticNumber::sqrt_of(a).expect("a ≥ 1");
    let d = Rational::from_integer(BigInt::from(c.d));
    let entry = |i: usize| -> (Rational, Rational) {
        let mi = Rational::from_integer(BigInt::from(*c.m.get(i).unwrap_or(&0)));
        let wi = w.get(i).cloned().unwrap_or_else(Rational::zero);
        (mi, wi)
    };
    // Σ_{i∈S} ε_i² = Σ m_i² + (d²/a) Σ w_i² − (2d/a) (Σ m_i w_i) √a.
    let range_sum = |lo: usize, hi: usize| -> QuadraticNumber {
        let (mut mm, mut ww, mut mw) = (Rational::zero(), Rational::zero(), Rational::zero());
        for i in lo..hi {
            let (mi, wi) = entry(i);
            mm += &mi * &mi;
            ww += &wi * &wi;
            mw += &mi * &wi;
        }
        let rational = mm + &d * &d / a * ww;
        let coeff = -(Rational::from_integer(BigInt::from(2)) * &d / a * mw);
        s.scale(&coeff).add_rational(&rational)
    };
    let total = range_sum(0, terms);
    let sigma = range_sum(ell0, terms);
    let sigma_prime = range_sum(ell0, w.len().saturating_sub(ell_n).max(ell0));
    let one = Rational::one();
    let y = s.scale(&Rational::from_integer(BigInt::from(-3))).add_rational(&(a + &one));
    let q = Rational::from_integer(a.denom().clone());
    let delta = y.add_rational(&-(&one / &q));
    let sum_m: Rational = (0..terms).map(|i| entry(i).0).sum();
    let sum_w: Rational = (0..terms).map(|i| entry(i).1).sum();
    // −Σε = −Σm + (d/√a) Σw = −Σm + (d/a) Σw · √a.
    let neg_error_sum = s.scale(&(&d / a * sum_w)).add_rational(&-sum_m);
    Ok(ErrorSummary { total, sigma, sigma_prime, y, delta, neg_error_sum })
}

/// Checks the block-structure constraints that obstructive classes satisfy:
/// on every constant block of `w(a)` of length `s ≥ 2` the entries are
/// constant, or drop by one at the last position, or drop by one after the
/// first position; and at most one such block is non-constant.
pub fn satisfies_block_rule(c: &ExceptionalClass, a: &Rational) -> Result<bool, ClassError> {
    let w = weight_expansion(a)?;
    let mut idx = 0usize;
    let mut deviant = 0usize;
    for &(_, l) in w.blocks() {
        let l = l as usize;
        let block: Vec<i64> = (idx..idx + l).map(|i| *c.m.get(i).unwrap_or(&0)).collect();
        idx += l;
        if l < 2 {
            continue;
        }
        let first = block[0];
        let last = block[l - 1];
        let constant = block.iter().all(|&x| x == first);
        let drop_last = block[..l - 1].iter().all(|&x| x == first) && last == first - 1;
        let drop_first = block[1..].iter().all(|&x| x == first - 1);
        if !(constant || drop_last || drop_first) {
            return Ok(false);
        }
        if !constant {
            deviant += 1;
        }
    }
    Ok(deviant <= 1)
}
