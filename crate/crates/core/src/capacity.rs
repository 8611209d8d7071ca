//! Assembly of `c(a)`: the staircase data and the perfect / nearly perfect
//! class constructors, the closed form of `c`, a search-based evaluator on
//! `[48/7, 9]`, and graph emission.
//!
//! The closed form is:
//!
//! * the Fibonacci stairs on `[1, τ⁴)`: `c(a) = a/√a_n` on `[a_n, b_n]` and
//!   `√a_{n+1}` on `[b_n, a_{n+1}]`;
//! * `(a+1)/3` on `[τ⁴, 7]` and `8/3` on `[7, 64/9]`;
//! * the local linear forms of the eight classes of
//!   [`OBSTRUCTION_TABLE`] on their intervals `[u, v]` inside `[64/9, 289/36]`;
//! * `√a` everywhere else.
//!
//! On `[τ⁴, 7]` infinitely many classes are obstructive near `τ⁴`, so
//! [`capacity_search`] cannot be complete there from search alone: it checks
//! every family that can compete (the ghost stairs, the `b_k(i)` classes, the
//! staircase classes, the tables and the point search) and agrees with the
//! closed form, but completeness rests on the structure theorem for that
//! interval, not on the search.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::cfrac::ContinuedFraction;
use crate::classes::{
    cmp_with_sqrt, local_form_at, mu_at, ClassError, ExceptionalClass, ObstructionLocalForm,
};
use crate::fib::{big_f, big_l, g, h};
use crate::num::{format_rational, int, parse_decimal, ratio, Rational};
use crate::quadratic::QuadraticNumber;
use crate::report::NamedCheck;
use crate::search::{sol_less, SearchError};
use crate::tables::{self, HIDDEN_TABLE, OBSTRUCTION_TABLE, SEVEN_PLUS_ONE_OVER_K, SHORT_CLASSES};
use crate::weights::{normalized_weights, WeightError};

/// Errors raised by the capacity layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("c(a) is only defined here for a ≥ 1, got {0}")]
    BelowOne(String),
    #[error("the search evaluator covers 48/7 ≤ a ≤ 9, got {0}")]
    OutOfSearchRange(String),
    #[error("index {name} = {value} is out of range (needs {name} ≥ {min})")]
    Index { name: &'static str, value: i64, min: i64 },
    #[error("graph step must be positive, got {0}")]
    NonPositiveStep(String),
    #[error("graph interval is empty: from {from} > to {to}")]
    EmptyInterval { from: String, to: String },
    #[error("an entry of the constructed class does not fit in 64 bits")]
    Overflow,
    #[error("degree (p+q)/3 is not an integer for {0}")]
    NonIntegralDegree(String),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn need(name: &'static str, value: i64, min: i64) -> Result<(), CapacityError> {
    if value < min {
        Err(CapacityError::Index { name, value, min })
    } else {
        Ok(())
    }
}

fn small(x: &BigInt) -> Result<i64, CapacityError> {
    x.to_i64().ok_or(CapacityError::Overflow)
}

fn small_all(xs: &[BigInt]) -> Result<Vec<i64>, CapacityError> {
    xs.iter().map(small).collect()
}

fn frac(p: BigInt, q: BigInt) -> Rational {
    Rational::new(p, q)
}

/// `τ⁴ = (7 + 3√5)/2`, the accumulation point of the stairs.
pub fn tau4() -> QuadraticNumber {
    QuadraticNumber::new(ratio(7, 2), ratio(3, 2), BigInt::from(5)).expect("positive radicand")
}

// ---------------------------------------------------------------------------
// Fibonacci stairs
// ---------------------------------------------------------------------------

/// One step of the Fibonacci stairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircasePoint {
    pub n: i64,
    /// `a_n = (g_{n+1}/g_n)²`, the foot of the rising edge.
    pub a_n: Rational,
    /// `b_n = g_{n+2}/g_n`, the corner where the step turns flat.
    pub b_n: Rational,
    /// `c(a_n) = √a_n = g_{n+1}/g_n`.
    pub c_at_a_n: Rational,
    /// `c(b_n) = √a_{n+1} = g_{n+2}/g_{n+1}`.
    pub c_at_b_n: Rational,
}

/// The `n`-th step, `n ≥ 0`.
pub fn staircase_point(n: i64) -> Result<StaircasePoint, CapacityError> {
    need("n", n, 0)?;
    let (g0, g1, g2) = (g(n), g(n + 1), g(n + 2));
    Ok(StaircasePoint {
        n,
        a_n: frac(&g1 * &g1, &g0 * &g0),
        b_n: frac(g2.clone(), g0.clone()),
        c_at_a_n: frac(g1.clone(), g0),
        c_at_b_n: frac(g2, g1),
    })
}

/// The steps `0, …, n_max`.
pub fn staircase(n_max: i64) -> Result<Vec<StaircasePoint>, CapacityError> {
    (0..=n_max).map(staircase_point).collect()
}

/// `E(b_n) = (g_{n+1}; g_n·w(b_n))`, the perfect class centred at `b_n`.
pub fn class_e_bn(n: i64) -> Result<ExceptionalClass, CapacityError> {
    need("n", n, 0)?;
    let b = frac(g(n + 2), g(n));
    let m = small_all(&normalized_weights(&b)?)?;
    Ok(ExceptionalClass::new(small(&g(n + 1))?, m))
}

/// `E(a_n) = (g_n g_{n+1}; W(a_n), 1)`: the normalized weights of `a_n` with
/// one extra `1` appended.
pub fn class_e_an(n: i64) -> Result<ExceptionalClass, CapacityError> {
    need("n", n, 1)?;
    let (g0, g1) = (g(n), g(n + 1));
    let a = frac(&g1 * &g1, &g0 * &g0);
    let mut m = small_all(&normalized_weights(&a)?)?;
    m.push(1);
    Ok(ExceptionalClass::new(small(&(g0 * g1))?, m))
}

/// `b_k(i) = [6; {1,5}^{k−1}, 1, 1+3i]`, as a continued fraction.
pub fn b_ki_expansion(k: i64, i: i64) -> Result<ContinuedFraction, CapacityError> {
    need("k", k, 1)?;
    need("i", i, 0)?;
    let mut terms = vec![6u64];
    for _ in 1..k {
        terms.extend([1, 5]);
    }
    terms.extend([1, 1 + 3 * i as u64]);
    Ok(ContinuedFraction::from_terms(terms).expect("positive tail terms"))
}

/// `b_k(i)` as a rational.
pub fn b_ki(k: i64, i: i64) -> Result<Rational, CapacityError> {
    Ok(b_ki_expansion(k, i)?.value())
}

/// `E(b_k(i))`: take `(q(1+b)/3; q·w(b))` for `b = b_k(i) = p/q` and replace
/// the final block `1^{1+3i}` of the weights by `(i, 1^{2i+1})` (for `i = 0`
/// the entry `0` is dropped, leaving `E(b_{2k})`).
pub fn class_b_ki(k: i64, i: i64) -> Result<ExceptionalClass, CapacityError> {
    let b = b_ki(k, i)?;
    let (p, q) = (b.numer().clone(), b.denom().clone());
    let (d, rem) = (&p + &q).div_rem(&BigInt::from(3));
    if !rem.is_zero() {
        return Err(CapacityError::NonIntegralDegree(format_rational(&b)));
    }
    let mut m = small_all(&normalized_weights(&b)?)?;
    let tail = (1 + 3 * i) as usize;
    debug_assert!(m.len() > tail && m[m.len() - tail..].iter().all(|&x| x == 1));
    m.truncate(m.len() - tail);
    if i > 0 {
        m.push(i);
    }
    m.extend(std::iter::repeat_n(1, (2 * i + 1) as usize));
    Ok(ExceptionalClass::new(small(&d)?, m))
}

/// `d_k(i) = h_{2k+2} + (i − 2)·h_{2k+1}`, the predicted degree of `E(b_k(i))`.
pub fn b_ki_degree(k: i64, i: i64) -> BigInt {
    h(2 * k + 2) + BigInt::from(i - 2) * h(2 * k + 1)
}

// ---------------------------------------------------------------------------
// Convergents of τ⁴
// ---------------------------------------------------------------------------

/// The convergent `c_n` of `τ⁴ = [6; 1, 5, 1, 5, …]`, `n ≥ 0`:
/// `c_{2k−1} = F_{k+1}/F_k` and `c_{2k} = L_{k+1}/L_k`.
pub fn convergent(n: i64) -> Result<Rational, CapacityError> {
    need("n", n, 0)?;
    Ok(if n % 2 == 1 {
        let k = (n + 1) / 2;
        frac(big_f(k + 1), big_f(k))
    } else {
        let k = n / 2;
        frac(big_l(k + 1), big_l(k))
    })
}

/// The points attached to the `k`-th pair of convergents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentPoints {
    pub k: i64,
    /// `c_{2k−1} = F_{k+1}/F_k`.
    pub c_odd: Rational,
    /// `c_{2k} = L_{k+1}/L_k`.
    pub c_even: Rational,
}

impl ConvergentPoints {
    /// `u_k(j) = (F_{k+1} + jF_{k+2})/(F_k + jF_{k+1})`.
    pub fn u(&self, j: i64) -> Rational {
        let k = self.k;
        let j = BigInt::from(j);
        frac(big_f(k + 1) + &j * big_f(k + 2), big_f(k) + &j * big_f(k + 1))
    }

    /// `v_k(j) = (L_k + jF_{k+1})/(L_{k−1} + jF_k)`.
    pub fn v(&self, j: i64) -> Rational {
        let k = self.k;
        let j = BigInt::from(j);
        frac(big_l(k) + &j * big_f(k + 1), big_l(k - 1) + &j * big_f(k))
    }

    /// `e_k = v_k(7) = b_k(2)`, the end of the `k`-th ghost step.
    pub fn e(&self) -> Rational {
        self.v(7)
    }
}

/// Convergent data for `k ≥ 1`.
pub fn convergent_points(k: i64) -> Result<ConvergentPoints, CapacityError> {
    need("k", k, 1)?;
    Ok(ConvergentPoints { k, c_odd: convergent(2 * k - 1)?, c_even: convergent(2 * k)? })
}

// ---------------------------------------------------------------------------
// Piecewise linear functions and the ghost stairs
// ---------------------------------------------------------------------------

/// `z ↦ intercept + slope·z` on `[from, to]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPiece {
    pub from: Rational,
    pub to: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl LinearPiece {
    pub fn eval(&self, z: &Rational) -> Rational {
        &self.intercept + &self.slope * z
    }

    pub fn contains(&self, z: &Rational) -> bool {
        &self.from <= z && z <= &self.to
    }
}

/// A function given by consecutive linear pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    pub pieces: Vec<LinearPiece>,
}

impl PiecewiseLinearFn {
    /// The value at `z` (the first piece containing `z`), if covered.
    pub fn eval(&self, z: &Rational) -> Option<Rational> {
        self.pieces.iter().find(|p| p.contains(z)).map(|p| p.eval(z))
    }

    /// Consecutive pieces share endpoints and values.
    pub fn is_continuous(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].to == w[1].from && w[0].eval(&w[0].to) == w[1].eval(&w[1].from))
    }

    /// All piece endpoints, in order, without repetition.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for p in &self.pieces {
            for x in [&p.from, &p.to] {
                if out.last() != Some(x) {
                    out.push(x.clone());
                }
            }
        }
        out
    }
}

/// The class `E(b_k(2))` of the `k`-th ghost step with its predicted profile:
/// `μ(z) = (z+1)/3` on `[c_{2k}, c_{2k+1}]` and `h_{2k+3}/h_{2k+2}` on
/// `[c_{2k+1}, e_k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostStep {
    pub k: i64,
    pub class: ExceptionalClass,
    pub profile: PiecewiseLinearFn,
}

/// The `k`-th ghost step, `k ≥ 1`.
pub fn ghost_class(k: i64) -> Result<GhostStep, CapacityError> {
    need("k", k, 1)?;
    let class = class_b_ki(k, 2)?;
    let lo = convergent(2 * k)?;
    let mid = convergent(2 * k + 1)?;
    let hi = convergent_points(k)?.e();
    let third = ratio(1, 3);
    let profile = PiecewiseLinearFn {
        pieces: vec![
            LinearPiece { from: lo, to: mid.clone(), slope: third.clone(), intercept: third },
            LinearPiece { from: mid, to: hi, slope: Rational::zero(), intercept: frac(h(2 * k + 3), h(2 * k + 2)) },
        ],
    };
    Ok(GhostStep { k, class, profile })
}

/// Evaluates the ghost class at the three breakpoints and at the midpoint of
/// each piece, and compares with the predicted profile.
pub fn verify_ghost(k: i64) -> Result<NamedCheck, CapacityError> {
    let step = ghost_class(k)?;
    let breaks = step.profile.breakpoints();
    let mut points = breaks.clone();
    for w in breaks.windows(2) {
        points.push((&w[0] + &w[1]) / int(2));
    }
    points.sort();
    let mut bad = Vec::new();
    for z in &points {
        let expected = step.profile.eval(z).expect("points lie in the profile's domain");
        let actual = mu_at(&step.class, z)?;
        if expected != actual {
            bad.push(format!("μ({}) = {} ≠ {}", format_rational(z), format_rational(&actual), format_rational(&expected)));
        }
    }
    let degree_ok = BigInt::from(step.class.d) == h(2 * k + 2);
    let passed = bad.is_empty() && degree_ok && step.profile.is_continuous();
    let detail = if passed {
        format!("{} matches its profile at {} points", step.class.compact(), points.len())
    } else if !degree_ok {
        format!("degree {} ≠ h_{}", step.class.d, 2 * k + 2)
    } else {
        bad.join("; ")
    };
    Ok(NamedCheck::new(format!("ghost k={k}"), passed, detail))
}

// ---------------------------------------------------------------------------
// Closed form
// ---------------------------------------------------------------------------

/// Which formula determines `c` at a point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `a/√a_n` on `[a_n, b_n]`.
    StairsRising { n: i64 },
    /// `√a_{n+1}` on `[b_n, a_{n+1}]`.
    StairsFlat { n: i64 },
    /// `(a+1)/3` on `[τ⁴, 7]`.
    Line,
    /// `8/3` on `[7, 64/9]`.
    Plateau,
    /// A local form of one of the eight table classes near its centre.
    Obstruction { center: Rational },
    /// The volume bound `√a`.
    Volume,
}

impl Regime {
    /// Stable machine-readable tag.
    pub fn tag(&self) -> String {
        match self {
            Regime::StairsRising { n } => format!("stairs_rising:{n}"),
            Regime::StairsFlat { n } => format!("stairs_flat:{n}"),
            Regime::Line => "line".to_string(),
            Regime::Plateau => "plateau".to_string(),
            Regime::Obstruction { center } => format!("obstruction:{}", format_rational(center)),
            Regime::Volume => "volume".to_string(),
        }
    }
}

/// Output of [`capacity_closed_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityValue {
    pub a: Rational,
    pub value: QuadraticNumber,
    pub regime: Regime,
    /// A class whose `μ` equals `c` near `a`, where one is known in closed form.
    pub witness: Option<ExceptionalClass>,
}

/// One of the table classes together with its local structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableInterval {
    pub class: ExceptionalClass,
    pub form: ObstructionLocalForm,
}

impl TableInterval {
    /// `u ≤ a ≤ v`.
    pub fn contains(&self, a: &Rational) -> bool {
        self.form.lower_end <= *a && self.form.upper_end >= *a
    }

    /// The value of the local form at `a` (below or above the centre).
    pub fn value(&self, a: &Rational) -> Rational {
        let form = if a <= &self.form.center { &self.form.below } else { &self.form.above };
        form.eval(a) / int(self.form.d)
    }
}

/// The eight table classes on `[64/9, 289/36]` with their computed local
/// forms, ordered by centre.
pub fn table_intervals() -> &'static [TableInterval] {
    static CELL: OnceLock<Vec<TableInterval>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out: Vec<TableInterval> = OBSTRUCTION_TABLE
            .iter()
            .map(|row| {
                let class = tables::class(row.class);
                let form = local_form_at(&class, &tables::center(row.center)).expect("table classes have local forms");
                TableInterval { class, form }
            })
            .collect();
        out.sort_by(|x, y| x.form.center.cmp(&y.form.center));
        out
    })
}

/// `(3; 2, 1^6)`, which gives `(a+1)/3` on `[6, 7]` and `8/3` on `[7, 8]`.
pub fn line_class() -> ExceptionalClass {
    tables::class("3;2,1^6")
}

fn stairs_regime(a: &Rational) -> (Rational, Regime) {
    let mut n = 0;
    loop {
        let s = staircase_point(n).expect("n ≥ 0");
        if a <= &s.b_n {
            return (a * frac(g(n), g(n + 1)), Regime::StairsRising { n });
        }
        let next = staircase_point(n + 1).expect("n ≥ 0");
        if a <= &next.a_n {
            return (s.c_at_b_n, Regime::StairsFlat { n });
        }
        n += 1;
    }
}

/// `c(a)` in closed form for rational `a ≥ 1`.
pub fn capacity_closed_form(a: &Rational) -> Result<CapacityValue, CapacityError> {
    if a < &int(1) {
        return Err(CapacityError::BelowOne(format_rational(a)));
    }
    let rational = |value: Rational, regime, witness| CapacityValue {
        a: a.clone(),
        value: QuadraticNumber::from(value),
        regime,
        witness,
    };
    if tau4() > *a {
        let (value, regime) = stairs_regime(a);
        return Ok(rational(value, regime, None));
    }
    if a <= &int(7) {
        return Ok(rational((a + int(1)) / int(3), Regime::Line, Some(line_class())));
    }
    if a <= &ratio(64, 9) {
        return Ok(rational(ratio(8, 3), Regime::Plateau, Some(line_class())));
    }
    if let Some(iv) = table_intervals().iter().find(|iv| iv.contains(a)) {
        let regime = Regime::Obstruction { center: iv.form.center.clone() };
        return Ok(rational(iv.value(a), regime, Some(iv.class.clone())));
    }
    Ok(CapacityValue {
        a: a.clone(),
        value: QuadraticNumber::sqrt_of(a).expect("a ≥ 1"),
        regime: Regime::Volume,
        witness: None,
    })
}

// ---------------------------------------------------------------------------
// Search-based evaluation
// ---------------------------------------------------------------------------

/// Default degree bound for the point search inside [`capacity_search`]:
/// the largest of the point-search bounds on `[7, 8]`.
pub const DEFAULT_SEARCH_DEGREE: i64 = 104;

/// Lowest point of the search range, `c_3 = 48/7`.
pub fn search_range_start() -> Rational {
    ratio(48, 7)
}

/// Every named class that can compete on `[48/7, 9]`: the short classes, the
/// table classes (obstruction, hidden, `7 + 1/k`), the interval-search class,
/// `E(b_n)` and `E(a_n)` for `n ≤ 8`, and `E(b_k(i))` for `k ≤ 4`, `i ≤ 5`.
/// Sorted and without repetition.
pub fn named_candidates() -> &'static [ExceptionalClass] {
    static CELL: OnceLock<Vec<ExceptionalClass>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut set = BTreeSet::new();
        let literals = SHORT_CLASSES
            .iter()
            .copied()
            .chain(OBSTRUCTION_TABLE.iter().map(|r| r.class))
            .chain(HIDDEN_TABLE.iter().map(|r| r.class))
            .chain(SEVEN_PLUS_ONE_OVER_K.iter().map(|r| r.1))
            .chain(["59;22^7,5^3,4,1^3"]);
        for text in literals {
            set.insert(tables::class(text).normalized());
        }
        for n in 0..=8 {
            set.insert(class_e_bn(n).expect("small staircase classes fit").normalized());
            if n >= 1 {
                set.insert(class_e_an(n).expect("small staircase classes fit").normalized());
            }
        }
        for k in 1..=4 {
            for i in 0..=5 {
                set.insert(class_b_ki(k, i).expect("small b_k(i) classes fit").normalized());
            }
        }
        set.into_iter().filter(|c| c.d > 0).collect()
    })
}

/// Output of [`capacity_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchedCapacity {
    pub a: Rational,
    pub value: QuadraticNumber,
    /// Classes with `μ(a) = c(a) > √a`, sorted; empty when `c(a) = √a`.
    pub witnesses: Vec<ExceptionalClass>,
    /// Number of distinct classes evaluated.
    pub candidates: usize,
}

/// The largest `μ` over a candidate set, with the classes attaining it.
fn best_mu(
    a: &Rational,
    classes: impl IntoIterator<Item = ExceptionalClass>,
) -> Result<(Option<Rational>, Vec<ExceptionalClass>), CapacityError> {
    let mut best: Option<Rational> = None;
    let mut who = Vec::new();
    for c in classes {
        let mu = mu_at(&c, a)?;
        match &best {
            Some(b) if &mu < b => {}
            Some(b) if &mu == b => who.push(c),
            _ => {
                best = Some(mu);
                who = vec![c];
            }
        }
    }
    who.sort();
    Ok((best, who))
}

/// `c(a) = max(√a, sup μ(a))` over [`named_candidates`] and
/// `sol_less(a, d_max)`, for `48/7 ≤ a ≤ 9`.
pub fn capacity_search(a: &Rational, d_max: i64) -> Result<SearchedCapacity, CapacityError> {
    if a < &search_range_start() || a > &int(9) {
        return Err(CapacityError::OutOfSearchRange(format_rational(a)));
    }
    let mut pool: BTreeSet<ExceptionalClass> = named_candidates().iter().cloned().collect();
    pool.extend(sol_less(a, d_max)?.into_iter().map(|c| c.normalized()));
    let candidates = pool.len();
    let (best, who) = best_mu(a, pool)?;
    let sqrt = QuadraticNumber::sqrt_of(a).expect("a ≥ 1");
    Ok(match best {
        Some(mu) if cmp_with_sqrt(&mu, a).is_gt() => {
            SearchedCapacity { a: a.clone(), value: QuadraticNumber::from(mu), witnesses: who, candidates }
        }
        _ => SearchedCapacity { a: a.clone(), value: sqrt, witnesses: Vec::new(), candidates },
    })
}

/// The classes among `candidates` whose `μ(a)` equals `value`.
pub fn attaining(
    a: &Rational,
    value: &QuadraticNumber,
    candidates: &[ExceptionalClass],
) -> Result<Vec<ExceptionalClass>, CapacityError> {
    let mut out = Vec::new();
    for c in candidates {
        if *value == mu_at(c, a)? {
            out.push(c.clone());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Number of stairs steps emitted before the accumulation segment.
pub const GRAPH_STAIRS_STEPS: i64 = 16;

/// The shape of `c` on one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentShape {
    /// `intercept + slope·z`.
    Linear { slope: Rational, intercept: Rational },
    /// `√z`.
    Sqrt,
    /// `[a_N, τ⁴]`: the remaining infinitely many stairs steps, evaluated
    /// pointwise by the closed form.
    Accumulation,
}

/// One segment of the graph of `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSegment {
    pub from: QuadraticNumber,
    pub to: QuadraticNumber,
    pub shape: SegmentShape,
    pub label: String,
    pub witness: Option<ExceptionalClass>,
}

/// The value of a segment at one of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
enum EndValue {
    Exact(QuadraticNumber),
    /// `√x` at the endpoint `x`.
    RootOf(QuadraticNumber),
}

impl GraphSegment {
    fn end_value(&self, x: &QuadraticNumber) -> EndValue {
        match &self.shape {
            SegmentShape::Linear { slope, intercept } => EndValue::Exact(x.scale(slope).add_rational(intercept)),
            SegmentShape::Sqrt | SegmentShape::Accumulation => EndValue::RootOf(x.clone()),
        }
    }

    /// The linear pieces as rational functions, for display.
    pub fn formula(&self) -> String {
        match &self.shape {
            SegmentShape::Linear { slope, intercept } => {
                format!("{} + {}*a", format_rational(intercept), format_rational(slope))
            }
            SegmentShape::Sqrt => "sqrt(a)".to_string(),
            SegmentShape::Accumulation => "stairs".to_string(),
        }
    }
}

fn values_agree(x: &QuadraticNumber, left: &EndValue, right: &EndValue) -> bool {
    let root_matches = |u: &QuadraticNumber| u.signum() >= 0 && u.square() == *x;
    match (left, right) {
        (EndValue::Exact(u), EndValue::Exact(v)) => u == v,
        (EndValue::Exact(u), EndValue::RootOf(_)) | (EndValue::RootOf(_), EndValue::Exact(u)) => root_matches(u),
        (EndValue::RootOf(_), EndValue::RootOf(_)) => true,
    }
}

/// A sampled value of `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSample {
    pub a: Rational,
    pub value: QuadraticNumber,
    pub regime: Regime,
}

/// The graph of `c` over `[from, to]`: exact closed-form segments plus
/// samples on a uniform grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityGraph {
    pub from: Rational,
    pub to: Rational,
    pub step: Rational,
    pub segments: Vec<GraphSegment>,
    pub samples: Vec<GraphSample>,
}

impl CapacityGraph {
    /// The interior breakpoints (segment junctions inside `(from, to)`).
    pub fn breakpoints(&self) -> Vec<QuadraticNumber> {
        self.segments.iter().skip(1).map(|s| s.from.clone()).collect()
    }

    /// Adjacent segments meet and take the same value at the junction.
    pub fn is_continuous(&self) -> bool {
        self.segments.windows(2).all(|w| {
            w[0].to == w[1].from && values_agree(&w[0].to, &w[0].end_value(&w[0].to), &w[1].end_value(&w[1].from))
        })
    }

    /// Sample values never decrease.
    pub fn samples_nondecreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[0].value <= w[1].value)
    }

    /// `a, c(a) decimal, c(a) exact, regime` with a header row.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("a,c_decimal,c_exact,regime\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", format_rational(&s.a), s.value.to_decimal(digits), s.value, s.regime.tag());
        }
        out
    }
}

fn linear(slope: Rational, intercept: Rational) -> SegmentShape {
    SegmentShape::Linear { slope, intercept }
}

/// All closed-form segments covering `[1, ∞)`, the last one unbounded above
/// (its `to` is `upper`).
fn all_segments(upper: &Rational) -> Vec<GraphSegment> {
    let q = |r: Rational| QuadraticNumber::from(r);
    let mut out = Vec::new();
    for n in 0..GRAPH_STAIRS_STEPS {
        let s = staircase_point(n).expect("n ≥ 0");
        let next = staircase_point(n + 1).expect("n ≥ 0");
        let witness = class_e_bn(n).ok();
        out.push(GraphSegment {
            from: q(s.a_n.clone()),
            to: q(s.b_n.clone()),
            shape: linear(frac(g(n), g(n + 1)), Rational::zero()),
            label: Regime::StairsRising { n }.tag(),
            witness: witness.clone(),
        });
        out.push(GraphSegment {
            from: q(s.b_n),
            to: q(next.a_n),
            shape: linear(Rational::zero(), s.c_at_b_n),
            label: Regime::StairsFlat { n }.tag(),
            witness,
        });
    }
    let last_foot = staircase_point(GRAPH_STAIRS_STEPS).expect("n ≥ 0").a_n;
    out.push(GraphSegment {
        from: q(last_foot),
        to: tau4(),
        shape: SegmentShape::Accumulation,
        label: "stairs".to_string(),
        witness: None,
    });
    let third = ratio(1, 3);
    out.push(GraphSegment {
        from: tau4(),
        to: q(int(7)),
        shape: linear(third.clone(), third),
        label: Regime::Line.tag(),
        witness: Some(line_class()),
    });
    out.push(GraphSegment {
        from: q(int(7)),
        to: q(ratio(64, 9)),
        shape: linear(Rational::zero(), ratio(8, 3)),
        label: Regime::Plateau.tag(),
        witness: Some(line_class()),
    });
    let mut cursor = q(ratio(64, 9));
    for iv in table_intervals() {
        let f = &iv.form;
        let d = int(f.d);
        if f.lower_end > cursor {
            out.push(GraphSegment {
                from: cursor.clone(),
                to: f.lower_end.clone(),
                shape: SegmentShape::Sqrt,
                label: Regime::Volume.tag(),
                witness: None,
            });
        }
        let label = Regime::Obstruction { center: f.center.clone() }.tag();
        let center = q(f.center.clone());
        out.push(GraphSegment {
            from: f.lower_end.clone(),
            to: center.clone(),
            shape: linear(Rational::from_integer(f.below.beta.clone()) / &d, Rational::from_integer(f.below.alpha.clone()) / &d),
            label: label.clone(),
            witness: Some(iv.class.clone()),
        });
        out.push(GraphSegment {
            from: center,
            to: f.upper_end.clone(),
            shape: linear(Rational::from_integer(f.above.beta.clone()) / &d, Rational::from_integer(f.above.alpha.clone()) / &d),
            label,
            witness: Some(iv.class.clone()),
        });
        cursor = f.upper_end.clone();
    }
    let top = q(upper.clone()).max(cursor.clone());
    out.push(GraphSegment { from: cursor, to: top, shape: SegmentShape::Sqrt, label: Regime::Volume.tag(), witness: None });
    out
}

/// The closed-form segments restricted to `[from, to]`.
pub fn graph_segments(from: &Rational, to: &Rational) -> Result<Vec<GraphSegment>, CapacityError> {
    if from < &int(1) {
        return Err(CapacityError::BelowOne(format_rational(from)));
    }
    if from > to {
        return Err(CapacityError::EmptyInterval { from: format_rational(from), to: format_rational(to) });
    }
    let (lo, hi) = (QuadraticNumber::from(from.clone()), QuadraticNumber::from(to.clone()));
    let mut out = Vec::new();
    for mut s in all_segments(to) {
        if s.to < lo || s.from > hi || (s.to == lo && s.from < lo) {
            continue;
        }
        if s.from == hi && !out.is_empty() {
            continue;
        }
        s.from = s.from.max(lo.clone());
        s.to = s.to.min(hi.clone());
        out.push(s);
    }
    Ok(out)
}

/// The graph of `c` over `[from, to]` sampled every `step` (the last sample
/// is `to` itself). Samples are evaluated in parallel.
pub fn emit_graph(from: &Rational, to: &Rational, step: &Rational) -> Result<CapacityGraph, CapacityError> {
    if step <= &Rational::zero() {
        return Err(CapacityError::NonPositiveStep(format_rational(step)));
    }
    let segments = graph_segments(from, to)?;
    let mut grid = Vec::new();
    let mut x = from.clone();
    while &x < to {
        grid.push(x.clone());
        x += step;
    }
    grid.push(to.clone());
    let samples = grid
        .into_par_iter()
        .map(|a| {
            capacity_closed_form(&a).map(|v| GraphSample { a, value: v.value, regime: v.regime })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CapacityGraph { from: from.clone(), to: to.clone(), step: step.clone(), segments, samples })
}

// ---------------------------------------------------------------------------
// Table checks
// ---------------------------------------------------------------------------

fn ab(form: &crate::weights::LinearForm) -> (BigInt, BigInt) {
    (form.alpha.clone(), form.beta.clone())
}

/// Recomputes every exact column of [`OBSTRUCTION_TABLE`]: the centre (by
/// search), both local forms, `μ` at the centre, the crossing rule and
/// `c(centre) = μ(centre)`.
pub fn verify_table_t1() -> Result<Vec<NamedCheck>, CapacityError> {
    let mut out = Vec::new();
    for row in OBSTRUCTION_TABLE {
        let class = tables::class(row.class);
        let center = crate::classes::find_center(&class)?;
        let expected_center = tables::center(row.center);
        let form = local_form_at(&class, &expected_center)?;
        let below = (BigInt::from(row.ab.0), BigInt::from(row.ab.1));
        let above = (BigInt::from(row.ab_prime.0), BigInt::from(row.ab_prime.1));
        let mu = ratio(row.mu.0, row.mu.1);
        let closed = capacity_closed_form(&expected_center)?;
        let mut bad = Vec::new();
        if center.as_ref() != Some(&expected_center) {
            bad.push(format!("centre {:?}", center.map(|c| format_rational(&c))));
        }
        if ab(&form.below) != below {
            bad.push(format!("(A,B) = ({}, {})", form.below.alpha, form.below.beta));
        }
        if ab(&form.above) != above {
            bad.push(format!("(A',B') = ({}, {})", form.above.alpha, form.above.beta));
        }
        if form.mu_at_center() != mu || mu_at(&class, &expected_center)? != mu {
            bad.push(format!("μ = {}", format_rational(&form.mu_at_center())));
        }
        if !form.satisfies_crossing_rule() {
            bad.push("crossing rule".to_string());
        }
        if closed.value != mu.clone() {
            bad.push(format!("c(centre) = {}", closed.value));
        }
        let detail = if bad.is_empty() {
            format!(
                "centre {}, μ = {}, u = {}, v = {}",
                format_rational(&expected_center),
                format_rational(&mu),
                form.lower_end.to_decimal(6),
                form.upper_end.to_decimal(6)
            )
        } else {
            bad.join("; ")
        };
        out.push(NamedCheck::new(row.class, bad.is_empty(), detail));
    }
    Ok(out)
}

/// The decimal columns of one obstruction-table row next to their exact
/// values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDecimals {
    pub class: &'static str,
    pub u: QuadraticNumber,
    pub v: QuadraticNumber,
    /// `μ − √a` at the centre.
    pub gap: QuadraticNumber,
    pub u_printed: &'static str,
    pub v_printed: &'static str,
    /// `μ − √a` as printed, in units of `10⁻⁶`.
    pub gap_printed: &'static str,
}

/// `|x − printed|` for a decimal literal, with `x` approximated to 30 places.
pub fn decimal_error(x: &QuadraticNumber, printed: &str) -> Rational {
    let approx = parse_decimal(&x.to_decimal(30)).expect("well-formed decimal");
    let target = parse_decimal(printed).expect("table decimals are well formed");
    (approx - target).abs()
}

/// `|gap·10⁶ − printed| / printed` for a gap printed in units of `10⁻⁶`.
pub fn gap_relative_error(gap: &QuadraticNumber, printed: &str) -> Rational {
    let target = parse_decimal(printed).expect("table decimals are well formed");
    let scaled = gap.scale(&int(1_000_000));
    decimal_error(&scaled, printed) / target
}

/// Exact `u`, `v` and `μ − √a` for every row of [`OBSTRUCTION_TABLE`].
pub fn table_t1_decimals() -> Result<Vec<TableDecimals>, CapacityError> {
    OBSTRUCTION_TABLE
        .iter()
        .map(|row| {
            let class = tables::class(row.class);
            let center = tables::center(row.center);
            let form = local_form_at(&class, &center)?;
            let root = QuadraticNumber::sqrt_of(&center).expect("positive");
            let gap = QuadraticNumber::from(mu_at(&class, &center)?).try_sub(&root).expect("rational minus surd");
            Ok(TableDecimals {
                class: row.class,
                u: form.lower_end,
                v: form.upper_end,
                gap,
                u_printed: row.u,
                v_printed: row.v,
                gap_printed: row.gap_micro,
            })
        })
        .collect()
}

/// `μ(a) − √a` at the centre of a table class, as a decimal string.
pub fn center_gap(class: &ExceptionalClass, center: &Rational, digits: usize) -> Result<String, CapacityError> {
    let mu = QuadraticNumber::from(mu_at(class, center)?);
    let root = QuadraticNumber::sqrt_of(center).expect("positive");
    Ok(mu.try_sub(&root).expect("rational minus surd").to_decimal(digits))
}

/// True when `class` is perfect at `b_n`: `μ(b_n) = c(b_n)`.
pub fn is_perfect_at_bn(class: &ExceptionalClass, n: i64) -> Result<bool, CapacityError> {
    let s = staircase_point(n)?;
    Ok(mu_at(class, &s.b_n)? == s.c_at_b_n)
}

/// The value `c(b_n)` as a reduced fraction `g_{n+2}/g_{n+1}`.
pub fn c_at_bn(n: i64) -> Result<Rational, CapacityError> {
    Ok(staircase_point(n)?.c_at_b_n)
}

/// `q² (u² − 7u + 1)` for `u = p/q`.
pub fn hh_quadratic(u: &Rational) -> BigInt {
    let (p, q) = (u.numer(), u.denom());
    p * p - BigInt::from(7) * p * q + q * q
}

/// `j² + 7j + 1`.
pub fn hh_target(j: i64) -> BigInt {
    let j = BigInt::from(j);
    &j * &j + BigInt::from(7) * &j + BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{find_center, is_diophantine, is_member};

    fn c(text: &str) -> ExceptionalClass {
        text.parse().unwrap()
    }

    #[test]
    fn staircase_classes() {
        assert_eq!(class_e_bn(0).unwrap(), c("1;1,1"));
        assert_eq!(class_e_bn(1).unwrap(), c("2;1^5"));
        assert_eq!(class_e_bn(2).unwrap(), c("5;2^6,1,1"));
        assert_eq!(class_e_an(2).unwrap(), c("10;4^6,1^5"));
        assert_eq!(class_e_an(3).unwrap(), c("65;25^6,19,6^3,1^7"));
        assert_eq!(class_e_an(4).unwrap(), c("442;169^6,142,27^5,7^3,6,1^7"));
        for n in 0..=5 {
            let e = class_e_bn(n).unwrap();
            assert!(is_diophantine(&e) && is_member(&e), "E(b_{n})");
            assert!(is_perfect_at_bn(&e, n).unwrap());
        }
    }

    #[test]
    fn b_ki_classes() {
        assert_eq!(class_b_ki(1, 2).unwrap(), c("21;8^6,7,2,1^5"));
        assert_eq!(class_b_ki(1, 1).unwrap(), class_e_bn(3).unwrap());
        for k in 1..=3 {
            assert_eq!(class_b_ki(k, 0).unwrap(), class_e_bn(2 * k).unwrap());
            for i in 0..=4 {
                let e = class_b_ki(k, i).unwrap();
                assert_eq!(BigInt::from(e.d), b_ki_degree(k, i), "d_{k}({i})");
                assert_eq!(b_ki(k, i).unwrap(), convergent_points(k).unwrap().v(1 + 3 * i));
            }
        }
        for i in 0..=4 {
            let e = class_b_ki(1, i).unwrap();
            let mut m = vec![3 * i + 2; 6];
            m.push(3 * i + 1);
            if i > 0 {
                m.push(i);
            }
            m.extend(std::iter::repeat_n(1, (2 * i + 1) as usize));
            assert_eq!(e, ExceptionalClass::new(8 * i + 5, m));
        }
    }

    #[test]
    fn convergents_and_points() {
        assert_eq!(convergent(2).unwrap(), ratio(41, 6));
        assert_eq!(convergent(3).unwrap(), ratio(48, 7));
        assert_eq!(convergent(5).unwrap(), ratio(329, 48));
        assert_eq!(convergent_points(1).unwrap().e(), ratio(55, 8));
        for k in 1..=4 {
            let pts = convergent_points(k).unwrap();
            for j in 1..=10 {
                assert_eq!(hh_quadratic(&pts.u(j)), hh_target(j));
            }
        }
    }

    #[test]
    fn ghost_steps() {
        let step = ghost_class(1).unwrap();
        assert_eq!(step.profile.eval(&ratio(55, 8)), Some(ratio(55, 21)));
        assert_eq!(step.profile.eval(&ratio(41, 6)), Some(ratio(47, 18)));
        for k in 1..=3 {
            let check = verify_ghost(k).unwrap();
            assert!(check.passed, "{}", check.detail);
        }
    }

    #[test]
    fn closed_form_values() {
        let v = |p, q| capacity_closed_form(&ratio(p, q)).unwrap().value;
        let r = |p, q| QuadraticNumber::from(ratio(p, q));
        assert_eq!(v(1, 1), r(1, 1));
        assert_eq!(v(2, 1), r(2, 1));
        assert_eq!(v(3, 1), r(2, 1));
        assert_eq!(v(4, 1), r(2, 1));
        assert_eq!(v(5, 1), r(5, 2));
        assert_eq!(v(6, 1), r(5, 2));
        assert_eq!(v(7, 1), r(8, 3));
        assert_eq!(v(8, 1), r(17, 6));
        assert_eq!(v(9, 1), r(3, 1));
        assert_eq!(v(13, 2), r(13, 5));
        assert_eq!(v(57, 8), r(1025, 384));
        assert!(capacity_closed_form(&ratio(1, 2)).is_err());
    }

    #[test]
    fn search_examples() {
        let s = capacity_search(&ratio(65, 9), DEFAULT_SEARCH_DEGREE).unwrap();
        assert_eq!(s.value, QuadraticNumber::from(ratio(43, 16)));
        assert_eq!(s.witnesses, vec![c("16;6^7,1^5")]);
        let s = capacity_search(&int(8), DEFAULT_SEARCH_DEGREE).unwrap();
        assert_eq!(s.value, QuadraticNumber::from(ratio(17, 6)));
        assert_eq!(s.witnesses, vec![c("6;3,2^7")]);
        let s = capacity_search(&ratio(35, 4), DEFAULT_SEARCH_DEGREE).unwrap();
        assert_eq!(s.value, QuadraticNumber::sqrt_of(&ratio(35, 4)).unwrap());
        assert!(s.witnesses.is_empty());
        assert!(capacity_search(&int(6), DEFAULT_SEARCH_DEGREE).is_err());
    }

    #[test]
    fn table_t1_recomputed() {
        for check in verify_table_t1().unwrap() {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[test]
    fn table_decimals_within_printed_precision() {
        use crate::num::decimal_half_ulp;
        for row in table_t1_decimals().unwrap() {
            assert!(decimal_error(&row.u, row.u_printed) <= decimal_half_ulp(row.u_printed), "{} u = {}", row.class, row.u.to_decimal(8));
            assert!(decimal_error(&row.v, row.v_printed) <= decimal_half_ulp(row.v_printed), "{} v = {}", row.class, row.v.to_decimal(8));
            assert!(gap_relative_error(&row.gap, row.gap_printed) <= ratio(1, 100), "{} gap", row.class);
        }
    }

    #[test]
    fn graphs() {
        let g1 = emit_graph(&int(1), &int(2), &ratio(1, 4)).unwrap();
        assert_eq!(g1.segments.len(), 1);
        assert_eq!(g1.segments[0].shape, linear(int(1), int(0)));
        let g2 = emit_graph(&int(6), &int(7), &ratio(1, 10)).unwrap();
        let bps = g2.breakpoints();
        for x in [ratio(25, 4), ratio(13, 2), ratio(169, 25), ratio(34, 5)] {
            assert!(bps.contains(&QuadraticNumber::from(x)));
        }
        assert!(g2.is_continuous() && g2.samples_nondecreasing());
        let g3 = emit_graph(&ratio(289, 36), &int(9), &ratio(1, 8)).unwrap();
        assert_eq!(g3.segments.len(), 1);
        assert_eq!(g3.segments[0].shape, SegmentShape::Sqrt);
        let g4 = emit_graph(&int(1), &int(9), &ratio(1, 16)).unwrap();
        assert!(g4.is_continuous() && g4.samples_nondecreasing());
    }

    #[test]
    fn b_ki_without_center() {
        for i in 3..=5 {
            assert_eq!(find_center(&class_b_ki(1, i).unwrap()).unwrap(), None);
        }
    }
}
