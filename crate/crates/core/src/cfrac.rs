//! Continued fractions, convergents, mirrors, the signed coefficient
//! sequences α and β, and Farey expansions with their labels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::num::Rational;

/// Invalid continued-fraction input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("continued fractions are only defined here for positive rationals, got {0}")]
    NonPositive(String),
    #[error("a continued fraction needs at least one term")]
    Empty,
    #[error("term {index} is zero; only the leading term may vanish")]
    ZeroTerm { index: usize },
    #[error("continued fraction term {0} does not fit in 64 bits")]
    TermOverflow(String),
    #[error("the mirror of a fraction with leading term 0 is undefined")]
    ZeroLeadingTerm,
}

/// A finite continued fraction `[ℓ_0; ℓ_1, …, ℓ_N]`.
///
/// `ℓ_0 = 0` is allowed (values below 1); all later terms are positive. The
/// canonical expansion of a rational has `ℓ_N ≥ 2` unless `N = 0`; the
/// relaxed form ending in `…, ℓ_N − 1, 1` is also representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    terms: Vec<u64>,
}

impl ContinuedFraction {
    /// Builds a fraction from explicit terms, validating positivity.
    pub fn from_terms(terms: Vec<u64>) -> Result<Self, CfError> {
        if terms.is_empty() {
            return Err(CfError::Empty);
        }
        if let Some(index) = terms.iter().skip(1).position(|&t| t == 0) {
            return Err(CfError::ZeroTerm { index: index + 1 });
        }
        Ok(Self { terms })
    }

    /// The terms `ℓ_0, …, ℓ_N`.
    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    /// The index `N` of the last term.
    pub fn last_index(&self) -> usize {
        self.terms.len() - 1
    }

    /// True when the last term is at least 2 (or the fraction has one term).
    pub fn is_canonical(&self) -> bool {
        self.terms.len() == 1 || *self.terms.last().expect("nonempty") >= 2
    }

    /// The relaxed form: a canonical `[…, ℓ_N]` with `ℓ_N ≥ 2` becomes
    /// `[…, ℓ_N − 1, 1]`. Already-relaxed fractions are returned unchanged.
    pub fn relaxed(&self) -> Self {
        let last = *self.terms.last().expect("nonempty");
        if last >= 2 {
            let mut terms = self.terms.clone();
            *terms.last_mut().expect("nonempty") = last - 1;
            terms.push(1);
            Self { terms }
        } else {
            self.clone()
        }
    }

    /// The canonical form (merges a trailing `…, ℓ, 1` into `…, ℓ + 1`).
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        terms.pop();
        *terms.last_mut().expect("at least two terms") += 1;
        Self { terms }
    }

    /// Evaluates the fraction exactly.
    pub fn value(&self) -> Rational {
        let c = convergents(self);
        let n = self.last_index() as isize;
        Rational::new(c.p(n).clone(), c.q(n).clone())
    }
}

/// Canonical continued fraction expansion of a positive rational.
pub fn cf_expand(a: &Rational) -> Result<ContinuedFraction, CfError> {
    if !a.is_positive() {
        return Err(CfError::NonPositive(crate::num::format_rational(a)));
    }
    let mut terms = Vec::new();
    let mut p = a.numer().clone();
    let mut q = a.denom().clone();
    while !q.is_zero() {
        let (t, r) = p.div_rem(&q);
        terms.push(t.to_u64().ok_or_else(|| CfError::TermOverflow(t.to_string()))?);
        p = q;
        q = r;
    }
    // Euclid's algorithm yields a final term ≥ 2 automatically unless a is an
    // integer, so the result is canonical.
    Ok(ContinuedFraction { terms })
}

/// The mirror `[ℓ_N; ℓ_{N−1}, …, ℓ_0]`: the terms reversed verbatim.
///
/// No renormalisation takes place, so `mirror(mirror(cf)) == cf` exactly. The
/// mirror of a canonical fraction with `ℓ_0 = 1` ends in 1 and is therefore
/// in relaxed form; callers needing canonical form apply
/// [`ContinuedFraction::canonical`].
pub fn mirror(cf: &ContinuedFraction) -> Result<ContinuedFraction, CfError> {
    if cf.terms[0] == 0 {
        return Err(CfError::ZeroLeadingTerm);
    }
    let mut terms = cf.terms.clone();
    terms.reverse();
    Ok(ContinuedFraction { terms })
}

/// Convergent numerators and denominators `p_k, q_k` for `k = −1, …, N`
/// with `p_{−1} = 1`, `q_{−1} = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergents {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl Convergents {
    /// `p_k` for `−1 ≤ k ≤ N`.
    pub fn p(&self, k: isize) -> &BigInt {
        &self.p[(k + 1) as usize]
    }

    /// `q_k` for `−1 ≤ k ≤ N`.
    pub fn q(&self, k: isize) -> &BigInt {
        &self.q[(k + 1) as usize]
    }

    /// The convergent `p_k/q_k` for `0 ≤ k ≤ N`.
    pub fn value(&self, k: usize) -> Rational {
        Rational::new(self.p[k + 1].clone(), self.q[k + 1].clone())
    }

    /// Number of convergents `N + 1`.
    pub fn len(&self) -> usize {
        self.p.len() - 1
    }

    /// Always false: a fraction has at least one convergent.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Convergents by the recursion `p_k = ℓ_k p_{k−1} + p_{k−2}` (same for q),
/// seeded with `p_{−2} = 0, p_{−1} = 1, q_{−2} = 1, q_{−1} = 0`.
pub fn convergents(cf: &ContinuedFraction) -> Convergents {
    let mut p = vec![BigInt::one()];
    let mut q = vec![BigInt::zero()];
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    for &t in &cf.terms {
        let t = BigInt::from(t);
        let np = &t * p.last().expect("seeded") + &p2;
        let nq = &t * q.last().expect("seeded") + &q2;
        p2 = p.last().expect("seeded").clone();
        q2 = q.last().expect("seeded").clone();
        p.push(np);
        q.push(nq);
    }
    Convergents { p, q }
}

/// The signed sequences `α_j, β_j`, `j = 0, …, N+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaBetaSeq {
    pub alpha: Vec<BigInt>,
    pub beta: Vec<BigInt>,
}

/// `α_0 = 1, α_1 = −ℓ_0`, `β_0 = 0, β_1 = 1`, and
/// `x_j = x_{j−2} − ℓ_{j−1} x_{j−1}` for `j = 2, …, N+1`.
pub fn alpha_beta(cf: &ContinuedFraction) -> AlphaBetaSeq {
    let n = cf.terms.len();
    let mut alpha = vec![BigInt::one(), -BigInt::from(cf.terms[0])];
    let mut beta = vec![BigInt::zero(), BigInt::one()];
    for j in 2..=n {
        let l = BigInt::from(cf.terms[j - 1]);
        let na = &alpha[j - 2] - &l * &alpha[j - 1];
        let nb = &beta[j - 2] - &l * &beta[j - 1];
        alpha.push(na);
        beta.push(nb);
    }
    AlphaBetaSeq { alpha, beta }
}

/// One step of the Farey expansion: a new fraction together with the indices
/// of the two earlier entries whose Farey sum it is. Index `None` stands for
/// the formal fraction `1/0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyEntry {
    pub numer: BigInt,
    pub denom: BigInt,
    pub parents: Option<(usize, Option<usize>)>,
}

impl FareyEntry {
    /// The entry as a rational.
    pub fn value(&self) -> Rational {
        Rational::new(self.numer.clone(), self.denom.clone())
    }
}

/// Whether `a` lies strictly between `x = p/q` and `y` (with `y = None`
/// meaning `+∞`).
fn strictly_between(a: &Rational, x: &Rational, y: Option<&Rational>) -> bool {
    match y {
        None => a > x,
        Some(y) => (a > x && a < y) || (a < x && a > y),
    }
}

/// The Farey expansion `ρ_0 = 0/1, ρ_1 = 1/1, …, ρ_N = a` with the parent
/// indices of every later entry.
///
/// Each new entry is `ρ_{i+1} = ρ_i ⊕ ρ_j`, the Farey sum with the most recent
/// earlier entry `ρ_j` (or `1/0`) such that `a` lies strictly between `ρ_i`
/// and `ρ_j`. Adjacent pairs of the construction are unimodular.
pub fn farey_expansion_entries(a: &Rational) -> Result<Vec<FareyEntry>, CfError> {
    if !a.is_positive() {
        return Err(CfError::NonPositive(crate::num::format_rational(a)));
    }
    let mut out = vec![
        FareyEntry { numer: BigInt::zero(), denom: BigInt::one(), parents: None },
        FareyEntry { numer: BigInt::one(), denom: BigInt::one(), parents: None },
    ];
    let mut values = vec![Rational::zero(), Rational::one()];
    let mut i = 1;
    while &values[i] != a {
        let j = (0..i)
            .rev()
            .find(|&j| strictly_between(a, &values[i], Some(&values[j])));
        let (numer, denom) = match j {
            Some(j) => (&out[i].numer + &out[j].numer, &out[i].denom + &out[j].denom),
            None => (&out[i].numer + BigInt::one(), out[i].denom.clone()),
        };
        values.push(Rational::new(numer.clone(), denom.clone()));
        out.push(FareyEntry { numer, denom, parents: Some((i, j)) });
        i += 1;
    }
    Ok(out)
}

/// The Farey expansion as a list of rationals.
pub fn farey_expansion(a: &Rational) -> Result<Vec<Rational>, CfError> {
    Ok(farey_expansion_entries(a)?.iter().map(FareyEntry::value).collect())
}

/// Farey weights `λ_i/λ_1`, `i = 1, …, N`, where `λ_N = 1` and each earlier
/// label is the sum of the labels of the later entries it is a parent of.
pub fn farey_weights(a: &Rational) -> Result<Vec<Rational>, CfError> {
    let entries = farey_expansion_entries(a)?;
    let n = entries.len() - 1;
    let mut labels = vec![BigInt::zero(); n + 1];
    labels[n] = BigInt::one();
    for i in (2..=n).rev() {
        let (p1, p2) = entries[i].parents.expect("later entries have parents");
        let li = labels[i].clone();
        labels[p1] += &li;
        if let Some(p2) = p2 {
            labels[p2] += &li;
        }
    }
    let l1 = labels[1].clone();
    Ok(labels[1..].iter().map(|l| Rational::new(l.clone(), l1.clone())).collect())
}
