//! Weight expansions `w(a)`, normalized weights `W(a)`, the linear forms of
//! the weights near `a`, and the mirror identities.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cfrac::{alpha_beta, cf_expand, convergents, mirror, CfError, ContinuedFraction};
use crate::num::{format_rational, Rational};

/// Invalid weight-expansion input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight expansions are defined here for a ≥ 1, got {0}")]
    BelowOne(String),
    #[error(transparent)]
    ContinuedFraction(#[from] CfError),
}

/// Which side of a point a one-sided statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    /// The other side.
    pub fn opposite(self) -> Self {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }
}

/// The block form `(x_0^{×ℓ_0}, …, x_N^{×ℓ_N})` of `w(a)`, with `x_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightExpansion {
    a: Rational,
    cf: ContinuedFraction,
    blocks: Vec<(Rational, u64)>,
}

/// Weight blocks for an explicit (possibly relaxed) term list with value `a`.
fn blocks_from_terms(a: &Rational, cf: &ContinuedFraction) -> Vec<(Rational, u64)> {
    let terms = cf.terms();
    let mut blocks = Vec::with_capacity(terms.len());
    let (mut u, mut v) = (Rational::one(), a - Rational::from_integer(BigInt::from(terms[0])));
    blocks.push((u.clone(), terms[0]));
    for &t in &terms[1..] {
        blocks.push((v.clone(), t));
        let next = &u - Rational::from_integer(BigInt::from(t)) * &v;
        u = v;
        v = next;
    }
    blocks
}

impl WeightExpansion {
    /// The expanded rational `a`.
    pub fn source(&self) -> &Rational {
        &self.a
    }

    /// The continued fraction whose terms are the block multiplicities.
    pub fn continued_fraction(&self) -> &ContinuedFraction {
        &self.cf
    }

    /// Blocks `(x_j, ℓ_j)`.
    pub fn blocks(&self) -> &[(Rational, u64)] {
        &self.blocks
    }

    /// The length `M = Σ ℓ_j` of the flattened sequence.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|&(_, l)| l as usize).sum()
    }

    /// Always false: every expansion has a first block.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The flattened weight sequence.
    pub fn flatten(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.len());
        for (x, l) in &self.blocks {
            out.extend(std::iter::repeat_n(x.clone(), *l as usize));
        }
        out
    }

    /// The weight at flattened position `i`, if in range.
    pub fn weight_at(&self, i: usize) -> Option<&Rational> {
        let mut start = 0usize;
        for (x, l) in &self.blocks {
            start += *l as usize;
            if i < start {
                return Some(x);
            }
        }
        None
    }

    /// Normalized blocks `(X_j, ℓ_j)` with `X_j = q·x_j`.
    pub fn normalized_blocks(&self) -> Vec<(BigInt, u64)> {
        let q = Rational::from_integer(self.a.denom().clone());
        self.blocks.iter().map(|(x, l)| ((x * &q).to_integer(), *l)).collect()
    }

    /// Dot product `m·w(a)` with an integer vector, zero-padding the shorter side.
    pub fn dot(&self, m: &[i64]) -> Rational {
        let mut sum = Rational::zero();
        let mut idx = 0usize;
        for (x, l) in &self.blocks {
            let end = (idx + *l as usize).min(m.len());
            if idx >= end {
                break;
            }
            let s: i128 = m[idx..end].iter().map(|&v| v as i128).sum();
            sum += x * Rational::from_integer(BigInt::from(s));
            idx += *l as usize;
        }
        sum
    }

    /// JSON form `{"a": "p/q", "blocks": [["x", ℓ], …]}`.
    pub fn to_json_string(&self) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|(x, l)| format!("[\"{}\",{}]", format_rational(x), l))
            .collect();
        format!("{{\"a\":\"{}\",\"blocks\":[{}]}}", format_rational(&self.a), blocks.join(","))
    }
}

/// The weight expansion of a rational `a ≥ 1`.
pub fn weight_expansion(a: &Rational) -> Result<WeightExpansion, WeightError> {
    if a < &Rational::one() {
        return Err(WeightError::BelowOne(format_rational(a)));
    }
    let cf = cf_expand(a)?;
    let blocks = blocks_from_terms(a, &cf);
    Ok(WeightExpansion { a: a.clone(), cf, blocks })
}

/// Weight blocks of an explicit term list (canonical or relaxed) with `ℓ_0 ≥ 1`.
pub fn weight_expansion_of_terms(cf: &ContinuedFraction) -> Result<WeightExpansion, WeightError> {
    let a = cf.value();
    if a < Rational::one() {
        return Err(WeightError::BelowOne(format_rational(&a)));
    }
    let blocks = blocks_from_terms(&a, cf);
    Ok(WeightExpansion { a, cf: cf.clone(), blocks })
}

/// The normalized weight vector `W(a) = q·w(a)` (flattened).
pub fn normalized_weights(a: &Rational) -> Result<Vec<BigInt>, WeightError> {
    let w = weight_expansion(a)?;
    let mut out = Vec::with_capacity(w.len());
    for (x, l) in w.normalized_blocks() {
        out.extend(std::iter::repeat_n(x, l as usize));
    }
    Ok(out)
}

/// `W(a)·Ŵ(⟨a])` computed through the coefficient sequence: the signed mirror
/// equals `(α_0^{×ℓ_0}, …, α_N^{×ℓ_N})`.
pub fn mirror_product(a: &Rational) -> Result<BigInt, WeightError> {
    let w = weight_expansion(a)?;
    let ab = alpha_beta(w.continued_fraction());
    Ok(w.normalized_blocks()
        .iter()
        .zip(&ab.alpha)
        .map(|((x, l), al)| x * BigInt::from(*l) * al)
        .sum())
}

/// `W(a)·Ŵ(⟨a])` computed literally: expand the mirror's own normalized
/// weights, reverse them block-wise and alternate signs.
pub fn mirror_product_direct(a: &Rational) -> Result<BigInt, WeightError> {
    let w = weight_expansion(a)?;
    let m = mirror(w.continued_fraction())?;
    let wm = weight_expansion_of_terms(&m)?;
    let y = wm.normalized_blocks();
    let n = y.len() - 1;
    let x = w.normalized_blocks();
    let mut total = BigInt::zero();
    for (j, (xj, lj)) in x.iter().enumerate() {
        let (yv, ly) = &y[n - j];
        debug_assert_eq!(ly, lj);
        let sign = if (n - j) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        total += xj * yv * BigInt::from(*lj) * sign;
    }
    Ok(total)
}

/// An affine form `α + β z` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub alpha: BigInt,
    pub beta: BigInt,
}

impl LinearForm {
    pub fn new(alpha: BigInt, beta: BigInt) -> Self {
        Self { alpha, beta }
    }

    /// Evaluates the form at `z`.
    pub fn eval(&self, z: &Rational) -> Rational {
        Rational::from_integer(self.alpha.clone()) + Rational::from_integer(self.beta.clone()) * z
    }

    /// Sum of two forms.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.alpha + &other.alpha, &self.beta + &other.beta)
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Self::new(-&self.alpha, -&self.beta)
    }

    /// Integer multiple.
    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.alpha * k, &self.beta * k)
    }
}

/// The linear forms `x_j(z) = α_j + z β_j`, `j = 0, …, N+1`, which give the
/// weights of `z` on the one-sided neighbourhood of `a` recorded in `side`
/// (below `a` if `N` is odd, above if `N` is even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightLinearForms {
    pub a: Rational,
    pub side: Side,
    pub multiplicities: Vec<u64>,
    pub forms: Vec<LinearForm>,
}

/// The side of `a` on which the block forms of `a` stay valid unchanged.
pub fn valid_side(cf: &ContinuedFraction) -> Side {
    if cf.last_index() % 2 == 1 {
        Side::Below
    } else {
        Side::Above
    }
}

/// Linear forms of the weights near `a ≥ 1`.
pub fn weight_linear_forms(a: &Rational) -> Result<WeightLinearForms, WeightError> {
    let w = weight_expansion(a)?;
    let cf = w.continued_fraction();
    let ab = alpha_beta(cf);
    let forms = ab
        .alpha
        .into_iter()
        .zip(ab.beta)
        .map(|(al, be)| LinearForm::new(al, be))
        .collect();
    Ok(WeightLinearForms {
        a: a.clone(),
        side: valid_side(cf),
        multiplicities: cf.terms().to_vec(),
        forms,
    })
}

/// The weights of every `z` sufficiently close to `a` on one side, as linear
/// forms in `z`: finitely many blocks followed by a tail form that repeats
/// for all remaining positions (the tail block's length grows without bound
/// as `z → a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSidedForms {
    pub blocks: Vec<(LinearForm, u64)>,
    pub tail: LinearForm,
}

impl OneSidedForms {
    /// `Σ m_i · form_i` for an integer vector `m`.
    pub fn dot(&self, m: &[i64]) -> LinearForm {
        let mut acc = LinearForm::new(BigInt::zero(), BigInt::zero());
        let mut idx = 0usize;
        for (f, l) in &self.blocks {
            let end = (idx + *l as usize).min(m.len());
            if idx < end {
                let s: i128 = m[idx..end].iter().map(|&v| v as i128).sum();
                acc = acc.add(&f.scale(&BigInt::from(s)));
            }
            idx += *l as usize;
        }
        if idx < m.len() {
            let s: i128 = m[idx..].iter().map(|&v| v as i128).sum();
            acc = acc.add(&self.tail.scale(&BigInt::from(s)));
        }
        acc
    }
}

/// One-sided weight forms of `z` near `a` on `side`.
///
/// On the valid side the blocks of `a` persist and `x_{N+1}` starts a long
/// new block. On the other side `z = [ℓ_0; …, ℓ_N − 1, 1, h, …]` with `h`
/// large, so the blocks are `…, x_N^{×(ℓ_N−1)}, (x_N + x_{N+1}), (−x_{N+1})^{×h}`.
pub fn one_sided_forms(a: &Rational, side: Side) -> Result<OneSidedForms, WeightError> {
    let lf = weight_linear_forms(a)?;
    let n = lf.multiplicities.len() - 1;
    let mut blocks = Vec::with_capacity(n + 2);
    if side == lf.side {
        for j in 0..=n {
            blocks.push((lf.forms[j].clone(), lf.multiplicities[j]));
        }
        Ok(OneSidedForms { blocks, tail: lf.forms[n + 1].clone() })
    } else {
        for j in 0..n {
            blocks.push((lf.forms[j].clone(), lf.multiplicities[j]));
        }
        if lf.multiplicities[n] > 1 {
            blocks.push((lf.forms[n].clone(), lf.multiplicities[n] - 1));
        }
        blocks.push((lf.forms[n].add(&lf.forms[n + 1]), 1));
        Ok(OneSidedForms { blocks, tail: lf.forms[n + 1].neg() })
    }
}

/// `Σ_j ℓ_j x_j η_j` for the coefficient sequence η (α or β), used by the
/// linear mirror identities.
pub fn weighted_coefficient_sums(a: &Rational) -> Result<(Rational, Rational), WeightError> {
    let w = weight_expansion(a)?;
    let ab = alpha_beta(w.continued_fraction());
    let mut sa = Rational::zero();
    let mut sb = Rational::zero();
    for (j, (x, l)) in w.blocks().iter().enumerate() {
        let lx = x * Rational::from_integer(BigInt::from(*l));
        sa += &lx * Rational::from_integer(ab.alpha[j].clone());
        sb += &lx * Rational::from_integer(ab.beta[j].clone());
    }
    Ok((sa, sb))
}

/// `p_N(a)`, the numerator of `a` as produced by the convergent recursion.
pub fn last_numerator(a: &Rational) -> Result<BigInt, WeightError> {
    let cf = cf_expand(a)?;
    Ok(convergents(&cf).p(cf.last_index() as isize).clone())
}
