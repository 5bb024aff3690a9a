//! Exact Aumann-Shapley-Shubik attribution.
//!
//! For a single monomial `x_I` the attribution to `i in I` is
//!
//! ```text
//! z_i = (s_i - r_i) * sum_k w(k, |I|) * X_k,   X_k = sum_{K ⊆ I-{i}, |K| = k} s_K r_{I-{i}-K}
//! ```
//!
//! with Shapley order weights `w(k, n) = k! (n-1-k)! / n!`. The partial sums
//! `X_k` come from a row-by-row dynamic program over the variables of
//! `I - {i}` that keeps two rows of length at most `|I|`, giving `O(|I|^2)`
//! time and `O(|I|)` memory per monomial. Iterating over monomials and adding
//! the endpoint differences of the separable terms gives the full attribution.
//!
//! Conditioning: the recursion is a sum of products of up to `|I| - 1`
//! endpoint values. Relative error grows roughly with the dynamic range of
//! those products, so inputs with `|r|, |s| >> 1` on long monomials lose
//! digits; the optional compensated summation only tightens the final sum.

use crate::characteristic::{AttributionResult, CharacteristicFunction, ValuePair};
use crate::error::{AttribError, Result};
use crate::function::Evaluable;

/// Shapley order weight `k! (n-1-k)! / n!`, the weight of a coalition of size
/// `k` preceding a given player among `n`.
///
/// Computed by the product recurrence `w_{k+1} = w_k (k+1) / (n-1-k)` from
/// `w_0 = 1/n`, never through factorials.
pub fn shapley_weight(k: usize, n: usize) -> Result<f64> {
    if n == 0 || k >= n {
        return Err(AttribError::InvalidArgument(format!(
            "shapley weight needs 0 <= k < n, got k = {k}, n = {n}"
        )));
    }
    // symmetric in k <-> n-1-k; walk the shorter side
    let k = k.min(n - 1 - k);
    let mut w = 1.0 / n as f64;
    for j in 0..k {
        w *= (j + 1) as f64 / (n - 1 - j) as f64;
    }
    Ok(w)
}

/// All weights `w(0, n) .. w(n-1, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyWeightTable {
    n: usize,
    w: Vec<f64>,
}

impl ShapleyWeightTable {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(AttribError::InvalidArgument("weight table for n = 0".into()));
        }
        let mut w = Vec::with_capacity(n);
        let mut cur = 1.0 / n as f64;
        for k in 0..n {
            w.push(cur);
            if k + 1 < n {
                cur *= (k + 1) as f64 / (n - 1 - k) as f64;
            }
        }
        Ok(ShapleyWeightTable { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Two-row state of the partial-sum dynamic program.
///
/// Rows are stored normalized by the binomial coefficient,
/// `mean[k] = X_{k,m} / C(m, k)`, so the recursion
///
/// ```text
/// X_{k,m} = s_m X_{k-1,m-1} + r_m X_{k,m-1}
/// ```
///
/// becomes a convex update that stays finite for thousands of variables,
/// where the raw sums and the individual weights would over- and underflow.
/// Since `w(k, n) * C(n-1, k) = 1/n`, the weighted sum needs no weights at all.
#[derive(Debug, Clone)]
pub struct DpState {
    m: usize,
    cur: Vec<f64>,
    prev: Vec<f64>,
}

impl DpState {
    /// A state able to absorb up to `max_vars` variables without reallocating.
    pub fn with_capacity(max_vars: usize) -> Self {
        let mut cur = Vec::with_capacity(max_vars + 1);
        cur.push(1.0);
        DpState {
            m: 0,
            cur,
            prev: Vec::with_capacity(max_vars + 1),
        }
    }

    /// Resets to `X_{0,0} = 1`.
    pub fn reset(&mut self) {
        self.m = 0;
        self.cur.clear();
        self.cur.push(1.0);
        self.prev.clear();
    }

    /// Number of variables absorbed so far.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Absorbs variable `m+1` with endpoints `r_m`, `s_m`.
    pub fn push(&mut self, r: f64, s: f64) {
        std::mem::swap(&mut self.prev, &mut self.cur);
        let m = self.m + 1;
        let inv = 1.0 / m as f64;
        self.cur.clear();
        self.cur.push(r * self.prev[0]);
        for k in 1..m {
            let from_s = k as f64 * inv * s * self.prev[k - 1];
            let from_r = (m - k) as f64 * inv * r * self.prev[k];
            self.cur.push(from_s + from_r);
        }
        self.cur.push(s * self.prev[m - 1]);
        self.m = m;
    }

    /// `X_{k,m} / C(m, k)`.
    pub fn mean(&self, k: usize) -> f64 {
        self.cur[k]
    }

    pub fn means(&self) -> &[f64] {
        &self.cur
    }

    /// The raw partial sum `X_{k,m}`. Overflows for large `m`.
    pub fn sum(&self, k: usize) -> f64 {
        self.cur[k] * binomial(self.m, k)
    }

    /// Allocated lengths of the two rows.
    pub fn row_capacities(&self) -> (usize, usize) {
        (self.cur.capacity(), self.prev.capacity())
    }

    /// Current lengths of the two rows.
    pub fn row_lengths(&self) -> (usize, usize) {
        (self.cur.len(), self.prev.len())
    }
}

fn binomial(m: usize, k: usize) -> f64 {
    let k = k.min(m - k);
    (0..k).fold(1.0, |acc, j| acc * (m - j) as f64 / (j + 1) as f64)
}

/// Summation mode for the final reduction over the dynamic-program row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Plain,
    /// Kahan-compensated.
    Compensated,
}

fn reduce(values: &[f64], mode: Summation) -> f64 {
    match mode {
        Summation::Plain => values.iter().sum(),
        Summation::Compensated => {
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for &v in values {
                let y = v - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            sum
        }
    }
}

/// Attribution to variable `i` of the single term `coeff * x_I`.
///
/// `subset` must not repeat a variable; `i` must belong to it.
pub fn attribute_monomial(coeff: f64, subset: &[usize], vp: &ValuePair, i: usize) -> Result<f64> {
    let mut dp = DpState::with_capacity(subset.len());
    attribute_monomial_with(&mut dp, Summation::Plain, coeff, subset, vp, i)
}

/// As [`attribute_monomial`], reusing a caller-owned state.
pub fn attribute_monomial_with(
    dp: &mut DpState,
    mode: Summation,
    coeff: f64,
    subset: &[usize],
    vp: &ValuePair,
    i: usize,
) -> Result<f64> {
    if !subset.contains(&i) {
        return Err(AttribError::NotInMonomial {
            index: i,
            subset: subset.to_vec(),
        });
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= vp.n()) {
        return Err(AttribError::IndexOutOfRange { index: bad, n: vp.n() });
    }
    let delta = vp.delta(i);
    if delta == 0.0 || coeff == 0.0 {
        return Ok(0.0);
    }
    let (r, s) = (vp.r(), vp.s());
    dp.reset();
    // ascending index order over I - {i}
    let mut others: Vec<usize> = subset.iter().copied().filter(|&j| j != i).collect();
    others.sort_unstable();
    if others.windows(2).any(|w| w[0] == w[1]) || others.len() + 1 != subset.len() {
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        return Err(AttribError::RepeatedVariable { subset: sorted });
    }
    for &j in &others {
        dp.push(r[j], s[j]);
    }
    let avg = reduce(dp.means(), mode) / subset.len() as f64;
    Ok(coeff * delta * avg)
}

/// Exact Aumann-Shapley-Shubik attribution of `f(s) - f(r)`.
pub fn attribute_ass(f: &CharacteristicFunction, vp: &ValuePair) -> Result<AttributionResult> {
    attribute_ass_with(f, vp, Summation::Plain)
}

pub fn attribute_ass_with(
    f: &CharacteristicFunction,
    vp: &ValuePair,
    mode: Summation,
) -> Result<AttributionResult> {
    vp.check_dim(f.n())?;
    let n = f.n();
    let mut z = vec![0.0; n];
    let max_len = f
        .multilinear_part()
        .terms()
        .map(|(k, _)| k.len())
        .max()
        .unwrap_or(0);
    let mut dp = DpState::with_capacity(max_len);
    for (subset, coeff) in f.multilinear_part().terms() {
        for &i in subset {
            z[i] += attribute_monomial_with(&mut dp, mode, coeff, subset, vp, i)?;
        }
    }
    for t in f.separable_terms() {
        z[t.var] += t.kind.evaluate(vp.s()[t.var])? - t.kind.evaluate(vp.r()[t.var])?;
    }
    let total = f.evaluate(vp.s())? - f.evaluate(vp.r())?;
    Ok(AttributionResult::new("ass", z, total))
}

/// Endpoint-gradient baseline `z_i = d_i f(s) (s_i - r_i)`. Not complete in general.
pub fn attribute_naive(f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
    vp.check_dim(f.n())?;
    let z = (0..f.n())
        .map(|i| Ok(f.partial(i, vp.s())? * vp.delta(i)))
        .collect::<Result<Vec<_>>>()?;
    let total = f.value(vp.s())? - f.value(vp.r())?;
    Ok(AttributionResult::new("naive", z, total))
}
