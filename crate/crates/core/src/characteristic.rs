//! Characteristic functions of the form `f = multilinear + additively separable`.
//!
//! The multilinear part is a sparse map from sorted index subsets to
//! coefficients. The separable part is a list of univariate terms drawn from a
//! closed registry of kinds, each with an exact symbolic derivative and an
//! exact composition with affine substitutions `x -> (x - d) / c`.
//!
//! Variable indices are zero-based throughout the library.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{AttribError, Result};

/// Sparse multilinear polynomial `sum_I c_I prod_{i in I} x_i`.
///
/// Keys are strictly increasing index lists; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultilinearRepr", into = "MultilinearRepr")]
pub struct MultilinearPoly {
    n: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

#[derive(Serialize, Deserialize)]
struct MultilinearRepr {
    n: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl From<MultilinearPoly> for MultilinearRepr {
    fn from(p: MultilinearPoly) -> Self {
        MultilinearRepr {
            n: p.n,
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl TryFrom<MultilinearRepr> for MultilinearPoly {
    type Error = AttribError;

    fn try_from(repr: MultilinearRepr) -> Result<Self> {
        MultilinearPoly::from_terms(repr.n, repr.terms)
    }
}

impl MultilinearPoly {
    pub fn new(n: usize) -> Self {
        MultilinearPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I, S>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: IntoIterator<Item = usize>,
    {
        let mut p = MultilinearPoly::new(n);
        for (subset, coeff) in terms {
            p.add_term(subset, coeff)?;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `coeff * x_I` into the polynomial, merging with an existing term.
    pub fn add_term<S: IntoIterator<Item = usize>>(&mut self, subset: S, coeff: f64) -> Result<()> {
        if !coeff.is_finite() {
            return Err(AttribError::NonFinite(format!("coefficient {coeff}")));
        }
        let key = canonical_subset(subset, self.n)?;
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + coeff;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if coeff != 0.0 {
                    v.insert(coeff);
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, subset: &[usize]) -> f64 {
        let mut key = subset.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Terms in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mentions(&self, i: usize) -> bool {
        self.terms.keys().any(|k| k.binary_search(&i).is_ok())
    }

    /// Evaluates without a dimension check; `x` must have at least `n` entries.
    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, &c)| c * k.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    /// `d/dx_i` evaluated at `x`.
    pub fn partial_at(&self, i: usize, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.binary_search(&i).is_ok())
            .map(|(k, &c)| {
                c * k
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| x[j])
                    .product::<f64>()
            })
            .sum()
    }
}

fn canonical_subset<S: IntoIterator<Item = usize>>(subset: S, n: usize) -> Result<Vec<usize>> {
    let mut key: Vec<usize> = subset.into_iter().collect();
    key.sort_unstable();
    for w in key.windows(2) {
        if w[0] == w[1] {
            return Err(AttribError::RepeatedVariable { subset: key.clone() });
        }
    }
    if let Some(&last) = key.last() {
        if last >= n {
            return Err(AttribError::IndexOutOfRange { index: last, n });
        }
    }
    Ok(key)
}

/// Univariate function kinds allowed in the separable part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeparableKind {
    /// `coeffs[0] + coeffs[1] x + coeffs[2] x^2 + ...`
    Polynomial { coeffs: Vec<f64> },
    /// `slope * x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `coeff * ln(scale * x + shift)`
    Log { coeff: f64, scale: f64, shift: f64 },
    /// `coeff * exp(scale * x + shift)`
    Exp { coeff: f64, scale: f64, shift: f64 },
    /// `coeff * (scale * x + shift)^exponent`. Closes the registry under
    /// differentiation of `Log`.
    Power {
        coeff: f64,
        scale: f64,
        shift: f64,
        exponent: i32,
    },
}

impl SeparableKind {
    pub fn ln(coeff: f64) -> Self {
        SeparableKind::Log {
            coeff,
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn exp(coeff: f64) -> Self {
        SeparableKind::Exp {
            coeff,
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeparableKind::Polynomial { .. } => "poly",
            SeparableKind::Affine { .. } => "affine",
            SeparableKind::Log { .. } => "log",
            SeparableKind::Exp { .. } => "exp",
            SeparableKind::Power { .. } => "power",
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let v = match *self {
            SeparableKind::Polynomial { ref coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
            }
            SeparableKind::Affine { slope, intercept } => slope * x + intercept,
            SeparableKind::Log { coeff, scale, shift } => {
                let arg = scale * x + shift;
                if arg <= 0.0 || arg.is_nan() {
                    return Err(AttribError::Domain(format!(
                        "logarithm of non-positive argument {arg}"
                    )));
                }
                coeff * arg.ln()
            }
            SeparableKind::Exp { coeff, scale, shift } => coeff * (scale * x + shift).exp(),
            SeparableKind::Power {
                coeff,
                scale,
                shift,
                exponent,
            } => {
                let arg = scale * x + shift;
                if exponent < 0 && arg == 0.0 {
                    return Err(AttribError::Domain(format!(
                        "negative power {exponent} of zero"
                    )));
                }
                coeff * arg.powi(exponent)
            }
        };
        if !v.is_finite() {
            return Err(AttribError::NonFinite(format!(
                "{} term evaluated at {x}",
                self.name()
            )));
        }
        Ok(v)
    }

    /// Exact derivative; `None` when it vanishes identically.
    pub fn derivative(&self) -> Option<SeparableKind> {
        let d = match *self {
            SeparableKind::Polynomial { ref coeffs } => SeparableKind::Polynomial {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &a)| a * k as f64)
                    .collect(),
            },
            SeparableKind::Affine { slope, .. } => SeparableKind::Affine {
                slope: 0.0,
                intercept: slope,
            },
            SeparableKind::Log { coeff, scale, shift } => SeparableKind::Power {
                coeff: coeff * scale,
                scale,
                shift,
                exponent: -1,
            },
            SeparableKind::Exp { coeff, scale, shift } => SeparableKind::Exp {
                coeff: coeff * scale,
                scale,
                shift,
            },
            SeparableKind::Power {
                coeff,
                scale,
                shift,
                exponent,
            } => SeparableKind::Power {
                coeff: coeff * scale * exponent as f64,
                scale,
                shift,
                exponent: exponent - 1,
            },
        };
        (!d.is_zero()).then(|| d.trimmed())
    }

    pub fn scaled(&self, a: f64) -> SeparableKind {
        match *self {
            SeparableKind::Polynomial { ref coeffs } => SeparableKind::Polynomial {
                coeffs: coeffs.iter().map(|c| a * c).collect(),
            },
            SeparableKind::Affine { slope, intercept } => SeparableKind::Affine {
                slope: a * slope,
                intercept: a * intercept,
            },
            SeparableKind::Log { coeff, scale, shift } => SeparableKind::Log {
                coeff: a * coeff,
                scale,
                shift,
            },
            SeparableKind::Exp { coeff, scale, shift } => SeparableKind::Exp {
                coeff: a * coeff,
                scale,
                shift,
            },
            SeparableKind::Power {
                coeff,
                scale,
                shift,
                exponent,
            } => SeparableKind::Power {
                coeff: a * coeff,
                scale,
                shift,
                exponent,
            },
        }
    }

    /// Composition with `x -> (x - d) / c`.
    pub fn compose_affine(&self, c: f64, d: f64) -> Result<SeparableKind> {
        let inner_scale = |scale: f64, shift: f64| (scale / c, shift - scale * d / c);
        let out = match *self {
            SeparableKind::Polynomial { ref coeffs } => {
                // Horner over polynomials: acc <- acc * (x/c - d/c) + a_k
                let (lin1, lin0) = (1.0 / c, -d / c);
                let mut acc: Vec<f64> = Vec::with_capacity(coeffs.len());
                for &a in coeffs.iter().rev() {
                    let mut next = vec![0.0; acc.len() + 1];
                    for (k, &v) in acc.iter().enumerate() {
                        next[k] += v * lin0;
                        next[k + 1] += v * lin1;
                    }
                    next[0] += a;
                    acc = next;
                }
                SeparableKind::Polynomial { coeffs: acc }
            }
            SeparableKind::Affine { slope, intercept } => SeparableKind::Affine {
                slope: slope / c,
                intercept: intercept - slope * d / c,
            },
            SeparableKind::Log { coeff, scale, shift } => {
                let (scale, shift) = inner_scale(scale, shift);
                SeparableKind::Log { coeff, scale, shift }
            }
            SeparableKind::Exp { coeff, scale, shift } => {
                let (scale, shift) = inner_scale(scale, shift);
                SeparableKind::Exp { coeff, scale, shift }
            }
            SeparableKind::Power {
                coeff,
                scale,
                shift,
                exponent,
            } => {
                let (scale, shift) = inner_scale(scale, shift);
                SeparableKind::Power {
                    coeff,
                    scale,
                    shift,
                    exponent,
                }
            }
        };
        if !out.all_finite() {
            return Err(AttribError::Domain(format!(
                "{} term is not representable after substitution (c = {c}, d = {d})",
                self.name()
            )));
        }
        Ok(out.trimmed())
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            SeparableKind::Polynomial { ref coeffs } => coeffs.iter().all(|&c| c == 0.0),
            SeparableKind::Affine { slope, intercept } => slope == 0.0 && intercept == 0.0,
            SeparableKind::Log { coeff, .. }
            | SeparableKind::Exp { coeff, .. }
            | SeparableKind::Power { coeff, .. } => coeff == 0.0,
        }
    }

    fn all_finite(&self) -> bool {
        match *self {
            SeparableKind::Polynomial { ref coeffs } => coeffs.iter().all(|c| c.is_finite()),
            SeparableKind::Affine { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            SeparableKind::Log { coeff, scale, shift }
            | SeparableKind::Exp { coeff, scale, shift }
            | SeparableKind::Power {
                coeff, scale, shift, ..
            } => coeff.is_finite() && scale.is_finite() && shift.is_finite(),
        }
    }

    fn trimmed(mut self) -> SeparableKind {
        if let SeparableKind::Polynomial { ref mut coeffs } = self {
            while coeffs.last() == Some(&0.0) {
                coeffs.pop();
            }
        }
        self
    }

    /// Adds `other` into `self` when both share a shape. Returns false otherwise.
    fn try_merge(&mut self, other: &SeparableKind) -> bool {
        match (self, other) {
            (SeparableKind::Polynomial { coeffs: a }, SeparableKind::Polynomial { coeffs: b }) => {
                if a.len() < b.len() {
                    a.resize(b.len(), 0.0);
                }
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                true
            }
            (
                SeparableKind::Affine { slope, intercept },
                SeparableKind::Affine {
                    slope: s2,
                    intercept: i2,
                },
            ) => {
                *slope += s2;
                *intercept += i2;
                true
            }
            (
                SeparableKind::Log { coeff, scale, shift },
                SeparableKind::Log {
                    coeff: c2,
                    scale: sc2,
                    shift: sh2,
                },
            )
            | (
                SeparableKind::Exp { coeff, scale, shift },
                SeparableKind::Exp {
                    coeff: c2,
                    scale: sc2,
                    shift: sh2,
                },
            ) if *scale == *sc2 && *shift == *sh2 => {
                *coeff += c2;
                true
            }
            (
                SeparableKind::Power {
                    coeff,
                    scale,
                    shift,
                    exponent,
                },
                SeparableKind::Power {
                    coeff: c2,
                    scale: sc2,
                    shift: sh2,
                    exponent: e2,
                },
            ) if *scale == *sc2 && *shift == *sh2 && *exponent == *e2 => {
                *coeff += c2;
                true
            }
            _ => false,
        }
    }
}

/// A univariate term `f_i(x_i)` of the separable part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub var: usize,
    #[serde(flatten)]
    pub kind: SeparableKind,
}

/// `f(x) = sum_I c_I x_I + sum_k f_k(x_{i_k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicFunction {
    n: usize,
    multilinear: MultilinearPoly,
    separable: Vec<SeparableTerm>,
}

impl CharacteristicFunction {
    pub fn zero(n: usize) -> Self {
        CharacteristicFunction {
            n,
            multilinear: MultilinearPoly::new(n),
            separable: Vec::new(),
        }
    }

    pub fn from_parts(multilinear: MultilinearPoly, separable: Vec<SeparableTerm>) -> Result<Self> {
        let mut f = CharacteristicFunction::zero(multilinear.n());
        f.multilinear = multilinear;
        for t in separable {
            f.add_separable(t.var, t.kind)?;
        }
        Ok(f)
    }

    /// Builds a purely multilinear function from `(subset, coefficient)` pairs.
    pub fn multilinear<I, S>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: IntoIterator<Item = usize>,
    {
        Ok(CharacteristicFunction {
            n,
            multilinear: MultilinearPoly::from_terms(n, terms)?,
            separable: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn multilinear_part(&self) -> &MultilinearPoly {
        &self.multilinear
    }

    pub fn separable_terms(&self) -> &[SeparableTerm] {
        &self.separable
    }

    pub fn add_monomial<S: IntoIterator<Item = usize>>(&mut self, subset: S, coeff: f64) -> Result<()> {
        self.multilinear.add_term(subset, coeff)
    }

    /// Adds a separable term, merging it into an existing term of the same shape.
    pub fn add_separable(&mut self, var: usize, kind: SeparableKind) -> Result<()> {
        if var >= self.n {
            return Err(AttribError::IndexOutOfRange { index: var, n: self.n });
        }
        if !kind.all_finite() {
            return Err(AttribError::NonFinite(format!("{} term parameters", kind.name())));
        }
        if let Some(pos) = self
            .separable
            .iter_mut()
            .position(|t| t.var == var && t.kind.try_merge(&kind))
        {
            if self.separable[pos].kind.is_zero() {
                self.separable.remove(pos);
            }
            return Ok(());
        }
        if !kind.is_zero() {
            self.separable.push(SeparableTerm {
                var,
                kind: kind.trimmed(),
            });
        }
        Ok(())
    }

    pub fn is_multilinear(&self) -> bool {
        self.separable.is_empty()
    }

    /// True when some stored monomial or separable term references `i`.
    pub fn mentions(&self, i: usize) -> bool {
        self.multilinear.mentions(i) || self.separable.iter().any(|t| t.var == i)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(AttribError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut v = self.multilinear.evaluate_unchecked(x);
        for t in &self.separable {
            v += t.kind.evaluate(x[t.var])?;
        }
        Ok(v)
    }

    /// Value of `d f / d x_i` at `x`, without building the derivative function.
    pub fn partial_at(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if i >= self.n {
            return Err(AttribError::IndexOutOfRange { index: i, n: self.n });
        }
        let mut v = self.multilinear.partial_at(i, x);
        for t in self.separable.iter().filter(|t| t.var == i) {
            if let Some(d) = t.kind.derivative() {
                v += d.evaluate(x[i])?;
            }
        }
        Ok(v)
    }

    /// Symbolic partial derivative `d f / d x_i` as a function of the same `n` variables.
    pub fn partial_derivative(&self, i: usize) -> Result<CharacteristicFunction> {
        if i >= self.n {
            return Err(AttribError::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = CharacteristicFunction::zero(self.n);
        for (subset, c) in self.multilinear.terms() {
            if subset.binary_search(&i).is_ok() {
                out.add_monomial(subset.iter().copied().filter(|&j| j != i), c)?;
            }
        }
        for t in self.separable.iter().filter(|t| t.var == i) {
            if let Some(d) = t.kind.derivative() {
                out.add_separable(i, d)?;
            }
        }
        Ok(out)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, other: &CharacteristicFunction, a: f64, b: f64) -> Result<CharacteristicFunction> {
        combine(self, other, a, b)
    }

    /// Relabels variables so that variable `i` of `self` becomes variable
    /// `sigma[i]` of the result; every monomial `I` maps to `sigma(I)`.
    pub fn permute_variables(&self, sigma: &[usize]) -> Result<CharacteristicFunction> {
        validate_permutation(sigma, self.n)?;
        let mut out = CharacteristicFunction::zero(self.n);
        for (subset, c) in self.multilinear.terms() {
            out.add_monomial(subset.iter().map(|&i| sigma[i]), c)?;
        }
        for t in &self.separable {
            out.add_separable(sigma[t.var], t.kind.clone())?;
        }
        Ok(out)
    }

    /// `g(x) = f(x_1, .., (x_j - d) / c, .., x_n)` for `c > 0`.
    pub fn affine_reparameterize(&self, j: usize, c: f64, d: f64) -> Result<CharacteristicFunction> {
        if j >= self.n {
            return Err(AttribError::IndexOutOfRange { index: j, n: self.n });
        }
        if !(c > 0.0) || !c.is_finite() || !d.is_finite() {
            return Err(AttribError::InvalidArgument(format!(
                "affine reparameterization needs finite c > 0 and finite d, got c = {c}, d = {d}"
            )));
        }
        let mut out = CharacteristicFunction::zero(self.n);
        for (subset, coeff) in self.multilinear.terms() {
            if subset.binary_search(&j).is_ok() {
                out.add_monomial(subset.iter().copied(), coeff / c)?;
                if d != 0.0 {
                    out.add_monomial(subset.iter().copied().filter(|&k| k != j), -coeff * d / c)?;
                }
            } else {
                out.add_monomial(subset.iter().copied(), coeff)?;
            }
        }
        for t in &self.separable {
            let kind = if t.var == j {
                t.kind.compose_affine(c, d)?
            } else {
                t.kind.clone()
            };
            out.add_separable(t.var, kind)?;
        }
        Ok(out)
    }
}

/// `a * f1 + b * f2` with merged sparse terms; exact-zero coefficients are pruned.
pub fn combine(
    f1: &CharacteristicFunction,
    f2: &CharacteristicFunction,
    a: f64,
    b: f64,
) -> Result<CharacteristicFunction> {
    if f1.n != f2.n {
        return Err(AttribError::DimensionMismatch {
            expected: f1.n,
            found: f2.n,
        });
    }
    let mut out = CharacteristicFunction::zero(f1.n);
    for (f, w) in [(f1, a), (f2, b)] {
        if w == 0.0 {
            continue;
        }
        for (subset, c) in f.multilinear.terms() {
            out.add_monomial(subset.iter().copied(), w * c)?;
        }
        for t in &f.separable {
            out.add_separable(t.var, t.kind.scaled(w))?;
        }
    }
    Ok(out)
}

/// Checks that `sigma` is a bijection on `0..n`.
pub fn validate_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(AttribError::InvalidPermutation(format!(
            "length {} for {n} variables",
            sigma.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in sigma {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(AttribError::InvalidPermutation(format!("{sigma:?} is not a bijection")));
        }
    }
    Ok(())
}

/// Initial and final values `r`, `s` of the variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuePair {
    r: Vec<f64>,
    s: Vec<f64>,
}

impl ValuePair {
    pub fn new(r: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if r.len() != s.len() {
            return Err(AttribError::DimensionMismatch {
                expected: r.len(),
                found: s.len(),
            });
        }
        if let Some(v) = r.iter().chain(&s).find(|v| !v.is_finite()) {
            return Err(AttribError::NonFinite(format!("endpoint value {v}")));
        }
        Ok(ValuePair { r, s })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn delta(&self, i: usize) -> f64 {
        self.s[i] - self.r[i]
    }

    /// Applies `x -> c x + d` to coordinate `j` of both endpoints.
    pub fn affine_coordinate(&self, j: usize, c: f64, d: f64) -> Result<ValuePair> {
        let mut r = self.r.clone();
        let mut s = self.s.clone();
        r[j] = c * r[j] + d;
        s[j] = c * s[j] + d;
        ValuePair::new(r, s)
    }

    /// Moves coordinate `i` to position `sigma[i]`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<ValuePair> {
        validate_permutation(sigma, self.n())?;
        let mut r = vec![0.0; self.n()];
        let mut s = vec![0.0; self.n()];
        for (i, &p) in sigma.iter().enumerate() {
            r[p] = self.r[i];
            s[p] = self.s[i];
        }
        ValuePair::new(r, s)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(AttribError::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

/// Per-variable attributions together with the completeness residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    pub method: String,
    pub z: Vec<f64>,
    /// `sum z_i - (f(s) - f(r))`
    pub residual: f64,
    /// False when a numerical engine stopped at its refinement limit.
    pub converged: bool,
}

impl AttributionResult {
    pub fn new(method: impl Into<String>, z: Vec<f64>, total_change: f64) -> Self {
        let residual = z.iter().sum::<f64>() - total_change;
        AttributionResult {
            method: method.into(),
            z,
            residual,
            converged: true,
        }
    }

    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn apc() -> CharacteristicFunction {
        CharacteristicFunction::multilinear(3, [(vec![0, 1, 2], 1.0)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = CharacteristicFunction::multilinear(2, [(vec![0, 1], 1.0)]).unwrap();
        assert_eq!(f.evaluate(&[3.0, 4.0]).unwrap(), 12.0);
        assert_eq!(apc().evaluate(&[4.0, 1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(apc().evaluate(&[5.0, 12.0, 1.5]).unwrap(), 90.0);

        let mut g = f.clone();
        g.add_separable(0, SeparableKind::ln(1.0)).unwrap();
        assert_eq!(g.evaluate(&[1.0, 5.0]).unwrap(), 5.0);
    }

    #[test]
    fn evaluate_errors() {
        let mut g = CharacteristicFunction::zero(2);
        g.add_separable(0, SeparableKind::ln(1.0)).unwrap();
        assert!(matches!(
            g.evaluate(&[1.0]),
            Err(AttribError::DimensionMismatch { .. })
        ));
        assert!(matches!(g.evaluate(&[0.0, 1.0]), Err(AttribError::Domain(_))));
        assert!(matches!(g.evaluate(&[-2.0, 1.0]), Err(AttribError::Domain(_))));
    }

    #[test]
    fn repeated_variable_rejected() {
        let mut p = MultilinearPoly::new(3);
        assert!(matches!(
            p.add_term([1, 1], 1.0),
            Err(AttribError::RepeatedVariable { .. })
        ));
        assert!(matches!(
            p.add_term([3], 1.0),
            Err(AttribError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn partial_derivative_examples() {
        let d = apc().partial_derivative(0).unwrap();
        assert_eq!(d.multilinear_part().len(), 1);
        assert_eq!(d.multilinear_part().coefficient(&[1, 2]), 1.0);

        let f = CharacteristicFunction::multilinear(2, [(vec![0, 1], 1.0), (vec![1], 5.0)]).unwrap();
        let d = f.partial_derivative(1).unwrap();
        assert_eq!(d.multilinear_part().coefficient(&[]), 5.0);
        assert_eq!(d.multilinear_part().coefficient(&[0]), 1.0);
        assert_eq!(d.multilinear_part().len(), 2);

        let f = CharacteristicFunction::multilinear(3, [(vec![0, 1], 1.0)]).unwrap();
        let d = f.partial_derivative(2).unwrap();
        assert!(d.multilinear_part().is_empty());
        assert!(d.separable_terms().is_empty());

        assert!(matches!(
            f.partial_derivative(3),
            Err(AttribError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn separable_derivatives_are_exact() {
        let kinds = [
            SeparableKind::Polynomial {
                coeffs: vec![1.0, -2.0, 0.5, 3.0],
            },
            SeparableKind::Affine {
                slope: 2.5,
                intercept: -1.0,
            },
            SeparableKind::Log {
                coeff: 2.0,
                scale: 3.0,
                shift: 1.0,
            },
            SeparableKind::Exp {
                coeff: -1.5,
                scale: 0.7,
                shift: 0.2,
            },
            SeparableKind::Power {
                coeff: 1.2,
                scale: 2.0,
                shift: 1.0,
                exponent: -2,
            },
        ];
        for k in &kinds {
            let d = k.derivative().unwrap();
            for &x in &[0.3, 1.1, 2.4] {
                let h = 1e-5;
                let fd = (k.evaluate(x + h).unwrap() - k.evaluate(x - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(d.evaluate(x).unwrap(), fd, max_relative = 1e-7);
            }
        }
        assert!(SeparableKind::Polynomial { coeffs: vec![4.0] }.derivative().is_none());
    }

    #[test]
    fn combine_examples() {
        let x1x2 = CharacteristicFunction::multilinear(3, [(vec![0, 1], 1.0)]).unwrap();
        let zero = combine(&x1x2, &x1x2, 1.0, -1.0).unwrap();
        assert_eq!(zero, CharacteristicFunction::zero(3));

        let x1 = CharacteristicFunction::multilinear(3, [(vec![0], 1.0)]).unwrap();
        let sum = combine(&x1x2, &x1, 1.0, 1.0).unwrap();
        assert_eq!(sum.multilinear_part().coefficient(&[0, 1]), 1.0);
        assert_eq!(sum.multilinear_part().coefficient(&[0]), 1.0);

        let f1 = CharacteristicFunction::multilinear(3, [(vec![0, 1, 2], 1.0)]).unwrap();
        let f2 = CharacteristicFunction::multilinear(3, [(vec![1, 2], 1.0)]).unwrap();
        let g = combine(&f1, &f2, 2.0, 3.0).unwrap();
        assert_eq!(g.evaluate(&[1.0, 1.0, 1.0]).unwrap(), 5.0);

        let other = CharacteristicFunction::zero(2);
        assert!(matches!(
            combine(&f1, &other, 1.0, 1.0),
            Err(AttribError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn combine_cancels_matching_separable_terms() {
        let mut f = CharacteristicFunction::zero(2);
        f.add_separable(1, SeparableKind::exp(2.0)).unwrap();
        f.add_separable(0, SeparableKind::Polynomial { coeffs: vec![0.0, 1.0, 1.0] })
            .unwrap();
        assert_eq!(combine(&f, &f, 1.0, -1.0).unwrap(), CharacteristicFunction::zero(2));
    }

    #[test]
    fn permute_examples() {
        let f = CharacteristicFunction::multilinear(2, [(vec![0], 1.0), (vec![1], 2.0)]).unwrap();
        let g = f.permute_variables(&[1, 0]).unwrap();
        assert_eq!(g.multilinear_part().coefficient(&[1]), 1.0);
        assert_eq!(g.multilinear_part().coefficient(&[0]), 2.0);

        assert_eq!(apc().permute_variables(&[2, 0, 1]).unwrap(), apc());

        let f = CharacteristicFunction::multilinear(3, [(vec![0, 2], 5.0)]).unwrap();
        let g = f.permute_variables(&[1, 2, 0]).unwrap();
        assert_eq!(g.multilinear_part().coefficient(&[0, 1]), 5.0);
        // g(x) = f(y) with y_i = x_{sigma(i)}
        let x = [0.37, -1.25, 2.5];
        let y = [x[1], x[2], x[0]];
        assert_eq!(g.evaluate(&x).unwrap(), f.evaluate(&y).unwrap());

        assert!(matches!(
            f.permute_variables(&[0, 0, 1]),
            Err(AttribError::InvalidPermutation(_))
        ));
    }

    #[test]
    fn affine_reparameterize_examples() {
        let f = CharacteristicFunction::multilinear(2, [(vec![0, 1], 1.0)]).unwrap();
        let g = f.affine_reparameterize(0, 2.0, 0.0).unwrap();
        assert_eq!(g.multilinear_part().coefficient(&[0, 1]), 0.5);
        assert_eq!(g.multilinear_part().len(), 1);

        let g = f.affine_reparameterize(0, 2.0, 1.0).unwrap();
        assert_eq!(g.multilinear_part().coefficient(&[0, 1]), 0.5);
        assert_eq!(g.multilinear_part().coefficient(&[1]), -0.5);
        for x in [[3.0, 2.0], [-1.5, 0.25], [7.0, -4.0]] {
            let expect = ((x[0] - 1.0) / 2.0) * x[1];
            assert_relative_eq!(g.evaluate(&x).unwrap(), expect, max_relative = 1e-15);
        }

        let f = CharacteristicFunction::multilinear(1, [(vec![0], 1.0)]).unwrap();
        let g = f.affine_reparameterize(0, 1.0, 5.0).unwrap();
        assert_eq!(g.multilinear_part().coefficient(&[0]), 1.0);
        assert_eq!(g.multilinear_part().coefficient(&[]), -5.0);

        assert!(f.affine_reparameterize(0, 0.0, 1.0).is_err());
        assert!(f.affine_reparameterize(0, -2.0, 1.0).is_err());
    }

    #[test]
    fn affine_reparameterize_separable_kinds() {
        let mut f = CharacteristicFunction::zero(1);
        f.add_separable(0, SeparableKind::Polynomial { coeffs: vec![1.0, -2.0, 3.0] })
            .unwrap();
        f.add_separable(0, SeparableKind::ln(1.5)).unwrap();
        f.add_separable(0, SeparableKind::exp(0.25)).unwrap();
        let (c, d) = (2.5, -0.75);
        let g = f.affine_reparameterize(0, c, d).unwrap();
        for y in [0.4, 1.3, 2.2] {
            let x = c * y + d;
            assert_relative_eq!(g.evaluate(&[x]).unwrap(), f.evaluate(&[y]).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn value_pair_validation() {
        assert!(ValuePair::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ValuePair::new(vec![f64::NAN], vec![1.0]).is_err());
        let vp = ValuePair::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        let p = vp.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.r(), &[2.0, 3.0, 1.0]);
    }
}
