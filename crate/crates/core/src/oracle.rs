//! Combinatorial reference methods over the vertices of the box `[r, s]`.
//!
//! An *order* is a sequence of the variable indices; the variable at position
//! `p` of the order moves from `r` to `s` in step `p`. The single-order method
//! assigns each variable its marginal change at the vertex reached just before
//! it moves. Random-order methods average these with nonnegative weights, and
//! the Shapley-Shubik method uses uniform weights over all `n!` orders.

use std::collections::BTreeMap;

use crate::characteristic::{validate_permutation, AttributionResult, ValuePair};
use crate::error::{AttribError, Result};
use crate::function::Evaluable;

/// Largest `n` for which orders are enumerated (`10! = 3_628_800`).
pub const ENUMERATION_CAP: usize = 10;

/// Corner `u^I` of `[r, s]`: `s_i` for `i in I`, `r_i` otherwise.
pub fn vertex_value(vp: &ValuePair, subset: &[usize]) -> Result<Vec<f64>> {
    let mut u = vp.r().to_vec();
    for &i in subset {
        if i >= vp.n() {
            return Err(AttribError::IndexOutOfRange { index: i, n: vp.n() });
        }
        u[i] = vp.s()[i];
    }
    Ok(u)
}

fn vertex_from_mask(vp: &ValuePair, mask: usize) -> Vec<f64> {
    (0..vp.n())
        .map(|i| if mask >> i & 1 == 1 { vp.s()[i] } else { vp.r()[i] })
        .collect()
}

/// `f` at all `2^n` corners, indexed by subset bitmask.
#[derive(Debug, Clone)]
pub struct VertexTable {
    n: usize,
    values: Vec<f64>,
}

impl VertexTable {
    pub fn build(f: &dyn Evaluable, vp: &ValuePair) -> Result<Self> {
        let n = check_enumerable(f, vp)?;
        let values = (0..1usize << n)
            .map(|mask| f.value(&vertex_from_mask(vp, mask)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexTable { n, values })
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_change(&self) -> f64 {
        self.values[(1 << self.n) - 1] - self.values[0]
    }

    /// Adds `weight * (marginal change of each variable along `order`)` into `z`.
    fn accumulate_order(&self, order: &[usize], weight: f64, z: &mut [f64]) {
        let mut mask = 0usize;
        for &i in order {
            let next = mask | 1 << i;
            z[i] += weight * (self.values[next] - self.values[mask]);
            mask = next;
        }
    }
}

fn check_enumerable(f: &dyn Evaluable, vp: &ValuePair) -> Result<usize> {
    vp.check_dim(f.n())?;
    let n = f.n();
    if n > ENUMERATION_CAP {
        return Err(AttribError::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(n)
}

/// Advances `order` to its lexicographic successor; false after the last one.
pub fn next_order(order: &mut [usize]) -> bool {
    let n = order.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && order[i - 1] >= order[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while order[j] <= order[i - 1] {
        j -= 1;
    }
    order.swap(i - 1, j);
    order[i..].reverse();
    true
}

/// Nonnegative weights over orders of `0..n`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationWeights {
    n: usize,
    weights: BTreeMap<Vec<usize>, f64>,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl PermutationWeights {
    pub fn new<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut weights = BTreeMap::new();
        for (order, w) in pairs {
            validate_permutation(&order, n)?;
            if !(w >= 0.0) || !w.is_finite() {
                return Err(AttribError::InvalidWeights(format!(
                    "weight {w} for order {order:?} is not a nonnegative number"
                )));
            }
            *weights.entry(order).or_insert(0.0) += w;
        }
        let total: f64 = weights.values().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(AttribError::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        weights.retain(|_, w| *w != 0.0);
        Ok(PermutationWeights { n, weights })
    }

    /// All mass on one order.
    pub fn single(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        PermutationWeights::new(n, [(order, 1.0)])
    }

    /// Uniform over all `n!` orders.
    pub fn uniform(n: usize) -> Result<Self> {
        if n > ENUMERATION_CAP {
            return Err(AttribError::EnumerationCap {
                n,
                cap: ENUMERATION_CAP,
            });
        }
        let count: usize = (1..=n).product();
        let w = 1.0 / count as f64;
        let mut weights = BTreeMap::new();
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            weights.insert(order.clone(), w);
            if !next_order(&mut order) {
                break;
            }
        }
        Ok(PermutationWeights { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(order, weight)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.weights.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Shapley-Shubik attribution by enumerating all `n!` orders.
///
/// Evaluates `f` once per corner of `[r, s]` and only reads the table afterwards.
pub fn shapley_shubik_bruteforce(f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
    let table = VertexTable::build(f, vp)?;
    let n = f.n();
    let mut z = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut count = 0usize;
    loop {
        table.accumulate_order(&order, 1.0, &mut z);
        count += 1;
        if !next_order(&mut order) {
            break;
        }
    }
    let scale = 1.0 / count as f64;
    z.iter_mut().for_each(|v| *v *= scale);
    Ok(AttributionResult::new("ss-brute", z, table.total_change()))
}

/// Convex combination of single-order attributions with the given weights.
pub fn random_order_attribution(
    f: &dyn Evaluable,
    vp: &ValuePair,
    pw: &PermutationWeights,
) -> Result<AttributionResult> {
    if pw.n() != f.n() {
        return Err(AttribError::DimensionMismatch {
            expected: f.n(),
            found: pw.n(),
        });
    }
    let table = VertexTable::build(f, vp)?;
    let mut z = vec![0.0; f.n()];
    for (order, w) in pw.iter() {
        table.accumulate_order(order, w, &mut z);
    }
    Ok(AttributionResult::new("random-order", z, table.total_change()))
}

/// A value-variant random-order method: the weights may depend on `(r, s)`.
pub fn value_variant_attribution<W>(
    f: &dyn Evaluable,
    vp: &ValuePair,
    weights_for: W,
) -> Result<AttributionResult>
where
    W: Fn(&ValuePair) -> Result<PermutationWeights>,
{
    let pw = weights_for(vp)?;
    let mut res = random_order_attribution(f, vp, &pw)?;
    res.method = "value-variant".into();
    Ok(res)
}

/// FNV-1a over the bit patterns of `r`, `s` and the order, mapped to `[0, 1]`.
///
/// Fixed so that [`value_variant_example`] is reproducible across platforms.
pub fn order_hash(vp: &ValuePair, order: &[usize]) -> f64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for v in vp.r().iter().chain(vp.s()) {
        feed(&v.to_bits().to_le_bytes());
    }
    for &i in order {
        feed(&(i as u64).to_le_bytes());
    }
    (h >> 11) as f64 / ((1u64 << 53) - 1) as f64
}

/// Weights proportional to `1 + order_hash(r, s, order)` over all orders.
pub fn value_variant_weights(vp: &ValuePair) -> Result<PermutationWeights> {
    let n = vp.n();
    if n > ENUMERATION_CAP {
        return Err(AttribError::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut raw = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        raw.push((order.clone(), 1.0 + order_hash(vp, &order)));
        if !next_order(&mut order) {
            break;
        }
    }
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    let mut pairs: Vec<(Vec<usize>, f64)> = raw.into_iter().map(|(o, w)| (o, w / total)).collect();
    // absorb rounding so the sum check is exact to a few ulps
    let drift = 1.0 - pairs.iter().map(|(_, w)| w).sum::<f64>();
    if let Some(last) = pairs.last_mut() {
        last.1 += drift;
    }
    PermutationWeights::new(n, pairs)
}

/// The shipped value-variant instance, see [`value_variant_weights`].
pub fn value_variant_example(f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
    value_variant_attribution(f, vp, value_variant_weights)
}
