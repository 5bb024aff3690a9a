//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use attrib_core::model::DagModel;
use attrib_core::{CharacteristicFunction, ValuePair};

/// Coefficients of `prod_j (a_j + b_j t)` in ascending powers of `t`.
pub fn expand_linear_product(factors: &[(f64, f64)]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &(a, b) in factors {
        let mut next = vec![0.0; poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += a * c;
            next[k + 1] += b * c;
        }
        poly = next;
    }
    poly
}

/// Aumann-Shapley attribution by exact integration of the straight-line path.
///
/// For a monomial `c x_I`, `z_i = c d_i int_0^1 prod_{j in I-i} (r_j + t d_j) dt`;
/// the product is expanded into a polynomial in `t` and integrated term by term.
/// Separable terms receive their endpoint difference.
pub fn straight_line_oracle(f: &CharacteristicFunction, vp: &ValuePair) -> Vec<f64> {
    let n = f.n();
    let mut z = vec![0.0; n];
    for (subset, c) in f.multilinear_part().terms() {
        for &i in subset {
            let factors: Vec<(f64, f64)> = subset
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (vp.r()[j], vp.s()[j] - vp.r()[j]))
                .collect();
            let integral: f64 = expand_linear_product(&factors)
                .iter()
                .enumerate()
                .map(|(k, a)| a / (k + 1) as f64)
                .sum();
            z[i] += c * (vp.s()[i] - vp.r()[i]) * integral;
        }
    }
    for t in f.separable_terms() {
        z[t.var] += t.kind.evaluate(vp.s()[t.var]).unwrap() - t.kind.evaluate(vp.r()[t.var]).unwrap();
    }
    z
}

/// All permutations of `0..n` by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Shapley-Shubik attribution evaluating `f` directly at every step of every order.
pub fn order_average_oracle<F: Fn(&[f64]) -> f64>(n: usize, f: F, vp: &ValuePair) -> Vec<f64> {
    let perms = permutations(n);
    let mut z = vec![0.0; n];
    for order in &perms {
        let mut x = vp.r().to_vec();
        let mut prev = f(&x);
        for &i in order {
            x[i] = vp.s()[i];
            let cur = f(&x);
            z[i] += cur - prev;
            prev = cur;
        }
    }
    z.iter().map(|v| v / perms.len() as f64).collect()
}

/// Expected flow into the sink by explicit depth-first path enumeration.
/// `value(name)` supplies each variable's value.
pub fn dag_flow_oracle<V: Fn(&str) -> f64>(d: &DagModel, value: V) -> f64 {
    fn walk<V: Fn(&str) -> f64>(d: &DagModel, v: usize, acc: f64, value: &V) -> f64 {
        if v == d.sink {
            return acc;
        }
        d.edges
            .iter()
            .filter(|e| e.from == v)
            .map(|e| walk(d, e.to, acc * value(&e.var), value))
            .sum()
    }
    d.starts.iter().map(|(node, var)| walk(d, *node, value(var), &value)).sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn max_rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
