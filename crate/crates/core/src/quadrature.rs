//! Composite Gauss-Legendre quadrature with panel doubling.

use serde::{Deserialize, Serialize};

use crate::error::{AttribError, Result};

/// Integration settings for the path engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Initial panel count per segment.
    pub panels: usize,
    /// Relative tolerance between successive doublings.
    pub tol: f64,
    /// Maximum number of doublings.
    pub max_refine: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            order: 16,
            panels: 8,
            tol: 1e-10,
            max_refine: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureConfig {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.panels == 0 || self.order == 0 {
            return Err(AttribError::InvalidArgument(format!(
                "quadrature needs tol > 0, panels >= 1, order >= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of an `order`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of `P_order` by Newton iteration from Chebyshev-like guesses.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(AttribError::InvalidArgument("Gauss-Legendre order 0".into()));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(t, w)` pairs of the composite rule with `panels` equal panels on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = (b - a) / panels as f64;
        (0..panels).flat_map(move |p| {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(&x, &w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        self.composite(a, b, panels).map(|(t, w)| w * f(t)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Result of an adaptive vector integral.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveEstimate {
    pub values: Vec<f64>,
    pub converged: bool,
    pub panels: usize,
}

/// Integrates a vector-valued `f` over `[a, b]`, doubling the panel count
/// until successive estimates agree to `tol * max(scale, sum |I_k|)` in every
/// component, or `max_refine` doublings have been spent.
///
/// `f(t, out)` receives a zeroed `out` and writes the integrand at `t` into it.
pub fn integrate_adaptive<F>(
    rule: &GaussLegendre,
    cfg: &QuadratureConfig,
    a: f64,
    b: f64,
    dim: usize,
    scale: f64,
    mut f: F,
) -> Result<AdaptiveEstimate>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    cfg.validate()?;
    let mut buf = vec![0.0; dim];
    let mut estimate = |panels: usize, buf: &mut [f64]| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; dim];
        for (t, w) in rule.composite(a, b, panels) {
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(t, buf)?;
            for (s, v) in acc.iter_mut().zip(buf.iter()) {
                *s += w * v;
            }
        }
        Ok(acc)
    };
    let mut panels = cfg.panels;
    let mut prev = estimate(panels, &mut buf)?;
    for _ in 0..cfg.max_refine {
        panels *= 2;
        let next = estimate(panels, &mut buf)?;
        let mag = next.iter().map(|v| v.abs()).sum::<f64>().max(scale);
        let diff = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if diff <= cfg.tol * mag {
            return Ok(AdaptiveEstimate {
                values: next,
                converged: true,
                panels,
            });
        }
        prev = next;
    }
    Ok(AdaptiveEstimate {
        values: prev,
        converged: cfg.max_refine == 0,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_to_degree_2n_minus_1() {
        for order in 1..=20 {
            let rule = GaussLegendre::new(order).unwrap();
            let wsum: f64 = rule.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "order {order}");
            for deg in 0..2 * order {
                let got = rule.integrate(0.0, 1.0, 1, |t| t.powi(deg as i32));
                let expect = 1.0 / (deg + 1) as f64;
                assert!((got - expect).abs() < 1e-13, "order {order} deg {deg}: {got}");
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let rule = GaussLegendre::new(16).unwrap();
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        for (x, y) in rule.nodes().iter().zip(rule.nodes().iter().rev()) {
            assert!((x + y).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_converges_on_smooth_integrand() {
        let rule = GaussLegendre::new(4).unwrap();
        let cfg = QuadratureConfig {
            order: 4,
            panels: 1,
            tol: 1e-12,
            max_refine: 12,
        };
        let est = integrate_adaptive(&rule, &cfg, 0.0, 1.0, 2, 0.0, |t, out| {
            out[0] = (3.0 * t).sin();
            out[1] = (-t).exp();
            Ok(())
        })
        .unwrap();
        assert!(est.converged);
        assert!((est.values[0] - (1.0 - 3f64.cos()) / 3.0).abs() < 1e-12);
        assert!((est.values[1] - (1.0 - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let rule = GaussLegendre::new(2).unwrap();
        let cfg = QuadratureConfig {
            order: 2,
            panels: 1,
            tol: 1e-15,
            max_refine: 2,
        };
        let est = integrate_adaptive(&rule, &cfg, 0.0, 1.0, 1, 0.0, |t, out| {
            out[0] = t.sqrt();
            Ok(())
        })
        .unwrap();
        assert!(!est.converged);
    }

    #[test]
    fn invalid_config() {
        let cfg = QuadratureConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
