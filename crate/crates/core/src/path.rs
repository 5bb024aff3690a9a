//! Numerical path attribution.
//!
//! A base path `gamma: [0, 1] -> [0, 1]^n` is non-decreasing in every
//! component with `gamma(0) = 0` and `gamma(1) = 1`. The affine path from `r`
//! to `s` is `r + (s - r) * gamma(t)` componentwise and the attribution to
//! variable `i` is the line integral of `d_i f` along it. Each smooth piece of
//! the path is integrated separately with composite Gauss-Legendre quadrature.

use crate::characteristic::{validate_permutation, AttributionResult, ValuePair};
use crate::error::{AttribError, Result};
use crate::function::Evaluable;
use crate::quadrature::{integrate_adaptive, GaussLegendre, QuadratureConfig};

pub use crate::function::BlackBoxFunction;

/// Piecewise-cubic monotone interpolant through tabulated samples
/// (Fritsch-Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    t: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Samples must start at `(0, 0)`, end at `(1, 1)`, have strictly
    /// increasing `t` and non-decreasing `y`.
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let bad = |msg: &str| Err(AttribError::InvalidArgument(format!("user path component: {msg}")));
        if t.len() != y.len() || t.len() < 2 {
            return bad("need at least two (t, y) samples of equal length");
        }
        if t[0] != 0.0 || *t.last().unwrap() != 1.0 || y[0] != 0.0 || *y.last().unwrap() != 1.0 {
            return bad("must run from (0, 0) to (1, 1)");
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("t must be strictly increasing");
        }
        if y.windows(2).any(|w| !(w[0] <= w[1])) {
            return bad("y must be non-decreasing");
        }
        let m = t.len();
        let secant: Vec<f64> = (0..m - 1).map(|k| (y[k + 1] - y[k]) / (t[k + 1] - t[k])).collect();
        let mut slopes = vec![0.0; m];
        slopes[0] = secant[0];
        slopes[m - 1] = secant[m - 2];
        for k in 1..m - 1 {
            slopes[k] = if secant[k - 1] == 0.0 || secant[k] == 0.0 {
                0.0
            } else {
                0.5 * (secant[k - 1] + secant[k])
            };
        }
        for k in 0..m - 1 {
            if secant[k] == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let a = slopes[k] / secant[k];
            let b = slopes[k + 1] / secant[k];
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[k] = tau * a * secant[k];
                slopes[k + 1] = tau * b * secant[k];
            }
        }
        Ok(MonotoneCubic { t, y, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    /// `(value, derivative)` at `x in [0, 1]`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let x = x.clamp(0.0, 1.0);
        let k = match self.t.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(self.t.len() - 2),
        };
        let h = self.t[k + 1] - self.t[k];
        let u = (x - self.t[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        let dv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        (v, dv)
    }
}

/// A monotone path on the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub enum BasePath {
    /// `gamma_i(t) = t`.
    StraightLine,
    /// Walk along cube edges; `order[p]` moves during `t in [p/n, (p+1)/n]`.
    EdgeWalk(Vec<usize>),
    /// One tabulated monotone component per variable.
    User(Vec<MonotoneCubic>),
}

impl BasePath {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            BasePath::StraightLine => Ok(()),
            BasePath::EdgeWalk(order) => validate_permutation(order, n),
            BasePath::User(c) if c.len() != n => Err(AttribError::DimensionMismatch {
                expected: n,
                found: c.len(),
            }),
            BasePath::User(_) => Ok(()),
        }
    }

    /// Writes `gamma(t)` and `gamma'(t)`.
    pub fn eval(&self, t: f64, gamma: &mut [f64], dgamma: &mut [f64]) {
        match self {
            BasePath::StraightLine => {
                gamma.iter_mut().for_each(|g| *g = t);
                dgamma.iter_mut().for_each(|d| *d = 1.0);
            }
            BasePath::EdgeWalk(order) => {
                let n = order.len() as f64;
                let tn = t * n;
                for (pos, &i) in order.iter().enumerate() {
                    let local = tn - pos as f64;
                    gamma[i] = local.clamp(0.0, 1.0);
                    dgamma[i] = if (0.0..1.0).contains(&local) { n } else { 0.0 };
                }
            }
            BasePath::User(components) => {
                for (i, c) in components.iter().enumerate() {
                    let (v, d) = c.eval(t);
                    gamma[i] = v;
                    dgamma[i] = d;
                }
            }
        }
    }

    /// Sorted points of `[0, 1]` between which the path is smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            BasePath::StraightLine => vec![0.0, 1.0],
            BasePath::EdgeWalk(order) => {
                let n = order.len().max(1);
                (0..=n).map(|p| p as f64 / n as f64).collect()
            }
            BasePath::User(components) => {
                let mut pts: Vec<f64> = components.iter().flat_map(|c| c.knots().iter().copied()).collect();
                pts.push(0.0);
                pts.push(1.0);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                pts
            }
        }
    }

    fn label(&self) -> String {
        match self {
            BasePath::StraightLine => "path:straight".into(),
            BasePath::EdgeWalk(order) => format!("path:edge{order:?}"),
            BasePath::User(_) => "path:user".into(),
        }
    }
}

/// `gamma_{r,s}(t) = r + (s - r) * gamma(t)`.
#[derive(Debug, Clone)]
pub struct AffinePath<'a> {
    base: &'a BasePath,
    r: Vec<f64>,
    delta: Vec<f64>,
}

pub fn affine_path<'a>(base: &'a BasePath, vp: &ValuePair) -> Result<AffinePath<'a>> {
    base.validate(vp.n())?;
    Ok(AffinePath {
        base,
        r: vp.r().to_vec(),
        delta: (0..vp.n()).map(|i| vp.delta(i)).collect(),
    })
}

impl AffinePath<'_> {
    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// Writes the point and the velocity at `t`.
    pub fn eval(&self, t: f64, point: &mut [f64], velocity: &mut [f64]) {
        self.base.eval(t, point, velocity);
        for i in 0..self.n() {
            point[i] = self.r[i] + self.delta[i] * point[i];
            velocity[i] *= self.delta[i];
        }
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        let mut p = vec![0.0; self.n()];
        let mut v = vec![0.0; self.n()];
        self.eval(t, &mut p, &mut v);
        p
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        let mut p = vec![0.0; self.n()];
        let mut v = vec![0.0; self.n()];
        self.eval(t, &mut p, &mut v);
        v
    }
}

/// `z_i = int_0^1 d_i f(gamma_{r,s}(t)) gamma_{r,s,i}'(t) dt` for every `i`.
///
/// A result that hit `max_refine` is returned with `converged = false`.
pub fn attribute_path(
    f: &dyn Evaluable,
    vp: &ValuePair,
    base: &BasePath,
    q: &QuadratureConfig,
) -> Result<AttributionResult> {
    vp.check_dim(f.n())?;
    q.validate()?;
    let path = affine_path(base, vp)?;
    let rule = GaussLegendre::new(q.order)?;
    let n = f.n();
    let total = f.value(vp.s())? - f.value(vp.r())?;
    let scale = total.abs();
    let mut point = vec![0.0; n];
    let mut velocity = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut converged = true;
    for seg in base.breakpoints().windows(2) {
        let est = integrate_adaptive(&rule, q, seg[0], seg[1], n, scale, |t, out| {
            path.eval(t, &mut point, &mut velocity);
            for i in 0..n {
                if velocity[i] != 0.0 {
                    out[i] = f.partial(i, &point)? * velocity[i];
                }
            }
            Ok(())
        })?;
        converged &= est.converged;
        for (zi, v) in z.iter_mut().zip(est.values) {
            *zi += v;
        }
    }
    let mut res = AttributionResult::new(base.label(), z, total);
    res.converged = converged;
    Ok(res)
}

/// Aumann-Shapley: the straight-line affine path method.
pub fn attribute_aumann_shapley(
    f: &dyn Evaluable,
    vp: &ValuePair,
    q: &QuadratureConfig,
) -> Result<AttributionResult> {
    let mut res = attribute_path(f, vp, &BasePath::StraightLine, q)?;
    res.method = "as-numeric".into();
    Ok(res)
}
