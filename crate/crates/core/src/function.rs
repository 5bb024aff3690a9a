//! The evaluation interface shared by exact, combinatorial and numerical methods.

use std::fmt;
use std::sync::Arc;

use crate::characteristic::CharacteristicFunction;
use crate::error::{AttribError, Result};

/// A real function on `R^n` that can be evaluated and differentiated.
pub trait Evaluable: Send + Sync {
    fn n(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// `d f / d x_i` at `x`.
    fn partial(&self, i: usize, x: &[f64]) -> Result<f64>;

    /// The structured form, when the function has one. Exact methods need it.
    fn as_characteristic(&self) -> Option<&CharacteristicFunction> {
        None
    }
}

impl Evaluable for CharacteristicFunction {
    fn n(&self) -> usize {
        CharacteristicFunction::n(self)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.evaluate(x)
    }

    fn partial(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.partial_at(i, x)
    }

    fn as_characteristic(&self) -> Option<&CharacteristicFunction> {
        Some(self)
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], usize) -> f64 + Send + Sync;

/// Default relative step for central differences: `h = 1e-6 * (1 + |x_i|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// An opaque function given only through an evaluator closure, with an
/// optional analytic partial-derivative closure.
#[derive(Clone)]
pub struct BlackBoxFunction {
    n: usize,
    eval: Arc<EvalFn>,
    grad: Option<Arc<GradFn>>,
    step: f64,
}

impl fmt::Debug for BlackBoxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxFunction")
            .field("n", &self.n)
            .field("analytic_gradient", &self.grad.is_some())
            .field("step", &self.step)
            .finish()
    }
}

impl BlackBoxFunction {
    pub fn new<F>(n: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        BlackBoxFunction {
            n,
            eval: Arc::new(eval),
            grad: None,
            step: DEFAULT_FD_STEP,
        }
    }

    /// Supplies `(x, i) -> d f / d x_i`.
    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[f64], usize) -> f64 + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    fn checked(&self, v: f64, what: &str) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(AttribError::Evaluation(format!("{what} returned {v}")))
        }
    }
}

impl Evaluable for BlackBoxFunction {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(AttribError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        self.checked((self.eval)(x), "evaluator")
    }

    fn partial(&self, i: usize, x: &[f64]) -> Result<f64> {
        if i >= self.n {
            return Err(AttribError::IndexOutOfRange { index: i, n: self.n });
        }
        if let Some(g) = &self.grad {
            if x.len() != self.n {
                return Err(AttribError::DimensionMismatch {
                    expected: self.n,
                    found: x.len(),
                });
            }
            return self.checked(g(x, i), "gradient");
        }
        let h = self.step * (1.0 + x[i].abs());
        let mut probe = x.to_vec();
        probe[i] = x[i] + h;
        let up = self.value(&probe)?;
        probe[i] = x[i] - h;
        let down = self.value(&probe)?;
        Ok((up - down) / (2.0 * h))
    }
}
