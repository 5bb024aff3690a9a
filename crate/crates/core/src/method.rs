//! Attribution methods behind a common handle.

use crate::characteristic::{AttributionResult, ValuePair};
use crate::error::{AttribError, Result};
use crate::exact::{attribute_ass_with, attribute_naive, Summation};
use crate::function::Evaluable;
use crate::oracle::{random_order_attribution, shapley_shubik_bruteforce, value_variant_example, PermutationWeights};
use crate::path::{attribute_aumann_shapley, attribute_path, BasePath};
use crate::quadrature::QuadratureConfig;

/// Anything that maps `(f, r, s)` to per-variable attributions.
pub trait AttributionMethod: Send + Sync {
    fn id(&self) -> String;

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult>;
}

/// Exact dynamic program; needs the structured function.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactAss {
    pub summation: Summation,
}

impl AttributionMethod for ExactAss {
    fn id(&self) -> String {
        "ass".into()
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        let cf = f.as_characteristic().ok_or_else(|| AttribError::Unsupported(self.id()))?;
        attribute_ass_with(cf, vp, self.summation)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Naive;

impl AttributionMethod for Naive {
    fn id(&self) -> String {
        "naive".into()
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        attribute_naive(f, vp)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ShapleyShubikBrute;

impl AttributionMethod for ShapleyShubikBrute {
    fn id(&self) -> String {
        "ss-brute".into()
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        shapley_shubik_bruteforce(f, vp)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AumannShapleyNumeric {
    pub quadrature: QuadratureConfig,
}

impl AttributionMethod for AumannShapleyNumeric {
    fn id(&self) -> String {
        "as-numeric".into()
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        attribute_aumann_shapley(f, vp, &self.quadrature)
    }
}

/// Single affine path method for an arbitrary base path.
#[derive(Debug, Clone)]
pub struct PathMethod {
    pub base: BasePath,
    pub quadrature: QuadratureConfig,
}

impl AttributionMethod for PathMethod {
    fn id(&self) -> String {
        match &self.base {
            BasePath::StraightLine => "path:straight".into(),
            BasePath::EdgeWalk(o) => format!("path:edge{o:?}"),
            BasePath::User(_) => "path:user".into(),
        }
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        attribute_path(f, vp, &self.base, &self.quadrature)
    }
}

/// Random-order method with fixed weights.
#[derive(Debug, Clone)]
pub struct RandomOrder {
    pub weights: PermutationWeights,
}

impl AttributionMethod for RandomOrder {
    fn id(&self) -> String {
        if self.weights.len() == 1 {
            let (order, _) = self.weights.iter().next().unwrap();
            format!("random-order{order:?}")
        } else {
            "random-order".into()
        }
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        let mut res = random_order_attribution(f, vp, &self.weights)?;
        res.method = self.id();
        Ok(res)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValueVariantExample;

impl AttributionMethod for ValueVariantExample {
    fn id(&self) -> String {
        "value-variant".into()
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        value_variant_example(f, vp)
    }
}

/// `sum_j c_j z^j` with `c_j >= 0`, `sum c_j = 1`.
pub struct ConvexCombination {
    parts: Vec<(Box<dyn AttributionMethod>, f64)>,
}

/// Builds a convex combination; weights must be nonnegative and sum to one within `1e-12`.
pub fn convex_combination(parts: Vec<(Box<dyn AttributionMethod>, f64)>) -> Result<ConvexCombination> {
    if parts.is_empty() {
        return Err(AttribError::InvalidWeights("empty combination".into()));
    }
    if let Some((_, w)) = parts.iter().find(|(_, w)| !(*w >= 0.0) || !w.is_finite()) {
        return Err(AttribError::InvalidWeights(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = parts.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(AttribError::InvalidWeights(format!("weights sum to {total}, expected 1")));
    }
    Ok(ConvexCombination { parts })
}

impl AttributionMethod for ConvexCombination {
    fn id(&self) -> String {
        let inner: Vec<String> = self.parts.iter().map(|(m, w)| format!("{w}*{}", m.id())).collect();
        format!("convex({})", inner.join(" + "))
    }

    fn attribute(&self, f: &dyn Evaluable, vp: &ValuePair) -> Result<AttributionResult> {
        vp.check_dim(f.n())?;
        let mut z = vec![0.0; f.n()];
        let mut converged = true;
        for (m, w) in &self.parts {
            let r = m.attribute(f, vp)?;
            converged &= r.converged;
            for (acc, v) in z.iter_mut().zip(&r.z) {
                *acc += w * v;
            }
        }
        let total = f.value(vp.s())? - f.value(vp.r())?;
        let mut res = AttributionResult::new(self.id(), z, total);
        res.converged = converged;
        Ok(res)
    }
}
