//! Randomized verification of attribution axioms.
//!
//! Each check draws seeded random instances, applies the axiom's literal
//! predicate to a method, and reports the worst violation. A violation is
//! measured as `|lhs - rhs| / (1 + scale)` where `scale` is the largest
//! attribution or total change involved, and the axiom fails when it exceeds
//! the tolerance.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characteristic::{CharacteristicFunction, SeparableKind, ValuePair};
use crate::error::{AttribError, Result};
use crate::function::Evaluable;
use crate::method::AttributionMethod;
use crate::oracle::shapley_shubik_bruteforce;
use crate::path::attribute_aumann_shapley;
use crate::quadrature::QuadratureConfig;

pub const DEFAULT_AXIOM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Completeness,
    Dummy,
    DummyPrime,
    Additivity,
    Anonymity,
    ConditionalNonnegativity,
    Monotonicity,
    ScaleInvariance,
    AffineScaleInvariance,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Completeness,
        Axiom::Dummy,
        Axiom::DummyPrime,
        Axiom::Additivity,
        Axiom::Anonymity,
        Axiom::ConditionalNonnegativity,
        Axiom::Monotonicity,
        Axiom::ScaleInvariance,
        Axiom::AffineScaleInvariance,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::Completeness => "completeness",
            Axiom::Dummy => "dummy",
            Axiom::DummyPrime => "dummy-prime",
            Axiom::Additivity => "additivity",
            Axiom::Anonymity => "anonymity",
            Axiom::ConditionalNonnegativity => "conditional-nonnegativity",
            Axiom::Monotonicity => "monotonicity",
            Axiom::ScaleInvariance => "scale-invariance",
            Axiom::AffineScaleInvariance => "affine-scale-invariance",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Axiom {
    type Err = AttribError;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| AttribError::UnknownAxiom(s.to_string()))
    }
}

/// A function with endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub f: CharacteristicFunction,
    pub vp: ValuePair,
}

/// Deterministic source of random test instances.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceGenerator {
    pub seed: u64,
    /// Inclusive range of variable counts.
    pub n_range: (usize, usize),
    /// Inclusive range of monomial counts.
    pub terms_range: (usize, usize),
    pub coeff_range: (f64, f64),
    pub value_range: (f64, f64),
    pub nonnegative_coeffs: bool,
    pub r_le_s: bool,
    /// Add random separable terms.
    pub separable: bool,
    /// Use this function in every trial and randomize only the endpoints.
    pub fixed_function: Option<CharacteristicFunction>,
    /// Instances tried before any random ones, for axioms that take a single instance.
    pub fixed_instances: Vec<Instance>,
}

impl Default for InstanceGenerator {
    fn default() -> Self {
        InstanceGenerator {
            seed: 0x5eed_a771,
            n_range: (1, 6),
            terms_range: (1, 8),
            coeff_range: (-5.0, 5.0),
            value_range: (-3.0, 3.0),
            nonnegative_coeffs: false,
            r_le_s: false,
            separable: true,
            fixed_function: None,
            fixed_instances: Vec::new(),
        }
    }
}

impl InstanceGenerator {
    pub fn with_seed(seed: u64) -> Self {
        InstanceGenerator {
            seed,
            ..Default::default()
        }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn coeff(&self, rng: &mut impl Rng) -> f64 {
        let (lo, hi) = self.coeff_range;
        let c = rng.gen_range(lo..=hi);
        if self.nonnegative_coeffs {
            c.abs()
        } else {
            c
        }
    }

    pub fn random_n(&self, rng: &mut impl Rng) -> usize {
        if let Some(f) = &self.fixed_function {
            return f.n();
        }
        rng.gen_range(self.n_range.0.max(1)..=self.n_range.1.max(self.n_range.0.max(1)))
    }

    /// A random multilinear (plus optional separable) function of `n` variables.
    pub fn random_function(&self, rng: &mut impl Rng, n: usize) -> CharacteristicFunction {
        if let Some(f) = &self.fixed_function {
            return f.clone();
        }
        let mut f = CharacteristicFunction::zero(n);
        let terms = rng.gen_range(self.terms_range.0..=self.terms_range.1.max(self.terms_range.0));
        let vars: Vec<usize> = (0..n).collect();
        for _ in 0..terms {
            let size = rng.gen_range(1..=n);
            let subset: Vec<usize> = vars.choose_multiple(rng, size).copied().collect();
            let c = self.coeff(rng);
            f.add_monomial(subset, c).expect("generated subset is valid");
        }
        if self.separable {
            let count = rng.gen_range(0..=n.min(3));
            for _ in 0..count {
                let var = rng.gen_range(0..n);
                let kind = self.random_separable(rng);
                f.add_separable(var, kind).expect("generated term is valid");
            }
        }
        f
    }

    /// Separable kinds whose domain covers the whole value range.
    fn random_separable(&self, rng: &mut impl Rng) -> SeparableKind {
        let (lo, hi) = self.value_range;
        let span = (hi - lo).abs().max(1.0);
        let coeff = self.coeff(rng);
        match rng.gen_range(0..5) {
            0 => SeparableKind::Polynomial {
                coeffs: (0..rng.gen_range(1..=4)).map(|_| self.coeff(rng)).collect(),
            },
            1 => SeparableKind::Affine {
                slope: coeff,
                intercept: self.coeff(rng),
            },
            2 => {
                let scale = rng.gen_range(0.5..1.5);
                SeparableKind::Log {
                    coeff,
                    scale,
                    shift: -scale * lo + rng.gen_range(0.5..2.0),
                }
            }
            3 => SeparableKind::Exp {
                coeff,
                scale: rng.gen_range(-1.0..1.0) / span,
                shift: 0.0,
            },
            _ => {
                let scale = rng.gen_range(0.5..1.5);
                SeparableKind::Power {
                    coeff,
                    scale,
                    shift: -scale * lo + rng.gen_range(0.5..2.0),
                    exponent: [-1, 2, 3][rng.gen_range(0..3)],
                }
            }
        }
    }

    /// Endpoints in the value range with `r_i != s_i` for every `i`.
    pub fn random_values(&self, rng: &mut impl Rng, n: usize) -> ValuePair {
        let (lo, hi) = self.value_range;
        let mut r = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for _ in 0..n {
            let (mut a, mut b) = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
            while a == b {
                b = rng.gen_range(lo..=hi);
            }
            if self.r_le_s && a > b {
                std::mem::swap(&mut a, &mut b);
            }
            r.push(a);
            s.push(b);
        }
        ValuePair::new(r, s).expect("generated values are finite")
    }

    pub fn instance(&self, rng: &mut impl Rng) -> Instance {
        let n = self.random_n(rng);
        let f = self.random_function(rng, n);
        let vp = self.random_values(rng, n);
        Instance { f, vp }
    }
}

/// A failing instance with the parameters of the check that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub f: CharacteristicFunction,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub params: String,
    pub violation: f64,
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub method: String,
    pub pass: bool,
    pub trials: usize,
    /// Individual predicate evaluations (some trials check several variables).
    pub checks: usize,
    pub worst_violation: f64,
    pub tol: f64,
    pub counterexample: Option<Counterexample>,
    pub note: Option<String>,
}

impl fmt::Display for AxiomVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<26} {:<5} method={} trials={} checks={} worst={:.3e} tol={:.0e}",
            self.axiom.id(),
            if self.pass { "PASS" } else { "FAIL" },
            self.method,
            self.trials,
            self.checks,
            self.worst_violation,
            self.tol
        )?;
        if let Some(n) = &self.note {
            write!(f, " note={n}")?;
        }
        Ok(())
    }
}

struct Tally {
    tol: f64,
    checks: usize,
    worst: f64,
    first_failure: Option<Counterexample>,
    note: Option<String>,
}

impl Tally {
    fn record(&mut self, violation: f64, inst: &Instance, params: impl FnOnce() -> String) {
        self.checks += 1;
        // NaN counts as a violation
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        self.worst = self.worst.max(v);
        if v > self.tol && self.first_failure.is_none() {
            self.first_failure = Some(Counterexample {
                f: inst.f.clone(),
                r: inst.vp.r().to_vec(),
                s: inst.vp.s().to_vec(),
                params: params(),
                violation: v,
            });
        }
    }
}

fn max_abs(z: &[f64]) -> f64 {
    z.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn vec_violation(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    diff / (1.0 + max_abs(a).max(max_abs(b)))
}

fn drop_variable(f: &CharacteristicFunction, j: usize) -> CharacteristicFunction {
    let mut g = CharacteristicFunction::zero(f.n());
    for (subset, c) in f.multilinear_part().terms() {
        if !subset.contains(&j) {
            g.add_monomial(subset.iter().copied(), c).unwrap();
        }
    }
    for t in f.separable_terms().iter().filter(|t| t.var != j) {
        g.add_separable(t.var, t.kind.clone()).unwrap();
    }
    g
}

/// True when `d_i f >= 0` at every vertex of `[r, s]` in the other coordinates.
/// For a multilinear `f` this certifies that `f` is non-decreasing in `x_i` on the box.
pub fn certify_nondecreasing(f: &CharacteristicFunction, vp: &ValuePair, i: usize) -> bool {
    vertex_partials(f, vp, i).is_some_and(|v| v.iter().all(|&d| d >= 0.0))
}

fn vertex_partials(f: &CharacteristicFunction, vp: &ValuePair, i: usize) -> Option<Vec<f64>> {
    if !f.is_multilinear() {
        return None;
    }
    let n = f.n();
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut out = Vec::with_capacity(1 << others.len());
    let mut x = vp.r().to_vec();
    for mask in 0usize..1 << others.len() {
        for (b, &j) in others.iter().enumerate() {
            x[j] = if mask >> b & 1 == 1 { vp.s()[j] } else { vp.r()[j] };
        }
        out.push(f.partial_at(i, &x).ok()?);
    }
    Some(out)
}

/// Runs `trials` randomized checks of `axiom` against `method`.
pub fn check_axiom(
    method: &dyn AttributionMethod,
    axiom: Axiom,
    gen: &InstanceGenerator,
    trials: usize,
) -> AxiomVerdict {
    check_axiom_with_tol(method, axiom, gen, trials, DEFAULT_AXIOM_TOL)
}

pub fn check_axiom_with_tol(
    method: &dyn AttributionMethod,
    axiom: Axiom,
    gen: &InstanceGenerator,
    trials: usize,
    tol: f64,
) -> AxiomVerdict {
    let mut rng = gen.rng(axiom as u64 + 1);
    let mut tally = Tally {
        tol,
        checks: 0,
        worst: 0.0,
        first_failure: None,
        note: None,
    };
    for trial in 0..trials {
        let fixed = gen.fixed_instances.get(trial).cloned();
        if let Err(e) = run_trial(method, axiom, gen, fixed, &mut rng, &mut tally) {
            tally.worst = f64::INFINITY;
            tally.note = Some(format!("method failed on trial {trial}: {e}"));
            break;
        }
    }
    let pass = tally.note.is_none() && tally.worst <= tol;
    AxiomVerdict {
        axiom,
        method: method.id(),
        pass,
        trials,
        checks: tally.checks,
        worst_violation: tally.worst,
        tol,
        counterexample: tally.first_failure,
        note: tally.note,
    }
}

/// Checks every axiom in [`Axiom::ALL`].
pub fn run_axiom_suite(method: &dyn AttributionMethod, gen: &InstanceGenerator, trials: usize) -> Vec<AxiomVerdict> {
    Axiom::ALL
        .into_iter()
        .map(|a| check_axiom(method, a, gen, trials))
        .collect()
}

fn run_trial(
    method: &dyn AttributionMethod,
    axiom: Axiom,
    gen: &InstanceGenerator,
    fixed: Option<Instance>,
    rng: &mut ChaCha8Rng,
    tally: &mut Tally,
) -> Result<()> {
    let inst = fixed.unwrap_or_else(|| gen.instance(rng));
    let n = inst.f.n();
    match axiom {
        Axiom::Completeness => {
            let res = method.attribute(&inst.f, &inst.vp)?;
            let total = inst.f.evaluate(inst.vp.s())? - inst.f.evaluate(inst.vp.r())?;
            let residual = res.total() - total;
            tally.record(residual.abs() / (1.0 + total.abs()), &inst, || {
                format!("residual={residual}")
            });
        }
        Axiom::Dummy => {
            let j = rng.gen_range(0..n);
            let inst = Instance {
                f: drop_variable(&inst.f, j),
                vp: inst.vp,
            };
            let res = method.attribute(&inst.f, &inst.vp)?;
            let v = res.z[j].abs() / (1.0 + max_abs(&res.z));
            tally.record(v, &inst, || format!("j={j} z_j={}", res.z[j]));
        }
        Axiom::DummyPrime => {
            if n < 2 {
                return Ok(());
            }
            let inst = dummy_prime_instance(gen, rng, inst);
            let Some((inst, j, k)) = inst else { return Ok(()) };
            let res = method.attribute(&inst.f, &inst.vp)?;
            let v = res.z[j].abs() / (1.0 + max_abs(&res.z));
            tally.record(v, &inst, || format!("j={j} flat k={k} z_j={}", res.z[j]));
        }
        Axiom::Additivity => {
            let f2 = gen.random_function(rng, n);
            let sum = inst.f.combine(&f2, 1.0, 1.0)?;
            let z1 = method.attribute(&inst.f, &inst.vp)?.z;
            let z2 = method.attribute(&f2, &inst.vp)?.z;
            let z12 = method.attribute(&sum, &inst.vp)?.z;
            let zsum: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a + b).collect();
            tally.record(vec_violation(&z12, &zsum), &inst, || {
                format!("f2={}", serde_json::to_string(&f2).unwrap_or_default())
            });
        }
        Axiom::Anonymity => {
            let mut sigma: Vec<usize> = (0..n).collect();
            if n >= 2 {
                while sigma.iter().enumerate().all(|(i, &v)| i == v) {
                    sigma.shuffle(rng);
                }
            }
            let g = inst.f.permute_variables(&sigma)?;
            let vp2 = inst.vp.permuted(&sigma)?;
            let z = method.attribute(&inst.f, &inst.vp)?.z;
            let zp = method.attribute(&g, &vp2)?.z;
            let moved: Vec<f64> = (0..n).map(|i| zp[sigma[i]]).collect();
            tally.record(vec_violation(&z, &moved), &inst, || format!("sigma={sigma:?}"));
        }
        Axiom::ConditionalNonnegativity => {
            let inst = if rng.gen_bool(0.5) {
                positive_orthant_instance(gen, rng, n, false)
            } else {
                Instance {
                    f: drop_separable(&inst.f),
                    vp: inst.vp,
                }
            };
            let res = method.attribute(&inst.f, &inst.vp)?;
            let scale = 1.0 + max_abs(&res.z);
            for i in 0..n {
                if !certify_nondecreasing(&inst.f, &inst.vp, i) {
                    continue;
                }
                let wrong_sign = if inst.vp.s()[i] >= inst.vp.r()[i] {
                    (-res.z[i]).max(0.0)
                } else {
                    res.z[i].max(0.0)
                };
                tally.record(wrong_sign / scale, &inst, || format!("i={i} z_i={}", res.z[i]));
            }
        }
        Axiom::Monotonicity => {
            let inst = positive_orthant_instance(gen, rng, n, true);
            let j = rng.gen_range(0..n);
            let hi = gen.value_range.0.abs().max(gen.value_range.1.abs()).max(1.0);
            let mut s2 = inst.vp.s().to_vec();
            s2[j] += rng.gen_range(0.05..1.0) * hi;
            let vp2 = ValuePair::new(inst.vp.r().to_vec(), s2)?;
            let big = ValuePair::new(inst.vp.r().to_vec(), vp2.s().to_vec())?;
            if !certify_nondecreasing(&inst.f, &big, j) {
                return Ok(());
            }
            let a = method.attribute(&inst.f, &inst.vp)?.z[j];
            let b = method.attribute(&inst.f, &vp2)?.z[j];
            let v = (a - b).max(0.0) / (1.0 + a.abs().max(b.abs()));
            tally.record(v, &inst, || format!("j={j} s'_j={} z={a} z'={b}", vp2.s()[j]));
        }
        Axiom::ScaleInvariance | Axiom::AffineScaleInvariance => {
            let j = rng.gen_range(0..n);
            let c = 10f64.powf(rng.gen_range(-1.0..1.0));
            let d = if axiom == Axiom::AffineScaleInvariance {
                rng.gen_range(-5.0..5.0)
            } else {
                0.0
            };
            let g = inst.f.affine_reparameterize(j, c, d)?;
            let vp2 = inst.vp.affine_coordinate(j, c, d)?;
            let z = method.attribute(&inst.f, &inst.vp)?.z;
            let zg = method.attribute(&g, &vp2)?.z;
            tally.record(vec_violation(&z, &zg), &inst, || format!("j={j} c={c} d={d}"));
        }
    }
    Ok(())
}

fn drop_separable(f: &CharacteristicFunction) -> CharacteristicFunction {
    CharacteristicFunction::from_parts(f.multilinear_part().clone(), Vec::new()).unwrap()
}

/// Nonnegative coefficients and endpoints in `[0, hi]`; `r <= s` when `ordered`.
fn positive_orthant_instance(gen: &InstanceGenerator, rng: &mut ChaCha8Rng, n: usize, ordered: bool) -> Instance {
    let hi = gen.value_range.0.abs().max(gen.value_range.1.abs()).max(1.0);
    let sub = InstanceGenerator {
        nonnegative_coeffs: true,
        separable: false,
        value_range: (0.0, hi),
        r_le_s: ordered,
        fixed_function: gen.fixed_function.as_ref().map(drop_separable),
        ..gen.clone()
    };
    let f = sub.random_function(rng, n);
    let vp = sub.random_values(rng, n);
    Instance { f, vp }
}

/// A function that depends on `x_j` globally but not on the box `[r, s]`,
/// because some other coordinate `k` is held fixed at a root of `d_j f`.
fn dummy_prime_instance(
    gen: &InstanceGenerator,
    rng: &mut ChaCha8Rng,
    base: Instance,
) -> Option<(Instance, usize, usize)> {
    let n = base.f.n();
    let j = rng.gen_range(0..n);
    let mut k = rng.gen_range(0..n - 1);
    if k >= j {
        k += 1;
    }
    let mut f = drop_variable(&base.f, j);
    let r = base.vp.r().to_vec();
    let mut s = base.vp.s().to_vec();
    let pin = r[k];
    s[k] = pin;
    let rest: Vec<usize> = (0..n).filter(|&v| v != j && v != k).collect();
    let extra = rng.gen_range(1..=3);
    for _ in 0..extra {
        let size = rng.gen_range(0..=rest.len());
        let h: Vec<usize> = rest.choose_multiple(rng, size).copied().collect();
        let c = gen.coeff(rng);
        // c * x_j * (x_k - pin) * x_H
        let mut with_k = h.clone();
        with_k.extend([j, k]);
        let mut without_k = h;
        without_k.push(j);
        f.add_monomial(with_k, c).ok()?;
        f.add_monomial(without_k, -c * pin).ok()?;
    }
    let vp = ValuePair::new(r, s).ok()?;
    let partials = vertex_partials(&drop_separable(&f), &vp, j)?;
    let scale = 1.0 + f.multilinear_part().terms().map(|(_, c)| c.abs()).sum::<f64>();
    if partials.iter().any(|d| d.abs() > 1e-12 * scale * (1.0 + max_abs(vp.r()).max(max_abs(vp.s()))).powi(n as i32)) {
        return None;
    }
    Some((Instance { f, vp }, j, k))
}

/// Componentwise comparison of the numeric Aumann-Shapley and the enumerated
/// Shapley-Shubik attributions of one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub z_as: Vec<f64>,
    pub z_ss: Vec<f64>,
    pub gap: Vec<f64>,
    pub max_gap: f64,
    pub as_converged: bool,
}

pub fn divergence_witness(f: &dyn Evaluable, vp: &ValuePair, q: &QuadratureConfig) -> Result<DivergenceReport> {
    let ss = shapley_shubik_bruteforce(f, vp)?;
    let aus = attribute_aumann_shapley(f, vp, q)?;
    let gap: Vec<f64> = aus.z.iter().zip(&ss.z).map(|(a, b)| (a - b).abs()).collect();
    let max_gap = gap.iter().copied().fold(0.0, f64::max);
    Ok(DivergenceReport {
        z_as: aus.z,
        z_ss: ss.z,
        gap,
        max_gap,
        as_converged: aus.converged,
    })
}
