mod common;

use attrib_core::exact::DpState;
use attrib_core::method::{AttributionMethod, PathMethod, RandomOrder};
use attrib_core::path::MonotoneCubic;
use attrib_core::quadrature::GaussLegendre;
use attrib_core::{
    attribute_ass, attribute_aumann_shapley, attribute_path, shapley_shubik_bruteforce, shapley_weight, BasePath,
    BlackBoxFunction, CharacteristicFunction, PermutationWeights, QuadratureConfig, SeparableKind, ValuePair,
};
use common::*;
use proptest::prelude::*;

fn separable_kind() -> impl Strategy<Value = SeparableKind> {
    prop_oneof![
        prop::collection::vec(-3.0..3.0f64, 1..4).prop_map(|coeffs| SeparableKind::Polynomial { coeffs }),
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(slope, intercept)| SeparableKind::Affine { slope, intercept }),
        (-3.0..3.0f64, 0.5..1.5f64).prop_map(|(coeff, scale)| SeparableKind::Log {
            coeff,
            scale,
            shift: 5.0
        }),
        (-3.0..3.0f64, -0.3..0.3f64).prop_map(|(coeff, scale)| SeparableKind::Exp {
            coeff,
            scale,
            shift: 0.0
        }),
    ]
}

/// Random multilinear-plus-separable function with endpoints in `[-3, 3]`.
fn instance(max_n: usize, separable: bool) -> impl Strategy<Value = (CharacteristicFunction, ValuePair)> {
    (1..=max_n).prop_flat_map(move |n| {
        let terms = prop::collection::vec((prop::collection::vec(any::<bool>(), n), -5.0..5.0f64), 1..10);
        let seps = prop::collection::vec((0..n, separable_kind()), 0..if separable { 4 } else { 1 });
        let r = prop::collection::vec(-3.0..3.0f64, n);
        let s = prop::collection::vec(-3.0..3.0f64, n);
        (terms, seps, r, s).prop_map(move |(terms, seps, r, s)| {
            let mut f = CharacteristicFunction::zero(n);
            for (mask, c) in terms {
                let subset: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
                f.add_monomial(subset, c).unwrap();
            }
            for (var, kind) in seps {
                f.add_separable(var, kind).unwrap();
            }
            (f, ValuePair::new(r, s).unwrap())
        })
    })
}

fn with_permutation(max_n: usize) -> impl Strategy<Value = (CharacteristicFunction, ValuePair, Vec<usize>)> {
    instance(max_n, true).prop_flat_map(|(f, vp)| {
        let n = f.n();
        (Just(f), Just(vp), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    max_rel_gap(a, b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ass_matches_straight_line_integral((f, vp) in instance(8, true)) {
        let z = attribute_ass(&f, &vp).unwrap().z;
        let expect = straight_line_oracle(&f, &vp);
        prop_assert!(close(&z, &expect, 1e-10), "{z:?} vs {expect:?}");
    }

    #[test]
    fn ass_matches_order_average((f, vp) in instance(6, true)) {
        let z = attribute_ass(&f, &vp).unwrap().z;
        let expect = order_average_oracle(f.n(), |x| f.evaluate(x).unwrap(), &vp);
        prop_assert!(close(&z, &expect, 1e-10), "{z:?} vs {expect:?}");
        let brute = shapley_shubik_bruteforce(&f, &vp).unwrap().z;
        prop_assert!(close(&brute, &expect, 1e-12));
    }

    #[test]
    fn ass_is_complete((f, vp) in instance(8, true)) {
        let res = attribute_ass(&f, &vp).unwrap();
        let total = f.evaluate(vp.s()).unwrap() - f.evaluate(vp.r()).unwrap();
        prop_assert!((res.total() - total).abs() <= 1e-10 * (1.0 + total.abs()));
        prop_assert!(res.residual.abs() <= 1e-10 * (1.0 + total.abs()));
    }

    #[test]
    fn additivity(
        (f, vp) in instance(6, true),
        seed_g in instance(6, true),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        // reuse g's structure on f's dimension by truncating its variables
        let n = f.n();
        let mut g = CharacteristicFunction::zero(n);
        for (subset, c) in seed_g.0.multilinear_part().terms() {
            let sub: Vec<usize> = subset.iter().copied().filter(|&i| i < n).collect();
            g.add_monomial(sub, c).unwrap();
        }
        let h = f.combine(&g, a, b).unwrap();
        let zf = attribute_ass(&f, &vp).unwrap().z;
        let zg = attribute_ass(&g, &vp).unwrap().z;
        let zh = attribute_ass(&h, &vp).unwrap().z;
        let lin: Vec<f64> = zf.iter().zip(&zg).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(close(&zh, &lin, 1e-10));
    }

    #[test]
    fn anonymity((f, vp, sigma) in with_permutation(7)) {
        let z = attribute_ass(&f, &vp).unwrap().z;
        let fp = f.permute_variables(&sigma).unwrap();
        let vpp = vp.permuted(&sigma).unwrap();
        let zp = attribute_ass(&fp, &vpp).unwrap().z;
        for i in 0..f.n() {
            prop_assert!((zp[sigma[i]] - z[i]).abs() <= 1e-10 * (1.0 + z[i].abs()));
        }
    }

    #[test]
    fn affine_scale_invariance(
        (f, vp) in instance(6, false),
        j_seed in any::<usize>(),
        c in 0.1..10.0f64,
        d in -5.0..5.0f64,
    ) {
        let j = j_seed % f.n();
        let z = attribute_ass(&f, &vp).unwrap().z;
        let g = f.affine_reparameterize(j, c, d).unwrap();
        let vpg = vp.affine_coordinate(j, c, d).unwrap();
        let zg = attribute_ass(&g, &vpg).unwrap().z;
        prop_assert!(close(&z, &zg, 1e-9), "{z:?} vs {zg:?}");
    }

    #[test]
    fn degenerate_coordinate_gets_nothing((f, vp) in instance(7, true), j_seed in any::<usize>()) {
        let j = j_seed % f.n();
        let mut s = vp.s().to_vec();
        s[j] = vp.r()[j];
        let vp = ValuePair::new(vp.r().to_vec(), s).unwrap();
        prop_assert_eq!(attribute_ass(&f, &vp).unwrap().z[j], 0.0);
    }

    #[test]
    fn single_order_equals_edge_walk((f, vp, order) in with_permutation(5)) {
        let ro = RandomOrder { weights: PermutationWeights::single(order.clone()).unwrap() };
        let walk = PathMethod { base: BasePath::EdgeWalk(order), quadrature: QuadratureConfig::default() };
        let a = ro.attribute(&f, &vp).unwrap().z;
        let b = walk.attribute(&f, &vp).unwrap();
        prop_assert!(b.converged);
        prop_assert!(close(&a, &b.z, 1e-9), "{a:?} vs {:?}", b.z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numeric_path_matches_exact((f, vp) in instance(4, true)) {
        let exact = attribute_ass(&f, &vp).unwrap().z;
        let num = attribute_aumann_shapley(&f, &vp, &QuadratureConfig::default()).unwrap();
        prop_assert!(num.converged);
        prop_assert!(close(&exact, &num.z, 1e-8), "{exact:?} vs {:?}", num.z);
    }

    /// Enumerated Shapley-Shubik values depend only on the order of each
    /// coordinate's two endpoints: reparameterizing a coordinate by a strictly
    /// increasing map leaves them unchanged.
    #[test]
    fn ordinal_invariance((f, vp) in instance(5, true), j_seed in any::<usize>()) {
        let n = f.n();
        let j = j_seed % n;
        let g_f = f.clone();
        let g = BlackBoxFunction::new(n, move |y: &[f64]| {
            let mut x = y.to_vec();
            x[j] = y[j].powi(3) + y[j];
            g_f.evaluate(&x).unwrap()
        });
        // y -> y^3 + y is strictly increasing; invert numerically at the endpoints.
        let inv = |x: f64| {
            let mut y = x.cbrt();
            for _ in 0..60 {
                y -= (y.powi(3) + y - x) / (3.0 * y * y + 1.0);
            }
            y
        };
        let mut r = vp.r().to_vec();
        let mut s = vp.s().to_vec();
        r[j] = inv(r[j]);
        s[j] = inv(s[j]);
        let vpg = ValuePair::new(r, s).unwrap();
        let a = shapley_shubik_bruteforce(&f, &vp).unwrap().z;
        let b = shapley_shubik_bruteforce(&g, &vpg).unwrap().z;
        prop_assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn user_path_is_complete((f, vp) in instance(4, true), bend in 0.05..0.95f64) {
        let n = f.n();
        let comps: Vec<MonotoneCubic> = (0..n)
            .map(|i| {
                let mid = if i % 2 == 0 { bend } else { 1.0 - bend };
                MonotoneCubic::new(vec![0.0, 0.5, 1.0], vec![0.0, mid, 1.0]).unwrap()
            })
            .collect();
        let res = attribute_path(&f, &vp, &BasePath::User(comps), &QuadratureConfig::default()).unwrap();
        let total = f.evaluate(vp.s()).unwrap() - f.evaluate(vp.r()).unwrap();
        prop_assert!((res.total() - total).abs() <= 1e-8 * (1.0 + total.abs()));
    }
}

#[test]
fn linear_user_path_is_the_straight_line() {
    let f = CharacteristicFunction::multilinear(3, [(vec![0, 1, 2], 2.0), (vec![0, 2], -1.0)]).unwrap();
    let vp = ValuePair::new(vec![1.0, -2.0, 0.5], vec![3.0, 1.0, 2.0]).unwrap();
    let line = || MonotoneCubic::new(vec![0.0, 0.25, 1.0], vec![0.0, 0.25, 1.0]).unwrap();
    let user = attribute_path(&f, &vp, &BasePath::User(vec![line(), line(), line()]), &QuadratureConfig::default())
        .unwrap()
        .z;
    assert!(close(&user, &straight_line_oracle(&f, &vp), 1e-10));
}

#[test]
fn order_weights_bridge_factorials_and_beta_integrals() {
    for n in 1..=12 {
        let rule = GaussLegendre::new(n).unwrap();
        for k in 0..n {
            let closed = factorial(k) * factorial(n - 1 - k) / factorial(n);
            let w = shapley_weight(k, n).unwrap();
            let quad = rule.integrate(0.0, 1.0, 1, |t| t.powi(k as i32) * (1.0 - t).powi((n - 1 - k) as i32));
            assert!((w - closed).abs() <= 1e-12 * closed.max(1e-300), "n={n} k={k}");
            assert!((quad - closed).abs() <= 1e-12, "n={n} k={k}: {quad} vs {closed}");
        }
    }
}

#[test]
fn dp_keeps_two_bounded_rows() {
    let n = 300;
    let mut dp = DpState::with_capacity(n);
    for m in 0..n {
        dp.push(0.5 + m as f64 / n as f64, 1.5);
        let (a, b) = dp.row_lengths();
        assert_eq!(a, m + 2);
        assert!(b <= n + 1);
    }
    let (ca, cb) = dp.row_capacities();
    assert!(ca <= n + 1 && cb <= n + 1, "{ca} {cb}");
}

#[test]
fn shapley_shubik_is_not_path_integral_off_class() {
    // x1^2 x2 is neither multilinear nor separable
    let f = BlackBoxFunction::new(2, |x: &[f64]| x[0] * x[0] * x[1]);
    let vp = ValuePair::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let ss = shapley_shubik_bruteforce(&f, &vp).unwrap().z;
    let expect = order_average_oracle(2, |x| x[0] * x[0] * x[1], &vp);
    assert!(close(&ss, &expect, 1e-15));
    let asn = attribute_aumann_shapley(&f, &vp, &QuadratureConfig::default()).unwrap().z;
    assert!((asn[1] - 1.0 / 3.0).abs() < 1e-7);
    assert!((ss[1] - 0.5).abs() < 1e-15);
}
