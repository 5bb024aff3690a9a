mod common;

use std::collections::HashMap;

use attrib_core::method::{AumannShapleyNumeric, ExactAss, Naive, ShapleyShubikBrute};
use attrib_core::model::presets::{basketball, portfolio, spend, DEFAULT_SPEND_POSITIONS};
use attrib_core::model::{parse_snapshots, run_report, DagEdge, DagModel, ModelSpec, ValueSnapshot};
use attrib_core::{AttributionMethod, CharacteristicFunction, SeparableKind};
use common::dag_flow_oracle;
use proptest::prelude::*;

/// Random DAG on up to 7 nodes with at most 12 edges. Nodes are created in a
/// hidden topological order and then given shuffled labels; the sink is the
/// last node and start variables sit only on nodes that can reach it.
fn random_dag() -> impl Strategy<Value = (DagModel, Vec<f64>)> {
    (2usize..=7)
        .prop_flat_map(|n| {
            let edges = prop::collection::vec((0..n, 0..n), 1..=12);
            let starts = prop::collection::vec(any::<bool>(), n);
            let labels = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (Just(n), edges, starts, labels)
        })
        .prop_filter_map("sink unreachable from every start", |(n, raw, starts, labels)| {
            let edges: Vec<(usize, usize)> = raw
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            let sink = n - 1;
            let mut reaches = vec![false; n];
            reaches[sink] = true;
            for v in (0..n).rev() {
                if edges.iter().any(|&(a, b)| a == v && reaches[b]) {
                    reaches[v] = true;
                }
            }
            let start_nodes: Vec<usize> = (0..n).filter(|&v| starts[v] && reaches[v]).collect();
            if start_nodes.is_empty() {
                return None;
            }
            let name = |v: usize| format!("v{}", labels[v]);
            let mut nodes: Vec<(usize, String)> = (0..n).map(|v| (labels[v], name(v))).collect();
            nodes.sort();
            let pos: HashMap<String, usize> = nodes.iter().enumerate().map(|(i, (_, s))| (s.clone(), i)).collect();
            let dag = DagModel {
                nodes: nodes.into_iter().map(|(_, s)| s).collect(),
                sink: pos[&name(sink)],
                starts: start_nodes.iter().map(|&v| (pos[&name(v)], format!("s_{}", name(v)))).collect(),
                edges: edges
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, b))| DagEdge {
                        from: pos[&name(a)],
                        to: pos[&name(b)],
                        var: format!("p{k}"),
                    })
                    .collect(),
            };
            Some(dag)
        })
        .prop_flat_map(|dag| {
            let nvars = dag.starts.len() + dag.edges.len();
            (Just(dag), prop::collection::vec(-2.0..2.0f64, nvars))
        })
}

fn finite_f64() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite nonzero", |v| v.is_finite() && *v != 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compiled_dag_matches_path_enumeration((dag, values) in random_dag()) {
        let model = dag.compile().unwrap();
        let names = dag.variable_names();
        prop_assert_eq!(model.names(), names.as_slice());
        let by_name: HashMap<&str, f64> = names.iter().map(|s| s.as_str()).zip(values.iter().copied()).collect();
        let expect = dag_flow_oracle(&dag, |v| by_name[v]);
        let got = model.function().evaluate(&values).unwrap();
        prop_assert!((got - expect).abs() <= 1e-12 * (1.0 + expect.abs()), "{got} vs {expect}");
        prop_assert!(model.function().multilinear_part().terms().all(|(_, c)| c == 1.0));
    }

    #[test]
    fn model_text_round_trips_bit_exactly(
        n in 1usize..6,
        terms in prop::collection::vec((prop::collection::vec(any::<bool>(), 6), finite_f64()), 0..8),
        seps in prop::collection::vec((0usize..6, finite_f64(), finite_f64(), -4i32..5), 0..4),
    ) {
        let mut f = CharacteristicFunction::zero(n);
        for (mask, c) in terms {
            f.add_monomial((0..n).filter(|&i| mask[i]), c).unwrap();
        }
        for (v, a, b, e) in seps {
            f.add_separable(v % n, SeparableKind::Power { coeff: a, scale: b, shift: 1.0, exponent: e }).unwrap();
        }
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let spec = ModelSpec::from_function(names, f).unwrap();
        let back = ModelSpec::parse(&spec.to_text()).unwrap();
        prop_assert_eq!(&back, &spec);
        for ((s1, c1), (s2, c2)) in back.function().multilinear_part().terms().zip(spec.function().multilinear_part().terms()) {
            prop_assert_eq!(s1, s2);
            prop_assert_eq!(c1.to_bits(), c2.to_bits());
        }
    }

    #[test]
    fn segment_totals_are_sums_of_members(
        assets in 1usize..8,
        vals in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, -0.2..0.2f64, -0.2..0.2f64), 8),
    ) {
        let model = portfolio(assets).unwrap();
        let mut snap = ValueSnapshot::new("p");
        for i in 0..assets {
            let (w0, w1, r0, r1) = vals[i];
            snap = snap.with(&format!("w{}", i + 1), w0, w1).with(&format!("r{}", i + 1), r0, r1);
        }
        let rep = run_report(&model, &snap, &ExactAss::default()).unwrap();
        for (label, members) in model.segments() {
            let sum: f64 = members.iter().map(|&m| rep.rows[m].attribution).sum();
            prop_assert_eq!(rep.segment(label).unwrap().to_bits(), sum.to_bits());
        }
    }
}

#[test]
fn report_completeness_per_method() {
    let model = ModelSpec::parse(
        "variables: a b c d\nterm: 2 a b c\nterm: -1 b d\nterm: 0.5 a\nsep: d exp 1 0.3 0\nsegment: left a b\n",
    )
    .unwrap();
    let snap = ValueSnapshot::new("e")
        .with("a", 1.0, 2.0)
        .with("b", -1.0, 0.5)
        .with("c", 0.3, 0.9)
        .with("d", 2.0, -1.0);
    let methods: Vec<(Box<dyn AttributionMethod>, f64)> = vec![
        (Box::new(ExactAss::default()), 1e-12),
        (Box::new(ShapleyShubikBrute), 1e-12),
        (Box::new(AumannShapleyNumeric::default()), 1e-9),
    ];
    for (m, tol) in methods {
        let rep = run_report(&model, &snap, m.as_ref()).unwrap();
        assert!(rep.converged);
        assert!(rep.residual.abs() <= tol * (1.0 + rep.total_change.abs()), "{}: {}", rep.method, rep.residual);
        assert_eq!(rep.segments.len(), 1);
    }
    let naive = run_report(&model, &snap, &Naive).unwrap();
    assert!(naive.residual.abs() > 1e-3);
    assert!(naive.to_text().contains("completeness residual"));
}

#[test]
fn procurement_report_values() {
    let model = attrib_core::model::presets::procurement();
    let snaps = parse_snapshots("entity,variable,initial,final\nq,a,4,5\nq,p,1,12\nq,c,1,1.5\n").unwrap();
    let rep = run_report(&model, &snaps[0], &ExactAss::default()).unwrap();
    for (v, want) in [("a", 8.58333), ("p", 62.33333), ("c", 15.08333)] {
        assert!((rep.attribution(v).unwrap() - want).abs() < 1e-5, "{v}");
    }
    assert_eq!(rep.total_change, 86.0);
    let naive = run_report(&model, &snaps[0], &Naive).unwrap();
    assert_eq!(
        [naive.attribution("a"), naive.attribution("p"), naive.attribution("c")],
        [Some(18.0), Some(82.5), Some(30.0)]
    );
    assert!((naive.residual - 44.5).abs() < 1e-12);
}

#[test]
fn portfolio_single_asset_example() {
    let model = portfolio(1).unwrap();
    let snap = ValueSnapshot::new("fund").with("w1", 0.6, 0.5).with("r1", 0.05, 0.08);
    let rep = run_report(&model, &snap, &ExactAss::default()).unwrap();
    assert!((rep.attribution("w1").unwrap() + 0.0065).abs() < 1e-15);
    assert!((rep.attribution("r1").unwrap() - 0.0165).abs() < 1e-15);
    assert!((rep.total_change - 0.01).abs() < 1e-15);
}

#[test]
fn basketball_preset_is_degree_four_and_round_trips() {
    let model = basketball(5).unwrap();
    assert!(model
        .function()
        .multilinear_part()
        .terms()
        .all(|(s, c)| s.len() == 4 && c.to_bits() == 0.01f64.to_bits()));
    let text = model.to_text();
    let back = ModelSpec::parse(&text).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.to_text(), text);
}

#[test]
fn spend_preset_defaults() {
    let model = spend(DEFAULT_SPEND_POSITIONS).unwrap();
    assert_eq!(DEFAULT_SPEND_POSITIONS, 4);
    assert_eq!(model.function().multilinear_part().len(), 4);
    // spend at all-ones is one unit per position
    assert_eq!(model.function().evaluate(&vec![1.0; model.names().len()]).unwrap(), 4.0);
}

#[test]
fn entities_keep_input_order() {
    let text = "z,a,1,2\ny,a,0,1\nz,p,1,1\ny,p,2,2\nz,c,1,1\ny,c,1,3\n";
    let snaps = parse_snapshots(text).unwrap();
    let ids: Vec<&str> = snaps.iter().map(|s| s.entity.as_str()).collect();
    assert_eq!(ids, ["z", "y"]);
}

#[test]
fn errors_name_the_variable() {
    let model = ModelSpec::parse("variables: x y\nterm: 1 x y\nsep: x log 1 1 0\n").unwrap();
    let snap = ValueSnapshot::new("bad").with("x", -1.0, 1.0).with("y", 1.0, 2.0);
    let err = run_report(&model, &snap, &ExactAss::default()).unwrap_err().to_string();
    assert!(err.contains("bad") && err.contains("`x`"), "{err}");
    let missing = ValueSnapshot::new("m").with("x", 1.0, 2.0);
    let err = run_report(&model, &missing, &ExactAss::default()).unwrap_err().to_string();
    assert!(err.contains('y'), "{err}");
}
