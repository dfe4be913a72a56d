//! Circuit laws, structural validation and the text format.

use std::collections::BTreeMap;

use levy_samplers::circuits::{
    edge_weight, parse_circuit_spec, BuiltCircuit, Circuit, CircuitBuilder, CircuitSpec, EdgeSampler,
    EdgeSamplerSpec, Scope, ViolationKind,
};
use levy_samplers::level::WeightFunction;
use levy_samplers::oracle::{chi_square_gof, exact_edge_distribution, ks_test_exponential, ExactDistribution};
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, Update};
use proptest::prelude::*;

const ALPHA: f64 = 0.001;
const REPS: u64 = 20_000;

fn counts(it: impl IntoIterator<Item = u64>) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for t in it {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

fn dist(pairs: &[(u64, f64)]) -> ExactDistribution {
    ExactDistribution {
        support: pairs.iter().map(|p| p.0).collect(),
        probs: pairs.iter().map(|p| p.1).collect(),
    }
}

// pair 0 is 1->2, pair 1 is 2->1; weight sqrt(x_tail) + x_head
fn directed_pairs(hash: OracleHash) -> Circuit {
    let mut b = CircuitBuilder::new();
    let out = b.output();
    let inputs = [b.input(1), b.input(2)];
    for (pair, (u, v)) in [(0usize, 1usize), (1, 0)].into_iter().enumerate() {
        let tail = b.g(WeightFunction::FHalf, 10 + 2 * pair as u32, Scope::Key);
        let head = b.g(WeightFunction::F1, 11 + 2 * pair as u32, Scope::Key);
        b.set_label(tail, pair as u64);
        b.set_label(head, pair as u64);
        b.wire(inputs[u], tail);
        b.wire(inputs[v], head);
        b.wire(tail, out);
        b.wire(head, out);
    }
    b.build(hash).unwrap()
}

#[test]
fn directed_pairs_are_asymmetric() {
    let mut hs = Vec::new();
    let c = counts((0..REPS).map(|r| {
        let s = derive_seed(7, r);
        let mut c = directed_pairs(OracleHash::new(s, 0));
        let mut rng = FreshSource::new(s);
        c.update_key(1, 1.0, &mut rng).unwrap();
        c.update_key(2, 4.0, &mut rng).unwrap();
        let (id, h) = c.best_output().unwrap();
        hs.push(h);
        id
    }));
    assert!(chi_square_gof(&c, &dist(&[(0, 5.0 / 8.0), (1, 3.0 / 8.0)]), ALPHA).unwrap().pass, "{c:?}");
    // total weight (1 + 4) + (2 + 1)
    assert!(ks_test_exponential(&hs, 8.0, ALPHA).unwrap().pass);
}

#[test]
fn heterogeneous_flat_circuit() {
    let assignment = [(1, WeightFunction::F1), (2, WeightFunction::F0)];
    let c = counts((0..REPS).map(|r| {
        let s = derive_seed(8, r);
        let mut c = Circuit::flat(&assignment, OracleHash::new(s, 0)).unwrap();
        let mut rng = FreshSource::new(s);
        c.update_key(1, 3.0, &mut rng).unwrap();
        c.update_key(2, 5.0, &mut rng).unwrap();
        c.best_output().unwrap().0
    }));
    assert!(chi_square_gof(&c, &dist(&[(1, 0.75), (2, 0.25)]), ALPHA).unwrap().pass, "{c:?}");
}

#[test]
fn scalar_gates_scale_rates() {
    // key k through scalar alpha_k then F1: weight alpha_k * x_k
    let c = counts((0..REPS).map(|r| {
        let s = derive_seed(9, r);
        let mut b = CircuitBuilder::new();
        let out = b.output();
        for (key, alpha) in [(1u64, 3.0), (2, 0.5)] {
            let i = b.input(key);
            let sc = b.scalar(alpha);
            let g = b.g(WeightFunction::F1, 0, Scope::Key);
            b.wire(i, sc);
            b.wire(sc, g);
            b.wire(g, out);
        }
        let mut c = b.build(OracleHash::new(s, 0)).unwrap();
        let mut rng = FreshSource::new(s);
        c.update_key(1, 1.0, &mut rng).unwrap();
        c.update_key(2, 2.0, &mut rng).unwrap();
        c.best_output().unwrap().0
    }));
    assert!(chi_square_gof(&c, &dist(&[(1, 0.75), (2, 0.25)]), ALPHA).unwrap().pass, "{c:?}");
}

fn edge_law(edges: Vec<Vec<u64>>, x: &[(u64, f64)], seed: u128) {
    let spec = EdgeSamplerSpec::from_edges(edges.clone()).unwrap();
    let mut hs = Vec::new();
    let c = counts((0..REPS).map(|r| {
        let s = derive_seed(seed, r);
        let mut e = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0)).unwrap();
        let mut rng = FreshSource::new(s);
        for &(v, d) in x {
            e.update(v, d, &mut rng).unwrap();
        }
        let (i, h) = e.sample_index().unwrap();
        hs.push(h);
        i as u64
    }));
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for &(v, d) in x {
        *mass.entry(v).or_insert(0.0) += d;
    }
    let exact = exact_edge_distribution(&edges, &mass, edge_weight).unwrap();
    assert!(chi_square_gof(&c, &exact, ALPHA).unwrap().pass, "{c:?} vs {exact:?}");
    let total: f64 = edges
        .iter()
        .map(|e| edge_weight(&e.iter().map(|v| mass.get(v).copied().unwrap_or(0.0)).collect::<Vec<_>>()))
        .sum();
    assert!(ks_test_exponential(&hs, total, ALPHA).unwrap().pass);
}

#[test]
fn triangle_edge_law() {
    edge_law(vec![vec![1, 2], vec![2, 3], vec![1, 3]], &[(1, 1.0), (2, 2.0), (3, 3.0)], 10);
}

#[test]
fn hyperedge_law() {
    edge_law(
        vec![vec![1, 2, 3], vec![3, 4], vec![1, 4, 5, 6]],
        &[(1, 0.3), (2, 2.0), (3, 0.7), (4, 5.0), (5, 1.0), (6, 0.2), (2, 1.5)],
        11,
    );
}

#[test]
fn edge_weight_hand_values() {
    assert_eq!(edge_weight(&[0.0, 0.0]), 0.0);
    let w = edge_weight(&[1.0, 4.0]);
    let expect = (1.0f64 + 1.0 + 2.0).ln() + 2.0 * (1.0 - (-5.0f64).exp());
    assert!((w - expect).abs() < 1e-15);
}

#[test]
fn edge_spec_rejects_bad_graphs() {
    assert!(EdgeSamplerSpec::from_edges(vec![vec![1]]).is_err());
    assert!(EdgeSamplerSpec::from_edges(vec![vec![1, 1]]).is_err());
    assert!(EdgeSamplerSpec::from_edges(vec![vec![1, 2, 3, 4, 5]]).is_err());
    assert!(EdgeSamplerSpec::new(vec![1, 2], vec![vec![1, 3]]).is_err());
}

#[test]
fn edge_sampler_merge_equals_sequential() {
    let spec = EdgeSamplerSpec::from_edges(vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]]).unwrap();
    let stream = [(1, 1.0), (3, 2.0), (2, 0.5), (4, 1.0), (1, 2.0), (3, 0.1)];
    for r in 0..200 {
        let s = derive_seed(12, r);
        let mut seq = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0)).unwrap();
        let mut rng = FreshSource::new(s);
        for &(v, d) in &stream {
            seq.update(v, d, &mut rng).unwrap();
        }
        let mut a = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0)).unwrap();
        let mut b = a.clone();
        let mut rng = FreshSource::new(s);
        for &(v, d) in &stream[..3] {
            a.update(v, d, &mut rng).unwrap();
        }
        let mut rng = FreshSource::starting_at(s, rng.stream(), rng.counter());
        for &(v, d) in &stream[3..] {
            b.update(v, d, &mut rng).unwrap();
        }
        a.merge(&b).unwrap();
        assert_eq!(a.sample(), seq.sample());
    }
}

fn one_gate(kinds: impl FnOnce(&mut CircuitBuilder)) -> Option<ViolationKind> {
    let mut b = CircuitBuilder::new();
    kinds(&mut b);
    b.validate().err().map(|v| v.kind)
}

#[test]
fn validation_catches_each_rule() {
    use ViolationKind::*;
    let f1 = || WeightFunction::F1;
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let o = b.output();
            b.wire(i, o);
        }),
        None
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            b.wire(i, 5);
        }),
        Some(UnknownGate)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let x = b.scalar(1.0);
            let y = b.scalar(1.0);
            let o = b.output();
            b.wire(i, x);
            b.wire(x, y);
            b.wire(y, x);
            b.wire(y, o);
        }),
        Some(Cycle)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let j = b.input(2);
            let o = b.output();
            b.wire(i, j);
            b.wire(j, o);
        }),
        Some(InputHasPredecessor)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let o = b.output();
            let s = b.scalar(1.0);
            let o2 = b.output();
            b.wire(i, o);
            b.wire(o, s);
            b.wire(s, o2);
        }),
        Some(OutputHasSuccessor)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let g = b.g(f1(), 0, Scope::Key);
            let o = b.output();
            let o2 = b.output();
            b.wire(i, g);
            b.wire(g, o);
            b.wire(g, o2);
        }),
        Some(NotSingleSuccessor)
    );
    assert_eq!(
        one_gate(|b| {
            let g = b.g(f1(), 0, Scope::Key);
            let o = b.output();
            b.wire(g, o);
        }),
        Some(NoPredecessor)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let o = b.output();
            b.wire(i, o);
            b.input(2);
        }),
        Some(UnreachableOutput)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let s = b.scalar(0.0);
            let o = b.output();
            b.wire(i, s);
            b.wire(s, o);
        }),
        Some(NonPositiveAlpha)
    );
    assert_eq!(
        one_gate(|b| {
            let i = b.input(1);
            let g = b.g("sum:c=1,atoms=1x2".parse().unwrap(), 0, Scope::Key);
            let o = b.output();
            b.wire(i, g);
            b.wire(g, o);
        }),
        Some(MultiTermWeight)
    );
}

#[test]
fn update_rejects_bad_input() {
    let mut c = Circuit::flat(&[(1, WeightFunction::F1)], OracleHash::new(1, 0)).unwrap();
    let mut rng = FreshSource::new(1);
    assert!(c.update_key(1, 0.0, &mut rng).is_err());
    assert!(c.update_key(1, f64::NAN, &mut rng).is_err());
    let out = c.output_gates()[0];
    assert!(c.update(out, 1, 1.0, &mut rng).is_err());
    assert_eq!(c.best_output(), None);
    c.update_key(1, 1.0, &mut rng).unwrap();
    assert_eq!(c.best_output().unwrap().0, 1);
    c.clear();
    assert_eq!(c.best_output(), None);
}

#[test]
fn spec_file_gates() {
    let text = "\
# two keys, F1 on one and sqrt on the other
gate 0 output
gate 1 input
gate 2 input key=7
gate 3 g:f1
gate 4 g:fhalf label=99 salt=4 scope=fixed:1,2
wire 1 3
wire 2 4
wire 3 0
wire 4 0
";
    let spec = parse_circuit_spec(text).unwrap();
    let BuiltCircuit::Gates { mut circuit, ids } = spec.build(OracleHash::new(3, 0)).unwrap() else {
        panic!("expected a gate circuit");
    };
    assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    assert_eq!(circuit.route(7).len(), 1);
    assert_eq!(circuit.route(5).len(), 0);
    let mut rng = FreshSource::new(3);
    circuit.update_key(7, 1.0, &mut rng).unwrap();
    assert_eq!(circuit.best_output().unwrap().0, 99);
}

#[test]
fn spec_file_graph() {
    let spec = parse_circuit_spec("graph-edge 1 2\ngraph-edge 2 3 4\n").unwrap();
    let CircuitSpec::Edges(e) = &spec else {
        panic!("expected edges");
    };
    assert_eq!(e.edges().len(), 2);
    assert_eq!(e.vertices(), &[1, 2, 3, 4]);
    assert!(matches!(spec.build(OracleHash::new(1, 0)).unwrap(), BuiltCircuit::Edges(_)));
}

#[test]
fn spec_file_errors_carry_lines() {
    let cases = [
        ("gate 0 output\n\ngate x input\n", 3),
        ("gate 0 frobnicate\n", 1),
        ("gate 0 output\ngate 0 input\n", 2),
        ("gate 0 output\nwire 0 9\n", 2),
        ("gate 0 output\ngraph-edge 1 2\n", 2),
        ("gate 0 g:f1 key=3\n", 1),
        ("gate 0 scalar:abc\n", 1),
    ];
    for (text, line) in cases {
        let err = parse_circuit_spec(text).unwrap_err();
        assert_eq!(err.line, line, "{text:?}: {err}");
    }
    // structurally invalid but well formed: reported at build time
    let spec = parse_circuit_spec("gate 0 output\ngate 1 g:f1\nwire 1 0\n").unwrap();
    assert!(spec.build(OracleHash::new(1, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_circuit_replays_gsampler(
        g in prop::sample::select(vec!["f0", "f1", "fhalf", "softcap:2", "log", "scale:3:f1", "sum:c=0.5,g0=1,atoms=2x1;1x3"]),
        stream in prop::collection::vec((0u64..6, 0.01f64..10.0), 1..20),
        seed in any::<u64>(),
    ) {
        let g: WeightFunction = g.parse().unwrap();
        let seed = seed as u128;
        let mut keys: Vec<u64> = stream.iter().map(|s| s.0).collect();
        keys.sort_unstable();
        keys.dedup();
        let assignment: Vec<(u64, WeightFunction)> = keys.iter().map(|&k| (k, g.clone())).collect();
        let mut c = Circuit::flat(&assignment, OracleHash::new(seed, 0)).unwrap();
        let mut s = GSampler::new(g, OracleHash::new(seed, 0)).unwrap();
        let mut r1 = FreshSource::new(seed);
        let mut r2 = FreshSource::new(seed);
        for &(k, d) in &stream {
            c.update_key(k, d, &mut r1).unwrap();
            s.update(Update::new(k, d).unwrap(), &mut r2).unwrap();
        }
        prop_assert_eq!(c.best_output(), s.query());
    }
}
