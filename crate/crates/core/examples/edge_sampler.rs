//! Sample an edge of a triangle with probability proportional to
//! ln(1 + sqrt(x_u) + sqrt(x_v)) + 2 (1 - exp(-(x_u + x_v))).

use std::collections::BTreeMap;

use levy_samplers::circuits::{edge_weight, EdgeSampler, EdgeSamplerSpec};
use levy_samplers::oracle::exact_edge_distribution;
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};

fn main() {
    let spec = EdgeSamplerSpec::from_edges(vec![vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
    let updates = [(1u64, 0.5), (2, 2.0), (3, 1.0), (3, 2.0), (1, 0.5)];
    let reps = 40_000;
    let mut counts = vec![0u64; spec.edges().len()];
    for r in 0..reps {
        let seed = derive_seed(11, r);
        let mut e = EdgeSampler::new(spec.clone(), OracleHash::new(seed, 0)).unwrap();
        let mut rng = FreshSource::new(seed);
        for &(v, d) in &updates {
            e.update(v, d, &mut rng).unwrap();
        }
        counts[e.sample_index().unwrap().0] += 1;
    }
    let mut mass = BTreeMap::new();
    for &(v, d) in &updates {
        *mass.entry(v).or_insert(0.0) += d;
    }
    let exact = exact_edge_distribution(spec.edges(), &mass, edge_weight).unwrap();
    let gates = EdgeSampler::new(spec.clone(), OracleHash::new(0, 0)).unwrap().circuit().gates().len();
    println!("gates in circuit: {gates}");
    println!("edge     empirical  exact");
    for (i, e) in spec.edges().iter().enumerate() {
        println!("{e:?}  {:>9.4}  {:.4}", counts[i] as f64 / reps as f64, exact.probs[i]);
    }
}
