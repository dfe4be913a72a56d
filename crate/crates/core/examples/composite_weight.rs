//! A weight built from a killing term, a drift and soft-cap atoms:
//! G(z) = c 1{z>0} + g0 z + sum w (1 - exp(-r z)).

use std::collections::BTreeMap;

use levy_samplers::level::WeightFunction;
use levy_samplers::oracle::exact_distribution;
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, Update};

fn main() {
    let g: WeightFunction = "sum:c=1,g0=0.5,atoms=2x1;1x3".parse().unwrap();
    println!("G = {g}, {} level terms", g.terms().unwrap().len());
    let x = [(1u64, 0.2), (2, 1.0), (3, 6.0)];
    let reps = 40_000;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for r in 0..reps {
        let seed = derive_seed(21, r);
        let mut s = GSampler::new(g.clone(), OracleHash::new(seed, 0)).unwrap();
        let mut rng = FreshSource::new(seed);
        for &(k, d) in &x {
            s.update(Update::new(k, d).unwrap(), &mut rng).unwrap();
        }
        *counts.entry(s.query().unwrap().0).or_default() += 1;
    }
    let exact = exact_distribution(&x, &g).unwrap();
    for (&(k, m), p) in x.iter().zip(&exact.probs) {
        let f = counts.get(&k).copied().unwrap_or(0) as f64 / reps as f64;
        println!("key {k} x={m:<4} G={:.4}  empirical {f:.4}  exact {p:.4}", g.weight(m));
    }
}
