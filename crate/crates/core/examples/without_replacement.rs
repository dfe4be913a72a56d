//! Ordered samples of k = 2 keys without replacement, from the bottom-k
//! sampler and from the k-Pareto frontier, against the exact law.

use std::collections::BTreeMap;

use levy_samplers::level::WeightFunction;
use levy_samplers::oracle::exact_wor_distribution;
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};
use levy_samplers::samplers::{KMinState, KParetoFrontier, Update};

fn main() {
    let g = WeightFunction::F1;
    let x = [(1u64, 1.0), (2, 2.0), (3, 3.0)];
    let k = 2;
    let reps = 40_000;
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut mismatches = 0;
    for r in 0..reps {
        let seed = derive_seed(7, r);
        let mut wor = KMinState::new(g.clone(), k, OracleHash::new(seed, 0)).unwrap();
        let mut kp = KParetoFrontier::new(k, OracleHash::new(seed, 0)).unwrap();
        let (mut r1, mut r2) = (FreshSource::new(seed), FreshSource::new(seed));
        for &(key, delta) in &x {
            let u = Update::new(key, delta).unwrap();
            wor.update(u, &mut r1).unwrap();
            kp.update(u, &mut r2).unwrap();
        }
        let order = wor.sample_ordered();
        let from_frontier: Vec<u64> = kp.query(&g, k).unwrap().iter().map(|e| e.0).collect();
        if order != from_frontier {
            mismatches += 1;
        }
        *counts.entry(order).or_default() += 1;
    }
    println!("tuple   empirical  exact");
    for (t, p) in exact_wor_distribution(&x, &g, k).unwrap() {
        let f = counts.get(&t).copied().unwrap_or(0) as f64 / reps as f64;
        println!("{t:?}  {f:>9.4}  {p:.4}");
    }
    println!("k-Pareto vs bottom-k mismatches: {mismatches}");
}
