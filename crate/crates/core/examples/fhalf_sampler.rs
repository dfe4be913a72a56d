//! Sample a key with probability proportional to sqrt(x(v)) and compare the
//! empirical frequencies with the exact ones.

use std::collections::BTreeMap;

use levy_samplers::level::WeightFunction;
use levy_samplers::oracle::exact_distribution;
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, Update};

fn main() {
    let stream = [(1, 1.0), (2, 3.0), (3, 0.5), (2, 1.0), (4, 9.0)];
    let reps = 50_000;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut h_sum = 0.0;
    for r in 0..reps {
        let seed = derive_seed(0x5eed, r);
        let mut s = GSampler::new(WeightFunction::FHalf, OracleHash::new(seed, 0)).unwrap();
        let mut rng = FreshSource::new(seed);
        for &(key, delta) in &stream {
            s.update(Update::new(key, delta).unwrap(), &mut rng).unwrap();
        }
        let (key, h) = s.query().unwrap();
        *counts.entry(key).or_default() += 1;
        h_sum += h;
    }

    let mut x: BTreeMap<u64, f64> = BTreeMap::new();
    for &(k, d) in &stream {
        *x.entry(k).or_default() += d;
    }
    let x: Vec<(u64, f64)> = x.into_iter().collect();
    let exact = exact_distribution(&x, &WeightFunction::FHalf).unwrap();
    println!("key  mass  empirical  exact");
    for (&(k, m), p) in x.iter().zip(&exact.probs) {
        let f = counts.get(&k).copied().unwrap_or(0) as f64 / reps as f64;
        println!("{k:>3}  {m:>4}  {f:>9.4}  {p:.4}");
    }
    let total: f64 = x.iter().map(|e| e.1.sqrt()).sum();
    println!("mean h* = {:.4} (expected 1/G(x) = {:.4})", h_sum / reps as f64, 1.0 / total);
}
