//! One Pareto frontier answers a G-sampling query for every catalogue G,
//! and each answer is the one a dedicated G-sampler would have given.

use levy_samplers::level::WeightFunction;
use levy_samplers::randomness::{FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, ParetoFrontier, Update};

fn main() {
    let seed = 0xfeed_beef;
    let stream: Vec<Update> = (0..200u64)
        .map(|i| Update::new((i * 7919) % 23, 1.0 + (i % 5) as f64).unwrap())
        .collect();

    let mut frontier = ParetoFrontier::new(OracleHash::new(seed, 0));
    let mut rng = FreshSource::new(seed);
    for u in &stream {
        frontier.update(*u, &mut rng).unwrap();
    }
    println!("frontier holds {} tuples after {} updates", frontier.len(), stream.len());

    for g in WeightFunction::catalogue() {
        let mut alone = GSampler::new(g.clone(), OracleHash::new(seed, 0)).unwrap();
        let mut rng = FreshSource::new(seed);
        for u in &stream {
            alone.update(*u, &mut rng).unwrap();
        }
        let q = frontier.query(&g).unwrap();
        let (key, h) = q.unwrap();
        println!("{:<12} key {key:>2}  h {h:.6}  same as G-sampler: {}", g.to_string(), q == alone.query());
    }
}
