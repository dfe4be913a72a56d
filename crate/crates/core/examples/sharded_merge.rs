//! Split a stream across shards, sketch each shard independently and merge.
//! With disjoint draw ranges the merge is bit-identical to one pass; with
//! record-attached randomness any split or order gives the same result.

use levy_samplers::level::WeightFunction;
use levy_samplers::randomness::{FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, KMinState, SketchFrame, Update};

fn main() {
    let seed = 99;
    let hash = OracleHash::new(seed, 0);
    let stream: Vec<Update> = (0..60u64).map(|i| Update::new(i % 9, 1.0 + (i % 4) as f64).unwrap()).collect();

    let mut whole = GSampler::new(WeightFunction::Log, hash).unwrap();
    let mut rng = FreshSource::new(seed);
    for u in &stream {
        whole.update(*u, &mut rng).unwrap();
    }

    // three shards owning consecutive counter ranges of one draw stream
    let mut merged = GSampler::new(WeightFunction::Log, hash).unwrap();
    let mut counter = 0;
    for chunk in stream.chunks(20) {
        let mut shard = GSampler::new(WeightFunction::Log, hash).unwrap();
        let mut rng = FreshSource::starting_at(seed, 0, counter);
        for u in chunk {
            shard.update(*u, &mut rng).unwrap();
        }
        counter = rng.counter();
        // ship the shard as bytes
        let bytes = SketchFrame::GSampler(shard).encode();
        let SketchFrame::GSampler(shard) = SketchFrame::decode(&bytes).unwrap() else {
            unreachable!()
        };
        merged.merge(&shard).unwrap();
    }
    println!("sequential {:?}\nmerged     {:?}", whole.query(), merged.query());

    // record-attached draws: shards can be any subsets, in any order
    let run = |updates: &[Update]| {
        let mut s = KMinState::new(WeightFunction::F1, 3, hash).unwrap();
        let mut seen = std::collections::BTreeMap::new();
        for u in updates {
            let n = seen.entry((u.key, u.delta.to_bits())).or_insert(0u64);
            s.update(*u, &mut FreshSource::for_record(seed, u.key, u.delta, *n)).unwrap();
            *n += 1;
        }
        s
    };
    let mut reversed = stream.clone();
    reversed.reverse();
    let (evens, odds): (Vec<Update>, Vec<Update>) = stream.iter().partition(|u| u.key % 2 == 0);
    let mut a = run(&evens);
    a.merge(&run(&odds)).unwrap();
    println!("wor forward  {:?}", run(&stream).sample_ordered());
    println!("wor reversed {:?}", run(&reversed).sample_ordered());
    println!("wor by parity, merged {:?}", a.sample_ordered());
}
