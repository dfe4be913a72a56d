//! A flat circuit with a different weight function per key: F1 on key 1
//! and F0 on key 2. With x = (3, 5) key 1 wins with probability 3/4.
//! Also loads the same circuit from the text format.

use levy_samplers::circuits::{parse_circuit_spec, BuiltCircuit, Circuit};
use levy_samplers::level::WeightFunction;
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};

const SPEC: &str = "\
# key 1 through F1, key 2 through F0
gate 1 input key=1
gate 2 input key=2
gate 3 g:f1
gate 4 g:f0
gate 9 output
wire 1 3
wire 2 4
wire 3 9
wire 4 9
";

fn main() {
    let reps = 40_000;
    let mut wins = [0u64; 2];
    for r in 0..reps {
        let seed = derive_seed(3, r);
        let assignment = [(1, WeightFunction::F1), (2, WeightFunction::F0)];
        let mut c = Circuit::flat(&assignment, OracleHash::new(seed, 0)).unwrap();
        let mut rng = FreshSource::new(seed);
        c.update_key(1, 3.0, &mut rng).unwrap();
        c.update_key(2, 5.0, &mut rng).unwrap();
        wins[c.best_output().unwrap().0 as usize - 1] += 1;
    }
    println!("P(key 1) = {:.4} (exact 0.75)", wins[0] as f64 / reps as f64);

    let BuiltCircuit::Gates { mut circuit, .. } = parse_circuit_spec(SPEC)
        .unwrap()
        .build(OracleHash::new(1, 0))
        .unwrap()
    else {
        unreachable!("gate file");
    };
    let mut rng = FreshSource::new(1);
    circuit.update_key(1, 3.0, &mut rng).unwrap();
    circuit.update_key(2, 5.0, &mut rng).unwrap();
    println!("circuit from text: {} gates, sample {:?}", circuit.gates().len(), circuit.best_output());
}
