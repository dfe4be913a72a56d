//! Level functions of the catalogue: a few values and an empirical check
//! that l(Y, U) with Y ~ Exp(lambda) has mean 1/G(lambda).

use levy_samplers::level::WeightFunction;
use levy_samplers::randomness::{fresh_exp, FreshSource};

fn main() {
    println!("{:<12} {:>10} {:>10} {:>10}", "G", "l(1,.5)", "mean", "1/G(2)");
    let lambda = 2.0;
    let n = 100_000;
    for g in WeightFunction::catalogue() {
        let mut rng = FreshSource::new(42);
        let mut sum = 0.0;
        for _ in 0..n {
            let y = fresh_exp(&mut rng);
            let u = rng.next_uniform();
            sum += g.level(y / lambda, u).unwrap();
        }
        println!(
            "{:<12} {:>10.5} {:>10.5} {:>10.5}",
            g.to_string(),
            g.level(1.0, 0.5).unwrap(),
            sum / n as f64,
            1.0 / g.weight(lambda)
        );
    }
    let g: WeightFunction = "scale:3:log".parse().unwrap();
    println!("{g} at z=1: G = {:.5}", g.weight(1.0));
}
