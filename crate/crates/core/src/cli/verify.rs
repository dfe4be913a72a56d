//! Verification suites behind `levy verify`. Sizes are moderate so a full
//! run finishes in seconds; each suite applies a Bonferroni correction over
//! its statistical tests.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::CliError;
use crate::circuits::{edge_weight, Circuit, CircuitBuilder, EdgeSampler, EdgeSamplerSpec, Scope};
use crate::level::WeightFunction;
use crate::numerics::{poisson_tail, regularized_gamma_q};
use crate::oracle::{
    bonferroni, chi_square_gof, exact_distribution, exact_edge_distribution, exact_wor_distribution,
    frontier_size_stats, harmonic, ks_test_exponential, ExactDistribution, GofReport, DEFAULT_ALPHA,
};
use crate::randomness::{derive_seed, fresh_exp, FreshSource, OracleHash};
use crate::samplers::{GSampler, KMinState, KParetoFrontier, ParetoFrontier, Update};

pub const SUITES: [&str; 5] = ["level", "samplers", "wor", "circuits", "frontier"];

const LEVEL_DRAWS: usize = 20_000;
const SAMPLER_REPS: u64 = 20_000;
const REPLAY_STREAMS: u64 = 300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// Per-test significance after correction.
    pub alpha: f64,
    pub tests: Vec<TestOutcome>,
    pub pass: bool,
}

fn gof(name: String, r: Result<GofReport, crate::oracle::OracleError>) -> TestOutcome {
    match r {
        Ok(r) => TestOutcome {
            name,
            statistic: r.statistic,
            threshold: r.threshold,
            pass: r.pass,
            samples: r.sample_count,
        },
        Err(e) => TestOutcome {
            name: format!("{name} ({e})"),
            statistic: f64::NAN,
            threshold: f64::NAN,
            pass: false,
            samples: 0,
        },
    }
}

/// `value <= limit`.
fn bound(name: String, value: f64, limit: f64, samples: u64) -> TestOutcome {
    TestOutcome {
        name,
        statistic: value,
        threshold: limit,
        pass: value <= limit,
        samples,
    }
}

fn counts_of(keys: impl IntoIterator<Item = u64>) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for k in keys {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

fn unit_stream(masses: &[f64]) -> Vec<Update> {
    masses
        .iter()
        .enumerate()
        .map(|(i, &m)| Update { key: i as u64 + 1, delta: m })
        .collect()
}

/// A random stream over at most 32 keys with at most 200 updates.
fn random_stream(seed: u128) -> Vec<Update> {
    let mut r = FreshSource::with_stream(seed, u64::MAX);
    let n = 1 + (r.next_uniform() * 32.0) as u64;
    let len = 1 + (r.next_uniform() * 200.0) as usize;
    (0..len)
        .map(|_| Update {
            key: (r.next_uniform() * n as f64) as u64,
            delta: 0.05 + 10.0 * r.next_uniform(),
        })
        .collect()
}

fn level_suite(seed: u128, fault: bool) -> SuiteReport {
    let lambdas = [0.25, 1.0, 4.0];
    let cat = WeightFunction::catalogue();
    let alpha = bonferroni(DEFAULT_ALPHA, cat.len() * lambdas.len());
    let mut tests = Vec::new();
    for (gi, g) in cat.iter().enumerate() {
        for (li, &lambda) in lambdas.iter().enumerate() {
            let mut rng = FreshSource::new(derive_seed(seed, (gi * lambdas.len() + li) as u64));
            let draws: Vec<f64> = (0..LEVEL_DRAWS)
                .map(|_| {
                    let y = fresh_exp(&mut rng);
                    let u = rng.next_uniform();
                    let v = g.level(y / lambda, u).expect("catalogue level");
                    if fault && *g == WeightFunction::FHalf {
                        v * 0.8
                    } else {
                        v
                    }
                })
                .collect();
            tests.push(gof(
                format!("level {g} lambda={lambda}: Exp(G(lambda))"),
                ks_test_exponential(&draws, g.weight(lambda), alpha),
            ));
        }
    }

    // forward residuals of the two solver-based level functions
    let mut rng = FreshSource::new(derive_seed(seed, 1000));
    let (mut soft, mut log) = (0.0f64, 0.0f64);
    let points = 2000;
    for _ in 0..points {
        let a = 0.01 + 10.0 * rng.next_uniform();
        let b = rng.next_uniform();
        let tau = 0.5 + 2.0 * rng.next_uniform();
        let w = crate::level::eval_softcap(tau, a, b).expect("softcap");
        let k = crate::level::softcap_index(tau, a) as u64;
        soft = soft.max((poisson_tail(k, w).expect("forward") - b).abs());
        let w = crate::level::eval_log(a, b).expect("log");
        log = log.max((regularized_gamma_q(w, a).expect("forward") - b).abs());
    }
    tests.push(bound("softcap forward residual".into(), soft, 1e-9, points));
    tests.push(bound("log forward residual".into(), log, 1e-9, points));
    finish("level", alpha, tests)
}

fn samplers_suite(seed: u128) -> SuiteReport {
    let streams: [&[f64]; 2] = [&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 10.0]];
    let cat = WeightFunction::catalogue();
    let alpha = bonferroni(DEFAULT_ALPHA, 2 * cat.len() * streams.len());
    let mut tests = Vec::new();
    let mut idx = 0u64;
    for masses in streams {
        let stream = unit_stream(masses);
        let x: Vec<(u64, f64)> = stream.iter().map(|u| (u.key, u.delta)).collect();
        for g in &cat {
            idx += 1;
            let base = derive_seed(seed, idx);
            let runs: Vec<(u64, f64)> = (0..SAMPLER_REPS)
                .map(|r| {
                    let s = derive_seed(base, r);
                    let mut gs = GSampler::new(g.clone(), OracleHash::new(s, 0)).expect("catalogue");
                    let mut rng = FreshSource::new(s);
                    for u in &stream {
                        gs.update(*u, &mut rng).expect("valid update");
                    }
                    gs.query().expect("nonempty stream")
                })
                .collect();
            let exact = exact_distribution(&x, g).expect("valid masses");
            let label = format!("{g} x={masses:?}");
            tests.push(gof(
                format!("gsampler {label}: P(v) = G(x_v)/G(x)"),
                chi_square_gof(&counts_of(runs.iter().map(|r| r.0)), &exact, alpha),
            ));
            let rate: f64 = x.iter().map(|e| g.weight(e.1)).sum();
            let hs: Vec<f64> = runs.iter().map(|r| r.1).collect();
            tests.push(gof(
                format!("gsampler {label}: h ~ Exp(G(x))"),
                ks_test_exponential(&hs, rate, alpha),
            ));
        }
    }

    let mut mismatches = 0u64;
    let mut merge_mismatches = 0u64;
    for t in 0..REPLAY_STREAMS {
        let s = derive_seed(seed, 10_000 + t);
        let stream = random_stream(s);
        let mut frontier = ParetoFrontier::new(OracleHash::new(s, 0));
        let mut rng = FreshSource::new(s);
        for u in &stream {
            frontier.update(*u, &mut rng).expect("valid update");
        }
        let cut = stream.len() / 2;
        for g in &cat {
            let mut whole = GSampler::new(g.clone(), OracleHash::new(s, 0)).expect("catalogue");
            let mut rng = FreshSource::new(s);
            for u in &stream {
                whole.update(*u, &mut rng).expect("valid update");
            }
            if frontier.query(g).expect("single term") != whole.query() {
                mismatches += 1;
            }
            let mut left = GSampler::new(g.clone(), OracleHash::new(s, 0)).expect("catalogue");
            let mut right = left.clone();
            let mut rng = FreshSource::new(s);
            for u in &stream[..cut] {
                left.update(*u, &mut rng).expect("valid update");
            }
            let mut rng = FreshSource::starting_at(s, 0, rng.counter());
            for u in &stream[cut..] {
                right.update(*u, &mut rng).expect("valid update");
            }
            left.merge(&right).expect("compatible");
            if left != whole {
                merge_mismatches += 1;
            }
        }
    }
    let n = REPLAY_STREAMS * cat.len() as u64;
    tests.push(bound("pareto query vs gsampler (mismatches)".into(), mismatches as f64, 0.0, n));
    tests.push(bound("sharded merge vs sequential (mismatches)".into(), merge_mismatches as f64, 0.0, n));
    finish("samplers", alpha, tests)
}

fn wor_suite(seed: u128) -> SuiteReport {
    let gs = [WeightFunction::F1, WeightFunction::FHalf];
    let alpha = bonferroni(DEFAULT_ALPHA, gs.len());
    let stream = unit_stream(&[1.0, 2.0, 3.0]);
    let x: Vec<(u64, f64)> = stream.iter().map(|u| (u.key, u.delta)).collect();
    let k = 2;
    let mut tests = Vec::new();
    let mut mismatches = 0u64;
    for (gi, g) in gs.iter().enumerate() {
        let base = derive_seed(seed, gi as u64 + 1);
        let exact = exact_wor_distribution(&x, g, k).expect("small support");
        let cells: BTreeMap<Vec<u64>, u64> = exact.keys().cloned().zip(0..).collect();
        let mut samples = Vec::new();
        for r in 0..SAMPLER_REPS {
            let s = derive_seed(base, r);
            let mut wor = KMinState::new(g.clone(), k, OracleHash::new(s, 0)).expect("valid k");
            let mut kp = KParetoFrontier::new(k, OracleHash::new(s, 0)).expect("valid k");
            let mut r1 = FreshSource::new(s);
            let mut r2 = FreshSource::new(s);
            for u in &stream {
                wor.update(*u, &mut r1).expect("valid update");
                kp.update(*u, &mut r2).expect("valid update");
            }
            let order = wor.sample_ordered();
            let keys: Vec<u64> = kp.query(g, k).expect("j <= k").iter().map(|e| e.0).collect();
            if keys != order {
                mismatches += 1;
            }
            samples.push(cells.get(&order).copied().unwrap_or(u64::MAX));
        }
        let dist = ExactDistribution {
            support: (0..exact.len() as u64).collect(),
            probs: exact.values().copied().collect(),
        };
        tests.push(gof(
            format!("wor {g} k={k}: ordered-sample law"),
            chi_square_gof(&counts_of(samples), &dist, alpha),
        ));
    }
    tests.push(bound(
        "kpareto query vs wor sample (mismatches)".into(),
        mismatches as f64,
        0.0,
        SAMPLER_REPS * gs.len() as u64,
    ));
    finish("wor", alpha, tests)
}

/// Directed pairs on two vertices: pair `u -> v` has weight
/// `sqrt(x_u) + x_v`, built from one FHalf gate on `u` and one F1 gate on `v`.
pub(crate) fn directed_pair_circuit(hash: OracleHash) -> Circuit {
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
    b.build(hash).expect("valid circuit")
}

fn circuits_suite(seed: u128) -> SuiteReport {
    let alpha = bonferroni(DEFAULT_ALPHA, 4);
    let mut tests = Vec::new();

    // heterogeneous flat circuit: F1 on key 1, F0 on key 2
    let base = derive_seed(seed, 1);
    let keys = (0..SAMPLER_REPS).map(|r| {
        let s = derive_seed(base, r);
        let assignment = [(1, WeightFunction::F1), (2, WeightFunction::F0)];
        let mut c = Circuit::flat(&assignment, OracleHash::new(s, 0)).expect("valid");
        let mut rng = FreshSource::new(s);
        c.update_key(1, 3.0, &mut rng).expect("valid");
        c.update_key(2, 5.0, &mut rng).expect("valid");
        c.best_output().expect("nonempty").0
    });
    let exact = ExactDistribution {
        support: vec![1, 2],
        probs: vec![0.75, 0.25],
    };
    tests.push(gof(
        "flat F1|F0 x=(3,5): P(1) = 3/4".into(),
        chi_square_gof(&counts_of(keys), &exact, alpha),
    ));

    // triangle edge sampler
    let spec = EdgeSamplerSpec::from_edges(vec![vec![1, 2], vec![2, 3], vec![1, 3]]).expect("triangle");
    let mass: BTreeMap<u64, f64> = [(1, 1.0), (2, 2.0), (3, 3.0)].into_iter().collect();
    let base = derive_seed(seed, 2);
    let runs: Vec<(usize, f64)> = (0..SAMPLER_REPS)
        .map(|r| {
            let s = derive_seed(base, r);
            let mut e = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0)).expect("valid");
            let mut rng = FreshSource::new(s);
            for (&v, &m) in &mass {
                e.update(v, m, &mut rng).expect("valid");
            }
            e.sample_index().expect("nonempty")
        })
        .collect();
    let exact = exact_edge_distribution(spec.edges(), &mass, edge_weight).expect("positive");
    tests.push(gof(
        "edge sampler triangle x=(1,2,3): edge law".into(),
        chi_square_gof(&counts_of(runs.iter().map(|r| r.0 as u64)), &exact, alpha),
    ));
    let rate: f64 = spec
        .edges()
        .iter()
        .map(|e| edge_weight(&e.iter().map(|v| mass[v]).collect::<Vec<_>>()))
        .sum();
    let hs: Vec<f64> = runs.iter().map(|r| r.1).collect();
    tests.push(gof(
        "edge sampler triangle: h ~ Exp(sum of edge weights)".into(),
        ks_test_exponential(&hs, rate, alpha),
    ));

    // directed pairs, x = (1, 4): weights sqrt(1)+4 and sqrt(4)+1
    let base = derive_seed(seed, 3);
    let keys = (0..SAMPLER_REPS).map(|r| {
        let s = derive_seed(base, r);
        let mut c = directed_pair_circuit(OracleHash::new(s, 0));
        let mut rng = FreshSource::new(s);
        c.update_key(1, 1.0, &mut rng).expect("valid");
        c.update_key(2, 4.0, &mut rng).expect("valid");
        c.best_output().expect("nonempty").0
    });
    let exact = ExactDistribution {
        support: vec![0, 1],
        probs: vec![5.0 / 8.0, 3.0 / 8.0],
    };
    tests.push(gof(
        "directed pairs x=(1,4): P(1->2) = 5/8".into(),
        chi_square_gof(&counts_of(keys), &exact, alpha),
    ));

    // flat circuit replays the G-sampler draw for draw
    let mut mismatches = 0u64;
    let cat = WeightFunction::catalogue();
    for t in 0..REPLAY_STREAMS {
        let s = derive_seed(seed, 10_000 + t);
        let stream = random_stream(s);
        let mut keys: Vec<u64> = stream.iter().map(|u| u.key).collect();
        keys.sort_unstable();
        keys.dedup();
        for g in &cat {
            let assignment: Vec<(u64, WeightFunction)> = keys.iter().map(|&k| (k, g.clone())).collect();
            let mut c = Circuit::flat(&assignment, OracleHash::new(s, 0)).expect("valid");
            let mut gs = GSampler::new(g.clone(), OracleHash::new(s, 0)).expect("catalogue");
            let mut r1 = FreshSource::new(s);
            let mut r2 = FreshSource::new(s);
            for u in &stream {
                c.update_key(u.key, u.delta, &mut r1).expect("valid");
                gs.update(*u, &mut r2).expect("valid");
            }
            if c.best_output() != gs.query() {
                mismatches += 1;
            }
        }
    }
    tests.push(bound(
        "flat circuit vs gsampler (mismatches)".into(),
        mismatches as f64,
        0.0,
        REPLAY_STREAMS * cat.len() as u64,
    ));
    finish("circuits", alpha, tests)
}

fn frontier_suite(seed: u128) -> SuiteReport {
    let mut tests = Vec::new();
    for (i, &(n, trials)) in [(4u64, 20_000u64), (64, 4_000), (1024, 400)].iter().enumerate() {
        let st = frontier_size_stats(n, trials, derive_seed(seed, i as u64));
        let h = harmonic(n);
        tests.push(bound(
            format!("frontier n={n}: |mean - H_n| in standard errors"),
            (st.mean - h).abs() / st.std_error.max(f64::MIN_POSITIVE),
            3.0,
            trials,
        ));
        tests.push(bound(
            format!("frontier n={n}: max size vs 4(ln n + 1)"),
            st.max as f64,
            4.0 * ((n as f64).ln() + 1.0),
            trials,
        ));
    }
    finish("frontier", DEFAULT_ALPHA, tests)
}

fn finish(suite: &str, alpha: f64, tests: Vec<TestOutcome>) -> SuiteReport {
    SuiteReport {
        suite: suite.into(),
        alpha,
        pass: tests.iter().all(|t| t.pass),
        tests,
    }
}

/// Runs one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u128, inject_fault: bool) -> Option<SuiteReport> {
    let s = derive_seed(seed, SUITES.iter().position(|&n| n == name)? as u64);
    Some(match name {
        "level" => level_suite(s, inject_fault),
        "samplers" => samplers_suite(s),
        "wor" => wor_suite(s),
        "circuits" => circuits_suite(s),
        _ => frontier_suite(s),
    })
}

pub(crate) fn cmd_verify(suite: &str, seed: u128, inject_fault: bool) -> Result<Value, CliError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(CliError::Usage(format!(
                "unknown suite `{s}`; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    let reports: Vec<SuiteReport> = names
        .iter()
        .map(|n| run_suite(n, seed, inject_fault).expect("known suite"))
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    Ok(json!({
        "command": "verify",
        "seed": format!("{seed:#034x}"),
        "suite": suite,
        "suites": reports,
        "pass": pass,
    }))
}
