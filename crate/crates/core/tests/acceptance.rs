//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Bare arguments (`C1`, `C7`, ...) restrict the run.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use levy_samplers::circuits::{edge_weight, Circuit, EdgeSampler, EdgeSamplerSpec};
use levy_samplers::level::{eval_fhalf, eval_log, eval_softcap, WeightFunction};
use levy_samplers::numerics::{erf, poisson_tail, regularized_gamma_q};
use levy_samplers::oracle::{
    chi_square_gof, exact_distribution, exact_edge_distribution, exact_wor_distribution, ks_test_exponential,
    ExactDistribution,
};
use levy_samplers::randomness::{derive_seed, FreshSource, OracleHash};
use levy_samplers::samplers::{GSampler, KMinState, KParetoFrontier, ParetoFrontier, SketchFrame, Update};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const ALPHA: f64 = 0.01;
const BASE: u128 = 0x5eed_0f_acce_97a4_ce;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rng_for(criterion: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion << 48 ^ index)
}

fn counts(it: impl IntoIterator<Item = u64>) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for k in it {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// `key = position + 1`.
fn stream_of(masses: &[f64]) -> Vec<Update> {
    masses
        .iter()
        .enumerate()
        .map(|(i, &m)| Update::new(i as u64 + 1, m).unwrap())
        .collect()
}

fn random_stream(rng: &mut ChaCha8Rng, max_keys: u64, max_len: usize) -> Vec<Update> {
    let n = rng.random_range(1..=max_keys);
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| Update::new(rng.random_range(0..n), 10f64.powf(rng.random_range(-2.0..2.0))).unwrap())
        .collect()
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

fn worst_gof(name: &str, stat: f64, thr: f64, worst: &mut (f64, String)) {
    if stat / thr > worst.0 {
        *worst = (stat / thr, format!("{name} {stat:.4} vs {thr:.4}"));
    }
}

// C1 ---------------------------------------------------------------------

const LAMBDAS: [f64; 3] = [0.25, 1.0, 4.0];
const LEVEL_DRAWS: usize = 100_000;
const CALIBRATION_REPS: u64 = 100;

/// One run of the full 21-test suite; `(suite passed, worst stat/threshold, label)`.
fn level_suite(rep: u64) -> (bool, f64, String) {
    let cat = WeightFunction::catalogue();
    let alpha = ALPHA / (cat.len() * LAMBDAS.len()) as f64;
    let mut pass = true;
    let mut worst = (0.0, String::new());
    for (gi, g) in cat.iter().enumerate() {
        let term = g.single_term().unwrap();
        for (li, &lambda) in LAMBDAS.iter().enumerate() {
            let mut rng = rng_for(1, rep << 8 | (gi * 3 + li) as u64);
            let draws: Vec<f64> = (0..LEVEL_DRAWS)
                .map(|_| {
                    let y = -(-rng.random::<f64>()).ln_1p() / lambda;
                    let u = rng.random::<f64>().max(f64::MIN_POSITIVE);
                    term.eval(y, u).unwrap()
                })
                .collect();
            let r = ks_test_exponential(&draws, g.weight(lambda), alpha).unwrap();
            pass &= r.pass;
            worst_gof(&format!("{g} lambda={lambda}"), r.statistic, r.threshold, &mut worst);
        }
    }
    (pass, worst.0, worst.1)
}

fn c1() -> Verdict {
    let start = Instant::now();
    let runs: Vec<(bool, f64, String)> = (0..CALIBRATION_REPS).into_par_iter().map(level_suite).collect();
    let elapsed = start.elapsed();
    let (first, ratio, label) = &runs[0];
    let passes = runs.iter().filter(|r| r.0).count();
    verdict(
        *first && passes >= 95 && elapsed <= Duration::from_secs(120),
        format!(
            "21 KS tests x {LEVEL_DRAWS} draws, worst {label} ({ratio:.3} of threshold); \
             calibration {passes}/{CALIBRATION_REPS} suite passes; {:.0}s",
            elapsed.as_secs_f64()
        ),
    )
}

// C2, C3 -----------------------------------------------------------------

const SAMPLER_RUNS: u64 = 100_000;

fn c2_c3() -> (Verdict, Verdict) {
    let streams = [vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 1.0, 10.0]];
    let cat = WeightFunction::catalogue();
    let m = (cat.len() * streams.len()) as f64;
    let (mut pass2, mut pass3) = (true, true);
    let (mut worst2, mut worst3) = ((0.0, String::new()), (0.0, String::new()));
    let mut slowest = Duration::ZERO;
    for (gi, g) in cat.iter().enumerate() {
        let start = Instant::now();
        for (si, masses) in streams.iter().enumerate() {
            let stream = stream_of(masses);
            let x: Vec<(u64, f64)> = stream.iter().map(|u| (u.key, u.delta)).collect();
            let base = derive_seed(BASE, (2 << 16) + (gi * 2 + si) as u64);
            let out: Vec<(u64, f64)> = (0..SAMPLER_RUNS)
                .into_par_iter()
                .map(|r| {
                    let s = derive_seed(base, r);
                    let mut smp = GSampler::new(g.clone(), OracleHash::new(s, 0)).unwrap();
                    let mut rng = FreshSource::new(s);
                    for u in &stream {
                        smp.update(*u, &mut rng).unwrap();
                    }
                    smp.query().unwrap()
                })
                .collect();
            let exact = exact_distribution(&x, g).unwrap();
            let chi = chi_square_gof(&counts(out.iter().map(|o| o.0)), &exact, ALPHA / m).unwrap();
            pass2 &= chi.pass;
            worst_gof(&format!("{g} x={masses:?}"), chi.statistic, chi.threshold, &mut worst2);
            let total: f64 = masses.iter().map(|&z| g.weight(z)).sum();
            let hs: Vec<f64> = out.iter().map(|o| o.1).collect();
            let ks = ks_test_exponential(&hs, total, ALPHA / m).unwrap();
            pass3 &= ks.pass;
            worst_gof(&format!("{g} x={masses:?}"), ks.statistic, ks.threshold, &mut worst3);
        }
        slowest = slowest.max(start.elapsed());
    }
    (
        verdict(
            pass2 && slowest <= Duration::from_secs(300),
            format!(
                "14 chi-square tests x {SAMPLER_RUNS} runs, worst {} ({:.3} of threshold); slowest G {:.1}s",
                worst2.1,
                worst2.0,
                slowest.as_secs_f64()
            ),
        ),
        verdict(
            pass3,
            format!("14 KS tests of h, worst {} ({:.3} of threshold)", worst3.1, worst3.0),
        ),
    )
}

// C4 ---------------------------------------------------------------------

fn c4() -> Verdict {
    let cat = WeightFunction::catalogue();
    let n_streams = 10_000u64;
    let mismatches: usize = (0..n_streams)
        .into_par_iter()
        .map(|i| {
            let stream = random_stream(&mut rng_for(4, i), 32, 200);
            let s = derive_seed(BASE, (4 << 32) + i);
            let mut f = ParetoFrontier::new(OracleHash::new(s, 0));
            let mut rng = FreshSource::new(s);
            for u in &stream {
                f.update(*u, &mut rng).unwrap();
            }
            cat.iter()
                .filter(|g| {
                    let mut smp = GSampler::new((*g).clone(), OracleHash::new(s, 0)).unwrap();
                    let mut rng = FreshSource::new(s);
                    for u in &stream {
                        smp.update(*u, &mut rng).unwrap();
                    }
                    f.query(g).unwrap().map(|q| q.0) != smp.query().map(|q| q.0)
                })
                .count()
        })
        .sum();
    verdict(
        mismatches == 0,
        format!("{mismatches} mismatches over {n_streams} streams x {} G", cat.len()),
    )
}

// C5 ---------------------------------------------------------------------

fn c5() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, trials) in [(4u64, 100_000u64), (64, 10_000), (1024, 1_000)] {
        let sizes: Vec<usize> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = derive_seed(BASE, (5 << 40) + (n << 20) + t);
                let mut f = ParetoFrontier::new(OracleHash::new(s, 0));
                let mut rng = FreshSource::new(s);
                for key in 0..n {
                    f.update(Update::new(key, 1.0).unwrap(), &mut rng).unwrap();
                }
                f.len()
            })
            .collect();
        let m = trials as f64;
        let mean = sizes.iter().sum::<usize>() as f64 / m;
        let var = sizes.iter().map(|&z| (z as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        let h = harmonic(n);
        let max = *sizes.iter().max().unwrap();
        let cap = 4.0 * ((n as f64).ln() + 1.0);
        let ok = (mean - h).abs() <= 3.0 * se && (max as f64) <= cap;
        pass &= ok;
        parts.push(format!(
            "n={n}: mean {mean:.4} vs H_n {h:.4} ({:+.2} SE), max {max} <= {cap:.1}",
            (mean - h) / se
        ));
    }
    verdict(pass, parts.join("; "))
}

// C6 ---------------------------------------------------------------------

fn c6() -> Verdict {
    let stream = stream_of(&[1.0, 2.0, 3.0]);
    let x: Vec<(u64, f64)> = stream.iter().map(|u| (u.key, u.delta)).collect();
    let k = 2;
    let gs = [WeightFunction::F1, WeightFunction::FHalf];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut mismatches = 0usize;
    for (gi, g) in gs.iter().enumerate() {
        let base = derive_seed(BASE, (6 << 16) + gi as u64);
        let out: Vec<(Vec<u64>, bool)> = (0..SAMPLER_RUNS)
            .into_par_iter()
            .map(|r| {
                let s = derive_seed(base, r);
                let mut wor = KMinState::new(g.clone(), k, OracleHash::new(s, 0)).unwrap();
                let mut kp = KParetoFrontier::new(k, OracleHash::new(s, 0)).unwrap();
                let (mut r1, mut r2) = (FreshSource::new(s), FreshSource::new(s));
                for u in &stream {
                    wor.update(*u, &mut r1).unwrap();
                    kp.update(*u, &mut r2).unwrap();
                }
                let order = wor.sample_ordered();
                let q: Vec<u64> = kp.query(g, k).unwrap().iter().map(|e| e.0).collect();
                let same = q == order;
                (order, same)
            })
            .collect();
        mismatches += out.iter().filter(|o| !o.1).count();
        let exact = exact_wor_distribution(&x, g, k).unwrap();
        let cell: BTreeMap<&Vec<u64>, u64> = exact.keys().zip(0..).collect();
        let dist = ExactDistribution {
            support: (0..exact.len() as u64).collect(),
            probs: exact.values().copied().collect(),
        };
        let c = counts(out.iter().map(|o| cell.get(&o.0).copied().unwrap_or(u64::MAX)));
        let chi = chi_square_gof(&c, &dist, ALPHA / gs.len() as f64).unwrap();
        pass &= chi.pass;
        parts.push(format!("{g}: chi2 {:.3} vs {:.3}", chi.statistic, chi.threshold));
    }

    // also on random streams, random k and catalogue G
    let cat = WeightFunction::catalogue();
    let extra: usize = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let mut trng = rng_for(6, i);
            let stream = random_stream(&mut trng, 16, 80);
            let k = trng.random_range(1..=4);
            let g = &cat[trng.random_range(0..cat.len())];
            let s = derive_seed(BASE, (6 << 32) + i);
            let mut wor = KMinState::new(g.clone(), k, OracleHash::new(s, 0)).unwrap();
            let mut kp = KParetoFrontier::new(k, OracleHash::new(s, 0)).unwrap();
            let (mut r1, mut r2) = (FreshSource::new(s), FreshSource::new(s));
            for u in &stream {
                wor.update(*u, &mut r1).unwrap();
                kp.update(*u, &mut r2).unwrap();
            }
            let want = wor.sample_ordered();
            let got: Vec<u64> = kp.query(g, want.len()).unwrap().iter().map(|e| e.0).collect();
            usize::from(got != want)
        })
        .sum();
    mismatches += extra;
    pass &= mismatches == 0;
    parts.push(format!("{mismatches} kpareto/wor mismatches over {} runs", 2 * SAMPLER_RUNS + 10_000));
    verdict(pass, parts.join("; "))
}

// C7 ---------------------------------------------------------------------

fn c7() -> Verdict {
    let start = Instant::now();
    let edges = vec![vec![1, 2], vec![2, 3], vec![1, 3]];
    let spec = EdgeSamplerSpec::from_edges(edges.clone()).unwrap();
    let x = [(1u64, 1.0), (2, 2.0), (3, 3.0)];
    let base = derive_seed(BASE, 7 << 16);
    let picks: Vec<u64> = (0..SAMPLER_RUNS)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(base, r);
            let mut e = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0)).unwrap();
            let mut rng = FreshSource::new(s);
            for &(v, d) in &x {
                e.update(v, d, &mut rng).unwrap();
            }
            e.sample_index().unwrap().0 as u64
        })
        .collect();
    let mass: BTreeMap<u64, f64> = x.into_iter().collect();
    let exact = exact_edge_distribution(&edges, &mass, edge_weight).unwrap();
    let chi = chi_square_gof(&counts(picks), &exact, ALPHA).unwrap();
    let elapsed = start.elapsed();
    verdict(
        chi.pass && elapsed <= Duration::from_secs(600),
        format!(
            "chi2 {:.3} vs {:.3} over {SAMPLER_RUNS} runs, P = {:.4?}; {:.1}s",
            chi.statistic,
            chi.threshold,
            exact.probs,
            elapsed.as_secs_f64()
        ),
    )
}

// C8 ---------------------------------------------------------------------

fn c8() -> Verdict {
    let mut rng = rng_for(8, 0);
    let n = 10_000;
    let (mut soft, mut log, mut half) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let a = 10f64.powf(rng.random_range(-3.0..3.0));
        let b = rng.random_range(1e-12..1.0 - 1e-12);
        for tau in [0.5, 1.0, 2.0] {
            let w = eval_softcap(tau, a, b).unwrap();
            let k = (a / tau).ceil().max(1.0) as u64;
            soft = soft.max((poisson_tail(k, w).unwrap() - b).abs());
        }
        let w = eval_log(a, b).unwrap();
        log = log.max((regularized_gamma_q(w, a).unwrap() - b).abs());
        let w = eval_fhalf(a, b).unwrap();
        half = half.max((erf(w / (2.0 * a).sqrt()) - b).abs());
    }
    verdict(
        soft <= 1e-9 && log <= 1e-9 && half <= 1e-11,
        format!("{n} inputs: softcap max residual {soft:.2e}, log {log:.2e}, fhalf erf round trip {half:.2e}"),
    )
}

// C9 ---------------------------------------------------------------------

#[derive(Clone)]
enum Sketch {
    G(GSampler),
    Pareto(ParetoFrontier),
    Wor(KMinState),
    KPareto(KParetoFrontier),
    Circuit(Circuit),
    Edge(EdgeSampler),
}

impl Sketch {
    fn update(&mut self, u: Update, rng: &mut FreshSource) {
        match self {
            Sketch::G(s) => s.update(u, rng).unwrap(),
            Sketch::Pareto(s) => s.update(u, rng).unwrap(),
            Sketch::Wor(s) => s.update(u, rng).unwrap(),
            Sketch::KPareto(s) => s.update(u, rng).unwrap(),
            Sketch::Circuit(s) => s.update_key(u.key, u.delta, rng).unwrap(),
            Sketch::Edge(s) => s.update(u.key, u.delta, rng).unwrap(),
        }
    }

    fn frame(&self) -> Option<SketchFrame> {
        Some(match self {
            Sketch::G(s) => SketchFrame::GSampler(s.clone()),
            Sketch::Pareto(s) => SketchFrame::Pareto(s.clone()),
            Sketch::Wor(s) => SketchFrame::Wor(s.clone()),
            Sketch::KPareto(s) => SketchFrame::KPareto(s.clone()),
            _ => return None,
        })
    }

    /// Shards cross the wire as bytes where a binary format exists.
    fn ship(self) -> Sketch {
        match self.frame() {
            Some(f) => match SketchFrame::decode(&f.encode()).unwrap() {
                SketchFrame::GSampler(s) => Sketch::G(s),
                SketchFrame::Pareto(s) => Sketch::Pareto(s),
                SketchFrame::Wor(s) => Sketch::Wor(s),
                SketchFrame::KPareto(s) => Sketch::KPareto(s),
            },
            None => self,
        }
    }

    fn merge(&mut self, other: &Sketch) {
        match (self, other) {
            (Sketch::G(a), Sketch::G(b)) => a.merge(b).unwrap(),
            (Sketch::Pareto(a), Sketch::Pareto(b)) => a.merge(b).unwrap(),
            (Sketch::Wor(a), Sketch::Wor(b)) => a.merge(b).unwrap(),
            (Sketch::KPareto(a), Sketch::KPareto(b)) => a.merge(b).unwrap(),
            (Sketch::Circuit(a), Sketch::Circuit(b)) => a.merge(b).unwrap(),
            (Sketch::Edge(a), Sketch::Edge(b)) => a.merge(b).unwrap(),
            _ => panic!("kind mismatch"),
        }
    }

    fn identical(&self, other: &Sketch) -> bool {
        match (self.frame(), other.frame()) {
            (Some(a), Some(b)) => a.encode() == b.encode(),
            _ => match (self, other) {
                (Sketch::Circuit(a), Sketch::Circuit(b)) => a == b && bits(a.best_output()) == bits(b.best_output()),
                (Sketch::Edge(a), Sketch::Edge(b)) => {
                    a == b && bits(a.sample_index().map(|(i, h)| (i as u64, h))) == bits(b.sample_index().map(|(i, h)| (i as u64, h)))
                }
                _ => false,
            },
        }
    }
}

fn bits(o: Option<(u64, f64)>) -> Option<(u64, u64)> {
    o.map(|(k, h)| (k, h.to_bits()))
}

fn random_g(rng: &mut ChaCha8Rng) -> WeightFunction {
    let mut all = WeightFunction::catalogue();
    all.push("scale:3:fhalf".parse().unwrap());
    all.push("sum:c=0.5,g0=1,atoms=2x1;1x3".parse().unwrap());
    all[rng.random_range(0..all.len())].clone()
}

fn kinds(rng: &mut ChaCha8Rng, n: u64, hash: OracleHash) -> Vec<Sketch> {
    let k = rng.random_range(1..=4);
    let assignment: Vec<(u64, WeightFunction)> = (0..n)
        .map(|key| {
            let cat = WeightFunction::catalogue();
            (key, cat[rng.random_range(0..cat.len())].clone())
        })
        .collect();
    let mut edges = Vec::new();
    for _ in 0..rng.random_range(1..=2 * n as usize + 1) {
        let arity = rng.random_range(2..=4usize.min(n as usize).max(2));
        let mut vs: Vec<u64> = (0..n.max(2)).collect();
        vs.shuffle(rng);
        vs.truncate(arity);
        vs.sort_unstable();
        if !edges.contains(&vs) {
            edges.push(vs);
        }
    }
    vec![
        Sketch::G(GSampler::new(random_g(rng), hash).unwrap()),
        Sketch::Pareto(ParetoFrontier::new(hash)),
        Sketch::Wor(KMinState::new(random_g(rng), k, hash).unwrap()),
        Sketch::KPareto(KParetoFrontier::new(k, hash).unwrap()),
        Sketch::Circuit(Circuit::flat(&assignment, hash).unwrap()),
        Sketch::Edge(EdgeSampler::new(EdgeSamplerSpec::new((0..n).collect(), edges).unwrap(), hash).unwrap()),
    ]
}

/// Bit-identity of sharded and sequential processing for one random split:
/// contiguous shards continuing the positional draw sequence, and an
/// arbitrary partition under record-attached draws.
fn one_split(i: u64) -> Result<(), String> {
    let mut rng = rng_for(9, i);
    let n = rng.random_range(2..=12u64);
    let stream: Vec<Update> = (0..rng.random_range(1..=60))
        .map(|_| {
            // repeats of (key, delta) exercise occurrence numbering
            let delta = if rng.random_bool(0.3) { 1.0 } else { 10f64.powf(rng.random_range(-1.0..1.0)) };
            Update::new(rng.random_range(0..n), delta).unwrap()
        })
        .collect();
    let s = derive_seed(BASE, (9 << 32) + i);
    let hash = OracleHash::new(s, rng.random_range(0..4));
    let shards = rng.random_range(2..=5usize);

    for (ki, proto) in kinds(&mut rng, n, hash).into_iter().enumerate() {
        // positional
        let mut seq = proto.clone();
        let mut r = FreshSource::new(s);
        let mut counters = Vec::with_capacity(stream.len());
        for u in &stream {
            counters.push(r.counter());
            seq.update(*u, &mut r);
        }
        let mut cuts: Vec<usize> = (0..shards - 1).map(|_| rng.random_range(0..=stream.len())).collect();
        cuts.push(0);
        cuts.push(stream.len());
        cuts.sort_unstable();
        let mut parts: Vec<Sketch> = cuts
            .windows(2)
            .map(|w| {
                let mut sk = proto.clone();
                if w[0] < w[1] {
                    let mut r = FreshSource::starting_at(s, r.stream(), counters[w[0]]);
                    for u in &stream[w[0]..w[1]] {
                        sk.update(*u, &mut r);
                    }
                }
                sk.ship()
            })
            .collect();
        parts.shuffle(&mut rng);
        let mut merged = parts.pop().unwrap();
        for p in &parts {
            merged.merge(p);
        }
        if !merged.identical(&seq) {
            return Err(format!("split {i}, kind {ki}: contiguous shards differ"));
        }

        // record-attached
        let mut seen: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        let draws: Vec<FreshSource> = stream
            .iter()
            .map(|u| {
                let occ = seen.entry((u.key, u.delta.to_bits())).or_insert(0);
                *occ += 1;
                FreshSource::for_record(s, u.key, u.delta, *occ - 1)
            })
            .collect();
        let mut seq = proto.clone();
        for (u, d) in stream.iter().zip(&draws) {
            seq.update(*u, &mut d.clone());
        }
        let mut parts = vec![proto.clone(); shards];
        let mut order: Vec<usize> = (0..stream.len()).collect();
        order.shuffle(&mut rng);
        for j in order {
            let p = rng.random_range(0..shards);
            parts[p].update(stream[j], &mut draws[j].clone());
        }
        let mut parts: Vec<Sketch> = parts.into_iter().map(Sketch::ship).collect();
        let mut merged = parts.pop().unwrap();
        for p in &parts {
            merged.merge(p);
        }
        if !merged.identical(&seq) {
            return Err(format!("split {i}, kind {ki}: record-attached shards differ"));
        }
    }
    Ok(())
}

fn c9() -> Verdict {
    let splits = 1_000u64;
    let failures: Vec<String> = (0..splits).into_par_iter().filter_map(|i| one_split(i).err()).collect();
    verdict(
        failures.is_empty(),
        match failures.first() {
            None => format!("{splits} splits x 6 sketch kinds x 2 draw modes bit-identical"),
            Some(f) => format!("{} failing splits, first: {f}", failures.len()),
        },
    )
}

// C10 --------------------------------------------------------------------

fn c10() -> Verdict {
    let keys = 10_000u64;
    let cap = 4.0 * ((keys as f64).ln() + 1.0);
    let results: Vec<(usize, f64)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for(10, seed);
            let mut stream: Vec<Update> = (0..keys)
                .map(|k| Update::new(k, rng.random_range(1.0..10.0)).unwrap())
                .collect();
            // a few heavy keys grown past 1e6 in steps of at least 1
            for _ in 0..20 {
                let key = rng.random_range(0..keys);
                let mut total = 0.0;
                while total < 1e6 {
                    let d = rng.random_range(1.0..20_000.0);
                    total += d;
                    stream.push(Update::new(key, d).unwrap());
                }
            }
            for _ in 0..20_000 {
                stream.push(Update::new(rng.random_range(0..keys), rng.random_range(1.0..3.0)).unwrap());
            }
            stream.shuffle(&mut rng);
            let s = derive_seed(BASE, (10 << 32) + seed);
            let mut f = ParetoFrontier::new(OracleHash::new(s, 0));
            let mut r = FreshSource::new(s);
            let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
            let mut max = 0;
            for u in &stream {
                f.update(*u, &mut r).unwrap();
                *mass.entry(u.key).or_insert(0.0) += u.delta;
                max = max.max(f.len());
            }
            (max, mass.values().copied().fold(0.0, f64::max))
        })
        .collect();
    let max = results.iter().map(|r| r.0).max().unwrap();
    let linf = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    verdict(
        max as f64 <= cap && linf >= 1e6,
        format!("max frontier {max} <= {cap:.1} over 100 seeds, min final max-norm {linf:.3e}"),
    )
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filters.is_empty() || filters.iter().any(|f| f.eq_ignore_ascii_case(id));
    let mut failed = 0;
    let mut report = |id: &str, v: Verdict, t: Instant| {
        println!(
            "{} {id}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed += 1;
        }
    };
    let single: [(&str, fn() -> Verdict); 5] = [("C1", c1), ("C4", c4), ("C5", c5), ("C6", c6), ("C7", c7)];
    for (id, f) in &single[..1] {
        if wanted(id) {
            let t = Instant::now();
            report(id, f(), t);
        }
    }
    if wanted("C2") || wanted("C3") {
        let t = Instant::now();
        let (v2, v3) = c2_c3();
        report("C2", v2, t);
        report("C3", v3, t);
    }
    let rest: [(&str, fn() -> Verdict); 3] = [("C8", c8), ("C9", c9), ("C10", c10)];
    for (id, f) in single[1..].iter().chain(rest.iter()) {
        if wanted(id) {
            let t = Instant::now();
            report(id, f(), t);
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
