use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::stream::StreamRecord;
use super::{read_input, Attach, CliError, SketchKind};
use crate::circuits::{parse_circuit_spec, edge_weight, BuiltCircuit, CircuitSpec};
use crate::level::WeightFunction;
use crate::oracle::{
    chi_square_gof, exact_distribution, exact_edge_distribution, exact_wor_distribution, ExactDistribution,
    DEFAULT_ALPHA,
};
use crate::randomness::{derive_seed, FreshSource, OracleHash};
use crate::samplers::{GSampler, KMinState, KParetoFrontier, ParetoFrontier, Update};

pub(crate) struct SampleConfig {
    pub seed: u128,
    pub g: WeightFunction,
    pub sketch: SketchKind,
    pub reps: u64,
    pub attach: Attach,
    pub list_samples: bool,
}

/// Supplies the fresh draws for each record of one replay.
pub(crate) enum Draws {
    Position(FreshSource),
    Record {
        seed: u128,
        seen: BTreeMap<(u64, u64), u64>,
        current: FreshSource,
    },
}

impl Draws {
    pub(crate) fn new(seed: u128, attach: Attach) -> Self {
        match attach {
            Attach::Position => Draws::Position(FreshSource::new(seed)),
            Attach::Record => Draws::Record {
                seed,
                seen: BTreeMap::new(),
                current: FreshSource::new(seed),
            },
        }
    }

    pub(crate) fn for_record(&mut self, key: u64, delta: f64) -> &mut FreshSource {
        match self {
            Draws::Position(s) => s,
            Draws::Record { seed, seen, current } => {
                let n = seen.entry((key, delta.to_bits())).or_insert(0);
                *current = FreshSource::for_record(*seed, key, delta, *n);
                *n += 1;
                current
            }
        }
    }
}

/// One repetition's answer.
#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    /// Sampled identifiers in order; empty when nothing was sampled.
    keys: Vec<u64>,
    h: Option<f64>,
    frontier: Option<usize>,
}

enum Sketch {
    G(GSampler),
    Pareto(ParetoFrontier),
    Wor(KMinState),
    KPareto(KParetoFrontier),
    Circuit(BuiltCircuit),
}

fn circuit_error(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("circuit: {e}"))
}

fn make_sketch(cfg: &SampleConfig, spec: Option<&CircuitSpec>, hash: OracleHash) -> Result<Sketch, CliError> {
    let usage = |e: crate::samplers::SamplerError| CliError::Usage(e.to_string());
    Ok(match &cfg.sketch {
        SketchKind::GSampler => Sketch::G(GSampler::new(cfg.g.clone(), hash).map_err(usage)?),
        SketchKind::Pareto => Sketch::Pareto(ParetoFrontier::new(hash)),
        SketchKind::Wor(k) => Sketch::Wor(KMinState::new(cfg.g.clone(), *k, hash).map_err(usage)?),
        SketchKind::KPareto(k) => Sketch::KPareto(KParetoFrontier::new(*k, hash).map_err(usage)?),
        SketchKind::Circuit(_) => Sketch::Circuit(
            spec.expect("circuit spec loaded")
                .clone()
                .build(hash)
                .map_err(circuit_error)?,
        ),
    })
}

fn replay(
    cfg: &SampleConfig,
    spec: Option<&CircuitSpec>,
    records: &[StreamRecord],
    rep: u64,
) -> Result<Outcome, CliError> {
    let seed = derive_seed(cfg.seed, rep);
    let mut sketch = make_sketch(cfg, spec, OracleHash::new(seed, 0))?;
    let mut draws = Draws::new(seed, cfg.attach);
    let bad = |e: crate::samplers::SamplerError| CliError::Usage(e.to_string());
    for r in records {
        let u = Update::new(r.key, r.delta).map_err(bad)?;
        let rng = draws.for_record(r.key, r.delta);
        match &mut sketch {
            Sketch::G(s) => s.update(u, rng).map_err(bad)?,
            Sketch::Pareto(s) => s.update(u, rng).map_err(bad)?,
            Sketch::Wor(s) => s.update(u, rng).map_err(bad)?,
            Sketch::KPareto(s) => s.update(u, rng).map_err(bad)?,
            Sketch::Circuit(BuiltCircuit::Gates { circuit, .. }) => {
                circuit.update_key(r.key, r.delta, rng).map_err(circuit_error)?
            }
            Sketch::Circuit(BuiltCircuit::Edges(e)) => {
                if e.spec().vertices().contains(&r.key) {
                    e.update(r.key, r.delta, rng).map_err(circuit_error)?
                }
            }
        }
    }
    let single = |q: Option<(u64, f64)>| Outcome {
        keys: q.iter().map(|p| p.0).collect(),
        h: q.map(|p| p.1),
        frontier: None,
    };
    Ok(match &sketch {
        Sketch::G(s) => single(s.query()),
        Sketch::Pareto(s) => Outcome {
            frontier: Some(s.len()),
            ..single(s.query(&cfg.g).map_err(bad)?)
        },
        Sketch::Wor(s) => Outcome {
            keys: s.sample_ordered(),
            h: s.entries().first().map(|e| e.1),
            frontier: None,
        },
        Sketch::KPareto(s) => {
            let q = s.query(&cfg.g, s.k()).map_err(bad)?;
            Outcome {
                keys: q.iter().map(|e| e.0).collect(),
                h: q.first().map(|e| e.1),
                frontier: Some(s.len()),
            }
        }
        Sketch::Circuit(BuiltCircuit::Gates { circuit, .. }) => single(circuit.best_output()),
        Sketch::Circuit(BuiltCircuit::Edges(e)) => single(e.sample_index().map(|(i, h)| (i as u64, h))),
    })
}

fn load_spec(cfg: &SampleConfig) -> Result<Option<CircuitSpec>, CliError> {
    let SketchKind::Circuit(path) = &cfg.sketch else {
        return Ok(None);
    };
    let text = read_input(path)?;
    let spec = parse_circuit_spec(&text)
        .map_err(|e| CliError::Usage(format!("{}:{}: {}", path.display(), e.line, e.message)))?;
    Ok(Some(spec))
}

fn sketch_name(s: &SketchKind) -> String {
    match s {
        SketchKind::GSampler => "gsampler".into(),
        SketchKind::Pareto => "pareto".into(),
        SketchKind::Wor(k) => format!("wor:{k}"),
        SketchKind::KPareto(k) => format!("kpareto:{k}"),
        SketchKind::Circuit(p) => format!("circuit:{}", p.display()),
    }
}

pub(crate) fn attach_name(a: Attach) -> &'static str {
    match a {
        Attach::Position => "position",
        Attach::Record => "record",
    }
}

/// Summary of the `h` values as mean, min, max and count.
pub(crate) fn h_summary(hs: &[f64]) -> Value {
    if hs.is_empty() {
        return Value::Null;
    }
    let n = hs.len() as f64;
    let mean = hs.iter().sum::<f64>() / n;
    json!({
        "count": hs.len(),
        "mean": mean,
        "min": hs.iter().copied().fold(f64::INFINITY, f64::min),
        "max": hs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

pub(crate) fn gof_value(
    counts: &BTreeMap<u64, u64>,
    exact: &ExactDistribution,
) -> Value {
    match chi_square_gof(counts, exact, DEFAULT_ALPHA) {
        Ok(r) => serde_json::to_value(r).expect("report serializes"),
        Err(e) => json!({ "skipped": e.to_string() }),
    }
}

pub(crate) fn cmd_sample(cfg: &SampleConfig, records: &[StreamRecord]) -> Result<Value, CliError> {
    if let (SketchKind::Pareto | SketchKind::KPareto(_), Err(e)) = (&cfg.sketch, cfg.g.single_term()) {
        return Err(CliError::Usage(format!("--g: universal sketches need a single-term weight: {e}")));
    }
    let spec = load_spec(cfg)?;
    let outcomes: Vec<Outcome> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| replay(cfg, spec.as_ref(), records, r))
        .collect::<Result<_, _>>()?;

    let mut labels: BTreeMap<u64, String> = BTreeMap::new();
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for r in records {
        labels.entry(r.key).or_insert_with(|| r.label.clone());
        *mass.entry(r.key).or_insert(0.0) += r.delta;
    }
    let edges: Option<Vec<Vec<u64>>> = match &spec {
        Some(CircuitSpec::Edges(e)) => Some(e.edges().to_vec()),
        _ => None,
    };
    let name = |id: u64| -> String {
        match &edges {
            Some(es) => es
                .get(id as usize)
                .map(|e| {
                    e.iter()
                        .map(|v| labels.get(v).cloned().unwrap_or_else(|| v.to_string()))
                        .collect::<Vec<_>>()
                        .join("-")
                })
                .unwrap_or_else(|| id.to_string()),
            None => labels.get(&id).cloned().unwrap_or_else(|| id.to_string()),
        }
    };

    let reps = cfg.reps as f64;
    let mut first_counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut tuple_counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut empty = 0u64;
    let mut hs = Vec::new();
    let mut frontier = Vec::new();
    for o in &outcomes {
        match o.keys.first() {
            Some(&k) => *first_counts.entry(k).or_insert(0) += 1,
            None => empty += 1,
        }
        *tuple_counts.entry(o.keys.clone()).or_insert(0) += 1;
        hs.extend(o.h);
        frontier.extend(o.frontier);
    }

    let mut report = Map::new();
    report.insert("command".into(), json!("sample"));
    report.insert("seed".into(), json!(format!("{:#034x}", cfg.seed)));
    report.insert("sketch".into(), json!(sketch_name(&cfg.sketch)));
    report.insert("g".into(), json!(cfg.g.to_string()));
    report.insert("reps".into(), json!(cfg.reps));
    report.insert("attach_randomness".into(), json!(attach_name(cfg.attach)));
    report.insert("records".into(), json!(records.len()));
    report.insert("distinct_keys".into(), json!(mass.len()));
    let first = &outcomes[0];
    report.insert(
        "sample".into(),
        if first.keys.is_empty() {
            Value::Null
        } else {
            json!(first.keys.iter().map(|&k| name(k)).collect::<Vec<_>>())
        },
    );
    report.insert("empty".into(), json!(empty));
    let freq: Map<String, Value> = first_counts
        .iter()
        .map(|(&k, &c)| (name(k), json!(c as f64 / reps)))
        .collect();
    report.insert("frequencies".into(), Value::Object(freq));
    report.insert(
        "counts".into(),
        Value::Object(first_counts.iter().map(|(&k, &c)| (name(k), json!(c))).collect()),
    );
    report.insert("h_star".into(), h_summary(&hs));
    if !frontier.is_empty() {
        let mean = frontier.iter().sum::<usize>() as f64 / frontier.len() as f64;
        report.insert(
            "frontier_size".into(),
            json!({ "mean": mean, "max": frontier.iter().max() }),
        );
    }

    let x: Vec<(u64, f64)> = mass.iter().map(|(&k, &m)| (k, m)).collect();
    let tuple_name = |t: &Vec<u64>| t.iter().map(|&k| name(k)).collect::<Vec<_>>().join(",");
    match &cfg.sketch {
        SketchKind::GSampler | SketchKind::Pareto if !x.is_empty() => {
            if let Ok(exact) = exact_distribution(&x, &cfg.g) {
                report.insert("h_star_expected_mean".into(), json!(1.0 / total_weight(&x, &cfg.g)));
                insert_exact(&mut report, &exact, &name, &first_counts);
            }
        }
        SketchKind::Wor(k) | SketchKind::KPareto(k) => {
            report.insert(
                "tuple_frequencies".into(),
                Value::Object(
                    tuple_counts
                        .iter()
                        .map(|(t, &c)| (tuple_name(t), json!(c as f64 / reps)))
                        .collect(),
                ),
            );
            if let Ok(exact) = exact_wor_distribution(&x, &cfg.g, *k) {
                // index the ordered tuples so the chi-square sees one cell each
                let index: BTreeMap<&Vec<u64>, u64> = exact.keys().zip(0..).collect();
                let dist = ExactDistribution {
                    support: (0..exact.len() as u64).collect(),
                    probs: exact.values().copied().collect(),
                };
                let mut counts = BTreeMap::new();
                for (t, &c) in &tuple_counts {
                    let cell = index.get(t).copied().unwrap_or(u64::MAX);
                    *counts.entry(cell).or_insert(0) += c;
                }
                report.insert(
                    "tuple_exact".into(),
                    Value::Object(exact.iter().map(|(t, &p)| (tuple_name(t), json!(p))).collect()),
                );
                report.insert("chi_square".into(), gof_value(&counts, &dist));
            }
        }
        SketchKind::Circuit(_) => {
            if let Some(es) = &edges {
                if let Ok(exact) = exact_edge_distribution(es, &mass, edge_weight) {
                    insert_exact(&mut report, &exact, &name, &first_counts);
                }
            }
        }
        _ => {}
    }

    if cfg.list_samples {
        let all: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "keys": o.keys.iter().map(|&k| name(k)).collect::<Vec<_>>(),
                    "h": o.h,
                })
            })
            .collect();
        report.insert("samples".into(), Value::Array(all));
    }
    Ok(Value::Object(report))
}

fn total_weight(x: &[(u64, f64)], g: &WeightFunction) -> f64 {
    x.iter().map(|e| g.weight(e.1)).sum()
}

fn insert_exact(
    report: &mut Map<String, Value>,
    exact: &ExactDistribution,
    name: &dyn Fn(u64) -> String,
    counts: &BTreeMap<u64, u64>,
) {
    let probs: Map<String, Value> = exact
        .support
        .iter()
        .zip(&exact.probs)
        .map(|(&k, &p)| (name(k), json!(p)))
        .collect();
    report.insert("exact".into(), Value::Object(probs));
    report.insert("chi_square".into(), gof_value(counts, exact));
}
