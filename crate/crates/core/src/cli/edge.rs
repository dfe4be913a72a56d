use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::sample::{attach_name, gof_value, h_summary, Draws};
use super::stream::StreamRecord;
use super::{Attach, CliError};
use crate::circuits::{edge_weight, EdgeSampler, EdgeSamplerSpec};
use crate::oracle::exact_edge_distribution;
use crate::randomness::{derive_seed, OracleHash};

pub(crate) fn cmd_edge_sample(
    seed: u128,
    edges: &[(Vec<u64>, Vec<String>)],
    records: &[StreamRecord],
    reps: u64,
    attach: Attach,
) -> Result<Value, CliError> {
    let ids: Vec<Vec<u64>> = edges.iter().map(|e| e.0.clone()).collect();
    let spec = EdgeSamplerSpec::from_edges(ids.clone()).map_err(|e| CliError::Usage(format!("graph: {e}")))?;
    let known = |v: u64| spec.vertices().contains(&v);
    let ignored = records.iter().filter(|r| !known(r.key)).count();

    let outcomes: Vec<Option<(usize, f64)>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r);
            let mut sampler = EdgeSampler::new(spec.clone(), OracleHash::new(s, 0))
                .map_err(|e| CliError::Usage(format!("graph: {e}")))?;
            let mut draws = Draws::new(s, attach);
            for rec in records.iter().filter(|r| known(r.key)) {
                sampler
                    .update(rec.key, rec.delta, draws.for_record(rec.key, rec.delta))
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            Ok(sampler.sample_index())
        })
        .collect::<Result<_, CliError>>()?;

    let name = |i: usize| edges[i].1.join("-");
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut hs = Vec::new();
    let mut empty = 0u64;
    for o in &outcomes {
        match o {
            Some((i, h)) => {
                *counts.entry(*i as u64).or_insert(0) += 1;
                hs.push(*h);
            }
            None => empty += 1,
        }
    }
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for r in records.iter().filter(|r| known(r.key)) {
        *mass.entry(r.key).or_insert(0.0) += r.delta;
    }

    let mut report = Map::new();
    report.insert("command".into(), json!("edge-sample"));
    report.insert("seed".into(), json!(format!("{seed:#034x}")));
    report.insert("reps".into(), json!(reps));
    report.insert("attach_randomness".into(), json!(attach_name(attach)));
    report.insert("edges".into(), json!(edges.len()));
    report.insert("records".into(), json!(records.len()));
    report.insert("ignored_records".into(), json!(ignored));
    report.insert(
        "sample".into(),
        outcomes[0].map_or(Value::Null, |(i, _)| json!(name(i))),
    );
    report.insert("empty".into(), json!(empty));
    let reps_f = reps as f64;
    report.insert(
        "frequencies".into(),
        Value::Object(
            (0..edges.len())
                .map(|i| {
                    let c = counts.get(&(i as u64)).copied().unwrap_or(0);
                    (name(i), json!(c as f64 / reps_f))
                })
                .collect(),
        ),
    );
    report.insert("h_star".into(), h_summary(&hs));
    if let Ok(exact) = exact_edge_distribution(&ids, &mass, edge_weight) {
        report.insert(
            "exact".into(),
            Value::Object(
                exact
                    .probs
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (name(i), json!(p)))
                    .collect(),
            ),
        );
        report.insert("chi_square".into(), gof_value(&counts, &exact));
    }
    Ok(Value::Object(report))
}
