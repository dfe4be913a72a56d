//! Line-oriented circuit description.
//!
//! ```text
//! # comment
//! gate <id> input|scalar:<alpha>|g:<weight>|output [key=<n>] [label=<n>] [salt=<n>] [scope=key|fixed:<w>,<w>...]
//! wire <from> <to>
//! graph-edge <u> <v> [<w> ...]
//! ```
//!
//! An input gate listens for stream key `key`, by default its id. A `G` gate's salt defaults
//! to its id and its scope to the message key. `graph-edge` lines describe
//! an edge sampler and cannot be mixed with gate lines.

use std::collections::BTreeMap;

use super::{Circuit, CircuitBuilder, CircuitError, EdgeSampler, EdgeSamplerSpec, GateId, GateKind, Scope};
use crate::level::WeightFunction;
use crate::randomness::OracleHash;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SpecParseError {
    pub line: usize,
    pub message: String,
}

/// A parsed circuit file.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSpec {
    Gates {
        builder: CircuitBuilder,
        /// File id of each gate, indexed by [`GateId`].
        ids: Vec<u64>,
    },
    Edges(EdgeSamplerSpec),
}

/// Either kind of instantiated circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltCircuit {
    Gates { circuit: Circuit, ids: Vec<u64> },
    Edges(EdgeSampler),
}

impl CircuitSpec {
    pub fn build(self, hash: OracleHash) -> Result<BuiltCircuit, CircuitError> {
        match self {
            CircuitSpec::Gates { builder, ids } => {
                let circuit = builder.build(hash).map_err(|v| {
                    CircuitError::Graph(format!("gate {}: {:?}", ids.get(v.gate).copied().unwrap_or(0), v.kind))
                })?;
                Ok(BuiltCircuit::Gates { circuit, ids })
            }
            CircuitSpec::Edges(spec) => Ok(BuiltCircuit::Edges(EdgeSampler::new(spec, hash)?)),
        }
    }
}

fn int<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T, SpecParseError> {
    s.parse().map_err(|_| SpecParseError {
        line,
        message: format!("{what}: `{s}` is not a valid integer"),
    })
}

pub fn parse_circuit_spec(text: &str) -> Result<CircuitSpec, SpecParseError> {
    let mut builder = CircuitBuilder::new();
    let mut ids: Vec<u64> = Vec::new();
    let mut index: BTreeMap<u64, GateId> = BTreeMap::new();
    let mut wires: Vec<(usize, u64, u64)> = Vec::new();
    let mut edges: Vec<Vec<u64>> = Vec::new();
    let mut first_edge_line = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| SpecParseError { line, message };
        let mut words = content.split_whitespace();
        match words.next() {
            Some("gate") => {
                let id: u64 = int(line, "gate id", words.next().ok_or_else(|| err("gate needs an id".into()))?)?;
                let kind_text = words.next().ok_or_else(|| err("gate needs a kind".into()))?;
                let mut label = None;
                let mut key = None;
                let mut salt = None;
                let mut scope = None;
                for opt in words {
                    let (k, v) = opt
                        .split_once('=')
                        .ok_or_else(|| err(format!("expected key=value, got `{opt}`")))?;
                    match k {
                        "label" => label = Some(int(line, "label", v)?),
                        "key" => key = Some(int(line, "key", v)?),
                        "salt" => salt = Some(int(line, "salt", v)?),
                        "scope" => {
                            scope = Some(if v == "key" {
                                Scope::Key
                            } else if let Some(list) = v.strip_prefix("fixed:") {
                                Scope::Fixed(
                                    list.split(',')
                                        .map(|w| int(line, "scope word", w))
                                        .collect::<Result<_, _>>()?,
                                )
                            } else {
                                return Err(err(format!("unknown scope `{v}`")));
                            })
                        }
                        _ => return Err(err(format!("unknown gate option `{k}`"))),
                    }
                }
                if key.is_some() && kind_text != "input" {
                    return Err(err("key applies to input gates only".into()));
                }
                let kind = if kind_text == "input" {
                    GateKind::Input { key: key.unwrap_or(id) }
                } else if kind_text == "output" {
                    GateKind::Output
                } else if let Some(a) = kind_text.strip_prefix("scalar:") {
                    let alpha: f64 = a.parse().map_err(|_| err(format!("bad scalar `{a}`")))?;
                    GateKind::Scalar { alpha }
                } else if let Some(g) = kind_text.strip_prefix("g:") {
                    let g: WeightFunction = g.parse().map_err(|e| err(format!("{e}")))?;
                    GateKind::G {
                        g,
                        salt: salt.unwrap_or(id as u32),
                        scope: scope.clone().unwrap_or(Scope::Key),
                    }
                } else {
                    return Err(err(format!("unknown gate kind `{kind_text}`")));
                };
                if !matches!(kind, GateKind::G { .. }) && (salt.is_some() || scope.is_some()) {
                    return Err(err("salt and scope apply to g gates only".into()));
                }
                if index.contains_key(&id) {
                    return Err(err(format!("gate {id} declared twice")));
                }
                let gid = builder.gate(kind, label);
                index.insert(id, gid);
                ids.push(id);
            }
            Some("wire") => {
                let from = int(line, "wire source", words.next().ok_or_else(|| err("wire needs two ids".into()))?)?;
                let to = int(line, "wire target", words.next().ok_or_else(|| err("wire needs two ids".into()))?)?;
                if words.next().is_some() {
                    return Err(err("wire takes exactly two ids".into()));
                }
                wires.push((line, from, to));
            }
            Some("graph-edge") => {
                let e: Vec<u64> = words.map(|w| int(line, "vertex", w)).collect::<Result<_, _>>()?;
                first_edge_line.get_or_insert(line);
                edges.push(e);
            }
            Some(other) => return Err(err(format!("unknown directive `{other}`"))),
            None => unreachable!("blank lines skipped"),
        }
    }
    if let Some(line) = first_edge_line {
        if !ids.is_empty() || !wires.is_empty() {
            return Err(SpecParseError {
                line,
                message: "graph-edge lines cannot be mixed with gate or wire lines".into(),
            });
        }
        let spec = EdgeSamplerSpec::from_edges(edges).map_err(|e| SpecParseError {
            line,
            message: e.to_string(),
        })?;
        return Ok(CircuitSpec::Edges(spec));
    }
    if ids.is_empty() {
        return Err(SpecParseError {
            line: 0,
            message: "no gates declared".into(),
        });
    }
    for (line, from, to) in wires {
        let look = |id: u64| {
            index.get(&id).copied().ok_or_else(|| SpecParseError {
                line,
                message: format!("wire references undeclared gate {id}"),
            })
        };
        builder.wire(look(from)?, look(to)?);
    }
    Ok(CircuitSpec::Gates { builder, ids })
}
