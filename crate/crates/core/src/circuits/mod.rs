//! Stochastic sampling circuits: DAGs of input, scalar, `G` and output gates
//! through which exponential signals are propagated on every update.
//!
//! An input gate sends a fresh `Y / delta` along each outgoing wire, a scalar
//! gate divides by `alpha`, a `G` gate applies `ℓ_G(y, U)` with its own
//! uniform seed `U`, and an output gate keeps the smallest value seen along
//! with the identifier that travelled with it.

mod edge;
mod spec_file;

pub use edge::{edge_weight, EdgeSampler, EdgeSamplerSpec, EDGE_SALT_H1, EDGE_SALT_H2, EDGE_SALT_H3};
pub use spec_file::{parse_circuit_spec, BuiltCircuit, CircuitSpec, SpecParseError};

use std::collections::BTreeMap;

use crate::level::{LevelError, LevelTerm, WeightFunction};
use crate::randomness::{fresh_exp, hash_unit, hash_unit_words, FreshSource, OracleHash};
use crate::samplers::value_key_cmp;

/// Index of a gate inside its circuit.
pub type GateId = usize;

/// What a `G` gate's seed `U` is keyed by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    /// Hash of the identifier carried by the incoming message.
    Key,
    /// Hash of a fixed word sequence, e.g. a vertex or an edge.
    Fixed(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Listens for updates to `key`.
    Input { key: u64 },
    Scalar { alpha: f64 },
    G {
        g: WeightFunction,
        salt: u32,
        scope: Scope,
    },
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Replaces the identifier of every message leaving the gate.
    pub label: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Cycle,
    UnknownGate,
    InputHasPredecessor,
    OutputHasSuccessor,
    NotSingleSuccessor,
    NoPredecessor,
    UnreachableOutput,
    NonPositiveAlpha,
    MultiTermWeight,
}

/// First structural rule a circuit breaks, and where.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("gate {gate}: {kind:?}")]
pub struct Violation {
    pub gate: GateId,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("invalid circuit: {0}")]
    Invalid(#[from] Violation),
    #[error("gate {0} does not exist or has the wrong type")]
    BadGate(GateId),
    #[error("update delta must be positive and finite, got {0}")]
    NonPositiveDelta(f64),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("{0}")]
    Graph(String),
}

/// Gates and wires before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    wires: Vec<(GateId, GateId)>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        CircuitBuilder::default()
    }

    pub fn gate(&mut self, kind: GateKind, label: Option<u64>) -> GateId {
        self.gates.push(Gate { kind, label });
        self.gates.len() - 1
    }

    pub fn input(&mut self, key: u64) -> GateId {
        self.gate(GateKind::Input { key }, None)
    }

    pub fn scalar(&mut self, alpha: f64) -> GateId {
        self.gate(GateKind::Scalar { alpha }, None)
    }

    pub fn g(&mut self, g: WeightFunction, salt: u32, scope: Scope) -> GateId {
        self.gate(GateKind::G { g, salt, scope }, None)
    }

    pub fn output(&mut self) -> GateId {
        self.gate(GateKind::Output, None)
    }

    pub fn set_label(&mut self, gate: GateId, label: u64) {
        if let Some(g) = self.gates.get_mut(gate) {
            g.label = Some(label);
        }
    }

    /// Wires are kept in insertion order, which fixes the order of fresh
    /// draws at each input gate.
    pub fn wire(&mut self, from: GateId, to: GateId) {
        self.wires.push((from, to));
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Checks the structural rules without building.
    pub fn validate(&self) -> Result<(), Violation> {
        self.analyse().map(|_| ())
    }

    fn analyse(&self) -> Result<Analysis, Violation> {
        let n = self.gates.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &self.wires {
            if a >= n || b >= n {
                return Err(Violation {
                    gate: if a >= n { a } else { b },
                    kind: ViolationKind::UnknownGate,
                });
            }
            succ[a].push(b);
            pred[b].push(a);
        }
        let order = topological_order(&succ, &pred).map_err(|gate| Violation {
            gate,
            kind: ViolationKind::Cycle,
        })?;
        let mut terms = vec![None; n];
        for (id, gate) in self.gates.iter().enumerate() {
            let fail = |kind| Err(Violation { gate: id, kind });
            match &gate.kind {
                GateKind::Input { .. } => {
                    if !pred[id].is_empty() {
                        return fail(ViolationKind::InputHasPredecessor);
                    }
                }
                GateKind::Output => {
                    if !succ[id].is_empty() {
                        return fail(ViolationKind::OutputHasSuccessor);
                    }
                }
                GateKind::Scalar { alpha } => {
                    if !(*alpha > 0.0 && alpha.is_finite()) {
                        return fail(ViolationKind::NonPositiveAlpha);
                    }
                }
                GateKind::G { g, .. } => match g.single_term() {
                    Ok(t) => terms[id] = Some(t),
                    Err(_) => return fail(ViolationKind::MultiTermWeight),
                },
            }
            if matches!(gate.kind, GateKind::Scalar { .. } | GateKind::G { .. }) && succ[id].len() != 1 {
                return fail(ViolationKind::NotSingleSuccessor);
            }
            if !matches!(gate.kind, GateKind::Input { .. }) && pred[id].is_empty() {
                return fail(ViolationKind::NoPredecessor);
            }
        }
        // reverse reachability from outputs
        let mut reaches = vec![false; n];
        for &id in order.iter().rev() {
            reaches[id] = matches!(self.gates[id].kind, GateKind::Output)
                || succ[id].iter().any(|&s| reaches[s]);
        }
        if let Some(id) = (0..n).find(|&i| !reaches[i]) {
            return Err(Violation {
                gate: id,
                kind: ViolationKind::UnreachableOutput,
            });
        }
        let mut rank = vec![0; n];
        for (r, &id) in order.iter().enumerate() {
            rank[id] = r;
        }
        Ok(Analysis { succ, rank, terms })
    }

    pub fn build(self, hash: OracleHash) -> Result<Circuit, Violation> {
        let a = self.analyse()?;
        let mut inputs: BTreeMap<u64, Vec<GateId>> = BTreeMap::new();
        let mut input_count = 0;
        let mut outputs = BTreeMap::new();
        for (id, g) in self.gates.iter().enumerate() {
            match g.kind {
                GateKind::Input { key } => {
                    inputs.entry(key).or_default().push(id);
                    input_count += 1;
                }
                GateKind::Output => {
                    outputs.insert(id, None);
                }
                _ => {}
            }
        }
        Ok(Circuit {
            gates: self.gates,
            succ: a.succ,
            rank: a.rank,
            terms: a.terms,
            inputs,
            input_count,
            outputs,
            hash,
        })
    }
}

struct Analysis {
    succ: Vec<Vec<GateId>>,
    rank: Vec<usize>,
    terms: Vec<Option<LevelTerm>>,
}

// Kahn's algorithm; on a cycle returns a gate that lies on or behind one.
fn topological_order(succ: &[Vec<GateId>], pred: &[Vec<GateId>]) -> Result<Vec<GateId>, GateId> {
    let n = succ.len();
    let mut indeg: Vec<usize> = pred.iter().map(|p| p.len()).collect();
    let mut ready: Vec<GateId> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        order.push(i);
        for &s in &succ[i] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(s);
            }
        }
    }
    if order.len() < n {
        return Err((0..n).find(|&i| indeg[i] > 0).expect("some gate is left"));
    }
    Ok(order)
}

/// A validated circuit together with the state of its output gates.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
    succ: Vec<Vec<GateId>>,
    rank: Vec<usize>,
    terms: Vec<Option<LevelTerm>>,
    inputs: BTreeMap<u64, Vec<GateId>>,
    input_count: usize,
    outputs: BTreeMap<GateId, Option<(u64, f64)>>,
    hash: OracleHash,
}

impl Circuit {
    /// One input gate, one `G_v` gate per term of `G_v`, per key; a single
    /// shared output. With the same `G` for every key this reproduces
    /// [`crate::samplers::GSampler`] draw for draw.
    pub fn flat(assignment: &[(u64, WeightFunction)], hash: OracleHash) -> Result<Circuit, CircuitError> {
        let mut b = CircuitBuilder::new();
        let out = b.output();
        for (key, g) in assignment {
            let input = b.input(*key);
            for (j, term) in g.terms()?.into_iter().enumerate() {
                let gate = b.g(term_weight(term), hash.salt.wrapping_add(j as u32), Scope::Key);
                b.wire(input, gate);
                b.wire(gate, out);
            }
        }
        Ok(b.build(hash)?)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn hash(&self) -> OracleHash {
        self.hash
    }

    pub fn output_gates(&self) -> Vec<GateId> {
        self.outputs.keys().copied().collect()
    }

    /// Input gates an update to `key` is delivered to: those listening for
    /// `key`, or the only input gate if the circuit has exactly one.
    pub fn route(&self, key: u64) -> Vec<GateId> {
        match self.inputs.get(&key) {
            Some(ids) => ids.clone(),
            None if self.input_count == 1 => self.inputs.values().flatten().copied().collect(),
            None => Vec::new(),
        }
    }

    /// Delivers `x(key) += delta` to every routed input gate.
    pub fn update_key(&mut self, key: u64, delta: f64, rng: &mut FreshSource) -> Result<(), CircuitError> {
        for id in self.route(key) {
            self.update(id, key, delta, rng)?;
        }
        Ok(())
    }

    /// Propagates one update entering at `input_gate`.
    pub fn update(
        &mut self,
        input_gate: GateId,
        key: u64,
        delta: f64,
        rng: &mut FreshSource,
    ) -> Result<(), CircuitError> {
        if !matches!(self.gates.get(input_gate).map(|g| &g.kind), Some(GateKind::Input { .. })) {
            return Err(CircuitError::BadGate(input_gate));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(CircuitError::NonPositiveDelta(delta));
        }
        let ident = self.gates[input_gate].label.unwrap_or(key);
        // pending messages keyed by topological rank
        let mut pending: BTreeMap<usize, (GateId, Vec<(f64, u64)>)> = BTreeMap::new();
        for &s in &self.succ[input_gate] {
            let y = fresh_exp(rng) / delta;
            pending
                .entry(self.rank[s])
                .or_insert_with(|| (s, Vec::new()))
                .1
                .push((y, ident));
        }
        while let Some((_, (id, msgs))) = pending.pop_first() {
            let gate = &self.gates[id];
            let out: Vec<(f64, u64)> = match &gate.kind {
                GateKind::Output => {
                    let slot = self.outputs.get_mut(&id).expect("output registered");
                    for (y, v) in msgs {
                        if slot.is_none_or(|(k, h)| value_key_cmp((y, v), (h, k)).is_lt()) {
                            *slot = Some((v, y));
                        }
                    }
                    continue;
                }
                GateKind::Input { .. } => unreachable!("inputs have no predecessors"),
                GateKind::Scalar { alpha } => msgs
                    .into_iter()
                    .map(|(y, v)| (y / alpha, gate.label.unwrap_or(v)))
                    .collect(),
                GateKind::G { salt, scope, .. } => {
                    let term = self.terms[id].expect("validated G gate");
                    let h = self.hash.with_salt(*salt);
                    let mut out = Vec::with_capacity(msgs.len());
                    for (y, v) in msgs {
                        let u = match scope {
                            Scope::Key => hash_unit(&h, v),
                            Scope::Fixed(words) => hash_unit_words(&h, words),
                        };
                        out.push((term.eval(y, u)?, gate.label.unwrap_or(v)));
                    }
                    out
                }
            };
            let s = self.succ[id][0];
            pending
                .entry(self.rank[s])
                .or_insert_with(|| (s, Vec::new()))
                .1
                .extend(out);
        }
        Ok(())
    }

    /// `(identifier, h)` held by an output gate, `None` before any signal.
    pub fn output(&self, gate: GateId) -> Result<Option<(u64, f64)>, CircuitError> {
        self.outputs.get(&gate).copied().ok_or(CircuitError::BadGate(gate))
    }

    /// Minimum over all output gates.
    pub fn best_output(&self) -> Option<(u64, f64)> {
        self.outputs
            .values()
            .flatten()
            .copied()
            .min_by(|a, b| value_key_cmp((a.1, a.0), (b.1, b.0)))
    }

    /// Resets every output gate to empty.
    pub fn clear(&mut self) {
        for v in self.outputs.values_mut() {
            *v = None;
        }
    }

    /// Folds another run of the same circuit into this one.
    pub fn merge(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if self.gates != other.gates || self.succ != other.succ || self.hash != other.hash {
            return Err(CircuitError::Graph("cannot merge different circuits".into()));
        }
        for (id, slot) in self.outputs.iter_mut() {
            if let Some((v, y)) = other.outputs[id] {
                if slot.is_none_or(|(k, h)| value_key_cmp((y, v), (h, k)).is_lt()) {
                    *slot = Some((v, y));
                }
            }
        }
        Ok(())
    }
}

fn term_weight(t: LevelTerm) -> WeightFunction {
    use crate::level::BaseLevel;
    let base = match t.base {
        BaseLevel::F0 => WeightFunction::F0,
        BaseLevel::F1 => WeightFunction::F1,
        BaseLevel::FHalf => WeightFunction::FHalf,
        BaseLevel::SoftCap(tau) => WeightFunction::SoftCap { tau },
        BaseLevel::Log => WeightFunction::Log,
    };
    if t.alpha == 1.0 {
        base
    } else {
        WeightFunction::scaled(t.alpha, base)
    }
}
