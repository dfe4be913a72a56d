use std::collections::BTreeSet;

use super::{Circuit, CircuitBuilder, CircuitError, GateId, Scope};
use crate::level::WeightFunction;
use crate::randomness::{FreshSource, OracleHash};

/// Salt offsets of the three seed families of the edge sampler.
pub const EDGE_SALT_H1: u32 = 1;
pub const EDGE_SALT_H2: u32 = 2;
pub const EDGE_SALT_H3: u32 = 3;

const MAX_ARITY: usize = 4;

/// `ln(1 + sum sqrt(x_i)) + 2 (1 - exp(-sum x_i))` over an edge's endpoint masses.
pub fn edge_weight(masses: &[f64]) -> f64 {
    let roots: f64 = masses.iter().map(|x| x.sqrt()).sum();
    let total: f64 = masses.iter().sum();
    roots.ln_1p() - 2.0 * (-total).exp_m1()
}

/// A vertex set and a list of (hyper)edges over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSamplerSpec {
    vertices: Vec<u64>,
    // each sorted ascending
    edges: Vec<Vec<u64>>,
}

impl EdgeSamplerSpec {
    /// Edges of arity 2 to 4 over `vertices`; no repeated endpoints, no
    /// duplicate edges.
    pub fn new(vertices: Vec<u64>, edges: Vec<Vec<u64>>) -> Result<Self, CircuitError> {
        let vset: BTreeSet<u64> = vertices.iter().copied().collect();
        if vset.len() != vertices.len() {
            return Err(CircuitError::Graph("duplicate vertex".into()));
        }
        let mut seen = BTreeSet::new();
        let mut canon = Vec::with_capacity(edges.len());
        for e in edges {
            let mut e2 = e.clone();
            e2.sort_unstable();
            e2.dedup();
            if e2.len() != e.len() {
                return Err(CircuitError::Graph(format!("edge {e:?} repeats a vertex")));
            }
            if !(2..=MAX_ARITY).contains(&e2.len()) {
                return Err(CircuitError::Graph(format!(
                    "edge {e:?} has arity {}, supported 2 to {MAX_ARITY}",
                    e2.len()
                )));
            }
            if let Some(v) = e2.iter().find(|v| !vset.contains(v)) {
                return Err(CircuitError::Graph(format!("edge {e:?} uses unknown vertex {v}")));
            }
            if !seen.insert(e2.clone()) {
                return Err(CircuitError::Graph(format!("duplicate edge {e:?}")));
            }
            canon.push(e2);
        }
        Ok(EdgeSamplerSpec {
            vertices,
            edges: canon,
        })
    }

    /// Vertex set inferred from the edges, in order of first appearance.
    pub fn from_edges(edges: Vec<Vec<u64>>) -> Result<Self, CircuitError> {
        let mut vertices = Vec::new();
        let mut seen = BTreeSet::new();
        for v in edges.iter().flatten() {
            if seen.insert(*v) {
                vertices.push(*v);
            }
        }
        EdgeSamplerSpec::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Vec<u64>] {
        &self.edges
    }
}

/// Samples an edge `e` with probability proportional to
/// [`edge_weight`] of its endpoint masses.
///
/// Every vertex-edge incidence has its own square-root gate; each edge has a
/// log gate fed by its incidence gates and a soft-cap gate, scaled by two,
/// fed by its endpoints' input gates.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSampler {
    spec: EdgeSamplerSpec,
    circuit: Circuit,
    output: GateId,
}

impl EdgeSampler {
    pub fn new(spec: EdgeSamplerSpec, hash: OracleHash) -> Result<Self, CircuitError> {
        let mut b = CircuitBuilder::new();
        let output = b.output();
        let base = hash.salt;
        let inputs: Vec<GateId> = spec.vertices.iter().map(|&v| b.input(v)).collect();
        // (incidence gate, soft-cap gate) per edge endpoint, wired in edge order below
        let mut incident: Vec<Vec<(GateId, GateId)>> = vec![Vec::new(); spec.vertices.len()];
        for (idx, e) in spec.edges.iter().enumerate() {
            let label = idx as u64;
            let l3 = b.g(WeightFunction::Log, base.wrapping_add(EDGE_SALT_H3), Scope::Fixed(e.clone()));
            b.set_label(l3, label);
            b.wire(l3, output);
            let l2 = b.g(
                WeightFunction::softcap(1.0),
                base.wrapping_add(EDGE_SALT_H2),
                Scope::Fixed(e.clone()),
            );
            b.set_label(l2, label);
            let s = b.scalar(2.0);
            b.set_label(s, label);
            b.wire(l2, s);
            b.wire(s, output);
            for &v in e {
                let mut words = vec![v];
                words.extend_from_slice(e);
                let l1 = b.g(WeightFunction::FHalf, base.wrapping_add(EDGE_SALT_H1), Scope::Fixed(words));
                b.wire(l1, l3);
                let vi = spec.vertices.iter().position(|&u| u == v).expect("validated");
                incident[vi].push((l1, l2));
            }
        }
        for (vi, list) in incident.iter().enumerate() {
            for &(l1, l2) in list {
                b.wire(inputs[vi], l1);
                b.wire(inputs[vi], l2);
            }
        }
        // isolated vertices would have dangling input gates
        let (circuit, output) = {
            let mut keep = CircuitBuilder::new();
            let mut remap = vec![usize::MAX; b.gates.len()];
            for (id, g) in b.gates.iter().enumerate() {
                let used = b.wires.iter().any(|&(x, y)| x == id || y == id);
                if used || id == output {
                    remap[id] = keep.gate(g.kind.clone(), g.label);
                }
            }
            for &(x, y) in &b.wires {
                keep.wire(remap[x], remap[y]);
            }
            (keep.build(hash)?, remap[output])
        };
        Ok(EdgeSampler {
            spec,
            circuit,
            output,
        })
    }

    pub fn spec(&self) -> &EdgeSamplerSpec {
        &self.spec
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// `x(vertex) += delta`; a no-op for vertices on no edge.
    pub fn update(&mut self, vertex: u64, delta: f64, rng: &mut FreshSource) -> Result<(), CircuitError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(CircuitError::NonPositiveDelta(delta));
        }
        if !self.spec.vertices.contains(&vertex) {
            return Err(CircuitError::Graph(format!("unknown vertex {vertex}")));
        }
        for id in self.circuit.route(vertex) {
            self.circuit.update(id, vertex, delta, rng)?;
        }
        Ok(())
    }

    /// Index into [`EdgeSamplerSpec::edges`] and the minimum value.
    pub fn sample_index(&self) -> Option<(usize, f64)> {
        self.circuit
            .output(self.output)
            .expect("output gate exists")
            .map(|(e, h)| (e as usize, h))
    }

    pub fn sample(&self) -> Option<(&[u64], f64)> {
        self.sample_index().map(|(e, h)| (self.spec.edges[e].as_slice(), h))
    }

    pub fn merge(&mut self, other: &EdgeSampler) -> Result<(), CircuitError> {
        self.circuit.merge(&other.circuit)
    }
}
