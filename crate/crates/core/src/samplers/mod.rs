//! Streaming sketches: the single-key G-sampler, the universal Pareto
//! sampler, the bottom-k without-replacement sampler and its k-Pareto
//! universal counterpart. All support merging and a binary frame format.

mod codec;
mod gsampler;
mod kpareto;
mod pareto;
mod wor;

pub use codec::{CodecError, SketchFrame, FORMAT_VERSION, MAGIC};
pub use gsampler::GSampler;
pub use kpareto::KParetoFrontier;
pub use pareto::ParetoFrontier;
pub use wor::KMinState;

use std::cmp::Ordering;

use crate::level::{LevelError, LevelTerm, WeightFunction};
use crate::randomness::{fresh_exp, hash_unit, FreshSource, OracleHash};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("update delta must be positive and finite, got {0}")]
    NonPositiveDelta(f64),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("requested {requested} samples from a sketch of capacity {capacity}")]
    KTooLarge { requested: usize, capacity: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("cannot merge sketches built with different {0}")]
    Incompatible(&'static str),
}

/// `x(key) += delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Update {
    pub key: u64,
    pub delta: f64,
}

impl Update {
    pub fn new(key: u64, delta: f64) -> Result<Self, SamplerError> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Update { key, delta })
        } else {
            Err(SamplerError::NonPositiveDelta(delta))
        }
    }

    fn check(&self) -> Result<(), SamplerError> {
        Update::new(self.key, self.delta).map(|_| ())
    }
}

/// A stored `(a, b, key)` with `a = Y / delta` and `b = H(key)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoTuple {
    pub a: f64,
    pub b: f64,
    pub key: u64,
}

impl ParetoTuple {
    fn lex(&self, other: &ParetoTuple) -> Ordering {
        self.a
            .total_cmp(&other.a)
            .then(self.b.total_cmp(&other.b))
            .then(self.key.cmp(&other.key))
    }

    /// Weakly smaller in both coordinates and lexicographically smaller.
    pub fn dominates(&self, other: &ParetoTuple) -> bool {
        self.a <= other.a && self.b <= other.b && self.lex(other) == Ordering::Less
    }
}

/// Ordering on `(value, key)` used for every argmin in the crate.
pub(crate) fn value_key_cmp(x: (f64, u64), y: (f64, u64)) -> Ordering {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1))
}

/// The per-update level value shared by the G-sampler and the WOR sampler:
/// one fresh exponential and one salted hash per term, minimum over terms.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TermEvaluator {
    g: WeightFunction,
    terms: Vec<LevelTerm>,
    hash: OracleHash,
}

impl TermEvaluator {
    pub(crate) fn new(g: WeightFunction, hash: OracleHash) -> Result<Self, SamplerError> {
        let terms = g.terms()?;
        Ok(TermEvaluator { g, terms, hash })
    }

    pub(crate) fn g(&self) -> &WeightFunction {
        &self.g
    }

    pub(crate) fn hash(&self) -> OracleHash {
        self.hash
    }

    pub(crate) fn draws_per_update(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn level(&self, u: &Update, rng: &mut FreshSource) -> Result<f64, SamplerError> {
        u.check()?;
        let mut best = f64::INFINITY;
        for (j, term) in self.terms.iter().enumerate() {
            let y = fresh_exp(rng);
            let h = self.hash.with_salt(self.hash.salt.wrapping_add(j as u32));
            let b = hash_unit(&h, u.key);
            best = best.min(term.eval(y / u.delta, b)?);
        }
        Ok(best)
    }
}
