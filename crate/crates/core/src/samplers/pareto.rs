use super::{value_key_cmp, ParetoTuple, SamplerError, Update};
use crate::level::WeightFunction;
use crate::randomness::{fresh_exp, hash_unit, FreshSource, OracleHash};

/// Minimum Pareto frontier of `(Y / delta, H(key), key)` over all updates.
///
/// Answers `G`-sampling queries for every single-term `G` at once, since the
/// argmin of any 2D-monotone level function lies on the frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFrontier {
    hash: OracleHash,
    // a strictly ascending, b strictly descending
    tuples: Vec<ParetoTuple>,
}

impl ParetoFrontier {
    pub fn new(hash: OracleHash) -> Self {
        ParetoFrontier {
            hash,
            tuples: Vec::new(),
        }
    }

    pub fn hash(&self) -> OracleHash {
        self.hash
    }

    pub fn tuples(&self) -> &[ParetoTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn update(&mut self, u: Update, rng: &mut FreshSource) -> Result<(), SamplerError> {
        u.check()?;
        let y = fresh_exp(rng);
        let b = hash_unit(&self.hash, u.key);
        self.insert(ParetoTuple {
            a: y / u.delta,
            b,
            key: u.key,
        });
        Ok(())
    }

    /// Adds a tuple and drops whatever it dominates. Returns false if the
    /// tuple was itself dominated (or already present).
    pub fn insert(&mut self, t: ParetoTuple) -> bool {
        let j = self.tuples.partition_point(|e| e.a <= t.a);
        if j > 0 {
            let p = &self.tuples[j - 1];
            if p.dominates(&t) || *p == t {
                return false;
            }
        }
        // everything from `start` on has a >= t.a
        let start = if j > 0 && self.tuples[j - 1].a == t.a {
            j - 1
        } else {
            j
        };
        let end = start
            + self.tuples[start..]
                .iter()
                .take_while(|e| e.b >= t.b)
                .count();
        self.tuples.splice(start..end, std::iter::once(t));
        true
    }

    /// Argmin of `ℓ_G(a, b)` over the frontier, ties broken by key.
    pub fn query(&self, g: &WeightFunction) -> Result<Option<(u64, f64)>, SamplerError> {
        let term = g.single_term()?;
        let mut best: Option<(f64, u64)> = None;
        for t in &self.tuples {
            let v = term.eval(t.a, t.b)?;
            if best.is_none_or(|(bv, bk)| value_key_cmp((v, t.key), (bv, bk)).is_lt()) {
                best = Some((v, t.key));
            }
        }
        Ok(best.map(|(v, k)| (k, v)))
    }

    pub fn merge(&mut self, other: &ParetoFrontier) -> Result<(), SamplerError> {
        if self.hash != other.hash {
            return Err(SamplerError::Incompatible("hash seeds"));
        }
        for &t in &other.tuples {
            self.insert(t);
        }
        Ok(())
    }

    pub(crate) fn from_parts(hash: OracleHash, tuples: Vec<ParetoTuple>) -> Self {
        ParetoFrontier { hash, tuples }
    }

    pub(crate) fn is_canonical(tuples: &[ParetoTuple]) -> bool {
        tuples.windows(2).all(|w| w[0].a < w[1].a && w[0].b > w[1].b)
            && tuples
                .iter()
                .all(|t| t.a > 0.0 && t.a.is_finite() && t.b > 0.0 && t.b < 1.0)
    }
}
