use super::{value_key_cmp, ParetoTuple, SamplerError, Update};
use crate::level::WeightFunction;
use crate::randomness::{fresh_exp, hash_unit, FreshSource, OracleHash};

/// Minimum k-Pareto frontier: per key the smallest-`a` tuple, kept only
/// while at most `k - 1` other retained tuples dominate it.
///
/// Answers ordered `(G, j)` without-replacement queries for any single-term
/// `G` and any `j <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KParetoFrontier {
    hash: OracleHash,
    k: usize,
    // sorted by (a, b, key); dominators[i] counts tuples dominating tuples[i]
    tuples: Vec<ParetoTuple>,
    dominators: Vec<usize>,
}

impl KParetoFrontier {
    pub fn new(k: usize, hash: OracleHash) -> Result<Self, SamplerError> {
        if k == 0 {
            return Err(SamplerError::ZeroK);
        }
        Ok(KParetoFrontier {
            hash,
            k,
            tuples: Vec::new(),
            dominators: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
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

    pub fn insert(&mut self, t: ParetoTuple) -> bool {
        if let Some(i) = self.tuples.iter().position(|e| e.key == t.key) {
            let old = self.tuples[i];
            if !t.dominates(&old) {
                return false;
            }
            self.tuples.remove(i);
            self.dominators.remove(i);
            // t re-dominates all of these below
            for (e, d) in self.tuples.iter().zip(self.dominators.iter_mut()) {
                if old.dominates(e) {
                    *d -= 1;
                }
            }
        }
        let count = self.tuples.iter().filter(|e| e.dominates(&t)).count();
        if count >= self.k {
            return false;
        }
        for (e, d) in self.tuples.iter().zip(self.dominators.iter_mut()) {
            if t.dominates(e) {
                *d += 1;
            }
        }
        let pos = self.tuples.partition_point(|e| e.lex(&t).is_lt());
        self.tuples.insert(pos, t);
        self.dominators.insert(pos, count);
        let k = self.k;
        let mut i = 0;
        self.tuples.retain(|_| {
            let keep = self.dominators[i] < k;
            i += 1;
            keep
        });
        self.dominators.retain(|&d| d < k);
        true
    }

    /// The `j` keys with the smallest `ℓ_G`, ascending, with their values.
    pub fn query(&self, g: &WeightFunction, j: usize) -> Result<Vec<(u64, f64)>, SamplerError> {
        if j > self.k {
            return Err(SamplerError::KTooLarge {
                requested: j,
                capacity: self.k,
            });
        }
        let term = g.single_term()?;
        let mut scored = Vec::with_capacity(self.tuples.len());
        for t in &self.tuples {
            scored.push((t.key, term.eval(t.a, t.b)?));
        }
        scored.sort_by(|x, y| value_key_cmp((x.1, x.0), (y.1, y.0)));
        scored.truncate(j);
        Ok(scored)
    }

    pub fn merge(&mut self, other: &KParetoFrontier) -> Result<(), SamplerError> {
        if self.hash != other.hash {
            return Err(SamplerError::Incompatible("hash seeds"));
        }
        if self.k != other.k {
            return Err(SamplerError::Incompatible("k"));
        }
        for &t in &other.tuples {
            self.insert(t);
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        k: usize,
        hash: OracleHash,
        tuples: Vec<ParetoTuple>,
    ) -> Result<Self, SamplerError> {
        let mut f = KParetoFrontier::new(k, hash)?;
        f.dominators = tuples
            .iter()
            .map(|t| tuples.iter().filter(|e| e.dominates(t)).count())
            .collect();
        f.tuples = tuples;
        Ok(f)
    }

    pub(crate) fn is_canonical(k: usize, tuples: &[ParetoTuple]) -> bool {
        let mut keys: Vec<u64> = tuples.iter().map(|t| t.key).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len() == tuples.len()
            && tuples.windows(2).all(|w| w[0].lex(&w[1]).is_lt())
            && tuples
                .iter()
                .all(|t| t.a > 0.0 && t.a.is_finite() && t.b > 0.0 && t.b < 1.0)
            && tuples
                .iter()
                .all(|t| tuples.iter().filter(|e| e.dominates(t)).count() < k)
    }
}
