use super::{value_key_cmp, SamplerError, TermEvaluator, Update};
use crate::level::WeightFunction;
use crate::randomness::{FreshSource, OracleHash};

/// `(G, k)` sampler without replacement: the `k` keys with the smallest
/// per-key minimum level value.
#[derive(Debug, Clone, PartialEq)]
pub struct KMinState {
    eval: TermEvaluator,
    k: usize,
    // (key, h) sorted by (h, key), distinct keys
    entries: Vec<(u64, f64)>,
}

impl KMinState {
    pub fn new(g: WeightFunction, k: usize, hash: OracleHash) -> Result<Self, SamplerError> {
        if k == 0 {
            return Err(SamplerError::ZeroK);
        }
        Ok(KMinState {
            eval: TermEvaluator::new(g, hash)?,
            k,
            entries: Vec::with_capacity(k),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g(&self) -> &WeightFunction {
        self.eval.g()
    }

    pub fn hash(&self) -> OracleHash {
        self.eval.hash()
    }

    pub fn draws_per_update(&self) -> usize {
        self.eval.draws_per_update()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn update(&mut self, u: Update, rng: &mut FreshSource) -> Result<(), SamplerError> {
        let t = self.eval.level(&u, rng)?;
        self.offer(u.key, t);
        Ok(())
    }

    fn offer(&mut self, key: u64, h: f64) {
        if let Some(i) = self.entries.iter().position(|e| e.0 == key) {
            if value_key_cmp((h, key), (self.entries[i].1, key)).is_ge() {
                return;
            }
            self.entries.remove(i);
        } else if self.entries.len() == self.k {
            let last = self.entries[self.k - 1];
            if value_key_cmp((h, key), (last.1, last.0)).is_ge() {
                return;
            }
        }
        let pos = self
            .entries
            .partition_point(|e| value_key_cmp((e.1, e.0), (h, key)).is_lt());
        self.entries.insert(pos, (key, h));
        self.entries.truncate(self.k);
    }

    /// Keys ordered by level value; shorter than `k` if fewer keys were seen.
    pub fn sample_ordered(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn merge(&mut self, other: &KMinState) -> Result<(), SamplerError> {
        if self.eval != other.eval {
            return Err(SamplerError::Incompatible("weight functions or hashes"));
        }
        if self.k != other.k {
            return Err(SamplerError::Incompatible("k"));
        }
        for &(key, h) in &other.entries {
            self.offer(key, h);
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        g: WeightFunction,
        k: usize,
        hash: OracleHash,
        entries: Vec<(u64, f64)>,
    ) -> Result<Self, SamplerError> {
        let mut s = KMinState::new(g, k, hash)?;
        s.entries = entries;
        Ok(s)
    }

    pub(crate) fn is_canonical(k: usize, entries: &[(u64, f64)]) -> bool {
        let mut keys: Vec<u64> = entries.iter().map(|e| e.0).collect();
        keys.sort_unstable();
        keys.dedup();
        entries.len() <= k
            && keys.len() == entries.len()
            && entries.iter().all(|e| e.1 >= 0.0 && e.1.is_finite())
            && entries
                .windows(2)
                .all(|w| value_key_cmp((w[0].1, w[0].0), (w[1].1, w[1].0)).is_lt())
    }
}
