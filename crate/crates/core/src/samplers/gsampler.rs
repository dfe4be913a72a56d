use super::{value_key_cmp, SamplerError, TermEvaluator, Update};
use crate::level::WeightFunction;
use crate::randomness::{FreshSource, OracleHash};

/// Exact `G`-sampler: a single `(key, h)` pair, replaced whenever an update's
/// level value is smaller.
///
/// `P(key = v) = G(x(v)) / sum_u G(x(u))` and `h ~ Exp(sum_u G(x(u)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GSampler {
    eval: TermEvaluator,
    key_star: Option<u64>,
    h_star: f64,
}

impl GSampler {
    pub fn new(g: WeightFunction, hash: OracleHash) -> Result<Self, SamplerError> {
        Ok(GSampler {
            eval: TermEvaluator::new(g, hash)?,
            key_star: None,
            h_star: f64::INFINITY,
        })
    }

    pub fn g(&self) -> &WeightFunction {
        self.eval.g()
    }

    pub fn hash(&self) -> OracleHash {
        self.eval.hash()
    }

    /// Fresh exponentials consumed per update (one per term of `G`).
    pub fn draws_per_update(&self) -> usize {
        self.eval.draws_per_update()
    }

    pub fn update(&mut self, u: Update, rng: &mut FreshSource) -> Result<(), SamplerError> {
        let t = self.eval.level(&u, rng)?;
        self.offer(u.key, t);
        Ok(())
    }

    fn offer(&mut self, key: u64, t: f64) {
        let replace = match self.key_star {
            None => true,
            Some(k) => value_key_cmp((t, key), (self.h_star, k)).is_lt(),
        };
        if replace {
            self.key_star = Some(key);
            self.h_star = t;
        }
    }

    /// `None` until the first update.
    pub fn query(&self) -> Option<(u64, f64)> {
        self.key_star.map(|k| (k, self.h_star))
    }

    pub fn merge(&mut self, other: &GSampler) -> Result<(), SamplerError> {
        if self.eval != other.eval {
            return Err(SamplerError::Incompatible("weight functions or hashes"));
        }
        if let Some((k, h)) = other.query() {
            self.offer(k, h);
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        g: WeightFunction,
        hash: OracleHash,
        state: Option<(u64, f64)>,
    ) -> Result<Self, SamplerError> {
        let mut s = GSampler::new(g, hash)?;
        if let Some((k, h)) = state {
            s.key_star = Some(k);
            s.h_star = h;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampler(g: WeightFunction) -> GSampler {
        GSampler::new(g, OracleHash::new(11, 0)).unwrap()
    }

    #[test]
    fn empty_then_first_update() {
        let mut s = sampler(WeightFunction::FHalf);
        assert_eq!(s.query(), None);
        let mut rng = FreshSource::new(1);
        s.update(Update::new(9, 2.0).unwrap(), &mut rng).unwrap();
        let (k, h) = s.query().unwrap();
        assert_eq!(k, 9);
        assert!(h.is_finite() && h > 0.0);
    }

    #[test]
    fn h_star_never_increases() {
        let mut s = sampler(WeightFunction::Log);
        let mut rng = FreshSource::new(2);
        let mut last = f64::INFINITY;
        for i in 0..200u64 {
            s.update(Update::new(i % 7, 1.0 + i as f64).unwrap(), &mut rng).unwrap();
            let h = s.query().unwrap().1;
            assert!(h <= last);
            last = h;
        }
    }

    #[test]
    fn merge_identity_and_mismatch() {
        let mut a = sampler(WeightFunction::F1);
        let mut rng = FreshSource::new(3);
        a.update(Update::new(1, 1.0).unwrap(), &mut rng).unwrap();
        let before = a.clone();
        a.merge(&sampler(WeightFunction::F1)).unwrap();
        assert_eq!(a, before);
        assert!(a.merge(&sampler(WeightFunction::F0)).is_err());
    }

    #[test]
    fn composite_draws_one_exponential_per_term() {
        let g: WeightFunction = "sum:c=1,g0=1,atoms=1x2".parse().unwrap();
        let mut s = sampler(g);
        assert_eq!(s.draws_per_update(), 3);
        let mut rng = FreshSource::new(4);
        s.update(Update::new(1, 1.0).unwrap(), &mut rng).unwrap();
        assert_eq!(rng.counter(), 3);
    }
}
