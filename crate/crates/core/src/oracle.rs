//! Exact target distributions and goodness-of-fit tests.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::level::WeightFunction;
use crate::numerics::{bracket_increasing, regularized_gamma_q, solve_monotone_increasing, NumericsError, Tolerance};
use crate::randomness::{derive_seed, FreshSource, OracleHash};
use crate::samplers::{ParetoFrontier, Update};

pub const DEFAULT_ALPHA: f64 = 0.01;

const MAX_WOR_SUPPORT: usize = 8;
const MAX_WOR_K: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("empty support")]
    Empty,
    #[error("mass for key {0} must be positive and finite")]
    BadMass(u64),
    #[error("k = {k} exceeds support size {support}")]
    KTooLarge { k: usize, support: usize },
    #[error("exact enumeration limited to support <= {MAX_WOR_SUPPORT} and k <= {MAX_WOR_K}")]
    TooLarge,
    #[error("all weights are zero")]
    ZeroWeight,
    #[error("undersampled: {0}")]
    Undersampled(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Probabilities over a finite set of identifiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDistribution {
    pub support: Vec<u64>,
    pub probs: Vec<f64>,
}

impl ExactDistribution {
    fn from_weights(support: Vec<u64>, weights: Vec<f64>) -> Result<Self, OracleError> {
        if support.is_empty() {
            return Err(OracleError::Empty);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(OracleError::ZeroWeight);
        }
        let probs = weights.iter().map(|w| w / total).collect();
        Ok(ExactDistribution { support, probs })
    }

    pub fn prob(&self, key: u64) -> f64 {
        self.support
            .iter()
            .position(|&k| k == key)
            .map_or(0.0, |i| self.probs[i])
    }
}

fn check_masses(x: &[(u64, f64)]) -> Result<(), OracleError> {
    if x.is_empty() {
        return Err(OracleError::Empty);
    }
    for &(k, m) in x {
        if !(m > 0.0 && m.is_finite()) {
            return Err(OracleError::BadMass(k));
        }
    }
    Ok(())
}

/// `P(v) = G(x(v)) / sum_u G(x(u))`.
pub fn exact_distribution(x: &[(u64, f64)], g: &WeightFunction) -> Result<ExactDistribution, OracleError> {
    check_masses(x)?;
    ExactDistribution::from_weights(
        x.iter().map(|e| e.0).collect(),
        x.iter().map(|e| g.weight(e.1)).collect(),
    )
}

/// Probability of every ordered `k`-tuple of distinct keys under sequential
/// sampling without replacement proportional to `G(x(v))`.
pub fn exact_wor_distribution(
    x: &[(u64, f64)],
    g: &WeightFunction,
    k: usize,
) -> Result<BTreeMap<Vec<u64>, f64>, OracleError> {
    check_masses(x)?;
    if k == 0 || k > x.len() {
        return Err(OracleError::KTooLarge { k, support: x.len() });
    }
    if x.len() > MAX_WOR_SUPPORT || k > MAX_WOR_K {
        return Err(OracleError::TooLarge);
    }
    let weights: Vec<f64> = x.iter().map(|e| g.weight(e.1)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(OracleError::ZeroWeight);
    }
    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(k);
    enumerate(x, &weights, total, k, 1.0, &mut prefix, &mut out);
    Ok(out)
}

fn enumerate(
    x: &[(u64, f64)],
    weights: &[f64],
    remaining: f64,
    k: usize,
    p: f64,
    prefix: &mut Vec<usize>,
    out: &mut BTreeMap<Vec<u64>, f64>,
) {
    if prefix.len() == k {
        out.insert(prefix.iter().map(|&i| x[i].0).collect(), p);
        return;
    }
    for i in 0..x.len() {
        if prefix.contains(&i) {
            continue;
        }
        let q = if remaining > 0.0 { weights[i] / remaining } else { 0.0 };
        prefix.push(i);
        enumerate(x, weights, remaining - weights[i], k, p * q, prefix, out);
        prefix.pop();
    }
}

/// Probability of each edge (identified by its index) proportional to
/// `weight` of its endpoint masses; vertices absent from `x` have mass 0.
pub fn exact_edge_distribution(
    edges: &[Vec<u64>],
    x: &BTreeMap<u64, f64>,
    weight: impl Fn(&[f64]) -> f64,
) -> Result<ExactDistribution, OracleError> {
    let weights: Vec<f64> = edges
        .iter()
        .map(|e| {
            let masses: Vec<f64> = e.iter().map(|v| x.get(v).copied().unwrap_or(0.0)).collect();
            weight(&masses)
        })
        .collect();
    ExactDistribution::from_weights((0..edges.len() as u64).collect(), weights)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub threshold: f64,
    pub degrees_of_freedom: usize,
    pub pass: bool,
    pub sample_count: u64,
    pub alpha: f64,
}

/// Per-test significance for `m` simultaneous tests at family level `alpha`.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    alpha / m.max(1) as f64
}

/// Upper `alpha` quantile of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: usize, alpha: f64) -> Result<f64, OracleError> {
    let s = dof as f64 / 2.0;
    // Q(s, x/2) decreases in x; solve 1 - Q = 1 - alpha
    let f = |x: f64| regularized_gamma_q(s, x / 2.0).map(|q| 1.0 - q);
    let (lo, hi) = bracket_increasing(f, 1.0 - alpha, dof.max(1) as f64)?;
    Ok(solve_monotone_increasing(f, 1.0 - alpha, lo, hi, Tolerance::default())?)
}

/// Pearson chi-square test of observed counts against `expected`.
///
/// Counts on keys of zero expected probability, or outside the support,
/// make the statistic infinite.
pub fn chi_square_gof(
    counts: &BTreeMap<u64, u64>,
    expected: &ExactDistribution,
    alpha: f64,
) -> Result<GofReport, OracleError> {
    let n: u64 = counts.values().sum();
    let live: Vec<(u64, f64)> = expected
        .support
        .iter()
        .zip(&expected.probs)
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, p)| (*k, *p))
        .collect();
    if live.len() < 2 {
        return Err(OracleError::Undersampled("fewer than two cells".into()));
    }
    if n < 50 * live.len() as u64 {
        return Err(OracleError::Undersampled(format!(
            "{n} samples for {} cells, need {}",
            live.len(),
            50 * live.len()
        )));
    }
    if let Some((k, p)) = live.iter().find(|(_, p)| p * (n as f64) < 5.0) {
        return Err(OracleError::Undersampled(format!(
            "expected count {} for key {k} is below 5",
            p * n as f64
        )));
    }
    let mut stat = 0.0;
    for &(k, p) in &live {
        let e = p * n as f64;
        let o = counts.get(&k).copied().unwrap_or(0) as f64;
        stat += (o - e) * (o - e) / e;
    }
    if counts
        .iter()
        .any(|(k, &c)| c > 0 && !live.iter().any(|(lk, _)| lk == k))
    {
        stat = f64::INFINITY;
    }
    let dof = live.len() - 1;
    let threshold = chi_square_critical(dof, alpha)?;
    Ok(GofReport {
        statistic: stat,
        threshold,
        degrees_of_freedom: dof,
        pass: stat <= threshold,
        sample_count: n,
        alpha,
    })
}

// P(K > lambda) for the Kolmogorov distribution
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `K_alpha` with `P(K > K_alpha) = alpha`.
pub fn kolmogorov_critical(alpha: f64) -> Result<f64, OracleError> {
    let f = |l: f64| Ok(1.0 - kolmogorov_tail(l));
    // lower end keeps the series in its accurate region
    Ok(solve_monotone_increasing(f, 1.0 - alpha, 0.3, 5.0, Tolerance::default())?)
}

/// One-sample Kolmogorov-Smirnov test against `Exp(rate)`.
pub fn ks_test_exponential(samples: &[f64], rate: f64, alpha: f64) -> Result<GofReport, OracleError> {
    if samples.len() < 1000 {
        return Err(OracleError::Undersampled(format!(
            "{} samples, need at least 1000",
            samples.len()
        )));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() };
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    let sn = n.sqrt();
    let threshold = kolmogorov_critical(alpha)? / (sn + 0.12 + 0.11 / sn);
    Ok(GofReport {
        statistic: d,
        threshold,
        degrees_of_freedom: 0,
        pass: d <= threshold,
        sample_count: xs.len() as u64,
        alpha,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierStats {
    pub mean: f64,
    pub max: usize,
    pub std_error: f64,
}

/// Final Pareto-frontier size after one unit update for each of `n` keys,
/// over `trials` independent seeds derived from `seed`.
pub fn frontier_size_stats(n: u64, trials: u64, seed: u128) -> FrontierStats {
    let sizes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t);
            let mut f = ParetoFrontier::new(OracleHash::new(s, 0));
            let mut rng = FreshSource::new(s);
            for key in 0..n {
                f.update(Update { key, delta: 1.0 }, &mut rng)
                    .expect("unit delta is valid");
            }
            f.len()
        })
        .collect();
    let m = sizes.len().max(1) as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / m;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    FrontierStats {
        mean,
        max: sizes.iter().copied().max().unwrap_or(0),
        std_error: (var / m).sqrt(),
    }
}

/// `1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}
