//! Weight functions `G` and their induced level functions `ℓ_G(a, b)`.
//!
//! `ℓ_G(a, b)` is the smallest time `t` at which the subordinator with
//! Laplace exponent `G` satisfies `P(X_t >= a) >= b`. If `Y ~ Exp(λ)` and
//! `U ~ Uniform(0, 1)` are independent then `ℓ_G(Y, U) ~ Exp(G(λ))`.

mod grammar;

pub use grammar::ParseWeightError;

use crate::numerics::{
    inv_erf, ln_gamma, regularized_gamma_p, regularized_gamma_q, solve_from_guess, NumericsError, Tolerance,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LevelError {
    #[error("{param} out of range: {value}")]
    Domain { param: &'static str, value: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("expected {expected} (a, b) pairs, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight function `{0}` has several terms; evaluate it term by term")]
    NotSingleTerm(String),
    #[error("weight function is identically zero")]
    Degenerate,
}

type Result<T> = std::result::Result<T, LevelError>;

/// A weight function in the class realised by killing, drift and finitely
/// many exponential jump atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    /// `1{z > 0}`
    F0,
    /// `z`
    F1,
    /// `sqrt(z)`
    FHalf,
    /// `1 - exp(-tau z)`
    SoftCap { tau: f64 },
    /// `ln(1 + z)`
    Log,
    /// `alpha * inner(z)`
    Scaled {
        alpha: f64,
        inner: Box<WeightFunction>,
    },
    /// `c 1{z > 0} + g0 z + sum_i w_i (1 - exp(-r_i z))`, atoms are `(w_i, r_i)`.
    KilledDriftSum {
        c: f64,
        g0: f64,
        atoms: Vec<(f64, f64)>,
    },
}

/// One of the closed-form or single-solve level functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseLevel {
    F0,
    F1,
    FHalf,
    SoftCap(f64),
    Log,
}

/// `alpha * base`, the unit a composite weight function decomposes into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelTerm {
    pub alpha: f64,
    pub base: BaseLevel,
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(LevelError::Domain { param: "a", value: a });
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(LevelError::Domain { param: "b", value: b });
    }
    Ok(())
}

fn check_positive(param: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LevelError::Domain { param, value })
    }
}

fn check_nonneg(param: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LevelError::Domain { param, value })
    }
}

pub fn eval_f0(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok(-(-b).ln_1p())
}

pub fn eval_f1(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok(a)
}

/// `sqrt(2a) erf^-1(b)`, the level function of the 1/2-stable law `1/Z^2`.
/// That law has Laplace exponent `sqrt(2z)`; see [`eval_fhalf_unit`] for
/// `G(z) = sqrt(z)`.
pub fn eval_fhalf(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok((2.0 * a).sqrt() * inv_erf(b)?)
}

/// Level function of `G(z) = sqrt(z)`: `eval_fhalf` rescaled by `sqrt 2`.
pub fn eval_fhalf_unit(a: f64, b: f64) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * eval_fhalf(a, b)?)
}

/// Poisson index of the soft-cap level function: jumps of size `tau`
/// reach `a` after `ceil(a / tau)` of them.
pub fn softcap_index(tau: f64, a: f64) -> f64 {
    (a / tau).ceil().max(1.0)
}

/// The `w` with `P(Poisson(w) >= ceil(a / tau)) = b`.
pub fn eval_softcap(tau: f64, a: f64, b: f64) -> Result<f64> {
    check_positive("tau", tau)?;
    check_ab(a, b)?;
    let k = softcap_index(tau, a);
    if k == 1.0 {
        return Ok(-(-b).ln_1p());
    }
    let f = |w: f64| regularized_gamma_p(k, w);
    Ok(solve_from_guess(f, b, gamma_quantile_guess(k, b)?, GUESS_SPREAD, Tolerance::default())?)
}

/// The shape `w` with `Q(w, a) = b`.
pub fn eval_log(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    let f = |w: f64| regularized_gamma_q(w, a);
    Ok(solve_from_guess(f, b, gamma_shape_guess(a, b)?, GUESS_SPREAD, Tolerance::default())?)
}

// first bracket step around the starting estimates below
const GUESS_SPREAD: f64 = 0.02;

fn normal_quantile(p: f64) -> Result<f64> {
    let q = (2.0 * p - 1.0).abs().clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    Ok(std::f64::consts::SQRT_2 * inv_erf(q)?.copysign(p - 0.5))
}

/// Approximate `p`-quantile of Gamma(k, 1) (Wilson-Hilferty, with the
/// small-`x` series `P(k, x) ~ x^k / k!` in the far lower tail).
fn gamma_quantile_guess(k: f64, p: f64) -> Result<f64> {
    let z = normal_quantile(p)?;
    let c = 1.0 - 1.0 / (9.0 * k) + z / (3.0 * k.sqrt());
    let series = ((p.ln() + ln_gamma(k + 1.0)?) / k).exp();
    Ok(if c > 0.0 { (k * c * c * c).max(series.min(k)) } else { series })
}

/// Approximate shape `w` with `Q(w, a) = b`: the Wilson-Hilferty relation,
/// polynomial in `t = w^(1/6)`, solved by Newton steps from the normal
/// approximation.
fn gamma_shape_guess(a: f64, b: f64) -> Result<f64> {
    let z = normal_quantile(b)?;
    let root = 0.5 * (z + (z * z + 4.0 * a).sqrt());
    let mut t = root.max(0.03).cbrt();
    let a3 = a.cbrt();
    for _ in 0..4 {
        let t3 = t * t * t;
        let h = 3.0 * a3 * t - 3.0 * t3 + 1.0 / (3.0 * t3) + z;
        let dh = 3.0 * a3 - 9.0 * t * t - 1.0 / (t3 * t);
        let next = t - h / dh;
        t = if next > 0.0 && next.is_finite() { next } else { 0.5 * t };
    }
    let t3 = t * t * t;
    Ok((t3 * t3).max(f64::MIN_POSITIVE))
}

/// Level value of `alpha G` from the level value `t` of `G`.
pub fn eval_scaled(alpha: f64, t: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    Ok(t / alpha)
}

/// Minimum of the per-term level values, one `(a, b)` pair per term of
/// [`WeightFunction::terms`].
pub fn eval_composite(g: &WeightFunction, a_parts: &[f64], b_parts: &[f64]) -> Result<f64> {
    let terms = g.terms()?;
    if a_parts.len() != terms.len() {
        return Err(LevelError::LengthMismatch {
            expected: terms.len(),
            got: a_parts.len(),
        });
    }
    if b_parts.len() != terms.len() {
        return Err(LevelError::LengthMismatch {
            expected: terms.len(),
            got: b_parts.len(),
        });
    }
    let mut best = f64::INFINITY;
    for ((term, &a), &b) in terms.iter().zip(a_parts).zip(b_parts) {
        best = best.min(term.eval(a, b)?);
    }
    Ok(best)
}

impl BaseLevel {
    pub fn eval(&self, a: f64, b: f64) -> Result<f64> {
        match *self {
            BaseLevel::F0 => eval_f0(a, b),
            BaseLevel::F1 => eval_f1(a, b),
            BaseLevel::FHalf => eval_fhalf_unit(a, b),
            BaseLevel::SoftCap(tau) => eval_softcap(tau, a, b),
            BaseLevel::Log => eval_log(a, b),
        }
    }

    pub fn weight(&self, z: f64) -> f64 {
        match *self {
            BaseLevel::F0 => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            BaseLevel::F1 => z,
            BaseLevel::FHalf => z.sqrt(),
            BaseLevel::SoftCap(tau) => -(-tau * z).exp_m1(),
            BaseLevel::Log => z.ln_1p(),
        }
    }
}

impl LevelTerm {
    pub fn eval(&self, a: f64, b: f64) -> Result<f64> {
        eval_scaled(self.alpha, self.base.eval(a, b)?)
    }

    pub fn weight(&self, z: f64) -> f64 {
        self.alpha * self.base.weight(z)
    }
}

impl WeightFunction {
    pub fn softcap(tau: f64) -> Self {
        WeightFunction::SoftCap { tau }
    }

    pub fn scaled(alpha: f64, inner: WeightFunction) -> Self {
        WeightFunction::Scaled {
            alpha,
            inner: Box::new(inner),
        }
    }

    /// The weight functions used throughout the tests and the CLI suites.
    pub fn catalogue() -> Vec<WeightFunction> {
        vec![
            WeightFunction::F0,
            WeightFunction::F1,
            WeightFunction::FHalf,
            WeightFunction::softcap(0.5),
            WeightFunction::softcap(1.0),
            WeightFunction::softcap(2.0),
            WeightFunction::Log,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::F0 | WeightFunction::F1 | WeightFunction::FHalf | WeightFunction::Log => {
                Ok(())
            }
            WeightFunction::SoftCap { tau } => check_positive("tau", *tau),
            WeightFunction::Scaled { alpha, inner } => {
                check_positive("alpha", *alpha)?;
                inner.validate()
            }
            WeightFunction::KilledDriftSum { c, g0, atoms } => {
                check_nonneg("c", *c)?;
                check_nonneg("g0", *g0)?;
                for &(w, r) in atoms {
                    check_positive("atom weight", w)?;
                    check_positive("atom rate", r)?;
                }
                if *c == 0.0 && *g0 == 0.0 && atoms.is_empty() {
                    return Err(LevelError::Degenerate);
                }
                Ok(())
            }
        }
    }

    /// `G(z)` for `z >= 0`.
    pub fn weight(&self, z: f64) -> f64 {
        match self {
            WeightFunction::F0 => BaseLevel::F0.weight(z),
            WeightFunction::F1 => z,
            WeightFunction::FHalf => z.sqrt(),
            WeightFunction::SoftCap { tau } => BaseLevel::SoftCap(*tau).weight(z),
            WeightFunction::Log => z.ln_1p(),
            WeightFunction::Scaled { alpha, inner } => alpha * inner.weight(z),
            WeightFunction::KilledDriftSum { c, g0, atoms } => {
                let jump: f64 = atoms.iter().map(|&(w, r)| -w * (-r * z).exp_m1()).sum();
                let kill = if z > 0.0 { *c } else { 0.0 };
                kill + g0 * z + jump
            }
        }
    }

    /// Decomposition into independently evaluated terms. Zero killing or
    /// drift coefficients contribute no term.
    pub fn terms(&self) -> Result<Vec<LevelTerm>> {
        self.validate()?;
        let mut out = Vec::new();
        self.collect_terms(1.0, &mut out);
        Ok(out)
    }

    fn collect_terms(&self, alpha: f64, out: &mut Vec<LevelTerm>) {
        let push = |out: &mut Vec<LevelTerm>, alpha: f64, base| out.push(LevelTerm { alpha, base });
        match self {
            WeightFunction::F0 => push(out, alpha, BaseLevel::F0),
            WeightFunction::F1 => push(out, alpha, BaseLevel::F1),
            WeightFunction::FHalf => push(out, alpha, BaseLevel::FHalf),
            WeightFunction::SoftCap { tau } => push(out, alpha, BaseLevel::SoftCap(*tau)),
            WeightFunction::Log => push(out, alpha, BaseLevel::Log),
            WeightFunction::Scaled { alpha: a, inner } => inner.collect_terms(alpha * a, out),
            WeightFunction::KilledDriftSum { c, g0, atoms } => {
                if *c > 0.0 {
                    push(out, alpha * c, BaseLevel::F0);
                }
                if *g0 > 0.0 {
                    push(out, alpha * g0, BaseLevel::F1);
                }
                for &(w, r) in atoms {
                    push(out, alpha * w, BaseLevel::SoftCap(r));
                }
            }
        }
    }

    /// The single term of a one-term weight function.
    pub fn single_term(&self) -> Result<LevelTerm> {
        let terms = self.terms()?;
        if terms.len() == 1 {
            Ok(terms[0])
        } else {
            Err(LevelError::NotSingleTerm(self.to_string()))
        }
    }

    /// `ℓ_G(a, b)` for single-term `G`.
    pub fn level(&self, a: f64, b: f64) -> Result<f64> {
        self.single_term()?.eval(a, b)
    }
}
