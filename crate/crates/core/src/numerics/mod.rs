//! Special functions and a scalar root finder.

mod erf;
mod gamma;
mod solve;

pub use erf::{erf, erfc, inv_erf};
pub use gamma::{ln_gamma, poisson_tail, regularized_gamma_p, regularized_gamma_q};
pub use solve::{bracket_increasing, solve_from_guess, solve_monotone_increasing};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("{what} (got {value})")]
    Domain { what: &'static str, value: f64 },
    #[error("interval [{lo}, {hi}] does not bracket the target")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// Stopping rule for [`solve_monotone_increasing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-12,
            abs: 1e-15,
            max_iter: 200,
        }
    }
}
