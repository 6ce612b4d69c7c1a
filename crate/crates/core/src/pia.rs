//! Perturbation-iteration with one correction term and first-order Taylor
//! truncation, PIA(1,1).
//!
//! Each equation `D^α u = f(u, t)` is rewritten with an artificial parameter
//! `ε` as
//!
//! ```text
//! ε D^α u + u_n' - ε u_n' - ε f(u, t) = 0
//! ```
//!
//! and the next iterate is sought as `u_{n+1} = u_n + ε u_c`. Expanding to
//! first order in `ε` around `ε = 0` and collecting terms gives
//!
//! ```text
//! u_n' + ε (u_c' + D^α u_n - u_n' - f(u_n, t)) = 0,
//! ```
//!
//! whose solution at `ε = 1` is the correction equation
//!
//! ```text
//! u_c' = f(u_n, t) - D^α u_n,     u_c(0) = 0.
//! ```
//!
//! So every step integrates the residual of the current iterate once, from
//! zero. The zero start keeps `u_{n+1}(0) = u_n(0) = c`. All equations are
//! updated from the same previous row (Jacobi order).

use thiserror::Error;

use crate::fracpoly::{AlgebraError, FracPoly, Limits, DEFAULT_PRUNE_THRESHOLD, DEFAULT_TERM_CAP};
use crate::system::{FdeSystem, ValidationError};

/// Points used for the residual sup-norm diagnostic on `[0, RESIDUAL_T_MAX]`.
pub const RESIDUAL_POINTS: usize = 101;
pub const RESIDUAL_T_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiaConfig {
    pub iterations: usize,
    pub prune_threshold: f64,
    pub term_cap: usize,
}

impl Default for PiaConfig {
    fn default() -> Self {
        PiaConfig {
            iterations: 5,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl PiaConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        PiaConfig {
            iterations,
            ..PiaConfig::default()
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            prune_threshold: self.prune_threshold,
            term_cap: self.term_cap,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.iterations < 1 {
            return Err("iterations must be at least 1".into());
        }
        if self.prune_threshold < 0.0 || !self.prune_threshold.is_finite() {
            return Err("prune_threshold must be a finite number >= 0".into());
        }
        if self.term_cap < 1 {
            return Err("term_cap must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PiaError {
    #[error("invalid system: {}", join(.0))]
    InvalidSystem(Vec<ValidationError>),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration {iteration}, equation {equation}: {source}")]
    Algebra {
        iteration: usize,
        equation: usize,
        #[source]
        source: AlgebraError,
    },
}

fn join(errs: &[ValidationError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// Every iterate from the constant start up to row `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiaSolution {
    /// `iterates[n][k]` is `u_{k+1,n}`.
    pub iterates: Vec<Vec<FracPoly>>,
    /// `residual_norms[n][k]`: sampled sup-norm of the correction right-hand
    /// side computed from row `n` (length `N`).
    pub residual_norms: Vec<Vec<f64>>,
}

impl PiaSolution {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn row(&self, n: usize) -> &[FracPoly] {
        &self.iterates[n]
    }

    pub fn last(&self) -> &[FracPoly] {
        self.iterates.last().expect("row 0 always exists")
    }

    /// `u_{k,n}(t)`, with `k` zero-based.
    pub fn eval(&self, n: usize, k: usize, t: f64) -> Result<f64, AlgebraError> {
        self.iterates[n][k].eval(t)
    }
}

/// `(u_c)'_{k,n} = f_k(u_n, t) - D^{α_k} u_{k,n}`.
pub fn correction_rhs(
    sys: &FdeSystem,
    state: &[FracPoly],
    k: usize,
    limits: &Limits,
) -> Result<FracPoly, AlgebraError> {
    let forcing = sys.rhs[k].substitute(state, limits)?;
    let deriv = limits.caputo_deriv(&state[k], sys.orders[k])?;
    Ok(limits.sub(&forcing, &deriv))
}

/// One Jacobi sweep `u_{k,n+1} = u_{k,n} + ∫_0^t (u_c)'_{k,n}`.
pub fn step(sys: &FdeSystem, state: &[FracPoly], limits: &Limits) -> Result<Vec<FracPoly>, AlgebraError> {
    (0..sys.k())
        .map(|k| update_equation(sys, state, k, limits).map(|(next, _)| next))
        .collect()
}

/// Next iterate of equation `k` together with the residual it integrated.
fn update_equation(
    sys: &FdeSystem,
    state: &[FracPoly],
    k: usize,
    limits: &Limits,
) -> Result<(FracPoly, FracPoly), AlgebraError> {
    let residual = correction_rhs(sys, state, k, limits)?;
    let correction = limits.integrate1(&residual)?;
    let updated = limits.add(&state[k], &correction);
    if updated.len() > limits.term_cap {
        return Err(AlgebraError::TermCap {
            cap: limits.term_cap,
            needed: updated.len(),
        });
    }
    Ok((updated, residual))
}

/// Runs `cfg.iterations` steps from the constant initial state.
pub fn solve(sys: &FdeSystem, cfg: &PiaConfig) -> Result<PiaSolution, PiaError> {
    sys.validate().map_err(PiaError::InvalidSystem)?;
    cfg.validate().map_err(PiaError::InvalidConfig)?;
    let limits = cfg.limits();

    let start: Vec<FracPoly> = sys.init.iter().map(|&c| limits.monomial(c, Default::default())).collect();
    let mut iterates = vec![start];
    let mut residual_norms = Vec::with_capacity(cfg.iterations);
    for n in 0..cfg.iterations {
        let mut next = Vec::with_capacity(sys.k());
        let mut norms = Vec::with_capacity(sys.k());
        for k in 0..sys.k() {
            let (updated, residual) =
                update_equation(sys, &iterates[n], k, &limits).map_err(|source| PiaError::Algebra {
                    iteration: n + 1,
                    equation: k + 1,
                    source,
                })?;
            norms.push(sup_norm(&residual));
            next.push(updated);
        }
        residual_norms.push(norms);
        iterates.push(next);
    }
    Ok(PiaSolution {
        iterates,
        residual_norms,
    })
}

fn sup_norm(p: &FracPoly) -> f64 {
    (0..RESIDUAL_POINTS)
        .map(|i| RESIDUAL_T_MAX * i as f64 / (RESIDUAL_POINTS - 1) as f64)
        .map(|t| p.eval(t).map(f64::abs).unwrap_or(f64::NAN))
        .fold(0.0, f64::max)
}
