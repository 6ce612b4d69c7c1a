//! Fractional Adams–Bashforth–Moulton predictor–corrector on a uniform grid.
//!
//! Works straight from the Volterra form
//! `u(t) = u(0) + J^α f(u, t)`: the predictor uses product-rectangle weights,
//! the corrector product-trapezoidal weights, one corrector pass per step.
//! Independent of the fractional-polynomial machinery, so it can referee the
//! iteration at orders where no closed form is known.

use thiserror::Error;

use crate::specfun::gamma;
use crate::system::{FdeSystem, ValidationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid system: {0:?}")]
    InvalidSystem(Vec<ValidationError>),
    #[error("t_end must be positive and finite, got {0}")]
    BadEnd(f64),
    #[error("need at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("solution blew up at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },
    #[error("self-convergence check failed: {steps} vs {} steps differ by {difference:e} (tolerance {tolerance:e})", 2 * .steps)]
    NotConverged {
        steps: usize,
        difference: f64,
        tolerance: f64,
    },
}

/// States on an ascending grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub t_grid: Vec<f64>,
    /// `values[i][k]` is `u_k(t_grid[i])`.
    pub values: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn k(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn t_end(&self) -> f64 {
        *self.t_grid.last().unwrap_or(&0.0)
    }

    /// Linear interpolation of component `k`; `None` outside the grid.
    pub fn value_at(&self, t: f64, k: usize) -> Option<f64> {
        let n = self.t_grid.len();
        if n == 0 || t < 0.0 || t > self.t_end() * (1.0 + 1e-12) {
            return None;
        }
        let h = self.t_end() / (n - 1) as f64;
        let pos = t / h;
        let i = (pos.floor() as usize).min(n - 1);
        if i == n - 1 || (pos - i as f64) == 0.0 {
            return Some(self.values[i][k]);
        }
        let w = pos - i as f64;
        Some((1.0 - w) * self.values[i][k] + w * self.values[i + 1][k])
    }

    /// Max difference to a finer run whose grid contains this one.
    pub fn max_difference_to_refinement(&self, fine: &GridSolution) -> f64 {
        let ratio = (fine.t_grid.len() - 1) / (self.t_grid.len() - 1);
        self.values
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                let other = &fine.values[i * ratio];
                row.iter().zip(other).map(|(a, b)| (a - b).abs())
            })
            .fold(0.0, f64::max)
    }
}

struct Weights {
    /// `h^α / Γ(α+1)`
    predictor_scale: f64,
    /// `h^α / Γ(α+2)`
    corrector_scale: f64,
    /// `(m+1)^α - m^α`
    rect: Vec<f64>,
    /// `m^{α+1}` for m = 0..=steps+1
    pow1: Vec<f64>,
    /// `m^α` for m = 0..=steps+1
    pow0: Vec<f64>,
    alpha: f64,
}

impl Weights {
    fn new(alpha: f64, h: f64, steps: usize) -> Self {
        let pow0: Vec<f64> = (0..=steps + 1).map(|m| (m as f64).powf(alpha)).collect();
        let pow1: Vec<f64> = (0..=steps + 1).map(|m| (m as f64).powf(alpha + 1.0)).collect();
        let rect = (0..=steps).map(|m| pow0[m + 1] - pow0[m]).collect();
        Weights {
            predictor_scale: h.powf(alpha) / gamma(alpha + 1.0).expect("alpha > 0"),
            corrector_scale: h.powf(alpha) / gamma(alpha + 2.0).expect("alpha > 0"),
            rect,
            pow1,
            pow0,
            alpha,
        }
    }

    /// Trapezoidal weight of node `j` when stepping to `n + 1`.
    fn trap(&self, j: usize, n: usize) -> f64 {
        if j == 0 {
            let nf = n as f64;
            self.pow1[n] - (nf - self.alpha) * self.pow0[n + 1]
        } else {
            let m = n - j;
            self.pow1[m + 2] + self.pow1[m] - 2.0 * self.pow1[m + 1]
        }
    }
}

/// Integrates `sys` on `[0, t_end]` with `steps` uniform steps.
pub fn abm_solve(sys: &FdeSystem, t_end: f64, steps: usize) -> Result<GridSolution, OracleError> {
    sys.validate().map_err(OracleError::InvalidSystem)?;
    if t_end <= 0.0 || !t_end.is_finite() {
        return Err(OracleError::BadEnd(t_end));
    }
    if steps < 2 {
        return Err(OracleError::TooFewSteps(steps));
    }
    let k = sys.k();
    let h = t_end / steps as f64;
    let t_grid: Vec<f64> = (0..=steps).map(|i| t_end * i as f64 / steps as f64).collect();
    let weights: Vec<Weights> = sys.orders.iter().map(|a| Weights::new(a.to_f64(), h, steps)).collect();

    let mut values = Vec::with_capacity(steps + 1);
    values.push(sys.init.clone());
    // f history, one column per equation
    let mut hist: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); k];
    let mut f = vec![0.0; k];
    sys.eval_rhs(0.0, &sys.init, &mut f);
    for (col, v) in hist.iter_mut().zip(&f) {
        col.push(*v);
    }

    let mut pred = vec![0.0; k];
    let mut corr = vec![0.0; k];
    let mut f_pred = vec![0.0; k];
    for n in 0..steps {
        for (c, w) in weights.iter().enumerate() {
            let sum: f64 = hist[c]
                .iter()
                .enumerate()
                .map(|(j, fj)| w.rect[n - j] * fj)
                .sum();
            pred[c] = sys.init[c] + w.predictor_scale * sum;
        }
        sys.eval_rhs(t_grid[n + 1], &pred, &mut f_pred);
        for (c, w) in weights.iter().enumerate() {
            let sum: f64 = hist[c]
                .iter()
                .enumerate()
                .map(|(j, fj)| w.trap(j, n) * fj)
                .sum();
            corr[c] = sys.init[c] + w.corrector_scale * (f_pred[c] + sum);
        }
        if corr.iter().any(|v| !v.is_finite()) {
            return Err(OracleError::Divergence {
                step: n + 1,
                t: t_grid[n + 1],
            });
        }
        sys.eval_rhs(t_grid[n + 1], &corr, &mut f);
        for (col, v) in hist.iter_mut().zip(&f) {
            col.push(*v);
        }
        values.push(corr.clone());
    }
    Ok(GridSolution { t_grid, values })
}

/// Runs `steps` and `2 * steps` and returns the finer solution if both agree
/// on the shared nodes within `tolerance`.
pub fn self_converged(
    sys: &FdeSystem,
    t_end: f64,
    steps: usize,
    tolerance: f64,
) -> Result<(GridSolution, f64), OracleError> {
    let coarse = abm_solve(sys, t_end, steps)?;
    let fine = abm_solve(sys, t_end, 2 * steps)?;
    let difference = coarse.max_difference_to_refinement(&fine);
    if difference > tolerance {
        return Err(OracleError::NotConverged {
            steps,
            difference,
            tolerance,
        });
    }
    Ok((fine, difference))
}
