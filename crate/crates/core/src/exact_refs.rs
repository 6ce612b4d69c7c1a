//! The two benchmark systems, their exact solutions at integer order, and
//! closed forms of their first three iterates for arbitrary orders.
//!
//! Example 1 (linear): `D^α u1 = u1 + u2`, `D^β u2 = -u1 + u2`, `u(0) = (0, 1)`.
//! Example 2 (nonlinear): `D^{α1} u1 = u1/2`, `D^{α2} u2 = u2 + u1²`,
//! `u(0) = (1, 0)`.

use num_rational::Ratio;
use thiserror::Error;

use crate::exponent::Exponent;
use crate::specfun::{gamma, GammaError};
use crate::system::{canonical_form, FdeSystem, RhsExpr, RhsMonomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    One,
    Two,
}

impl Example {
    pub fn number(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Example> {
        match n {
            1 => Some(Example::One),
            2 => Some(Example::Two),
            _ => None,
        }
    }

    pub fn system(self, orders: [Exponent; 2]) -> FdeSystem {
        match self {
            Example::One => example1_system(orders[0], orders[1]),
            Example::Two => example2_system(orders[0], orders[1]),
        }
    }

    /// Iteration count used for the benchmark tables.
    pub fn table_iterations(self) -> usize {
        match self {
            Example::One => 5,
            Example::Two => 4,
        }
    }

    pub fn exact(self, t: f64) -> [f64; 2] {
        match self {
            Example::One => exact_example1(t),
            Example::Two => exact_example2(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GoldenError {
    #[error("closed forms are only available for iterations 1..=3, not {0}")]
    Iteration(usize),
    #[error("component must be 1 or 2, not {0}")]
    Component(usize),
    #[error("order {0} is outside (0, 1]")]
    Order(Exponent),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

pub fn example1_system(alpha: Exponent, beta: Exponent) -> FdeSystem {
    FdeSystem::new(
        vec![alpha, beta],
        vec![
            RhsExpr::new([RhsMonomial::linear(1.0, 0, 2), RhsMonomial::linear(1.0, 1, 2)]),
            RhsExpr::new([RhsMonomial::linear(-1.0, 0, 2), RhsMonomial::linear(1.0, 1, 2)]),
        ],
        vec![0.0, 1.0],
    )
}

pub fn example2_system(alpha1: Exponent, alpha2: Exponent) -> FdeSystem {
    FdeSystem::new(
        vec![alpha1, alpha2],
        vec![
            RhsExpr::new([RhsMonomial::linear(0.5, 0, 2)]),
            RhsExpr::new([
                RhsMonomial::linear(1.0, 1, 2),
                RhsMonomial::new(1.0, Exponent::ZERO, vec![2, 0]),
            ]),
        ],
        vec![1.0, 0.0],
    )
}

/// `(e^t sin t, e^t cos t)`
pub fn exact_example1(t: f64) -> [f64; 2] {
    let e = t.exp();
    [e * t.sin(), e * t.cos()]
}

/// `(e^{t/2}, t e^t)`
pub fn exact_example2(t: f64) -> [f64; 2] {
    [(0.5 * t).exp(), t * t.exp()]
}

/// A named benchmark with its exact solution, known only at unit orders.
#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub name: &'static str,
    pub example: Example,
    pub system: FdeSystem,
    pub exact: Option<fn(f64) -> [f64; 2]>,
}

impl ReferenceCase {
    pub fn new(example: Example, orders: [Exponent; 2]) -> Self {
        let unit = orders.iter().all(|&o| o == Exponent::ONE);
        let (name, exact): (_, fn(f64) -> [f64; 2]) = match example {
            Example::One => ("example1", exact_example1),
            Example::Two => ("example2", exact_example2),
        };
        ReferenceCase {
            name,
            example,
            system: example.system(orders),
            exact: unit.then_some(exact),
        }
    }

    pub fn golden(&self, n: usize, k: usize, t: f64) -> Result<f64, GoldenError> {
        golden_iterate(self.example, n, k, [self.system.orders[0], self.system.orders[1]], t)
    }
}

/// Recognises a benchmark system (any orders, any monomial order).
pub fn identify(sys: &FdeSystem) -> Option<ReferenceCase> {
    if sys.k() != 2 {
        return None;
    }
    let orders = [sys.orders[0], sys.orders[1]];
    [Example::One, Example::Two].into_iter().find_map(|ex| {
        let candidate = ex.system(orders);
        let same_rhs = candidate
            .rhs
            .iter()
            .zip(&sys.rhs)
            .all(|(a, b)| canonical_form(a) == canonical_form(b));
        (same_rhs && candidate.init == sys.init).then(|| ReferenceCase::new(ex, orders))
    })
}

fn g(x: Ratio<i64>) -> Result<f64, GammaError> {
    gamma(x)
}

/// `a - b·order` as an exact rational.
fn shifted(a: i64, b: i64, order: Exponent) -> Ratio<i64> {
    Ratio::from_integer(a) - order.ratio() * b
}

/// Closed form of iterate `n` (1..=3), component `k` (1 or 2), evaluated at
/// `t` for the given orders `[α, β]` (or `[α1, α2]`).
pub fn golden_iterate(
    example: Example,
    n: usize,
    k: usize,
    orders: [Exponent; 2],
    t: f64,
) -> Result<f64, GoldenError> {
    if !(1..=3).contains(&n) {
        return Err(GoldenError::Iteration(n));
    }
    if !(1..=2).contains(&k) {
        return Err(GoldenError::Component(k));
    }
    for &o in &orders {
        if o.is_zero() || o > Exponent::ONE {
            return Err(GoldenError::Order(o));
        }
    }
    let pw = |x: Ratio<i64>| -> f64 {
        let e = crate::specfun::ratio_to_f64(x);
        if e == 0.0 {
            1.0
        } else {
            t.powf(e)
        }
    };
    match example {
        Example::One => {
            let (a, b) = (orders[0], orders[1]);
            let (af, bf) = (a.to_f64(), b.to_f64());
            Ok(match (n, k) {
                (1, 1) => t,
                (1, 2) => 1.0 + t,
                (2, 1) => t * (2.0 + t - pw(shifted(1, 1, a)) / g(shifted(3, 1, a))?),
                (2, 2) => 1.0 + 2.0 * t - pw(shifted(2, 1, b)) / g(shifted(3, 1, b))?,
                (3, 1) => {
                    t / 3.0
                        * (9.0 + t * (9.0 + t) + 3.0 * pw(shifted(2, 2, a)) / g(shifted(4, 2, a))?
                            - 9.0 * pw(shifted(1, 1, a)) * (3.0 + t - af) / g(shifted(4, 1, a))?
                            - 3.0 * pw(shifted(2, 1, b)) / g(shifted(4, 1, b))?)
                }
                _ => {
                    1.0 + 3.0 * t - t.powi(3) / 3.0 + pw(shifted(3, 1, a)) / g(shifted(4, 1, a))?
                        + pw(shifted(2, 2, b))
                            * (t / g(shifted(4, 2, b))?
                                - pw(b.ratio()) * (9.0 + t - 3.0 * bf) / g(shifted(4, 1, b))?)
                }
            })
        }
        Example::Two => {
            let (a1, a2) = (orders[0], orders[1]);
            let (a1f, a2f) = (a1.to_f64(), a2.to_f64());
            Ok(match (n, k) {
                (1, 1) => 1.0 + t / 2.0,
                (1, 2) => t,
                (2, 1) => {
                    (8.0 + 8.0 * t
                        + t * t
                        + 4.0 * pw(shifted(2, 1, a1)) / (g(shifted(2, 1, a1))? * (a1f - 2.0)))
                        / 8.0
                }
                (2, 2) => {
                    2.0 * t + t * t + t.powi(3) / 12.0
                        + pw(shifted(2, 1, a2)) / (g(shifted(2, 1, a2))? * (a2f - 2.0))
                }
                (3, 1) => {
                    (48.0 + 72.0 * t + 18.0 * t * t + t.powi(3)
                        + 24.0 * pw(shifted(3, 2, a1)) / g(shifted(4, 2, a1))?
                        - 24.0 * pw(shifted(2, 1, a1)) * (9.0 + t - 3.0 * a1f) / g(shifted(4, 1, a1))?)
                        / 48.0
                }
                _ => {
                    let g3 = g(shifted(3, 1, a1))?;
                    let poly_a1 = 4.0 * (40.0 + 3.0 * t * (10.0 + t))
                        + a1f * (-72.0 - t * (64.0 + 7.0 * t) + (8.0 + t * (8.0 + t)) * a1f);
                    3.0 * t + 3.0 * t * t + 5.0 * t.powi(3) / 6.0 + t.powi(4) / 12.0 + t.powi(5) / 320.0
                        + pw(shifted(3, 2, a2)) / g(shifted(4, 2, a2))?
                        - pw(shifted(5, 2, a1)) / (4.0 * g3 * g3 * (2.0 * a1f - 5.0))
                        - pw(shifted(3, 1, a1)) * poly_a1 / (8.0 * g(shifted(6, 1, a1))?)
                        - pw(shifted(2, 1, a2)) * (72.0 + t * (24.0 + t) + 6.0 * a2f * (-7.0 - t + a2f))
                            / (2.0 * g(shifted(5, 1, a2))?)
                }
            })
        }
    }
}
