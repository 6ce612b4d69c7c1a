//! Systems `D^{α_k} u_k = f_k(u_1, …, u_K, t)` whose right-hand sides are
//! polynomials in the state with `t^p` coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::exponent::Exponent;
use crate::fracpoly::{power, AlgebraError, FracPoly, Limits};

/// `coeff · t^t_exp · Π_j u_j^{powers[j]}`
#[derive(Debug, Clone, PartialEq)]
pub struct RhsMonomial {
    pub coeff: f64,
    pub t_exp: Exponent,
    pub powers: Vec<u32>,
}

impl RhsMonomial {
    pub fn new(coeff: f64, t_exp: Exponent, powers: Vec<u32>) -> Self {
        RhsMonomial {
            coeff,
            t_exp,
            powers,
        }
    }

    /// `coeff · u_index` in a system of size `k`.
    pub fn linear(coeff: f64, index: usize, k: usize) -> Self {
        let mut powers = vec![0; k];
        powers[index] = 1;
        RhsMonomial::new(coeff, Exponent::ZERO, powers)
    }
}

/// A right-hand side: a sum of monomials, none sharing both `t_exp` and
/// `powers`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RhsExpr {
    monomials: Vec<RhsMonomial>,
}

impl RhsExpr {
    /// Merges monomials with identical `t_exp` and `powers`, keeping the order
    /// of first appearance. Monomials whose coefficients cancel to zero are
    /// dropped.
    pub fn new(monomials: impl IntoIterator<Item = RhsMonomial>) -> Self {
        let mut merged: Vec<RhsMonomial> = Vec::new();
        for m in monomials {
            match merged
                .iter_mut()
                .find(|x| x.t_exp == m.t_exp && x.powers == m.powers)
            {
                Some(x) => x.coeff += m.coeff,
                None => merged.push(m),
            }
        }
        merged.retain(|m| m.coeff != 0.0);
        RhsExpr { monomials: merged }
    }

    pub fn monomials(&self) -> &[RhsMonomial] {
        &self.monomials
    }

    pub fn plus(&self, other: &RhsExpr) -> RhsExpr {
        RhsExpr::new(self.monomials.iter().chain(&other.monomials).cloned())
    }

    /// Composes with fractional-polynomial states.
    pub fn substitute(&self, state: &[FracPoly], limits: &Limits) -> Result<FracPoly, AlgebraError> {
        let mut total = FracPoly::zero();
        for m in &self.monomials {
            let mut term = limits.monomial(m.coeff, m.t_exp);
            for (j, &e) in m.powers.iter().enumerate() {
                if e == 0 || term.is_empty() {
                    continue;
                }
                // repeated multiplication; the powers here are tiny
                for _ in 0..e {
                    term = limits.mul(&term, &state[j])?;
                }
            }
            total = limits.add(&total, &term);
        }
        if total.len() > limits.term_cap {
            return Err(AlgebraError::TermCap {
                cap: limits.term_cap,
                needed: total.len(),
            });
        }
        Ok(total)
    }

    /// Numeric value at time `t` for scalar states.
    pub fn eval(&self, t: f64, state: &[f64]) -> f64 {
        self.monomials
            .iter()
            .map(|m| {
                let mut v = m.coeff * power(t, m.t_exp);
                for (j, &e) in m.powers.iter().enumerate() {
                    v *= state[j].powi(e as i32);
                }
                v
            })
            .sum()
    }
}

impl fmt::Display for RhsExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coeff)?;
            if !m.t_exp.is_zero() {
                write!(f, "*t^({})", m.t_exp)?;
            }
            for (j, &e) in m.powers.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*u{}", j + 1)?,
                    _ => write!(f, "*u{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("system must have at least one equation")]
    Empty,
    #[error("expected {expected} {what}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("order of equation {equation} is {order}, outside (0, 1]")]
    OrderOutOfRange { equation: usize, order: Exponent },
    #[error("equation {equation}, monomial {monomial}: powers reference {len} states but the system has {k}")]
    StateIndex {
        equation: usize,
        monomial: usize,
        len: usize,
        k: usize,
    },
    #[error("equation {equation}, monomial {monomial}: non-finite coefficient")]
    NonFiniteCoefficient { equation: usize, monomial: usize },
    #[error("initial value of equation {equation} is not finite")]
    NonFiniteInitial { equation: usize },
}

/// `D^{orders[k]} u_k = rhs[k](u, t)`, `u_k(0) = init[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdeSystem {
    pub orders: Vec<Exponent>,
    pub rhs: Vec<RhsExpr>,
    pub init: Vec<f64>,
}

impl FdeSystem {
    pub fn new(orders: Vec<Exponent>, rhs: Vec<RhsExpr>, init: Vec<f64>) -> Self {
        FdeSystem { orders, rhs, init }
    }

    pub fn k(&self) -> usize {
        self.orders.len()
    }

    /// Collects every invariant violation.
    pub fn validate(&self) -> Result<(), Vec<ValidationError>> {
        let mut errs = Vec::new();
        let k = self.k();
        if k == 0 {
            errs.push(ValidationError::Empty);
        }
        if self.rhs.len() != k {
            errs.push(ValidationError::LengthMismatch {
                what: "right-hand sides",
                expected: k,
                found: self.rhs.len(),
            });
        }
        if self.init.len() != k {
            errs.push(ValidationError::LengthMismatch {
                what: "initial values",
                expected: k,
                found: self.init.len(),
            });
        }
        for (i, &order) in self.orders.iter().enumerate() {
            if order.is_zero() || order > Exponent::ONE {
                errs.push(ValidationError::OrderOutOfRange {
                    equation: i + 1,
                    order,
                });
            }
        }
        for (i, f) in self.rhs.iter().enumerate() {
            for (j, m) in f.monomials.iter().enumerate() {
                if m.powers.iter().skip(k).any(|&e| e != 0) {
                    errs.push(ValidationError::StateIndex {
                        equation: i + 1,
                        monomial: j + 1,
                        len: m.powers.len(),
                        k,
                    });
                } else if m.powers.len() != k {
                    errs.push(ValidationError::LengthMismatch {
                        what: "state powers",
                        expected: k,
                        found: m.powers.len(),
                    });
                }
                if !m.coeff.is_finite() {
                    errs.push(ValidationError::NonFiniteCoefficient {
                        equation: i + 1,
                        monomial: j + 1,
                    });
                }
            }
        }
        for (i, c) in self.init.iter().enumerate() {
            if !c.is_finite() {
                errs.push(ValidationError::NonFiniteInitial { equation: i + 1 });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Numeric right-hand side vector at `(t, state)`.
    pub fn eval_rhs(&self, t: f64, state: &[f64], out: &mut [f64]) {
        for (o, f) in out.iter_mut().zip(&self.rhs) {
            *o = f.eval(t, state);
        }
    }
}

/// Sparse map from `(t_exp, powers)` to coefficient; handy for comparing
/// right-hand sides regardless of monomial order.
pub fn canonical_form(f: &RhsExpr) -> BTreeMap<(Exponent, Vec<u32>), f64> {
    let mut map = BTreeMap::new();
    for m in &f.monomials {
        *map.entry((m.t_exp, m.powers.clone())).or_insert(0.0) += m.coeff;
    }
    map
}
