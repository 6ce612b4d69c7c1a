//! Sparse fractional polynomials `Σ c_i t^{p_i}` with exact rational
//! exponents and binary64 coefficients.
//!
//! The set is closed under addition, multiplication, the Caputo derivative of
//! order in (0, 1] (as long as no exponent drops below zero) and the
//! Riemann–Liouville integral, which is everything the iteration needs.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::exponent::{Exponent, ExponentError};
use crate::specfun::{gamma_ratio, GammaError};

pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-15;
pub const DEFAULT_TERM_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("polynomial needs {needed} terms, over the cap of {cap}")]
    TermCap { cap: usize, needed: usize },
    #[error("order {0} is outside (0, 1]")]
    OrderOutOfRange(Exponent),
    #[error("integration order must be positive")]
    ZeroOrder,
    #[error("Caputo derivative of t^{exponent} with order {order} leaves a negative power")]
    NegativePower { exponent: Exponent, order: Exponent },
    #[error("cannot evaluate at negative t = {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// Pruning and size limits applied to every result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub prune_threshold: f64,
    pub term_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl Limits {
    fn keep(&self, c: f64) -> bool {
        c.abs() >= self.prune_threshold && c != 0.0
    }

    fn finish(&self, acc: BTreeMap<Exponent, f64>) -> Result<FracPoly, AlgebraError> {
        let terms: Vec<_> = acc.into_iter().filter(|&(_, c)| self.keep(c)).collect();
        if terms.len() > self.term_cap {
            return Err(AlgebraError::TermCap {
                cap: self.term_cap,
                needed: terms.len(),
            });
        }
        Ok(FracPoly { terms })
    }

    pub fn monomial(&self, coeff: f64, exponent: Exponent) -> FracPoly {
        if self.keep(coeff) {
            FracPoly {
                terms: vec![(exponent, coeff)],
            }
        } else {
            FracPoly::zero()
        }
    }

    pub fn add(&self, p: &FracPoly, q: &FracPoly) -> FracPoly {
        self.linear_combination(1.0, p, 1.0, q)
    }

    pub fn sub(&self, p: &FracPoly, q: &FracPoly) -> FracPoly {
        self.linear_combination(1.0, p, -1.0, q)
    }

    /// `a*p + b*q` as a single sorted merge.
    pub fn linear_combination(&self, a: f64, p: &FracPoly, b: f64, q: &FracPoly) -> FracPoly {
        let mut terms = Vec::with_capacity(p.terms.len() + q.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < p.terms.len() || j < q.terms.len() {
            let next = match (p.terms.get(i), q.terms.get(j)) {
                (Some(&(ep, cp)), Some(&(eq, cq))) => {
                    if ep < eq {
                        i += 1;
                        (ep, a * cp)
                    } else if eq < ep {
                        j += 1;
                        (eq, b * cq)
                    } else {
                        i += 1;
                        j += 1;
                        (ep, a * cp + b * cq)
                    }
                }
                (Some(&(ep, cp)), None) => {
                    i += 1;
                    (ep, a * cp)
                }
                (None, Some(&(eq, cq))) => {
                    j += 1;
                    (eq, b * cq)
                }
                (None, None) => unreachable!(),
            };
            if self.keep(next.1) {
                terms.push(next);
            }
        }
        FracPoly { terms }
    }

    pub fn scale(&self, p: &FracPoly, c: f64) -> FracPoly {
        FracPoly {
            terms: p
                .terms
                .iter()
                .map(|&(e, x)| (e, c * x))
                .filter(|&(_, x)| self.keep(x))
                .collect(),
        }
    }

    pub fn mul(&self, p: &FracPoly, q: &FracPoly) -> Result<FracPoly, AlgebraError> {
        let mut acc: BTreeMap<Exponent, f64> = BTreeMap::new();
        for &(ep, cp) in &p.terms {
            for &(eq, cq) in &q.terms {
                let e = ep.checked_add(eq)?;
                *acc.entry(e).or_insert(0.0) += cp * cq;
                if acc.len() > self.term_cap {
                    return Err(AlgebraError::TermCap {
                        cap: self.term_cap,
                        needed: acc.len(),
                    });
                }
            }
        }
        self.finish(acc)
    }

    /// `p^n` by repeated multiplication.
    pub fn pow(&self, p: &FracPoly, n: u32) -> Result<FracPoly, AlgebraError> {
        let mut out = self.monomial(1.0, Exponent::ZERO);
        for _ in 0..n {
            out = self.mul(&out, p)?;
        }
        Ok(out)
    }

    /// Caputo derivative of order `order` in (0, 1].
    ///
    /// `c t^e ↦ c Γ(e+1)/Γ(e+1-α) t^{e-α}` for `e > 0`; constants vanish. At
    /// order 1 the coefficient is exactly `c e`.
    pub fn caputo_deriv(&self, p: &FracPoly, order: Exponent) -> Result<FracPoly, AlgebraError> {
        if order.is_zero() || order > Exponent::ONE {
            return Err(AlgebraError::OrderOutOfRange(order));
        }
        let one = Ratio::from_integer(1);
        let mut acc = BTreeMap::new();
        for &(e, c) in &p.terms {
            if e.is_zero() {
                continue;
            }
            let shifted = e.checked_sub(order).map_err(|_| AlgebraError::NegativePower {
                exponent: e,
                order,
            })?;
            let factor = if order == Exponent::ONE {
                e.to_f64()
            } else {
                gamma_ratio(e.ratio() + one, e.ratio() + one - order.ratio())?
            };
            *acc.entry(shifted).or_insert(0.0) += c * factor;
        }
        self.finish(acc)
    }

    /// Riemann–Liouville integral of order `order > 0`:
    /// `c t^e ↦ c Γ(e+1)/Γ(e+1+α) t^{e+α}`.
    pub fn rl_integral(&self, p: &FracPoly, order: Exponent) -> Result<FracPoly, AlgebraError> {
        if order.is_zero() {
            return Err(AlgebraError::ZeroOrder);
        }
        if order == Exponent::ONE {
            return self.integrate1(p);
        }
        let one = Ratio::from_integer(1);
        let mut acc = BTreeMap::new();
        for &(e, c) in &p.terms {
            let factor = gamma_ratio(e.ratio() + one, e.ratio() + one + order.ratio())?;
            *acc.entry(e.checked_add(order)?).or_insert(0.0) += c * factor;
        }
        self.finish(acc)
    }

    /// Antiderivative vanishing at `t = 0`: `c t^e ↦ c/(e+1) t^{e+1}`.
    pub fn integrate1(&self, p: &FracPoly) -> Result<FracPoly, AlgebraError> {
        let mut terms = Vec::with_capacity(p.terms.len());
        for &(e, c) in &p.terms {
            let raised = e.checked_add(Exponent::ONE)?;
            let coeff = c / raised.to_f64();
            if self.keep(coeff) {
                terms.push((raised, coeff));
            }
        }
        Ok(FracPoly { terms })
    }
}

/// A fractional polynomial. Terms are sorted by strictly increasing exponent
/// and never carry a coefficient below the prune threshold; the empty list is
/// the zero polynomial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FracPoly {
    terms: Vec<(Exponent, f64)>,
}

impl FracPoly {
    pub fn zero() -> Self {
        FracPoly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Limits::default().monomial(c, Exponent::ZERO)
    }

    pub fn monomial(coeff: f64, exponent: Exponent) -> Self {
        Limits::default().monomial(coeff, exponent)
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs, merging
    /// duplicates and pruning with the default threshold.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, f64)>) -> Self {
        let mut acc = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert(0.0) += c;
        }
        let limits = Limits {
            term_cap: usize::MAX,
            ..Limits::default()
        };
        limits.finish(acc).expect("uncapped")
    }

    pub fn terms(&self) -> &[(Exponent, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `t^e`, zero if absent.
    pub fn coeff(&self, e: Exponent) -> f64 {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(&e))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(Exponent::ZERO)
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.last().map(|&(e, _)| e)
    }

    pub fn add(&self, other: &FracPoly) -> FracPoly {
        Limits::default().add(self, other)
    }

    pub fn sub(&self, other: &FracPoly) -> FracPoly {
        Limits::default().sub(self, other)
    }

    pub fn scale(&self, c: f64) -> FracPoly {
        Limits::default().scale(self, c)
    }

    pub fn mul(&self, other: &FracPoly) -> Result<FracPoly, AlgebraError> {
        Limits::default().mul(self, other)
    }

    pub fn caputo_deriv(&self, order: Exponent) -> Result<FracPoly, AlgebraError> {
        Limits::default().caputo_deriv(self, order)
    }

    pub fn rl_integral(&self, order: Exponent) -> Result<FracPoly, AlgebraError> {
        Limits::default().rl_integral(self, order)
    }

    pub fn integrate1(&self) -> Result<FracPoly, AlgebraError> {
        Limits::default().integrate1(self)
    }

    /// Value at `t ≥ 0`, with `0^0 = 1`.
    pub fn eval(&self, t: f64) -> Result<f64, AlgebraError> {
        if t < 0.0 || t.is_nan() {
            return Err(AlgebraError::NegativeTime(t));
        }
        Ok(self.terms.iter().map(|&(e, c)| c * power(t, e)).sum())
    }

    /// `true` when exponents are strictly increasing and no coefficient is
    /// zero or non-finite.
    pub fn is_well_formed(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0 < w[1].0)
            && self.terms.iter().all(|&(_, c)| c != 0.0 && c.is_finite())
    }
}

/// `t^e` for `t ≥ 0`; integer powers go through `powi`.
pub fn power(t: f64, e: Exponent) -> f64 {
    if e.is_zero() {
        1.0
    } else if t == 0.0 {
        0.0
    } else if e.is_integer() && e.numer() <= i64::from(i32::MAX) {
        t.powi(e.numer() as i32)
    } else {
        t.powf(e.to_f64())
    }
}

impl fmt::Display for FracPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            let sign = if c < 0.0 { "-" } else { "+" };
            if i == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else if e == Exponent::ONE {
                write!(f, "{mag}*t")?;
            } else {
                write!(f, "{mag}*t^({e})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d).unwrap()
    }

    fn poly(terms: &[(i64, i64, f64)]) -> FracPoly {
        FracPoly::from_terms(terms.iter().map(|&(n, d, c)| (ex(n, d), c)))
    }

    #[test]
    fn monomials() {
        assert_eq!(FracPoly::monomial(1.0, Exponent::ZERO), FracPoly::constant(1.0));
        assert!(FracPoly::monomial(0.0, ex(1, 2)).is_empty());
        let m = FracPoly::monomial(2.0, ex(3, 2));
        assert_eq!(m.terms(), &[(ex(3, 2), 2.0)]);
        assert!(FracPoly::monomial(1e-16, Exponent::ONE).is_empty());
    }

    #[test]
    fn addition() {
        let t = poly(&[(1, 1, 1.0)]);
        let one_plus_t = poly(&[(0, 1, 1.0), (1, 1, 1.0)]);
        assert_eq!(t.add(&one_plus_t), poly(&[(0, 1, 1.0), (1, 1, 2.0)]));
        assert_eq!(t.add(&FracPoly::zero()), t);
        let h = poly(&[(1, 2, 1.0)]);
        assert!(h.add(&h.scale(-1.0)).is_empty());
    }

    #[test]
    fn multiplication() {
        let p = poly(&[(0, 1, 1.0), (1, 1, 0.5)]);
        assert_eq!(
            p.mul(&p).unwrap(),
            poly(&[(0, 1, 1.0), (1, 1, 1.0), (2, 1, 0.25)])
        );
        assert_eq!(p.mul(&FracPoly::constant(1.0)).unwrap(), p);
        let h = poly(&[(1, 2, 1.0)]);
        assert_eq!(h.mul(&h).unwrap(), poly(&[(1, 1, 1.0)]));
        assert!(h.mul(&FracPoly::zero()).unwrap().is_empty());
    }

    #[test]
    fn term_cap_is_enforced() {
        let limits = Limits {
            term_cap: 5,
            ..Limits::default()
        };
        let p = FracPoly::from_terms((0..3).map(|i| (Exponent::integer(i), 1.0)));
        let q = FracPoly::from_terms((0..3).map(|i| (Exponent::new(i64::from(i), 3).unwrap(), 1.0)));
        // 3 x 3 distinct sums of {0,1,2} and {0,1/3,2/3}
        let err = limits.mul(&p, &q).unwrap_err();
        assert!(matches!(err, AlgebraError::TermCap { cap: 5, .. }));
        assert_eq!(limits.mul(&p, &p).unwrap().len(), 5);
    }

    #[test]
    fn evaluation() {
        let p = poly(&[(1, 1, 1.0), (2, 1, 1.0)]);
        assert!((p.eval(0.1).unwrap() - 0.11).abs() < 1e-15);
        let q = poly(&[(1, 1, 1.0), (2, 1, 1.0), (3, 1, 1.0 / 3.0)]);
        assert_eq!(format!("{:.6}", q.eval(1.0).unwrap()), "2.333333");
        let r = poly(&[(0, 1, 3.5), (1, 2, 2.0), (5, 3, -1.0)]);
        assert_eq!(r.eval(0.0).unwrap(), 3.5);
        assert_eq!(FracPoly::zero().eval(0.0).unwrap(), 0.0);
        assert!(matches!(r.eval(-1.0), Err(AlgebraError::NegativeTime(_))));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn caputo() {
        let half = ex(1, 2);
        assert!(FracPoly::constant(4.0).caputo_deriv(half).unwrap().is_empty());
        let t2 = poly(&[(2, 1, 1.0)]);
        assert_eq!(t2.caputo_deriv(Exponent::ONE).unwrap(), poly(&[(1, 1, 2.0)]));
        let d = poly(&[(1, 1, 1.0)]).caputo_deriv(half).unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].0, half);
        // Γ(2)/Γ(3/2) = 2/√π
        let expect = 2.0 / std::f64::consts::PI.sqrt();
        assert!((d.terms()[0].1 - 1.128_379_167_1).abs() < 1e-10);
        assert!((d.terms()[0].1 - expect).abs() < 1e-15);
    }

    #[test]
    fn caputo_errors() {
        let p = poly(&[(1, 4, 1.0)]);
        assert!(matches!(
            p.caputo_deriv(ex(1, 2)),
            Err(AlgebraError::NegativePower { .. })
        ));
        assert!(matches!(
            p.caputo_deriv(ex(3, 2)),
            Err(AlgebraError::OrderOutOfRange(_))
        ));
        assert!(matches!(
            p.caputo_deriv(Exponent::ZERO),
            Err(AlgebraError::OrderOutOfRange(_))
        ));
    }

    #[test]
    fn riemann_liouville() {
        let one = FracPoly::constant(1.0);
        assert_eq!(one.rl_integral(Exponent::ONE).unwrap(), poly(&[(1, 1, 1.0)]));
        let half = ex(1, 2);
        let twice = one.rl_integral(half).unwrap().rl_integral(half).unwrap();
        let once = one.rl_integral(Exponent::ONE).unwrap();
        assert_eq!(twice.terms()[0].0, once.terms()[0].0);
        assert!((twice.terms()[0].1 - once.terms()[0].1).abs() < 1e-14);

        let a = ex(3, 10);
        let j = poly(&[(1, 1, 1.0)]).rl_integral(a).unwrap();
        let g = crate::specfun::gamma(Ratio::new(23, 10)).unwrap();
        assert_eq!(j.terms()[0].0, ex(13, 10));
        assert!((j.terms()[0].1 - 1.0 / g).abs() < 1e-15);
        assert!(matches!(one.rl_integral(Exponent::ZERO), Err(AlgebraError::ZeroOrder)));
    }

    #[test]
    fn antiderivative() {
        assert_eq!(FracPoly::constant(1.0).integrate1().unwrap(), poly(&[(1, 1, 1.0)]));
        assert!(FracPoly::zero().integrate1().unwrap().is_empty());

        // 1 + 2t - t^{1-α}/Γ(2-α) integrates to t + t² - t^{2-α}/Γ(3-α)
        let alpha = ex(7, 10);
        let g2 = crate::specfun::gamma(Ratio::new(13, 10)).unwrap();
        let g3 = crate::specfun::gamma(Ratio::new(23, 10)).unwrap();
        let p = poly(&[(0, 1, 1.0), (1, 1, 2.0), (3, 10, -1.0 / g2)]);
        let q = p.integrate1().unwrap();
        assert_eq!(Exponent::integer(2).checked_sub(alpha).unwrap(), ex(13, 10));
        assert_eq!(q.coeff(Exponent::ONE), 1.0);
        assert_eq!(q.coeff(Exponent::integer(2)), 1.0);
        assert!((q.coeff(ex(13, 10)) + 1.0 / g3).abs() < 1e-15);
        assert_eq!(q, p.rl_integral(Exponent::ONE).unwrap());
    }

    #[test]
    fn display() {
        let p = poly(&[(0, 1, 1.0), (1, 2, -2.0), (1, 1, 0.5)]);
        assert_eq!(p.to_string(), "1 - 2*t^(1/2) + 0.5*t");
        assert_eq!(FracPoly::zero().to_string(), "0");
    }
}
