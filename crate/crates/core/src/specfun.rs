//! Gamma and reciprocal gamma for real arguments.
//!
//! Arguments that come out of exponent arithmetic are carried as exact
//! rationals, so the poles at 0, -1, -2, ... are detected without any
//! floating-point comparison. Positive integer rationals are evaluated as
//! exact factorials; everything else goes through a Lanczos series
//! (g = 7, 9 terms) with reflection below 1/2.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

const LANCZOS_G: f64 = 7.0;

// Coefficients for g = 7, n = 9.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// ln(sqrt(2*pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest n for which (n - 1)! is finite in binary64.
const MAX_FACTORIAL_ARG: i64 = 171;

/// Argument of the gamma function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaArg {
    Exact(Ratio<i64>),
    Float(f64),
}

impl GammaArg {
    pub fn to_f64(self) -> f64 {
        match self {
            GammaArg::Exact(r) => ratio_to_f64(r),
            GammaArg::Float(x) => x,
        }
    }

    /// `true` for 0, -1, -2, ...
    pub fn is_pole(self) -> bool {
        match self {
            GammaArg::Exact(r) => r.is_integer() && !r.is_positive(),
            GammaArg::Float(x) => x <= 0.0 && x.fract() == 0.0,
        }
    }

    fn positive_integer(self) -> Option<i64> {
        match self {
            GammaArg::Exact(r) if r.is_integer() && r.is_positive() => Some(*r.numer()),
            _ => None,
        }
    }
}

impl fmt::Display for GammaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaArg::Exact(r) => write!(f, "{r}"),
            GammaArg::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<Ratio<i64>> for GammaArg {
    fn from(r: Ratio<i64>) -> Self {
        GammaArg::Exact(r)
    }
}

impl From<i64> for GammaArg {
    fn from(n: i64) -> Self {
        GammaArg::Exact(Ratio::from_integer(n))
    }
}

impl From<i32> for GammaArg {
    fn from(n: i32) -> Self {
        GammaArg::Exact(Ratio::from_integer(n.into()))
    }
}

impl From<f64> for GammaArg {
    fn from(x: f64) -> Self {
        GammaArg::Float(x)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma has a pole at {0}")]
    Pole(String),
}

pub(crate) fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    // Both parts are small in practice; the division is correctly rounded
    // whenever numerator and denominator are exactly representable.
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Γ(x).
pub fn gamma(x: impl Into<GammaArg>) -> Result<f64, GammaError> {
    let x = x.into();
    if x.is_pole() {
        return Err(GammaError::Pole(x.to_string()));
    }
    if let Some(n) = x.positive_integer() {
        if n <= MAX_FACTORIAL_ARG {
            return Ok(factorial(n - 1));
        }
        return Ok(f64::INFINITY);
    }
    Ok(lanczos_gamma(x.to_f64()))
}

/// 1/Γ(x), exactly zero at the poles.
pub fn rgamma(x: impl Into<GammaArg>) -> f64 {
    let x = x.into();
    if x.is_pole() {
        return 0.0;
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// ln|Γ(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection, valid for non-integer x
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * w.ln() - w + lanczos_sum(z).ln()
}

/// Γ(a)/Γ(b), with 0 when `b` is a pole.
///
/// When `a - b` is a small integer the ratio is formed as a finite rising
/// product, so Γ(e + 1)/Γ(e) = e holds to the last bit. Large arguments fall
/// back to log-gamma to avoid overflow.
pub fn gamma_ratio(a: Ratio<i64>, b: Ratio<i64>) -> Result<f64, GammaError> {
    let ga = GammaArg::Exact(a);
    let gb = GammaArg::Exact(b);
    if ga.is_pole() {
        return Err(GammaError::Pole(a.to_string()));
    }
    if gb.is_pole() {
        return Ok(0.0);
    }
    let diff = a - b;
    if diff.is_integer() && diff.numer().abs() <= 64 && b.is_positive() && a.is_positive() {
        let steps = *diff.numer();
        let base = if steps >= 0 { b } else { a };
        let mut prod = 1.0;
        let mut v = base;
        for _ in 0..steps.abs() {
            prod *= ratio_to_f64(v);
            v += Ratio::from_integer(1);
        }
        return Ok(if steps >= 0 { prod } else { 1.0 / prod });
    }
    let (af, bf) = (ratio_to_f64(a), ratio_to_f64(b));
    if af < 170.0 && bf < 170.0 {
        return Ok(gamma(ga)? * rgamma(gb));
    }
    if a.is_positive() && b.is_positive() {
        return Ok((ln_gamma(af) - ln_gamma(bf)).exp());
    }
    Ok(gamma(ga)? * rgamma(gb))
}

fn factorial(n: i64) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    sum
}

fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    // split the power to keep w^(z+1/2) finite up to the overflow threshold
    let half = w.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-w).exp()) * lanczos_sum(z)
}
