//! Self-checks behind the `check` command: operator identities on random
//! fractional polynomials, gamma accuracy, and the closed-form iterates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact_refs::{golden_iterate, Example};
use crate::exponent::Exponent;
use crate::fracpoly::FracPoly;
use crate::pia::{solve, PiaConfig};
use crate::specfun::{gamma, rgamma};

pub const INVERSE_SEED: u64 = 0x5eed_f4ac;
pub const INVERSE_CASES: usize = 100;
pub const INVERSE_TOL: f64 = 1e-10;
pub const GAMMA_TOL: f64 = 1e-12;
pub const GOLDEN_TOL: f64 = 1e-10;
pub const GOLDEN_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// worst observed error
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<28} cases={:<5} worst={:.3e} tol={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )
    }
}

fn outcome(name: &'static str, worst: f64, tolerance: f64, cases: usize) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: worst <= tolerance,
        worst,
        tolerance,
        cases,
    }
}

pub fn inverse_orders() -> [Exponent; 4] {
    [1, 2, 3, 4].map(|n| Exponent::new(n, 4).expect("valid literal"))
}

/// Up to 20 terms with exponents in `[0, 5]`; every non-constant exponent is
/// at least `min_exp`.
pub fn random_fracpoly(rng: &mut impl Rng, min_exp: Exponent) -> FracPoly {
    const DENOMS: [i64; 6] = [1, 2, 3, 4, 5, 10];
    let n_terms = rng.gen_range(1..=20);
    let terms = (0..n_terms).map(|_| {
        let d = DENOMS[rng.gen_range(0..DENOMS.len())];
        let e = if rng.gen_bool(0.1) {
            Exponent::ZERO
        } else {
            let lo = (min_exp.ratio() * d).ceil().to_integer().max(1);
            Exponent::new(rng.gen_range(lo..=5 * d), d).expect("non-negative")
        };
        let c = rng.gen_range(-10.0..10.0);
        (e, c)
    });
    FracPoly::from_terms(terms)
}

/// Worst coefficient relative error between two polynomials, requiring the
/// exponent sets to agree.
pub fn termwise_rel_error(got: &FracPoly, want: &FracPoly) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.terms()
        .iter()
        .zip(want.terms())
        .map(|((e1, c1), (e2, c2))| {
            if e1 != e2 {
                f64::INFINITY
            } else {
                (c1 - c2).abs() / c2.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// `D^α J^α p = p`
pub fn left_inverse(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..cases {
        let alpha = inverse_orders()[i % 4];
        let p = random_fracpoly(&mut rng, Exponent::ZERO);
        let back = p
            .rl_integral(alpha)
            .and_then(|q| q.caputo_deriv(alpha))
            .map_or(f64::INFINITY, |q| termwise_rel_error(&q, &p));
        worst = worst.max(back);
    }
    outcome("inverse: D^a J^a p = p", worst, INVERSE_TOL, cases)
}

/// `J^α D^α p = p − p(0)`
pub fn right_inverse(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let mut worst = 0.0f64;
    for i in 0..cases {
        let alpha = inverse_orders()[i % 4];
        let p = random_fracpoly(&mut rng, alpha);
        let want = p.sub(&FracPoly::constant(p.constant_term()));
        let back = p
            .caputo_deriv(alpha)
            .and_then(|q| q.rl_integral(alpha))
            .map_or(f64::INFINITY, |q| termwise_rel_error(&q, &want));
        worst = worst.max(back);
    }
    outcome("inverse: J^a D^a p = p - p(0)", worst, INVERSE_TOL, cases)
}

pub fn gamma_accuracy() -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut fact = 1.0f64;
    for n in 1..=20i64 {
        // Γ(n) = (n-1)!
        if n > 1 {
            fact *= (n - 1) as f64;
        }
        let g = gamma(n).unwrap_or(f64::NAN);
        worst = worst.max(((g - fact) / fact).abs());
        cases += 1;
    }
    let mut half = std::f64::consts::PI.sqrt();
    for j in 0..20i64 {
        // half = Γ(j + 1/2)
        let x = num_rational::Ratio::new(2 * j + 1, 2);
        let g = gamma(x).unwrap_or(f64::NAN);
        worst = worst.max(((g - half) / half).abs());
        half *= j as f64 + 0.5;
        cases += 1;
    }
    for n in 0..=10i64 {
        if rgamma(-n) != 0.0 {
            worst = f64::INFINITY;
        }
        cases += 1;
    }
    outcome("gamma accuracy", worst, GAMMA_TOL, cases)
}

fn golden_orders() -> [Exponent; 4] {
    let r = |n, d| Exponent::new(n, d).expect("valid literal");
    [Exponent::ONE, r(9, 10), r(7, 10), r(1, 2)]
}

/// Iterates 1..=3 against their closed forms on 20 points of `[0, 1]`.
pub fn golden_iterates(example: Example) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for a in golden_orders() {
        for b in golden_orders() {
            let orders = [a, b];
            let sol = match solve(&example.system(orders), &PiaConfig::with_iterations(3)) {
                Ok(sol) => sol,
                Err(_) => {
                    worst = f64::INFINITY;
                    continue;
                }
            };
            for n in 1..=3 {
                for k in 0..2 {
                    for i in 0..GOLDEN_POINTS {
                        let t = i as f64 / (GOLDEN_POINTS - 1) as f64;
                        let got = sol.eval(n, k, t).unwrap_or(f64::NAN);
                        let want = golden_iterate(example, n, k + 1, orders, t).unwrap_or(f64::NAN);
                        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
                        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
                        cases += 1;
                    }
                }
            }
        }
    }
    let name = match example {
        Example::One => "closed-form iterates, ex. 1",
        Example::Two => "closed-form iterates, ex. 2",
    };
    outcome(name, worst, GOLDEN_TOL, cases)
}

pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        left_inverse(INVERSE_SEED, INVERSE_CASES),
        right_inverse(INVERSE_SEED, INVERSE_CASES),
        gamma_accuracy(),
        golden_iterates(Example::One),
        golden_iterates(Example::Two),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for o in run_all() {
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn generator_respects_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = random_fracpoly(&mut rng, Exponent::ONE);
            assert!(p.len() <= 20);
            for (e, _) in p.terms() {
                assert!(e.is_zero() || *e >= Exponent::ONE);
                assert!(*e <= Exponent::integer(5));
            }
        }
    }

    #[test]
    fn mismatch_is_detected() {
        let p = FracPoly::monomial(1.0, Exponent::ONE);
        let q = FracPoly::monomial(1.0, Exponent::integer(2));
        assert_eq!(termwise_rel_error(&p, &q), f64::INFINITY);
        assert_eq!(termwise_rel_error(&p, &p), 0.0);
    }
}
