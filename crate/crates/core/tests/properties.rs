use proptest::prelude::*;

use fracpia::exact_refs::Example;
use fracpia::oracle::abm_solve;
use fracpia::problem::{canonical_json, parse_problem};
use fracpia::report::{fixed6, Rounding};
use fracpia::specfun::{gamma, rgamma};
use fracpia::system::{FdeSystem, RhsExpr, RhsMonomial};
use fracpia::{solve, Exponent, FracPoly, PiaConfig};

fn exponent_upto(max: i64) -> impl Strategy<Value = Exponent> {
    (prop::sample::select(vec![1i64, 2, 3, 4, 5, 6, 8, 10, 12]), 0.0..1.0f64).prop_map(move |(d, u)| {
        let n = (u * (max * d) as f64).round() as i64;
        Exponent::new(n, d).unwrap()
    })
}

fn order() -> impl Strategy<Value = Exponent> {
    (1i64..=12).prop_flat_map(|d| (1..=d).prop_map(move |n| Exponent::new(n, d).unwrap()))
}

fn poly(max_terms: usize) -> impl Strategy<Value = FracPoly> {
    prop::collection::vec((exponent_upto(5), -10.0..10.0f64), 0..=max_terms).prop_map(FracPoly::from_terms)
}

/// Non-constant exponents all at least `min`.
fn poly_above(min: Exponent) -> impl Strategy<Value = FracPoly> {
    prop::collection::vec((exponent_upto(5), -10.0..10.0f64, any::<bool>()), 1..=20).prop_map(move |ts| {
        FracPoly::from_terms(ts.into_iter().map(|(e, c, constant)| {
            if constant {
                (Exponent::ZERO, c)
            } else if e < min {
                (e.checked_add(min).unwrap(), c)
            } else {
                (e, c)
            }
        }))
    })
}

fn abs_scale(p: &FracPoly, t: f64) -> f64 {
    p.terms().iter().map(|&(e, c)| c.abs() * t.powf(e.to_f64())).sum()
}

fn termwise_close(got: &FracPoly, want: &FracPoly, rel: f64) -> Result<(), TestCaseError> {
    let exps = |p: &FracPoly| p.terms().iter().map(|t| t.0).collect::<Vec<_>>();
    prop_assert_eq!(exps(got), exps(want));
    for (a, b) in got.terms().iter().zip(want.terms()) {
        prop_assert!((a.1 - b.1).abs() <= rel * b.1.abs(), "{} vs {} at t^{}", a.1, b.1, a.0);
    }
    Ok(())
}

/// Every coefficient of `got - want` is small against the inputs' size.
fn diff_small(got: &FracPoly, want: &FracPoly, size: f64) -> Result<(), TestCaseError> {
    let d = got.sub(want);
    for &(e, c) in d.terms() {
        prop_assert!(c.abs() <= 1e-12 * (1.0 + size), "residual {c} at t^{e}");
    }
    Ok(())
}

fn max_coeff(p: &FracPoly) -> f64 {
    p.terms().iter().map(|t| t.1.abs()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn operations_keep_terms_ordered(p in poly(20), q in poly(20), a in order()) {
        prop_assert!(p.add(&q).is_well_formed());
        prop_assert!(p.sub(&q).is_well_formed());
        prop_assert!(p.mul(&q).unwrap().is_well_formed());
        prop_assert!(p.rl_integral(a).unwrap().is_well_formed());
        prop_assert!(p.integrate1().unwrap().is_well_formed());
        prop_assert!(p.scale(-0.5).is_well_formed());
    }

    #[test]
    fn eval_is_a_ring_homomorphism(p in poly(20), q in poly(20), t in 0.0..2.0f64) {
        let (pv, qv) = (p.eval(t).unwrap(), q.eval(t).unwrap());
        let (ps, qs) = (abs_scale(&p, t), abs_scale(&q, t));
        let sum = p.add(&q).eval(t).unwrap();
        prop_assert!((sum - pv - qv).abs() <= 1e-12 * (1.0 + ps + qs));
        let prod = p.mul(&q).unwrap().eval(t).unwrap();
        prop_assert!((prod - pv * qv).abs() <= 1e-12 * (1.0 + ps * qs));
    }

    #[test]
    fn caputo_inverts_the_integral(p in poly(20), a in order()) {
        let back = p.rl_integral(a).unwrap().caputo_deriv(a).unwrap();
        termwise_close(&back, &p, 1e-10)?;
    }

    #[test]
    fn integral_inverts_caputo_up_to_the_constant((a, p) in order().prop_flat_map(|a| (Just(a), poly_above(a)))) {
        let back = p.caputo_deriv(a).unwrap().rl_integral(a).unwrap();
        let want = p.sub(&FracPoly::constant(p.constant_term()));
        termwise_close(&back, &want, 1e-10)?;
    }

    #[test]
    fn unit_order_is_the_classical_derivative(p in poly_above(Exponent::ONE)) {
        let got = p.caputo_deriv(Exponent::ONE).unwrap();
        let want = FracPoly::from_terms(
            p.terms()
                .iter()
                .filter(|t| !t.0.is_zero())
                .map(|&(e, c)| (e.checked_sub(Exponent::ONE).unwrap(), c * e.to_f64())),
        );
        let exps = |p: &FracPoly| p.terms().iter().map(|t| t.0).collect::<Vec<_>>();
        prop_assert_eq!(exps(&got), exps(&want));
        termwise_close(&got, &want, 1e-15)?;
    }

    #[test]
    fn operators_are_linear(
        (a, p, q) in order().prop_flat_map(|a| (Just(a), poly_above(a), poly_above(a))),
        x in -3.0..3.0f64,
        y in -3.0..3.0f64,
    ) {
        let combo = p.scale(x).add(&q.scale(y));
        let size = max_coeff(&p) + max_coeff(&q);
        let got = combo.caputo_deriv(a).unwrap();
        let want = p.caputo_deriv(a).unwrap().scale(x).add(&q.caputo_deriv(a).unwrap().scale(y));
        diff_small(&got, &want, 10.0 * size)?;
        let got = combo.rl_integral(a).unwrap();
        let want = p.rl_integral(a).unwrap().scale(x).add(&q.rl_integral(a).unwrap().scale(y));
        diff_small(&got, &want, 10.0 * size)?;
    }

    #[test]
    fn gamma_recurrence(x in 0.5..20.0f64) {
        let (g, g1) = (gamma(x).unwrap(), gamma(x + 1.0).unwrap());
        prop_assert!(((g1 - x * g) / g1).abs() <= 1e-12);
        prop_assert!((rgamma(x) * g - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn gamma_reflection(x in 0.001..0.999f64) {
        let lhs = gamma(x).unwrap() * gamma(1.0 - x).unwrap();
        let rhs = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        prop_assert!(((lhs - rhs) / rhs).abs() <= 1e-10);
    }

    #[test]
    fn half_even_printing(v in prop_oneof![
        -1.0e4..1.0e4f64,
        (-(1i64 << 30)..(1i64 << 30)).prop_map(|k| k as f64 / 128.0),
        (-(1i64 << 40)..(1i64 << 40)).prop_map(|k| k as f64 / (1u64 << 27) as f64),
    ]) {
        prop_assume!(v == 0.0 || v.abs() >= 1e-7);
        prop_assert_eq!(fixed6(v, Rounding::HalfEven), decimal_oracle(v));
    }
}

/// Exact round-half-even of `v` to six decimals, from its binary expansion.
fn decimal_oracle(v: f64) -> String {
    let bits = v.abs().to_bits();
    let (exp, frac) = ((bits >> 52) as i32, bits & ((1 << 52) - 1));
    let (mant, e2) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    // |v| * 10^6 = mant * 2^e2 * 10^6
    let scaled = mant as i128 * 1_000_000;
    let q = if e2 >= 0 {
        scaled << e2
    } else {
        let den = 1i128 << (-e2);
        let (q, rem) = (scaled / den, scaled % den);
        match (2 * rem).cmp(&den) {
            std::cmp::Ordering::Less => q,
            std::cmp::Ordering::Greater => q + 1,
            std::cmp::Ordering::Equal => q + (q & 1),
        }
    };
    let sign = if v < 0.0 && q != 0 { "-" } else { "" };
    format!("{sign}{}.{:06}", q / 1_000_000, q % 1_000_000)
}

fn monomial(k: usize) -> impl Strategy<Value = RhsMonomial> {
    // total degree at most two, like both benchmark systems
    let powers = prop::collection::vec(0u32..=2, k).prop_filter("degree <= 2", |p| p.iter().sum::<u32>() <= 2);
    (-5.0..5.0f64, exponent_upto(2), powers).prop_map(|(c, e, powers)| RhsMonomial::new(c, e, powers))
}

fn rhs(k: usize) -> impl Strategy<Value = RhsExpr> {
    prop::collection::vec(monomial(k), 0..4).prop_map(RhsExpr::new)
}

fn system() -> impl Strategy<Value = FdeSystem> {
    (1usize..=3).prop_flat_map(|k| {
        (
            prop::collection::vec(order(), k),
            prop::collection::vec(rhs(k), k),
            prop::collection::vec(-2.0..2.0f64, k),
        )
            .prop_map(|(o, f, c)| FdeSystem::new(o, f, c))
    })
}

fn states(k: usize) -> impl Strategy<Value = Vec<FracPoly>> {
    prop::collection::vec(poly(4), k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn problem_files_round_trip(sys in system(), n in 1usize..9) {
        let cfg = PiaConfig::with_iterations(n);
        let text = canonical_json(&sys, Some(&cfg));
        let (back, back_cfg) = parse_problem(&text, "prop").unwrap();
        prop_assert_eq!(back, sys);
        prop_assert_eq!(back_cfg, cfg);
    }

    #[test]
    fn substitute_is_linear_in_the_rhs(
        (f, g, s) in (1usize..=3).prop_flat_map(|k| (rhs(k), rhs(k), states(k)))
    ) {
        let lim = fracpia::Limits::default();
        let whole = f.plus(&g).substitute(&s, &lim).unwrap();
        let parts = f.substitute(&s, &lim).unwrap().add(&g.substitute(&s, &lim).unwrap());
        let size = s.iter().map(max_coeff).fold(1.0, f64::max).powi(4) * 10.0;
        diff_small(&whole, &parts, size)?;
    }

    #[test]
    fn substitute_on_constants_matches_numeric_eval(
        (f, c) in (1usize..=3).prop_flat_map(|k| (rhs(k), prop::collection::vec(-3.0..3.0f64, k)))
    ) {
        // only t-independent monomials survive as constants
        let f = RhsExpr::new(f.monomials().iter().filter(|m| m.t_exp.is_zero()).cloned());
        let s: Vec<FracPoly> = c.iter().map(|&v| FracPoly::constant(v)).collect();
        let p = f.substitute(&s, &fracpia::Limits::default()).unwrap();
        prop_assert!(p.terms().iter().all(|t| t.0.is_zero()));
        let direct = f.eval(0.7, &c);
        let scale: f64 = f
            .monomials()
            .iter()
            .map(|m| m.coeff.abs() * m.powers.iter().zip(&c).map(|(&e, v)| v.abs().powi(e as i32)).product::<f64>())
            .sum();
        prop_assert!((p.constant_term() - direct).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn iterates_stay_in_the_algebra(sys in system()) {
        let sol = solve(&sys, &PiaConfig::with_iterations(3)).unwrap();
        let classical = sys.orders.iter().all(|&o| o == Exponent::ONE)
            && sys.rhs.iter().flat_map(|f| f.monomials()).all(|m| m.t_exp.is_integer());
        for row in &sol.iterates {
            for (k, p) in row.iter().enumerate() {
                prop_assert!(p.is_well_formed());
                prop_assert_eq!(p.constant_term(), sys.init[k]);
                if classical {
                    prop_assert!(p.terms().iter().all(|t| t.0.is_integer()));
                }
            }
        }
    }

    #[test]
    fn iterates_respect_the_exponent_bound(a in order(), b in order(), two in any::<bool>()) {
        let ex = if two { Example::Two } else { Example::One };
        let sol = solve(&ex.system([a, b]), &PiaConfig::with_iterations(4)).unwrap();
        for (n, row) in sol.iterates.iter().enumerate() {
            for p in row {
                let bound = Exponent::integer(2 * n as u32 + 1);
                prop_assert!(p.max_exponent().is_none_or(|e| e <= bound));
            }
        }
    }

    #[test]
    fn solving_is_deterministic(sys in system()) {
        let cfg = PiaConfig::with_iterations(3);
        let (a, b) = (solve(&sys, &cfg).unwrap(), solve(&sys, &cfg).unwrap());
        for (ra, rb) in a.iterates.iter().zip(&b.iterates) {
            for (p, q) in ra.iter().zip(rb) {
                let bits = |p: &FracPoly| p.terms().iter().map(|&(e, c)| (e, c.to_bits())).collect::<Vec<_>>();
                prop_assert_eq!(bits(p), bits(q));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_refinement_reduces_error(a in order(), c in 0.2..2.0f64) {
        // D^a u = -u + c, a relaxation problem with a bounded solution
        let sys = FdeSystem::new(
            vec![a],
            vec![RhsExpr::new([RhsMonomial::linear(-1.0, 0, 1), RhsMonomial::new(c, Exponent::ZERO, vec![0])])],
            vec![0.0],
        );
        // compared on nodes shared by every grid
        let finest = abm_solve(&sys, 1.0, 1280).unwrap();
        let errs: Vec<f64> = [40, 80, 160]
            .iter()
            .map(|&s| {
                let sol = abm_solve(&sys, 1.0, s).unwrap();
                (0..=10)
                    .map(|i| {
                        let t = i as f64 / 10.0;
                        (sol.value_at(t, 0).unwrap() - finest.value_at(t, 0).unwrap()).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        prop_assert!(errs[1] < errs[0] && errs[2] < errs[1], "{:?}", errs);
    }
}

#[test]
fn decimal_oracle_sanity() {
    assert_eq!(decimal_oracle(0.0078125), "0.007812");
    assert_eq!(decimal_oracle(0.0234375), "0.023438");
    assert_eq!(decimal_oracle(-2.5), "-2.500000");
    assert_eq!(decimal_oracle(1.0 / 3.0), "0.333333");
}
