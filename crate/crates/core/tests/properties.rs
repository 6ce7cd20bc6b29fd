use num_traits::{One, Zero};
use proptest::prelude::*;

use padic_potts::classifier::{
    classify_direct, classify_rules, corollary_prediction, theorem_prediction, ThetaFacts,
};
use padic_potts::functions::{exp_p, sqrt, sqrt_exists};
use padic_potts::oracle::brute_sqrt_exists;
use padic_potts::padic::{
    expand, int, norm, prime_power, ratio, valuation, Prime, Rational, Valuation,
};
use padic_potts::potts::{
    f_m_eval, kv_coeffs, solve_kv, verify_fixed_point, BoundaryField, ModelParams, RootSet,
};
use padic_potts::Error;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn odd_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![3u64, 5, 7, 11]).prop_map(|p| Prime::new(p).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-5000i64..5000, 1i64..5000).prop_map(|(n, d)| ratio(n, d))
}

/// `n/d` with p dividing neither, built as `n = ap + r`, `d = bp + s`.
fn unit(p: Prime) -> impl Strategy<Value = Rational> {
    let p = p.get() as i64;
    (-1000i64..1000, 1..p, 0i64..1000, 1..p)
        .prop_map(move |(a, r, b, s)| ratio(a * p + r, b * p + s))
}

/// theta = 1 + u p^v inside E_p, with q and m <= q/2.
fn model_point() -> impl Strategy<Value = (ModelParams, u32)> {
    prime().prop_flat_map(|p| {
        let lo = if p.is_two() { 2 } else { 1 };
        (unit(p), lo..lo + 4i64, 2u32..=14).prop_flat_map(move |(u, v, q)| {
            let theta = int(1) + u * prime_power(p, v);
            let params = ModelParams::new(p, q, 2, theta).unwrap();
            (Just(params), 1..=q / 2)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expansion_is_a_ring_map(p in prime(), a in rational(), b in rational()) {
        let n = 24;
        let (ea, eb) = (expand(p, &a, n), expand(p, &b, n));
        match ea.add(&eb) {
            Ok(s) => prop_assert!(s.agrees_with(&(&a + &b))),
            Err(e) => {
                // every known digit cancels
                let known = ea.absolute_precision().unwrap().min(eb.absolute_precision().unwrap());
                prop_assert!(matches!(e, Error::PrecisionExhausted(_)));
                prop_assert!(valuation(p, &(&a + &b)) >= Valuation::Finite(known));
            }
        }
        prop_assert!(ea.mul(&eb).unwrap().agrees_with(&(&a * &b)));
        if !b.is_zero() {
            prop_assert!(ea.div(&eb).unwrap().agrees_with(&(&a / &b)));
        }
    }

    #[test]
    fn norm_of_sum_of_equal_norms(
        (p, a, b) in odd_prime().prop_flat_map(|p| (Just(p), unit(p), unit(p))),
        v in -3i64..4,
    ) {
        let (a, b) = (a * prime_power(p, v), b * prime_power(p, v));
        let n = norm(p, &a);
        prop_assert!(norm(p, &(&a + &b)) == n || norm(p, &(&a - &b)) == n);
    }

    #[test]
    fn exp_is_a_homomorphism(
        (p, u, w) in prime().prop_flat_map(|p| (Just(p), unit(p), unit(p))),
        dv in 0i64..3,
    ) {
        let v = if p.is_two() { 2 } else { 1 };
        let x = u * prime_power(p, v);
        let y = w * prime_power(p, v + dv);
        let n = 30;
        let lhs = exp_p(p, &(&x + &y), n).unwrap();
        let rhs = exp_p(p, &x, n).unwrap().mul(&exp_p(p, &y, n).unwrap()).unwrap();
        let k = lhs.precision().unwrap().min(rhs.precision().unwrap());
        prop_assert_eq!(lhs.truncate(k), rhs.truncate(k));
    }

    #[test]
    fn sqrt_squares_back(p in prime(), a in rational()) {
        prop_assume!(!a.is_zero());
        let verdict = sqrt_exists(p, &a).unwrap();
        match sqrt(p, &a, 20) {
            Ok(r) => {
                prop_assert!(verdict.exists);
                prop_assert!(r.mul(&r).unwrap().agrees_with(&a));
            }
            Err(Error::NoSquareRoot(_)) => prop_assert!(!verdict.exists),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn sqrt_criterion_matches_enumeration(
        (p, u) in prime().prop_flat_map(|p| (Just(p), unit(p))),
        v in 0i64..3,
    ) {
        let a = u * prime_power(p, 2 * v);
        let n = if p.is_two() { 10 } else { 6 };
        prop_assert_eq!(sqrt_exists(p, &a).unwrap().exists, brute_sqrt_exists(p, &a, n).unwrap());
    }

    #[test]
    fn reduced_map_symmetry(q in 3u32..=10, t in -40i64..40, x in rational()) {
        prop_assume!(t != 0 && !x.is_zero());
        let params = ModelParams::with_domain_check(Prime::new(3).unwrap(), q, 2, int(t), false).unwrap();
        for m in 1..q {
            if let (Ok(a), Ok(b)) = (f_m_eval(&params, m, &x), f_m_eval(&params, q - m, &(Rational::one() / &x))) {
                prop_assert_eq!(a * b, Rational::one());
            }
        }
    }

    #[test]
    fn quadratic_discriminant_identity((params, m) in model_point()) {
        let kv = kv_coeffs(&params, m).unwrap();
        let b = params.theta_exact().unwrap() - Rational::one();
        prop_assert_eq!(&kv.a1 * &kv.a1 - int(4) * &kv.a2 * &kv.a0, &b * &b * &kv.d);
    }

    #[test]
    fn exact_roots_are_fixed_points((params, m) in model_point()) {
        let roots = solve_kv(&params, m, 32).unwrap();
        for r in roots.roots() {
            let Some(z) = r.exact() else { continue };
            if r.pole {
                continue;
            }
            prop_assert_eq!(f_m_eval(&params, m, z).unwrap(), z.clone());
            prop_assert!(kv_coeffs(&params, m).unwrap().eval(z).is_zero());
            let field = BoundaryField::pattern(params.q, m, z).unwrap();
            prop_assert!(verify_fixed_point(&params, &field).unwrap().is_fixed);
        }
    }

    #[test]
    fn approximate_roots_satisfy_the_quadratic((params, m) in model_point()) {
        let n = 32;
        if let RootSet::Two(z1, z2) = solve_kv(&params, m, n).unwrap() {
            let kv = kv_coeffs(&params, m).unwrap();
            let p = params.p;
            for z in [&z1, &z2] {
                if z.exact().is_some() {
                    continue;
                }
                let e = |c: &Rational| expand(p, c, n);
                let val = e(&kv.a2)
                    .mul(&z.value).unwrap()
                    .mul(&z.value).unwrap()
                    .add(&e(&kv.a1).mul(&z.value).unwrap()).unwrap()
                    .add(&e(&kv.a0));
                match val {
                    Ok(x) => prop_assert!(x.valuation() >= Valuation::Finite(n as i64 / 2), "{x}"),
                    Err(Error::PrecisionExhausted(_)) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }

    #[test]
    fn rules_agree_with_direct((params, m) in model_point()) {
        let r = classify_rules(&params, m).unwrap();
        let d = classify_direct(&params, m, 64).unwrap();
        prop_assert_eq!(r.count, d.count, "rule {:?}", r.rule);
    }

    #[test]
    fn rules_agree_with_summary_predictions((params, m) in model_point()) {
        let r = classify_rules(&params, m).unwrap();
        let t = theorem_prediction(&params, m).unwrap();
        let per_subset = if params.q == 2 * m { r.count / 2 } else { r.count };
        prop_assert_eq!(per_subset, t.value, "rule {:?} vs clause {}", r.rule, t.clause);
        let facts = ThetaFacts::new(&params).unwrap();
        if let Some(c) = corollary_prediction(&facts, m) {
            prop_assert_eq!(r.count, c.value, "rule {:?} vs clause {}", r.rule, c.clause);
        }
    }
}
