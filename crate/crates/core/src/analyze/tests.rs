use super::*;
use crate::field::FieldCtx;
use crate::morph::{default_budget, random_chain, KindWeights, TypeB};
use crate::sample::random_poly;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn k(p: u64) -> FieldCtx {
    FieldCtx::new(p).unwrap()
}

fn poly(p: u64, s: &str) -> MultiPoly {
    MultiPoly::parse(k(p), 2, s).unwrap()
}

fn uni(p: u64, s: &str) -> UniPoly {
    UniPoly::parse(k(p), s).unwrap()
}

fn ex41() -> (MultiPoly, MultiPoly) {
    (poly(5, "x1^2*x2^3 + x1"), poly(5, "2*x1*x2^4 + x2"))
}

fn probes(p: u64) -> Vec<MultiPoly> {
    vec![poly(p, "x1"), poly(p, "x2"), poly(p, "x1^2*x2 + 3*x2 + 1")]
}

#[test]
fn jacobian_examples() {
    assert_eq!(is_jacobian_pair(&poly(5, "x1"), &poly(5, "x2")).unwrap(), Some(k(5).one()));
    assert_eq!(is_jacobian_pair(&poly(5, "x1"), &poly(5, "x1")).unwrap(), None);
    let (f1, f2) = ex41();
    assert_eq!(is_jacobian_pair(&f1, &f2).unwrap(), Some(k(5).one()));
}

#[test]
fn automorphic_examples() {
    let d = is_automorphic_pair(&poly(5, "x1"), &poly(5, "x2 + x1^3")).unwrap();
    assert!(d.automorphic);
    let w = d.witness.unwrap();
    assert_eq!(w.apply().unwrap(), (poly(5, "x1"), poly(5, "x2 + x1^3")));
    assert!(!is_automorphic_pair(&poly(5, "x1"), &poly(5, "x1*x2")).unwrap().automorphic);
    let (f1, f2) = ex41();
    assert!(!is_automorphic_pair(&f1, &f2).unwrap().automorphic);
    // Affine with singular linear part.
    assert!(!is_automorphic_pair(&poly(5, "x1 + x2"), &poly(5, "2*x1 + 2*x2 + 1")).unwrap().automorphic);
    assert!(is_automorphic_pair(&poly(5, "x1 + x2"), &poly(5, "x1 + 1")).unwrap().automorphic);
}

#[test]
fn derivation_identities() {
    let ctx = DerivationCtx::new(&poly(7, "x1"), &poly(7, "x2")).unwrap();
    let g = poly(7, "x1^3*x2 + x2^2");
    assert_eq!(derivation(&ctx, 1, &g).unwrap(), g.partial_derivative(0).unwrap());
    assert_eq!(derivation(&ctx, 2, &g).unwrap(), g.partial_derivative(1).unwrap());
    let (f1, f2) = ex41();
    let ctx = DerivationCtx::new(&f1, &f2).unwrap();
    let j = jacobian_det(&[f1.clone(), f2.clone()]).unwrap();
    assert_eq!(derivation(&ctx, 1, &f1).unwrap(), j);
    assert_eq!(derivation(&ctx, 2, &f2).unwrap(), j);
    assert!(derivation(&ctx, 1, &f2).unwrap().is_zero());
    assert!(derivation(&ctx, 2, &f1).unwrap().is_zero());
    assert_eq!(derivation(&ctx, 3, &f1), Err(AnalyzeError::BadSlot(3)));
}

#[test]
fn derivation_conditions_identity_pair() {
    let r = check_derivation_conditions(&poly(3, "x1"), &poly(3, "x2"), &probes(3)).unwrap();
    assert_eq!(r.table_alpha, Some(k(3).one()));
    assert!(r.all_hold());
    // Hand check: ∇(x1^2 x2^2) = 2*2 = 1 and every other cell vanishes.
    assert!(r.table_violations.is_empty());
}

#[test]
fn derivation_conditions_on_type_b_pair() {
    let (f1, f2) = ex41();
    let r = check_derivation_conditions(&f1, &f2, &probes(5)).unwrap();
    assert!(r.all_hold(), "{r:?}");
    assert!(r.table_alpha.is_some() && r.reconstruction_alpha.is_some() && r.operator_alpha.is_some());
}

#[test]
fn derivation_conditions_fails_for_degenerate_pair() {
    let r = check_derivation_conditions(&poly(5, "x1"), &poly(5, "x1^2"), &probes(5)).unwrap();
    assert!(r.table_violations.contains(&(4, 4)));
    assert!(!r.table_holds() && !r.reconstruction_holds() && !r.operator_holds());
}

#[test]
fn nabla_identity_examples() {
    assert!(check_nabla_identity(&[poly(2, "x1"), poly(2, "x2")]).unwrap());
    let f = MultiPoly::parse(k(3), 1, "x1^2").unwrap();
    assert!(check_nabla_identity(&[f]).unwrap());
    let g = MultiPoly::parse(k(3), 3, "x1 + x2*x3").unwrap();
    assert!(check_nabla_identity(&[g.clone(), g.clone(), g]).unwrap());
    assert!(check_nabla_identity(&[poly(3, "x1")]).is_err());
}

/// Left side of the identity with full products and the termwise operator.
fn identity_lhs_naive(fs: &[MultiPoly]) -> MultiPoly {
    let ctx = fs[0].ctx();
    let p = ctx.p();
    let n = fs.len();
    let mut lhs = MultiPoly::zero(ctx, n);
    let total = p.pow(n as u32);
    for code in 0..total {
        let mut a = MultiPoly::one(ctx, n);
        let mut b = MultiPoly::one(ctx, n);
        let mut c = code;
        for f in fs {
            let i = c % p;
            c /= p;
            a = &a * &f.try_pow(i).unwrap();
            b = &b * &f.try_pow(p - 1 - i).unwrap();
        }
        lhs = &lhs + &(&a * &b.nabla());
    }
    lhs
}

#[test]
fn min_poly_examples() {
    let ctx = k(5);
    let one = UniPoly::one(ctx);
    let u = poly(5, "x1*x2^3");
    let m = min_poly_m(&u, &one, &one, &poly(5, "x1"), &poly(5, "x2")).unwrap();
    assert_eq!(m.degree, 1);
    assert_eq!(m.m, MultiPoly::parse(ctx, 3, "x1 - x2*x3^3").unwrap());

    let (f1, f2) = ex41();
    let m = min_poly_m(&u, &uni(5, "1 + x1"), &uni(5, "1 + 2*x1"), &f1, &f2).unwrap();
    assert_eq!(m.degree, 5);

    // Quadratic h1 with u = x1 x2^2: degree 1*2 + 2*1 + 1.
    let h1 = uni(5, "1 + x1 + 2*x1^2");
    let h2 = uni(5, "1 + x1");
    let u = poly(5, "x1*x2^2");
    let f1 = &poly(5, "x1") * &h1.eval_multi(&u).unwrap();
    let f2 = &poly(5, "x2") * &h2.eval_multi(&u).unwrap();
    let m = min_poly_m(&u, &h1, &h2, &f1, &f2).unwrap();
    assert_eq!(m.degree, 5);
    // A wrong u is caught.
    assert_eq!(min_poly_m(&poly(5, "x1*x2"), &h1, &h2, &f1, &f2), Err(AnalyzeError::NotARoot));
}

#[test]
fn min_poly_with_homogeneous_core() {
    let tb = TypeB::new(1, 3, poly(5, "x1 + x2"), uni(5, "1 + x1"), uni(5, "1 + 2*x1")).unwrap();
    let (f1, f2) = ElementaryMap::TypeB(tb.clone()).apply().unwrap();
    let m = min_poly_m(&tb.u().unwrap(), tb.h1(), tb.h2(), &f1, &f2).unwrap();
    assert_eq!(m.degree as u128, tb.extension_degree());
}

#[test]
fn resultant_bound_examples() {
    let r = resultant_bound(&poly(5, "x1"), &poly(5, "x2")).unwrap();
    assert_eq!(r, ResultantBound { bound: 1, resultant_degree: Some(1), certificate: Some(1) });
    let r = resultant_bound(&poly(5, "x1"), &poly(5, "x2 + x1^3")).unwrap();
    assert_eq!(r.bound, 3);
    assert_eq!(r.certificate, Some(1));
    let (f1, f2) = ex41();
    let r = resultant_bound(&f1, &f2).unwrap();
    assert_eq!(r.bound, 25);
    // Both leading coefficients in t2 vanish at t1 = 0, adding t1^3.
    assert_eq!(r.resultant_degree, Some(8));
    assert_eq!(r.certificate, Some(5));
    assert!(matches!(resultant_bound(&poly(5, "x1"), &poly(5, "x1")), Err(AnalyzeError::NotJacobian(_))));
}

#[test]
fn report_examples() {
    let r = conjecture_report(&poly(5, "x1"), &poly(5, "x2 + x1^3"), None).unwrap();
    assert!(r.is_jacobian && r.automorphic);
    assert_eq!((r.pts_inf[0].count, r.pts_inf[1].count), (1, 1));
    assert_eq!(r.triangle, [true, true]);
    assert!(r.degree_divisibility);
    assert_eq!(r.extension_degree, Some(1));

    let (f1, f2) = ex41();
    let r = conjecture_report(&f1, &f2, Some(5)).unwrap();
    assert!(r.is_jacobian && !r.automorphic);
    assert_eq!((r.pts_inf[0].count, r.pts_inf[1].count), (2, 2));
    assert!(!r.low_degree_applicable);
    assert_eq!(r.extension_degree, Some(5));

    let f1 = poly(5, "x1 + x1^2*x2^2 + 2*x1^3*x2^4");
    let f2 = poly(5, "x2 + x1*x2^3");
    let r = conjecture_report(&f1, &f2, None).unwrap();
    assert_eq!((r.deg1, r.deg2), (7, 4));
    assert!(r.is_jacobian);
    assert_eq!(r.pts_inf[1].count, 2);
    assert_eq!(r.extension_degree, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nabla_of_product_matches_full_product(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&mut rng, k(p), n, 9, 8);
        let b = random_poly(&mut rng, k(p), n, 9, 8);
        prop_assert_eq!(nabla_of_product(&a, &b).unwrap(), (&a * &b).nabla());
    }

    #[test]
    fn nabla_identity_matches_naive_left_side(
        p in prop::sample::select(vec![2u64, 3]),
        n in 1usize..=2,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs: Vec<MultiPoly> = (0..n).map(|_| random_poly(&mut rng, k(p), n, 4, 5)).collect();
        prop_assert!(check_nabla_identity(&fs).unwrap());
        let j = jacobian_det(&fs).unwrap().try_pow(p - 1).unwrap();
        let rhs = if n % 2 == 1 { -j } else { j };
        prop_assert_eq!(identity_lhs_naive(&fs), rhs);
    }

    #[test]
    fn decision_agrees_with_chain_degree(p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>(), mixed in any::<bool>()) {
        let w = if mixed { KindWeights::MIXED } else { KindWeights::P_MORPHISM };
        let c = random_chain(k(p), seed, 3, &w, default_budget(p)).unwrap();
        let (f1, f2) = c.apply().unwrap();
        let d = is_automorphic_pair(&f1, &f2).unwrap();
        prop_assert_eq!(d.automorphic, c.is_automorphism().unwrap());
        if let Some(w) = d.witness {
            prop_assert_eq!(w.apply().unwrap(), (f1, f2));
        }
    }

    #[test]
    fn jacobian_chains_pass_the_table(p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>()) {
        let c = random_chain(k(p), seed, 2, &KindWeights::MIXED, default_budget(p)).unwrap();
        let (f1, f2) = c.apply().unwrap();
        let which = Conditions { table: true, reconstruction: p < 5, operator: p < 5 };
        let r = check_derivation_conditions_with(&f1, &f2, &probes(p), which).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
    }

    #[test]
    fn min_poly_degree_matches_type_b_formula(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7])) {
        let w = KindWeights { type1: 0, type2: 0, type2_star: 0, type3: 0, type_b: 1 };
        let c = random_chain(k(p), seed, 1, &w, 40 * p as u32).unwrap();
        let ElementaryMap::TypeB(tb) = &c.maps()[0] else { unreachable!() };
        let (f1, f2) = c.apply().unwrap();
        let m = min_poly_m(&tb.u().unwrap(), tb.h1(), tb.h2(), &f1, &f2).unwrap();
        prop_assert_eq!(m.degree as u128, tb.extension_degree());
        prop_assert_eq!(tb.extension_degree() % p as u128, 0);
    }
}
