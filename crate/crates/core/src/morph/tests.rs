use super::*;
use crate::forms::points_at_infinity_mod_p;
use crate::poly::jacobian_det;
use proptest::prelude::*;
use rand::Rng;

fn k(p: u64) -> FieldCtx {
    FieldCtx::new(p).unwrap()
}

fn poly(p: u64, s: &str) -> MultiPoly {
    MultiPoly::parse(k(p), 2, s).unwrap()
}

fn uni(p: u64, s: &str) -> UniPoly {
    UniPoly::parse(k(p), s).unwrap()
}

fn three_shear_chain() -> MorphismChain {
    MorphismChain::parse(k(5), "T2 x1^3\nT2S axis=1 x1*x2^5\nT2 4*x1^7").unwrap()
}

fn max_deg(f: &(MultiPoly, MultiPoly)) -> u32 {
    f.0.total_degree().unwrap_or(0).max(f.1.total_degree().unwrap_or(0))
}

/// Evaluates a single map on a point with the map's defining formula.
fn eval_map(m: &ElementaryMap, (x, y): (FpElem, FpElem)) -> (FpElem, FpElem) {
    let ev = |h: &MultiPoly, u: FpElem, v: FpElem| {
        h.terms().fold(u.ctx().zero(), |acc, (e, c)| acc + c * u.pow(e.get(0) as u64) * v.pow(e.get(1) as u64))
    };
    let p = x.ctx().p();
    match m {
        ElementaryMap::Type1 { a } => (a[0] * x + a[1] * y + a[2], a[3] * x + a[4] * y + a[5]),
        ElementaryMap::Type2 { axis: Axis::X2, h } => (x, y + h.eval(x)),
        ElementaryMap::Type2 { axis: Axis::X1, h } => (x + h.eval(y), y),
        ElementaryMap::Type2Star { axis: Axis::X2, h } => (x, y + ev(h, x, y.pow(p))),
        ElementaryMap::Type2Star { axis: Axis::X1, h } => (x + ev(h, x.pow(p), y), y),
        ElementaryMap::Type3 { axis: Axis::X2, h } => (x, y + y.pow(p) * ev(h, x, y.pow(p))),
        ElementaryMap::Type3 { axis: Axis::X1, h } => (x + x.pow(p) * ev(h, x.pow(p), y), y),
        ElementaryMap::TypeB(b) => {
            let u = ev(&b.u().unwrap(), x, y);
            (x * b.h1().eval(u), y * b.h2().eval(u))
        }
    }
}

#[test]
fn apply_examples() {
    let m = ElementaryMap::type2(Axis::X2, uni(5, "x1^3"));
    assert_eq!(m.apply().unwrap(), (poly(5, "x1"), poly(5, "x2 + x1^3")));
    assert_eq!(ElementaryMap::swap(k(5)).apply().unwrap(), (poly(5, "x2"), poly(5, "x1")));
    let tb = TypeB::new(1, 3, MultiPoly::one(k(5), 2), uni(5, "1 + x1"), uni(5, "1 + 2*x1")).unwrap();
    let img = ElementaryMap::TypeB(tb.clone()).apply().unwrap();
    assert_eq!(img, (poly(5, "x1 + x1^2*x2^3"), poly(5, "x2 + 2*x1*x2^4")));
    assert_eq!(jacobian_det(&[img.0, img.1]).unwrap(), MultiPoly::one(k(5), 2));
    assert_eq!(tb.unit(), k(5).one());
}

#[test]
fn three_shear_chain_images() {
    let c = three_shear_chain();
    let (f1, f2) = c.apply().unwrap();
    let x1 = poly(5, "x1");
    let inner = poly(5, "x2 + x1^3");
    let f31 = &x1 + &(&inner.try_pow(5).unwrap() * &x1.try_pow(5).unwrap());
    let f32 = &inner - &f31.try_pow(7).unwrap();
    assert_eq!(f1, f31);
    assert_eq!(f2, f32);
    assert_eq!(c.degree().unwrap(), 5);
    assert!(!c.is_automorphism().unwrap());
    assert_eq!(points_at_infinity_mod_p(&f1).unwrap().count, 1);
    assert_eq!(points_at_infinity_mod_p(&f2).unwrap().count, 1);
}

#[test]
fn single_map_chain_matches_map() {
    let m = ElementaryMap::type3(Axis::X1, poly(3, "x2 + 2")).unwrap();
    let c = MorphismChain::new(vec![m.clone()]).unwrap();
    assert_eq!(c.apply().unwrap(), m.apply().unwrap());
}

#[test]
fn two_affine_maps_compose_as_matrices() {
    let ctx = k(7);
    let e = |v: [i64; 6]| v.map(|x| ctx.elem_i64(x));
    let a = e([1, 2, 3, 0, 1, 5]);
    let b = e([2, 1, 0, 3, 4, 6]);
    let c = MorphismChain::new(vec![ElementaryMap::type1(a).unwrap(), ElementaryMap::type1(b).unwrap()]).unwrap();
    // Second map acts on the first map's images: B_lin * A + B_t.
    let lin = |r: usize| {
        let (b1, b2, bt) = (b[3 * r], b[3 * r + 1], b[3 * r + 2]);
        [b1 * a[0] + b2 * a[3], b1 * a[1] + b2 * a[4], b1 * a[2] + b2 * a[5] + bt]
    };
    let expect = |r: usize| {
        let [c1, c2, c0] = lin(r);
        poly(7, &format!("{}*x1 + {}*x2 + {}", c1, c2, c0))
    };
    assert_eq!(c.apply().unwrap(), (expect(0), expect(1)));
}

#[test]
fn deg_p_and_degrees() {
    assert_eq!(ElementaryMap::swap(k(5)).deg_p().unwrap(), 0);
    assert_eq!(three_shear_chain().maps()[1].deg_p().unwrap(), 1);
    assert_eq!(ElementaryMap::type2(Axis::X2, uni(5, "x1^4")).deg_p().unwrap(), 0);
    assert_eq!(ElementaryMap::type3(Axis::X2, poly(5, "x1")).unwrap().deg_p().unwrap(), 1);
    let tb = TypeB::new(1, 3, MultiPoly::one(k(5), 2), uni(5, "1 + x1"), uni(5, "1 + 2*x1")).unwrap();
    let m = ElementaryMap::TypeB(tb);
    assert_eq!(m.deg_p(), Err(MorphError::NoDegP));
    assert_eq!(m.extension_degree().unwrap(), 5);
    let c = MorphismChain::new(vec![m]).unwrap();
    assert!(!c.is_automorphism().unwrap());
    let tame = MorphismChain::parse(k(5), "T1 1 1 0 0 1 0; T2 x1^4 + 1").unwrap();
    assert_eq!(tame.degree().unwrap(), 1);
    assert!(tame.is_automorphism().unwrap());
}

#[test]
fn type_b_with_linear_core() {
    // u = x1 x2^3 (x1 + x2)^5: s = 1, t = 6, d = 9.
    let tb = TypeB::new(1, 3, poly(5, "x1 + x2"), uni(5, "1 + x1"), uni(5, "1 + 2*x1")).unwrap();
    assert_eq!(tb.u_shape(), (1, 6, 9));
    assert_eq!(tb.extension_degree(), 6 + 8 + 1);
    let (f1, f2) = ElementaryMap::TypeB(tb).apply().unwrap();
    assert_eq!(jacobian_det(&[f1, f2]).unwrap(), MultiPoly::one(k(5), 2));
}

#[test]
fn type_b_rejections() {
    let one = MultiPoly::one(k(5), 2);
    assert!(matches!(
        TypeB::new(5, 3, one.clone(), uni(5, "1 + x1"), uni(5, "1 + 2*x1")),
        Err(MorphError::TypeBExponents { .. })
    ));
    assert_eq!(TypeB::new(1, 3, one.clone(), uni(5, "1"), uni(5, "1 + x1")), Err(MorphError::TypeBDegree));
    assert!(matches!(
        TypeB::new(1, 3, one.clone(), uni(5, "1 + x1"), uni(5, "1 + x1")),
        Err(MorphError::TypeBCondition(_))
    ));
    assert_eq!(
        TypeB::new(1, 3, poly(5, "x1 + 1"), uni(5, "1 + x1"), uni(5, "1 + 2*x1")),
        Err(MorphError::TypeBCore)
    );
}

#[test]
fn split_examples() {
    let (tau, rho) = split_type2star(&ElementaryMap::type2_star(Axis::X2, poly(5, "x1^3")).unwrap()).unwrap();
    assert!(tau.is_none());
    assert_eq!(rho, ElementaryMap::type2(Axis::X2, uni(5, "x1^3")));

    let (tau, rho) = split_type2star(&ElementaryMap::type2_star(Axis::X2, poly(5, "x2*x1^2 + x2")).unwrap()).unwrap();
    assert_eq!(tau, Some(ElementaryMap::type3(Axis::X2, poly(5, "x1^2 + 1")).unwrap()));
    assert_eq!(rho, ElementaryMap::type2(Axis::X2, UniPoly::zero(k(5))));

    let (tau, rho) = split_type2star(&ElementaryMap::type2_star(Axis::X2, poly(5, "x1 + x2^2")).unwrap()).unwrap();
    assert_eq!(tau, Some(ElementaryMap::type3(Axis::X2, poly(5, "x2")).unwrap()));
    assert_eq!(rho, ElementaryMap::type2(Axis::X2, uni(5, "x1")));
    assert_eq!(split_type2star(&ElementaryMap::swap(k(5))), Err(MorphError::NotType2Star));
}

#[test]
fn random_chain_contract() {
    let ctx = k(5);
    let w = KindWeights::only_type2();
    let a = random_chain(ctx, 1, 1, &w, 75).unwrap();
    assert!(matches!(a.maps()[0], ElementaryMap::Type2 { .. }));
    assert_eq!(a, random_chain(ctx, 1, 1, &w, 75).unwrap());
    assert_eq!(random_chain(ctx, 1, 0, &w, 75), Err(MorphError::ZeroLength));
    let s = random_chain(ctx, 11, 3, &KindWeights::P_MORPHISM, 75).unwrap();
    let t = random_chain(ctx, 12, 3, &KindWeights::P_MORPHISM, 75).unwrap();
    assert_ne!(s, t);
    let only3 = KindWeights { type1: 0, type2: 0, type2_star: 0, type3: 1, type_b: 0 };
    assert_eq!(random_chain(ctx, 1, 1, &only3, 4), Err(MorphError::BudgetTooSmall(4)));
}

#[test]
fn parse_errors_name_the_line() {
    let err = MorphismChain::parse(k(5), "T1 1 0 0 0 1 0\nT9 x1").unwrap_err();
    assert!(matches!(err, MorphError::Parse { line: 2, .. }));
    assert_eq!(MorphismChain::parse(k(5), "# nothing\n"), Err(MorphError::EmptyChain));
    assert_eq!(MorphismChain::parse(k(5), "T1 1 1 0 1 1 0"), Err(MorphError::SingularType1));
    assert!(matches!(MorphismChain::parse(k(5), "T2 x2"), Err(MorphError::Forms(_))));
}

fn chains(weights: KindWeights, max_len: usize) -> impl Strategy<Value = MorphismChain> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), any::<u64>(), 1..=max_len).prop_map(move |(p, seed, len)| {
        random_chain(k(p), seed, len, &weights, default_budget(p)).unwrap()
    })
}

fn points(ctx: FieldCtx) -> Vec<(FpElem, FpElem)> {
    ctx.elements().flat_map(|x| ctx.elements().map(move |y| (x, y))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobian_of_image_is_the_product_of_units(c in chains(KindWeights::MIXED, 3)) {
        let (f1, f2) = c.apply().unwrap();
        let j = jacobian_det(&[f1, f2]).unwrap();
        prop_assert_eq!(j.constant_value(), Some(c.jacobian_unit()));
        prop_assert!(!c.jacobian_unit().is_zero());
    }

    #[test]
    fn images_agree_with_pointwise_evaluation(c in chains(KindWeights::MIXED, 3)) {
        let (f1, f2) = c.apply().unwrap();
        let ctx = c.ctx();
        for pt in points(ctx) {
            let expect = c.maps().iter().fold(pt, |q, m| eval_map(m, q));
            let ev = |f: &MultiPoly| f.terms().fold(ctx.zero(), |acc, (e, cf)| {
                acc + cf * pt.0.pow(e.get(0) as u64) * pt.1.pow(e.get(1) as u64)
            });
            prop_assert_eq!((ev(&f1), ev(&f2)), expect);
        }
    }

    #[test]
    fn composition_is_associative(c in chains(KindWeights::MIXED, 3)) {
        prop_assume!(c.len() == 3);
        let m = c.maps();
        let head = MorphismChain::new(vec![m[0].clone()]).unwrap().apply().unwrap();
        let tail = MorphismChain::new(m[1..].to_vec()).unwrap().apply().unwrap();
        let args = [head.0, head.1];
        let joined = (tail.0.substitute(&args).unwrap(), tail.1.substitute(&args).unwrap());
        prop_assert_eq!(joined, c.apply().unwrap());
    }

    #[test]
    fn text_round_trip(c in chains(KindWeights::MIXED, 4)) {
        let back = MorphismChain::parse(c.ctx(), &c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn split_recomposes(p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>(), axis in any::<bool>()) {
        let ctx = k(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axis = if axis { Axis::X1 } else { Axis::X2 };
        let h = random_shear_poly(&mut rng, ctx, axis, 3, 2);
        let m = ElementaryMap::type2_star(axis, h).unwrap();
        let (tau, rho) = split_type2star(&m).unwrap();
        let mut maps: Vec<ElementaryMap> = tau.into_iter().collect();
        maps.push(rho);
        prop_assert_eq!(MorphismChain::new(maps).unwrap().apply().unwrap(), m.apply().unwrap());
    }

    #[test]
    fn p_morphism_images_have_one_point_at_infinity_mod_p(c in chains(KindWeights::P_MORPHISM, 4)) {
        let (f1, f2) = c.apply().unwrap();
        prop_assert_eq!(points_at_infinity_mod_p(&f1).unwrap().count, 1);
        prop_assert_eq!(points_at_infinity_mod_p(&f2).unwrap().count, 1);
    }

    #[test]
    fn non_automorphic_chains_reach_degree_p(c in chains(KindWeights::MIXED, 4)) {
        let img = c.apply().unwrap();
        if !c.is_automorphism().unwrap() {
            prop_assert!(max_deg(&img) as u64 >= c.ctx().p());
        }
        prop_assert!(max_deg(&img) <= default_budget(c.ctx().p()));
    }

    #[test]
    fn invertible_linear_recombination_keeps_max_degree(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        seed in any::<u64>(),
    ) {
        let ctx = k(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = crate::sample::random_poly(&mut rng, ctx, 2, 6, 6);
        let f2 = crate::sample::random_poly(&mut rng, ctx, 2, 6, 6);
        let m = loop {
            let a: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..p));
            if !(a[0] * a[3] + p * p - a[1] * a[2] % p).is_multiple_of(p) {
                break a;
            }
        };
        let g1 = &f1.scale(ctx.elem(m[0])) + &f2.scale(ctx.elem(m[1]));
        let g2 = &f1.scale(ctx.elem(m[2])) + &f2.scale(ctx.elem(m[3]));
        prop_assert_eq!(max_deg(&(f1, f2)), max_deg(&(g1, g2)));
    }
}
