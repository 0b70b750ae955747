//! Pair-level analysis: the Jacobian condition, the automorphic-pair
//! decision, the derivation identities, minimal polynomials of `u` for type
//! (b) pairs, resultant degree bounds and the combined conjecture report.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FpElem;
use crate::forms::{points_at_infinity, points_at_infinity_mod_p, uni_gcd, FormsError, InfinityReport, UniPoly};
use crate::morph::{Axis, ElementaryMap, MorphError, MorphismChain};
use crate::poly::{is_triangle_polygon, jacobian_det, sylvester_resultant, ExponentVector, MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("expected polynomials in x1, x2")]
    NotBivariate,
    #[error("expected {expected} polynomials in {expected} variables")]
    BadArity { expected: usize },
    #[error("input polynomial is zero")]
    ZeroInput,
    #[error("not a Jacobian pair: J = {0}")]
    NotJacobian(String),
    #[error("u must be a nonzero homogeneous polynomial of positive degree")]
    BadU,
    #[error("u is not a root of the constructed polynomial")]
    NotARoot,
    #[error("witness chain does not recompose to the input pair")]
    WitnessMismatch,
    #[error("slot index must be 1 or 2, got {0}")]
    BadSlot(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Morph(#[from] MorphError),
}

fn check_pair(f1: &MultiPoly, f2: &MultiPoly) -> Result<(), AnalyzeError> {
    if f1.nvars() != 2 || f2.nvars() != 2 {
        return Err(AnalyzeError::NotBivariate);
    }
    if f1.ctx() != f2.ctx() {
        return Err(PolyError::ContextMismatch(f1.ctx().p(), f2.ctx().p()).into());
    }
    Ok(())
}

fn degree(f: &MultiPoly) -> u32 {
    f.total_degree().unwrap_or(0)
}

/// `Some(c)` when `J(f1, f2)` is the nonzero constant `c`.
pub fn is_jacobian_pair(f1: &MultiPoly, f2: &MultiPoly) -> Result<Option<FpElem>, AnalyzeError> {
    check_pair(f1, f2)?;
    let j = jacobian_det(&[f1.clone(), f2.clone()])?;
    Ok(j.constant_value().filter(|c| !c.is_zero()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphicDecision {
    pub automorphic: bool,
    /// A chain whose image pair is exactly the input, when automorphic.
    pub witness: Option<MorphismChain>,
}

impl AutomorphicDecision {
    fn no() -> Self {
        Self { automorphic: false, witness: None }
    }
}

/// Decides whether `k[f1, f2] = k[x1, x2]` by leading-form reduction.
///
/// While both degrees exceed one, the top form of the higher-degree member
/// must be a constant multiple of a power of the other's top form; the
/// matching multiple of that power is subtracted off. A pair of affine
/// polynomials with invertible linear part ends the reduction. Each step is
/// recorded as a shear so the witness reproduces the input exactly.
pub fn is_automorphic_pair(f1: &MultiPoly, f2: &MultiPoly) -> Result<AutomorphicDecision, AnalyzeError> {
    check_pair(f1, f2)?;
    if f1.is_zero() || f2.is_zero() {
        return Err(AnalyzeError::ZeroInput);
    }
    let ctx = f1.ctx();
    let mut g1 = f1.clone();
    let mut g2 = f2.clone();
    // Maps that rebuild the previous pair from the reduced one.
    let mut steps: Vec<ElementaryMap> = Vec::new();
    let base = loop {
        let (d1, d2) = (degree(&g1), degree(&g2));
        if d1 == 0 || d2 == 0 {
            return Ok(AutomorphicDecision::no());
        }
        if d1 < d2 {
            std::mem::swap(&mut g1, &mut g2);
            steps.push(ElementaryMap::swap(ctx));
            continue;
        }
        if d1 == 1 {
            let lin = |g: &MultiPoly| {
                [
                    g.coeff(&ExponentVector::new(&[1, 0])),
                    g.coeff(&ExponentVector::new(&[0, 1])),
                    g.coeff(&ExponentVector::new(&[0, 0])),
                ]
            };
            let (a, b) = (lin(&g1), lin(&g2));
            match ElementaryMap::type1([a[0], a[1], a[2], b[0], b[1], b[2]]) {
                Ok(m) => break m,
                Err(_) => return Ok(AutomorphicDecision::no()),
            }
        }
        if d1 % d2 != 0 {
            return Ok(AutomorphicDecision::no());
        }
        let k = (d1 / d2) as u64;
        let top1 = g1.leading_form()?.form;
        let top2 = g2.leading_form()?.form.try_pow(k)?;
        let (_, c1) = top1.leading_term().expect("nonzero");
        let (_, c2) = top2.leading_term().expect("nonzero");
        let c = c1 * c2.inv().expect("nonzero leading coefficient");
        if top1 != top2.scale(c) {
            return Ok(AutomorphicDecision::no());
        }
        g1 = g1.try_sub(&g2.try_pow(k)?.scale(c))?;
        let mut h = vec![0u64; k as usize + 1];
        h[k as usize] = c.value();
        steps.push(ElementaryMap::type2(Axis::X1, UniPoly::new(ctx, h)));
        if g1.is_zero() {
            return Ok(AutomorphicDecision::no());
        }
    };
    let mut maps = vec![base];
    maps.extend(steps.into_iter().rev());
    let chain = MorphismChain::new(maps)?;
    if chain.apply()? != (f1.clone(), f2.clone()) {
        return Err(AnalyzeError::WitnessMismatch);
    }
    Ok(AutomorphicDecision { automorphic: true, witness: Some(chain) })
}

/// The derivations `D_1(g) = J(g, f2)` and `D_2(g) = J(f1, g)`.
#[derive(Debug, Clone)]
pub struct DerivationCtx {
    f1: MultiPoly,
    f2: MultiPoly,
    // ∂f/∂x1, ∂f/∂x2 for each member.
    d1: [MultiPoly; 2],
    d2: [MultiPoly; 2],
}

impl DerivationCtx {
    pub fn new(f1: &MultiPoly, f2: &MultiPoly) -> Result<Self, AnalyzeError> {
        check_pair(f1, f2)?;
        Ok(Self {
            f1: f1.clone(),
            f2: f2.clone(),
            d1: [f1.partial_derivative(0)?, f1.partial_derivative(1)?],
            d2: [f2.partial_derivative(0)?, f2.partial_derivative(1)?],
        })
    }

    pub fn pair(&self) -> (&MultiPoly, &MultiPoly) {
        (&self.f1, &self.f2)
    }

    /// `D_i(g)` for `i ∈ {1, 2}`.
    pub fn apply(&self, i: usize, g: &MultiPoly) -> Result<MultiPoly, AnalyzeError> {
        let gx = g.partial_derivative(0)?;
        let gy = g.partial_derivative(1)?;
        let out = match i {
            1 => gx.try_mul(&self.d2[1])?.try_sub(&gy.try_mul(&self.d2[0])?)?,
            2 => self.d1[0].try_mul(&gy)?.try_sub(&self.d1[1].try_mul(&gx)?)?,
            _ => return Err(AnalyzeError::BadSlot(i)),
        };
        Ok(out)
    }

    /// `D_i^k(g)`.
    pub fn apply_n(&self, i: usize, k: u64, g: &MultiPoly) -> Result<MultiPoly, AnalyzeError> {
        let mut cur = g.clone();
        for _ in 0..k {
            if cur.is_zero() {
                break;
            }
            cur = self.apply(i, &cur)?;
        }
        Ok(cur)
    }
}

/// `D_i(g)` with `g` in slot `i` of the Jacobian determinant.
pub fn derivation(ctx: &DerivationCtx, i: usize, g: &MultiPoly) -> Result<MultiPoly, AnalyzeError> {
    ctx.apply(i, g)
}

/// `∇(a b)` without forming the full product: only pairs of terms whose
/// exponent sum is `≡ p - 1` in every variable survive the operator.
pub fn nabla_of_product(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
    if a.ctx() != b.ctx() {
        return Err(PolyError::ContextMismatch(a.ctx().p(), b.ctx().p()));
    }
    if a.nvars() != b.nvars() {
        return Err(PolyError::ArityMismatch(a.nvars(), b.nvars()));
    }
    let ctx = a.ctx();
    let n = a.nvars();
    let p = ctx.p() as u32;
    let residue = |e: &ExponentVector| -> [u32; 3] { std::array::from_fn(|v| if v < n { e.get(v) % p } else { 0 }) };
    let mut buckets: HashMap<[u32; 3], Vec<(ExponentVector, FpElem)>> = HashMap::new();
    for (e, c) in b.terms() {
        buckets.entry(residue(&e)).or_default().push((e, c));
    }
    let sign = if n.is_multiple_of(2) { ctx.one() } else { -ctx.one() };
    let mut acc: HashMap<[u32; 3], FpElem> = HashMap::new();
    for (ea, ca) in a.terms() {
        let ra = residue(&ea);
        let want: [u32; 3] = std::array::from_fn(|v| if v < n { (2 * p - 1 - ra[v]) % p } else { 0 });
        let Some(list) = buckets.get(&want) else { continue };
        for (eb, cb) in list {
            let key: [u32; 3] =
                std::array::from_fn(|v| if v < n { ea.get(v) + eb.get(v) - (p - 1) } else { 0 });
            let slot = acc.entry(key).or_insert(ctx.zero());
            *slot = *slot + ca * *cb;
        }
    }
    let terms = acc
        .into_iter()
        .filter(|t| !t.1.is_zero())
        .map(|(k, c)| (ExponentVector(k), (c * sign).value()));
    MultiPoly::from_terms(ctx, n, terms)
}

fn powers(f: &MultiPoly, upto: u64) -> Result<Vec<MultiPoly>, PolyError> {
    let mut out = vec![MultiPoly::one(f.ctx(), f.nvars())];
    for k in 1..=upto {
        let next = out[k as usize - 1].try_mul(f)?;
        out.push(next);
    }
    Ok(out)
}

/// Which conditions [`check_derivation_conditions_with`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    pub table: bool,
    pub reconstruction: bool,
    pub operator: bool,
}

impl Conditions {
    pub const ALL: Conditions = Conditions { table: true, reconstruction: true, operator: true };
}

/// Outcome of the three derivation criteria for a Jacobian pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DerivationReport {
    /// `∇(f1^{p-1} f2^{p-1})` when the whole table has the required shape.
    pub table_alpha: Option<FpElem>,
    /// Cells `(r1, r2)` of the `∇(f1^r1 f2^r2)` table that break the shape.
    pub table_violations: Vec<(u64, u64)>,
    /// The α with `g = α Σ_j f_i^j D_i^{p-1}(f_i^{p-1-j} g)` for every probe.
    pub reconstruction_alpha: Option<FpElem>,
    /// `(i, probe index)` pairs where reconstruction failed.
    pub reconstruction_failures: Vec<(usize, usize)>,
    /// The α with `∇ g = α D_1^{p-1} D_2^{p-1} g` for every probe.
    pub operator_alpha: Option<FpElem>,
    pub operator_failures: Vec<usize>,
    pub evaluated: Option<Conditions>,
}

impl DerivationReport {
    pub fn table_holds(&self) -> bool {
        self.table_alpha.is_some()
    }

    pub fn reconstruction_holds(&self) -> bool {
        self.reconstruction_alpha.is_some()
    }

    pub fn operator_holds(&self) -> bool {
        self.operator_alpha.is_some()
    }

    /// True when every evaluated condition holds.
    pub fn all_hold(&self) -> bool {
        let c = self.evaluated.unwrap_or(Conditions::ALL);
        (!c.table || self.table_holds())
            && (!c.reconstruction || self.reconstruction_holds())
            && (!c.operator || self.operator_holds())
    }
}

/// Evaluates the table, reconstruction and operator criteria on the probes `gs`.
pub fn check_derivation_conditions(f1: &MultiPoly, f2: &MultiPoly, gs: &[MultiPoly]) -> Result<DerivationReport, AnalyzeError> {
    check_derivation_conditions_with(f1, f2, gs, Conditions::ALL)
}

pub fn check_derivation_conditions_with(
    f1: &MultiPoly,
    f2: &MultiPoly,
    gs: &[MultiPoly],
    which: Conditions,
) -> Result<DerivationReport, AnalyzeError> {
    check_pair(f1, f2)?;
    let ctx = f1.ctx();
    let p = ctx.p();
    let mut report = DerivationReport { evaluated: Some(which), ..Default::default() };
    let pw1 = powers(f1, p - 1)?;
    let pw2 = powers(f2, p - 1)?;

    if which.table {
        let mut alpha = None;
        for r1 in 0..p {
            for r2 in 0..p {
                let v = nabla_of_product(&pw1[r1 as usize], &pw2[r2 as usize])?;
                if r1 == p - 1 && r2 == p - 1 {
                    match v.constant_value() {
                        Some(c) if !c.is_zero() => alpha = Some(c),
                        _ => report.table_violations.push((r1, r2)),
                    }
                } else if !v.is_zero() {
                    report.table_violations.push((r1, r2));
                }
            }
        }
        if report.table_violations.is_empty() {
            report.table_alpha = alpha;
        }
    }

    let dctx = DerivationCtx::new(f1, f2)?;
    if which.reconstruction {
        let mut lambda: Option<FpElem> = None;
        for i in 1..=2usize {
            let pw = if i == 1 { &pw1 } else { &pw2 };
            for (idx, g) in gs.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                let mut sum = MultiPoly::zero(ctx, 2);
                for j in 0..p as usize {
                    let inner = pw[p as usize - 1 - j].try_mul(g)?;
                    let d = dctx.apply_n(i, p - 1, &inner)?;
                    if !d.is_zero() {
                        sum = sum.try_add(&pw[j].try_mul(&d)?)?;
                    }
                }
                match scalar_ratio(&sum, g) {
                    Some(l) if !l.is_zero() && lambda.is_none_or(|x| x == l) => lambda = Some(l),
                    _ => report.reconstruction_failures.push((i, idx)),
                }
            }
        }
        if report.reconstruction_failures.is_empty() {
            report.reconstruction_alpha = lambda.map(|l| l.inv().expect("nonzero"));
        }
    }

    if which.operator {
        let both = |g: &MultiPoly| -> Result<MultiPoly, AnalyzeError> {
            let inner = dctx.apply_n(2, p - 1, g)?;
            dctx.apply_n(1, p - 1, &inner)
        };
        // ∇(x1^{p-1} x2^{p-1}) = 1 fixes α.
        let cal = MultiPoly::monomial(ctx, 2, ExponentVector::new(&[p as u32 - 1, p as u32 - 1]), 1);
        let alpha = both(&cal)?.constant_value().filter(|c| !c.is_zero()).map(|c| c.inv().expect("nonzero"));
        match alpha {
            None => report.operator_failures.push(usize::MAX),
            Some(a) => {
                for (idx, g) in gs.iter().enumerate() {
                    if both(g)?.scale(a) != g.nabla() {
                        report.operator_failures.push(idx);
                    }
                }
                if report.operator_failures.is_empty() {
                    report.operator_alpha = Some(a);
                }
            }
        }
    }
    Ok(report)
}

/// `Some(l)` when `a = l * b`.
fn scalar_ratio(a: &MultiPoly, b: &MultiPoly) -> Option<FpElem> {
    let (eb, cb) = b.leading_term()?;
    let l = a.coeff(&eb) * cb.inv().ok()?;
    (a == &b.scale(l)).then_some(l)
}

/// Checks `Σ_i f^i ∇(f^{p-1-i}) = (-1)^n J^{p-1}` with multi-indices over
/// `[0, p-1]^n`. The identity holds for every tuple.
pub fn check_nabla_identity(fs: &[MultiPoly]) -> Result<bool, AnalyzeError> {
    let n = fs.len();
    if !(1..=3).contains(&n) || fs.iter().any(|f| f.nvars() != n) {
        return Err(AnalyzeError::BadArity { expected: n.clamp(1, 3) });
    }
    let ctx = fs[0].ctx();
    if let Some(f) = fs.iter().find(|f| f.ctx() != ctx) {
        return Err(PolyError::ContextMismatch(ctx.p(), f.ctx().p()).into());
    }
    let p = ctx.p();
    let pws: Vec<Vec<MultiPoly>> = fs.iter().map(|f| powers(f, p - 1)).collect::<Result<_, _>>()?;
    let mut lhs = MultiPoly::zero(ctx, n);
    let mut idx = vec![0u64; n];
    loop {
        let mut a = MultiPoly::one(ctx, n);
        let mut b = MultiPoly::one(ctx, n);
        for k in 0..n.saturating_sub(1) {
            a = a.try_mul(&pws[k][idx[k] as usize])?;
            b = b.try_mul(&pws[k][(p - 1 - idx[k]) as usize])?;
        }
        let last = n - 1;
        a = a.try_mul(&pws[last][idx[last] as usize])?;
        let nb = nabla_of_product(&b, &pws[last][(p - 1 - idx[last]) as usize])?;
        if !nb.is_zero() {
            lhs = lhs.try_add(&a.try_mul(&nb)?)?;
        }
        // Next multi-index.
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < p {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let j = jacobian_det(fs)?;
    let mut rhs = j.try_pow(p - 1)?;
    if n % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs == rhs)
}

/// `M(T)` in the ring `k[T, F1, F2]` (variables `x1, x2, x3`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinPoly {
    pub m: MultiPoly,
    pub degree: u32,
}

/// For `f_i = x_i h_i(u)` with `u` homogeneous of degree `d` and lowest and
/// highest `x1`-exponents `s, t`, builds
/// `M(T) = T h1(T)^t h2(T)^{d-s} - Σ_j α_j h1(T)^{t-j} h2(T)^{j-s} F1^j F2^{d-j}`
/// where `u = Σ α_j x1^j x2^{d-j}`, and checks `M(u) = 0` after putting
/// `F_i = f_i`.
pub fn min_poly_m(
    u: &MultiPoly,
    h1: &UniPoly,
    h2: &UniPoly,
    f1: &MultiPoly,
    f2: &MultiPoly,
) -> Result<MinPoly, AnalyzeError> {
    check_pair(f1, f2)?;
    if is_jacobian_pair(f1, f2)?.is_none() {
        let j = jacobian_det(&[f1.clone(), f2.clone()])?;
        return Err(AnalyzeError::NotJacobian(j.to_string()));
    }
    if u.nvars() != 2 || u.is_zero() || !u.is_homogeneous() || degree(u) == 0 {
        return Err(AnalyzeError::BadU);
    }
    let ctx = u.ctx();
    let d = degree(u);
    let s = u.terms().map(|t| t.0.get(0)).min().expect("nonzero");
    let t = u.terms().map(|t| t.0.get(0)).max().expect("nonzero");
    let h1m = h1.to_multi(3, 0)?;
    let h2m = h2.to_multi(3, 0)?;
    let tvar = MultiPoly::var(ctx, 3, 0);
    let f1v = MultiPoly::var(ctx, 3, 1);
    let f2v = MultiPoly::var(ctx, 3, 2);
    let mut m = tvar.try_mul(&h1m.try_pow(t as u64)?)?.try_mul(&h2m.try_pow((d - s) as u64)?)?;
    for (e, a) in u.terms() {
        let j = e.get(0);
        let term = h1m
            .try_pow((t - j) as u64)?
            .try_mul(&h2m.try_pow((j - s) as u64)?)?
            .try_mul(&f1v.try_pow(j as u64)?)?
            .try_mul(&f2v.try_pow((d - j) as u64)?)?
            .scale(a);
        m = m.try_sub(&term)?;
    }
    let at_u = m.substitute(&[u.clone(), f1.clone(), f2.clone()])?;
    if !at_u.is_zero() {
        return Err(AnalyzeError::NotARoot);
    }
    let degree = m.degree_in(0).unwrap_or(0);
    Ok(MinPoly { m, degree })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultantBound {
    /// `deg f1 · deg f2`.
    pub bound: u64,
    /// `deg_{t1}` of `R = res_{t2}(f1(t) - C1, f2(t) - C2)`, when nonzero.
    pub resultant_degree: Option<u32>,
    /// `deg_{t1}` of `R` with its content in `k[t1]` removed. Factors free of
    /// `C1, C2` come from common zeros of the leading coefficients in `t2`,
    /// not from points of the generic fibre.
    pub certificate: Option<u32>,
}

/// Degree bound on `[k(x1, x2) : k(f1, f2)]`.
///
/// The resultant eliminates `t2` from `f_i(t1, t2) - C_i`, where `C_i`
/// stands for `f_i(x1, x2)`. Because a Jacobian pair is algebraically
/// independent, replacing `f_i(x)` by a fresh symbol does not change the
/// `t1`-degree, so the computation stays in three variables `(t1, C1, C2)`.
pub fn resultant_bound(f1: &MultiPoly, f2: &MultiPoly) -> Result<ResultantBound, AnalyzeError> {
    check_pair(f1, f2)?;
    if is_jacobian_pair(f1, f2)?.is_none() {
        let j = jacobian_det(&[f1.clone(), f2.clone()])?;
        return Err(AnalyzeError::NotJacobian(j.to_string()));
    }
    let bound = degree(f1) as u64 * degree(f2) as u64;
    let ctx = f1.ctx();
    let lift = |f: &MultiPoly, sym: usize| -> Result<Vec<MultiPoly>, AnalyzeError> {
        let mut cs: Vec<MultiPoly> = f
            .coefficients_in(1)?
            .iter()
            .map(|c| c.with_nvars(1).and_then(|c| c.with_nvars(3)))
            .collect::<Result<_, _>>()?;
        cs[0] = cs[0].try_sub(&MultiPoly::var(ctx, 3, sym))?;
        Ok(cs)
    };
    let (c1, c2) = (lift(f1, 1)?, lift(f2, 2)?);
    if c1.len() == 1 && c2.len() == 1 {
        return Ok(ResultantBound { bound, resultant_degree: None, certificate: None });
    }
    let r = sylvester_resultant(&c1, &c2)?;
    if r.is_zero() {
        return Ok(ResultantBound { bound, resultant_degree: None, certificate: None });
    }
    let resultant_degree = r.degree_in(0).unwrap_or(0);
    // Group by the (C1, C2) exponents; each group is a polynomial in t1.
    let mut groups: HashMap<(u32, u32), Vec<u64>> = HashMap::new();
    for (e, c) in r.terms() {
        let slot = groups.entry((e.get(1), e.get(2))).or_default();
        let i = e.get(0) as usize;
        if slot.len() <= i {
            slot.resize(i + 1, 0);
        }
        slot[i] = c.value();
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut content: Option<UniPoly> = None;
    for key in keys {
        let g = UniPoly::new(ctx, groups[&key].clone());
        content = Some(match content {
            None => g.monic().1,
            Some(c) => uni_gcd(&c, &g)?,
        });
    }
    let content_degree = content.and_then(|c| c.degree()).unwrap_or(0) as u32;
    Ok(ResultantBound {
        bound,
        resultant_degree: Some(resultant_degree),
        certificate: Some(resultant_degree - content_degree),
    })
}

/// All conjecture-relevant predicates for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub p: u64,
    pub deg1: u32,
    pub deg2: u32,
    pub jacobian_value: MultiPoly,
    pub is_jacobian: bool,
    pub pts_inf: [InfinityReport; 2],
    /// `None` when the member lies in `k[x1^p, x2^p]` and has no bar form.
    pub pts_inf_mod_p: [Option<InfinityReport>; 2],
    pub triangle: [bool; 2],
    pub degree_divisibility: bool,
    pub low_degree_applicable: bool,
    pub automorphic: bool,
    pub witness: Option<MorphismChain>,
    pub extension_degree: Option<u128>,
}

/// Assembles a [`PairReport`]. `extension_degree` comes from a generating
/// witness when one is known; automorphic pairs always get degree 1.
pub fn conjecture_report(
    f1: &MultiPoly,
    f2: &MultiPoly,
    extension_degree: Option<u128>,
) -> Result<PairReport, AnalyzeError> {
    check_pair(f1, f2)?;
    if f1.is_zero() || f2.is_zero() {
        return Err(AnalyzeError::ZeroInput);
    }
    let jacobian_value = jacobian_det(&[f1.clone(), f2.clone()])?;
    let is_jacobian = jacobian_value.constant_value().is_some_and(|c| !c.is_zero());
    let (deg1, deg2) = (degree(f1), degree(f2));
    let p = f1.ctx().p();
    let mod_p = |f: &MultiPoly| match points_at_infinity_mod_p(f) {
        Ok(r) => Ok(Some(r)),
        Err(FormsError::Poly(PolyError::NoBarForm)) => Ok(None),
        Err(e) => Err(e),
    };
    let decision = is_automorphic_pair(f1, f2)?;
    let extension_degree = if decision.automorphic { Some(1) } else { extension_degree };
    Ok(PairReport {
        p,
        deg1,
        deg2,
        jacobian_value,
        is_jacobian,
        pts_inf: [points_at_infinity(f1)?, points_at_infinity(f2)?],
        pts_inf_mod_p: [mod_p(f1)?, mod_p(f2)?],
        triangle: [is_triangle_polygon(f1)?, is_triangle_polygon(f2)?],
        degree_divisibility: deg1 != 0 && deg2 != 0 && (deg1 % deg2 == 0 || deg2 % deg1 == 0),
        low_degree_applicable: (deg1 as u64) < p && (deg2 as u64) < p,
        automorphic: decision.automorphic,
        witness: decision.witness,
        extension_degree,
    })
}

#[cfg(test)]
mod tests;
