//! Generators for type (b) families, coefficient searches, the mixed
//! compositions, and reduction of integer pairs modulo p.
//!
//! Every family here is an instance of [`TypeB`]: `x_i -> x_i h_i(u)` with
//! `u` a monomial (or a monomial times a p-th power). Scaling `h1` or `h2`
//! by a unit gives an equivalent pair, so searches fix `h_i(0) = 1`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::analyze::{is_jacobian_pair, AnalyzeError};
use crate::field::{FieldCtx, FieldError, FpElem};
use crate::forms::{points_at_infinity_mod_p, FormsError, InfinityReport, UniPoly};
use crate::morph::{beta_system, jacobian_condition, ElementaryMap, MorphError, MorphismChain, TypeB};
use crate::poly::{jacobian_det, parse_terms, ExponentVector, MultiPoly, PolyError};

/// Largest coefficient magnitude accepted by [`IntPolyPair`].
pub const INT_COEFF_BOUND: i128 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("p = 2 is excluded for this family")]
    PrimeTwo,
    #[error("a ≡ 0 (mod p)")]
    AZero,
    #[error("a ≡ 1 (mod p)")]
    AOne,
    #[error("a ≡ -1 (mod p)")]
    AMinusOne,
    #[error("a ≡ -1/2 (mod p)")]
    AMinusHalf,
    #[error("m p = {mp} must exceed a = {a}")]
    MpTooSmall { mp: u64, a: u32 },
    #[error("alpha must be nonzero mod p")]
    AlphaZero,
    #[error("b = s p - 1 - 2a must be positive")]
    BNotPositive,
    #[error("m and n must be positive")]
    ZeroDegree,
    #[error("h1 and h2 must have positive degree")]
    ConstantH,
    #[error("d/du (u h1(u) h2(u)) = {0} is not a nonzero constant")]
    DerivativeNotConstant(String),
    #[error("a b ≡ 0 (mod p)")]
    ExponentsDivisible,
    #[error("1 + a m + b n ≢ 0 (mod p)")]
    NecessaryCondition,
    #[error("search bounds exceeded: need p ≤ 5, 1 ≤ d ≤ 6, 1 ≤ m, n ≤ 2")]
    SearchBounds,
    #[error("inadmissible search point: {0}")]
    Inadmissible(&'static str),
    #[error("coefficient {0} exceeds 2^31 in magnitude")]
    CoefficientBound(i128),
    #[error("support shrinks mod {p} at {monomials}")]
    SupportShrink { p: u64, monomials: String },
    #[error("J = {0} is not a nonzero constant")]
    NotJacobian(String),
    #[error("unknown family tag '{0}'")]
    UnknownFamily(String),
    #[error("bad family line: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

/// One parameter value of a [`FamilySpec`]; polynomial values order by text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamValue {
    Int(i64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Text(s) => write!(f, "{}", s.replace(' ', "")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Linear { p: u64, a: u32, m: u32, alpha: u64 },
    Product { p: u64, h1: UniPoly, h2: UniPoly },
    Quadratic { p: u64, a: u32, s: u32, alpha1: u64 },
    General { p: u64, a: u32, b: u32, hcore: MultiPoly, h1: UniPoly, h2: UniPoly },
}

impl FamilySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::Linear { .. } => "ex41",
            FamilySpec::Product { .. } => "ex44c1",
            FamilySpec::Quadratic { .. } => "ex44c2",
            FamilySpec::General { .. } => "prop48",
        }
    }

    pub fn p(&self) -> u64 {
        match self {
            FamilySpec::Linear { p, .. }
            | FamilySpec::Product { p, .. }
            | FamilySpec::Quadratic { p, .. }
            | FamilySpec::General { p, .. } => *p,
        }
    }

    /// Parameters in a fixed order, excluding `p`.
    pub fn params(&self) -> Vec<(&'static str, ParamValue)> {
        use ParamValue::{Int, Text};
        match self {
            FamilySpec::Linear { a, m, alpha, .. } => {
                vec![("a", Int(*a as i64)), ("m", Int(*m as i64)), ("alpha", Int(*alpha as i64))]
            }
            FamilySpec::Product { h1, h2, .. } => {
                vec![("h1", Text(h1.to_string())), ("h2", Text(h2.to_string()))]
            }
            FamilySpec::Quadratic { a, s, alpha1, .. } => {
                vec![("a", Int(*a as i64)), ("s", Int(*s as i64)), ("alpha1", Int(*alpha1 as i64))]
            }
            FamilySpec::General { a, b, hcore, h1, h2, .. } => vec![
                ("a", Int(*a as i64)),
                ("b", Int(*b as i64)),
                ("hcore", Text(hcore.to_string())),
                ("h1", Text(h1.to_string())),
                ("h2", Text(h2.to_string())),
            ],
        }
    }

    /// Parses `family=<tag> p=<p> key=value ...`.
    pub fn parse_line(line: &str) -> Result<Self, FamilyError> {
        let mut kv = BTreeMap::new();
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| FamilyError::BadSpec(format!("expected key=value, got '{tok}'")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| FamilyError::BadSpec(format!("missing '{k}'")));
        let int = |k: &str| -> Result<u64, FamilyError> {
            get(k)?.parse().map_err(|_| FamilyError::BadSpec(format!("'{k}' is not a nonnegative integer")))
        };
        let small = |k: &str| -> Result<u32, FamilyError> {
            u32::try_from(int(k)?).map_err(|_| FamilyError::BadSpec(format!("'{k}' is too large")))
        };
        let p = int("p")?;
        let ctx = FieldCtx::new(p)?;
        let uni = |k: &str| UniPoly::parse(ctx, get(k)?).map_err(FamilyError::from);
        match get("family")? {
            "ex41" => Ok(FamilySpec::Linear { p, a: small("a")?, m: small("m")?, alpha: int("alpha")? }),
            "ex44c1" => Ok(FamilySpec::Product { p, h1: uni("h1")?, h2: uni("h2")? }),
            "ex44c2" => Ok(FamilySpec::Quadratic { p, a: small("a")?, s: small("s")?, alpha1: int("alpha1")? }),
            "prop48" => Ok(FamilySpec::General {
                p,
                a: small("a")?,
                b: small("b")?,
                hcore: MultiPoly::parse(ctx, 2, get("hcore")?)?,
                h1: uni("h1")?,
                h2: uni("h2")?,
            }),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }

    /// The type (b) map realising this family, with all side conditions checked.
    pub fn type_b(&self) -> Result<TypeB, FamilyError> {
        let ctx = FieldCtx::new(self.p())?;
        match self {
            FamilySpec::Linear { a, m, alpha, .. } => linear_pair_map(ctx, *a, *m, ctx.elem(*alpha)),
            FamilySpec::Product { h1, h2, .. } => product_pair_map(h1, h2),
            FamilySpec::Quadratic { a, s, alpha1, .. } => quadratic_pair_map(ctx, *a, *s, ctx.elem(*alpha1)),
            FamilySpec::General { a, b, hcore, h1, h2, .. } => type_b_pair_map(*a, *b, hcore, h1, h2),
        }
    }

    /// The image pair, re-verified to be a Jacobian pair.
    pub fn build(&self) -> Result<(MultiPoly, MultiPoly), FamilyError> {
        images_checked(&self.type_b()?)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={} p={}", self.tag(), self.p())?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn images_checked(tb: &TypeB) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    let (f1, f2) = ElementaryMap::TypeB(tb.clone()).apply()?;
    if is_jacobian_pair(&f1, &f2)?.is_none() {
        return Err(FamilyError::NotJacobian(jacobian_det(&[f1, f2])?.to_string()));
    }
    Ok((f1, f2))
}

fn linear(ctx: FieldCtx, c1: FpElem) -> UniPoly {
    UniPoly::from_elems(ctx, &[ctx.one(), c1])
}

fn linear_pair_map(ctx: FieldCtx, a: u32, m: u32, alpha: FpElem) -> Result<TypeB, FamilyError> {
    let p = ctx.p();
    if p == 2 {
        return Err(FamilyError::PrimeTwo);
    }
    if (a as u64).is_multiple_of(p) {
        return Err(FamilyError::AZero);
    }
    if a as u64 % p == 1 {
        return Err(FamilyError::AOne);
    }
    let mp = m as u64 * p;
    if mp <= a as u64 {
        return Err(FamilyError::MpTooSmall { mp, a });
    }
    if alpha.is_zero() {
        return Err(FamilyError::AlphaZero);
    }
    let fa = ctx.elem(a as u64);
    let beta = fa * alpha * (fa - ctx.one()).inv()?;
    let b = u32::try_from(mp - a as u64).map_err(|_| MorphError::DegreeOverflow)?;
    Ok(TypeB::new(a - 1, b, MultiPoly::one(ctx, 2), linear(ctx, alpha), linear(ctx, beta))?)
}

/// `f1 = x1(α x1^{a-1} x2^{mp-a} + 1)`, `f2 = x2((aα/(a-1)) x1^{a-1} x2^{mp-a} + 1)`.
pub fn gen_linear_pair(ctx: FieldCtx, a: u32, m: u32, alpha: FpElem) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    images_checked(&linear_pair_map(ctx, a, m, alpha)?)
}

fn product_pair_map(h1: &UniPoly, h2: &UniPoly) -> Result<TypeB, FamilyError> {
    let ctx = h1.ctx();
    if h1.degree().unwrap_or(0) == 0 || h2.degree().unwrap_or(0) == 0 {
        return Err(FamilyError::ConstantH);
    }
    let deriv = UniPoly::t(ctx).mul(h1).mul(h2).derivative();
    if deriv.degree() != Some(0) {
        return Err(FamilyError::DerivativeNotConstant(deriv.to_string()));
    }
    Ok(TypeB::new(1, 1, MultiPoly::one(ctx, 2), h1.clone(), h2.clone())?)
}

/// `(x1 h1(x1 x2), x2 h2(x1 x2))`, accepted iff `(u h1(u) h2(u))'` is a
/// nonzero constant.
pub fn gen_product_pair(h1: &UniPoly, h2: &UniPoly) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    images_checked(&product_pair_map(h1, h2)?)
}

/// `(b, β1, α2)` for the quadratic-linear case.
fn quadratic_pair_coeffs(ctx: FieldCtx, a: u32, s: u32, alpha1: FpElem) -> Result<(u32, FpElem, FpElem), FamilyError> {
    let p = ctx.p();
    if p == 2 {
        return Err(FamilyError::PrimeTwo);
    }
    if alpha1.is_zero() {
        return Err(FamilyError::AlphaZero);
    }
    let sp = s as u64 * p;
    if sp <= 1 + 2 * a as u64 {
        return Err(FamilyError::BNotPositive);
    }
    let fa = ctx.elem(a as u64);
    if fa.is_zero() {
        return Err(FamilyError::AZero);
    }
    if (fa + ctx.one()).is_zero() {
        return Err(FamilyError::AMinusOne);
    }
    let two_a = fa + fa;
    if (two_a + ctx.one()).is_zero() {
        return Err(FamilyError::AMinusHalf);
    }
    let b = u32::try_from(sp - 1 - 2 * a as u64).map_err(|_| MorphError::DegreeOverflow)?;
    let beta1 = (ctx.one() + fa) * two_a.inv()? * alpha1;
    // Solves (1 + 2a) α2 + (1 + a + b) α1 β1 = 0 with 1 + a + b ≡ -a.
    let two = ctx.elem(2);
    let alpha2 = (fa + ctx.one()) * (two * (two_a + ctx.one())).inv()? * alpha1 * alpha1;
    Ok((b, beta1, alpha2))
}

fn quadratic_pair_map(ctx: FieldCtx, a: u32, s: u32, alpha1: FpElem) -> Result<TypeB, FamilyError> {
    let (b, beta1, alpha2) = quadratic_pair_coeffs(ctx, a, s, alpha1)?;
    let h1 = UniPoly::from_elems(ctx, &[ctx.one(), alpha1, alpha2]);
    Ok(TypeB::new(a, b, MultiPoly::one(ctx, 2), h1, linear(ctx, beta1))?)
}

/// `f1 = x1(1 + α1 u + α2 u²)`, `f2 = x2(1 + β1 u)` with `u = x1^a x2^b`,
/// `b = sp - 1 - 2a`.
pub fn gen_quadratic_pair(ctx: FieldCtx, a: u32, s: u32, alpha1: FpElem) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    images_checked(&quadratic_pair_map(ctx, a, s, alpha1)?)
}

fn type_b_pair_map(a: u32, b: u32, hcore: &MultiPoly, h1: &UniPoly, h2: &UniPoly) -> Result<TypeB, FamilyError> {
    let p = hcore.ctx().p();
    if a == 0 || b == 0 || ((a as u64 % p) * (b as u64 % p)).is_multiple_of(p) {
        return Err(FamilyError::ExponentsDivisible);
    }
    if h1.degree().unwrap_or(0) == 0 || h2.degree().unwrap_or(0) == 0 {
        return Err(FamilyError::ConstantH);
    }
    Ok(TypeB::new(a, b, hcore.clone(), h1.clone(), h2.clone())?)
}

/// `(x1 h1(u), x2 h2(u))` with `u = x1^a x2^b hcore^p`.
pub fn gen_type_b_pair(
    a: u32,
    b: u32,
    hcore: &MultiPoly,
    h1: &UniPoly,
    h2: &UniPoly,
) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    images_checked(&type_b_pair_map(a, b, hcore, h1, h2)?)
}

/// All vectors in `F_p^len` (as value arrays) ordered by coordinate sum,
/// then lexicographically.
fn graded_vectors(p: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out.sort_by(|x, y| (x.iter().sum::<u64>(), x).cmp(&(y.iter().sum::<u64>(), y)));
    out
}

/// Every `(h1, h2)` with `h1(0) = h2(0) = 1`, `deg h1 = m`, `deg h2 = n`
/// solving the type (b) condition for `u = x1^a x2^b`. The first `budget`
/// α-vectors in graded order are tried; for each, the whole affine space of
/// β solutions is enumerated.
pub fn search_type_b(
    ctx: FieldCtx,
    a: u32,
    b: u32,
    m: u32,
    n: u32,
    budget: usize,
) -> Result<Vec<(UniPoly, UniPoly)>, FamilyError> {
    let p = ctx.p();
    if ((a as u64 % p) * (b as u64 % p)).is_multiple_of(p) {
        return Err(FamilyError::ExponentsDivisible);
    }
    if m == 0 || n == 0 {
        return Err(FamilyError::ZeroDegree);
    }
    if !(1 + a as u64 * m as u64 + b as u64 * n as u64).is_multiple_of(p) {
        return Err(FamilyError::NecessaryCondition);
    }
    let (m, n) = (m as usize, n as usize);
    let alphas: Vec<Vec<u64>> = graded_vectors(p, m).into_iter().filter(|v| v[m - 1] != 0).take(budget).collect();
    let mut out = Vec::new();
    for av in alphas {
        let mut al = vec![ctx.one()];
        al.extend(av.iter().map(|&v| ctx.elem(v)));
        let Some((particular, kernel)) = crate::linalg::solution_space(ctx, beta_system(ctx, a, b, &al, n), n) else {
            continue;
        };
        let h1 = UniPoly::from_elems(ctx, &al);
        for cs in graded_vectors(p, kernel.len()) {
            let mut beta = particular.clone();
            for (c, v) in cs.iter().zip(&kernel) {
                for (x, y) in beta.iter_mut().zip(v) {
                    *x = *x + ctx.elem(*c) * *y;
                }
            }
            if beta[n - 1].is_zero() {
                continue;
            }
            let mut bl = vec![ctx.one()];
            bl.extend(beta);
            let h2 = UniPoly::from_elems(ctx, &bl);
            let cond = jacobian_condition(a, b, &h1, &h2);
            if cond.degree() != Some(0) {
                return Err(FamilyError::NotJacobian(cond.to_string()));
            }
            out.push((h1.clone(), h2));
        }
    }
    Ok(out)
}

/// `((m - n) i + 1 + n d) a_i = 0` for every term `a_i x1^i x2^{d-i}` of the
/// homogeneous `u`. False when `u` is zero or not homogeneous.
pub fn form_condition_holds(u: &MultiPoly, m: u32, n: u32) -> bool {
    let Some(d) = u.total_degree() else {
        return false;
    };
    if u.nvars() != 2 || !u.is_homogeneous() {
        return false;
    }
    let ctx = u.ctx();
    let (fm, fn_) = (ctx.elem(m as u64), ctx.elem(n as u64));
    u.terms().all(|(e, c)| {
        let i = ctx.elem(e.get(0) as u64);
        ((fm - fn_) * i + ctx.one() + fn_ * ctx.elem(d as u64)) * c == ctx.zero()
    })
}

/// `(x1 h1(u), x2 h2(u))` for an arbitrary bivariate `u`.
pub fn images_for(u: &MultiPoly, h1: &UniPoly, h2: &UniPoly) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    let ctx = u.ctx();
    let x1 = MultiPoly::var(ctx, 2, 0);
    let x2 = MultiPoly::var(ctx, 2, 1);
    Ok((x1.try_mul(&h1.eval_multi(u)?)?, x2.try_mul(&h2.eval_multi(u)?)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub u: MultiPoly,
    pub h1: UniPoly,
    pub h2: UniPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonexistenceReport {
    /// Forms `u` examined after the independence filter.
    pub forms_examined: usize,
    /// Forms skipped because `x1 u_x1` and `x2 u_x2` are dependent.
    pub forms_dependent: usize,
    /// `(u, h1, h2)` triples whose Jacobian was computed.
    pub triples_examined: usize,
    /// False when the budget cut the enumeration short.
    pub exhaustive: bool,
    pub counterexamples: Vec<Counterexample>,
}

/// `x1 u_x1` and `x2 u_x2` span a 2-dimensional space.
fn euler_parts_independent(p: u64, d: u32, coeffs: &[u64]) -> bool {
    let v1: Vec<u64> = coeffs.iter().enumerate().map(|(i, &c)| i as u64 % p * c % p).collect();
    let v2: Vec<u64> = coeffs.iter().enumerate().map(|(i, &c)| (d as u64 - i as u64) % p * c % p).collect();
    (0..coeffs.len())
        .any(|i| (0..coeffs.len()).any(|j| !(v1[i] * v2[j] % p + p - v1[j] * v2[i] % p).is_multiple_of(p)))
}

/// Coefficient vectors `[c_0, ..., c_deg]` with `c_0 ∈ {0, 1}` and `c_deg ≠ 0`.
/// A unit rescaling makes a nonzero `c_0` equal to 1.
fn h_candidates(ctx: FieldCtx, deg: usize) -> Vec<UniPoly> {
    let p = ctx.p();
    let mut out = Vec::new();
    for c0 in 0..2 {
        for mid in graded_vectors(p, deg - 1) {
            for top in 1..p {
                let mut v = vec![c0];
                v.extend(&mid);
                v.push(top);
                out.push(UniPoly::new(ctx, v));
            }
        }
    }
    out
}

/// Brute-force search for Jacobian pairs `(x1 h1(u), x2 h2(u))` with `u` a
/// binary form of degree `d` whose Euler parts are independent, `deg h1 = m`,
/// `deg h2 = n`, `m ≡ n` and `1 + n d ≡ 0 (mod p)`. `u` runs over forms up to
/// scalar (first nonzero coefficient 1); at most `budget` forms are tried.
pub fn search_non_monomial_forms(
    ctx: FieldCtx,
    d: u32,
    m: u32,
    n: u32,
    budget: usize,
) -> Result<NonexistenceReport, FamilyError> {
    let p = ctx.p();
    if p > 5 || d == 0 || d > 6 || !(1..=2).contains(&m) || !(1..=2).contains(&n) {
        return Err(FamilyError::SearchBounds);
    }
    if !(m as u64 + p - n as u64 % p).is_multiple_of(p) {
        return Err(FamilyError::Inadmissible("m ≢ n (mod p)"));
    }
    if !(1 + n as u64 * d as u64).is_multiple_of(p) {
        return Err(FamilyError::Inadmissible("1 + n d ≢ 0 (mod p)"));
    }
    if (d as u64).is_multiple_of(p) {
        return Err(FamilyError::Inadmissible("d ≡ 0 (mod p)"));
    }
    // Coefficient vectors of u in x1-exponent order, first nonzero entry 1.
    let mut forms: Vec<Vec<u64>> = graded_vectors(p, d as usize + 1)
        .into_iter()
        .filter(|v| v.iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    forms.sort();
    let (independent, dependent): (Vec<_>, Vec<_>) =
        forms.into_iter().partition(|v| euler_parts_independent(p, d, v));
    let exhaustive = independent.len() <= budget;
    let chosen: Vec<Vec<u64>> = independent.into_iter().take(budget).collect();
    let h1s = h_candidates(ctx, m as usize);
    let h2s = h_candidates(ctx, n as usize);

    let per_form: Vec<Result<Vec<Counterexample>, FamilyError>> = chosen
        .par_iter()
        .map(|coeffs| {
            let terms: Vec<(ExponentVector, u64)> = coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (ExponentVector::new(&[i as u32, d - i as u32]), c))
                .collect();
            let u = MultiPoly::from_terms(ctx, 2, terms)?;
            let mut found = Vec::new();
            for h1 in &h1s {
                for h2 in &h2s {
                    let (f1, f2) = images_for(&u, h1, h2)?;
                    let j = jacobian_det(&[f1, f2])?;
                    if j.constant_value().is_some_and(|c| !c.is_zero()) {
                        found.push(Counterexample { u: u.clone(), h1: h1.clone(), h2: h2.clone() });
                    }
                }
            }
            Ok(found)
        })
        .collect();
    let mut counterexamples = Vec::new();
    for r in per_form {
        counterexamples.extend(r?);
    }
    Ok(NonexistenceReport {
        forms_examined: chosen.len(),
        forms_dependent: dependent.len(),
        triples_examined: chosen.len() * h1s.len() * h2s.len(),
        exhaustive,
        counterexamples,
    })
}

/// `[ρ, τ]` where `ρ` is the first family map for `(a, m, α)` and
/// `τ = (x1 + x2, x1 - x2)`; as an endomorphism this is `ρ ∘ τ`.
pub fn sum_difference_chain(ctx: FieldCtx, a: u32, m: u32, alpha: FpElem) -> Result<MorphismChain, FamilyError> {
    let rho = ElementaryMap::TypeB(linear_pair_map(ctx, a, m, alpha)?);
    let (z, o) = (ctx.zero(), ctx.one());
    let tau = ElementaryMap::type1([o, o, z, o, -o, z])?;
    Ok(MorphismChain::new(vec![rho, tau])?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedImage {
    pub f1: MultiPoly,
    pub f2: MultiPoly,
    pub pts_inf_mod_p: [InfinityReport; 2],
}

/// Image pair of a chain together with the mod-p infinity reports.
pub fn compose_mixed(chain: &MorphismChain) -> Result<MixedImage, FamilyError> {
    let (f1, f2) = chain.apply()?;
    let pts_inf_mod_p = [points_at_infinity_mod_p(&f1)?, points_at_infinity_mod_p(&f2)?];
    Ok(MixedImage { f1, f2, pts_inf_mod_p })
}

/// A bivariate polynomial with integer coefficients, like terms merged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly {
    terms: BTreeMap<[u32; 2], i64>,
}

impl IntPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, [u32; 2])>) -> Result<Self, FamilyError> {
        let mut acc: BTreeMap<[u32; 2], i128> = BTreeMap::new();
        for (c, e) in terms {
            *acc.entry(e).or_default() += c as i128;
        }
        Self::from_acc(acc)
    }

    fn from_acc(acc: BTreeMap<[u32; 2], i128>) -> Result<Self, FamilyError> {
        let mut terms = BTreeMap::new();
        for (e, c) in acc {
            if c.abs() > INT_COEFF_BOUND {
                return Err(FamilyError::CoefficientBound(c));
            }
            if c != 0 {
                terms.insert(e, c as i64);
            }
        }
        Ok(Self { terms })
    }

    pub fn parse(s: &str) -> Result<Self, FamilyError> {
        let raw = parse_terms(s, 1, 2).map_err(PolyError::from)?;
        let mut acc: BTreeMap<[u32; 2], i128> = BTreeMap::new();
        for t in raw {
            let c = i128::try_from(t.coeff)
                .ok()
                .filter(|c| *c <= INT_COEFF_BOUND)
                .ok_or(FamilyError::CoefficientBound(i128::MAX))?;
            *acc.entry([t.exps[0], t.exps[1]]).or_default() += if t.negative { -c } else { c };
        }
        Self::from_acc(acc)
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 2], i64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn support(&self) -> Vec<[u32; 2]> {
        self.terms.keys().copied().collect()
    }

    pub fn reduce(&self, ctx: FieldCtx) -> Result<MultiPoly, FamilyError> {
        let p = ctx.p() as i64;
        let terms = self
            .terms()
            .map(|(e, c)| (ExponentVector::new(&e), c.rem_euclid(p) as u64))
            .collect::<Vec<_>>();
        Ok(MultiPoly::from_terms(ctx, 2, terms)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolyPair {
    pub f1: IntPoly,
    pub f2: IntPoly,
}

/// Reduces an integer pair mod p, rejecting it when a monomial vanishes or
/// the reduced Jacobian is not a nonzero constant.
pub fn reduce_mod_p(pair: &IntPolyPair, ctx: FieldCtx) -> Result<(MultiPoly, MultiPoly), FamilyError> {
    let p = ctx.p() as i64;
    let lost: Vec<String> = [&pair.f1, &pair.f2]
        .iter()
        .flat_map(|f| f.terms().filter(|(_, c)| c % p == 0).map(|(e, _)| format!("({},{})", e[0], e[1])))
        .collect();
    if !lost.is_empty() {
        return Err(FamilyError::SupportShrink { p: ctx.p(), monomials: lost.join(", ") });
    }
    let f1 = pair.f1.reduce(ctx)?;
    let f2 = pair.f2.reduce(ctx)?;
    if is_jacobian_pair(&f1, &f2)?.is_none() {
        return Err(FamilyError::NotJacobian(jacobian_det(&[f1, f2])?.to_string()));
    }
    Ok((f1, f2))
}
