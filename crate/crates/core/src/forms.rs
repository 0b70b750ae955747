//! Univariate polynomials and binary forms over F_p.
//!
//! Points at infinity are counted over the algebraic closure: an irreducible
//! factor of degree d over F_p accounts for d distinct projective roots. No
//! extension field is ever built.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldCtx, FpElem};
use crate::poly::{ExponentVector, HomogComponent, MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    #[error("operation undefined for the zero polynomial")]
    ZeroInput,
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("expected a bivariate polynomial")]
    NotBivariate,
    #[error("expected a homogeneous form")]
    NotHomogeneous,
    #[error("polynomial involves variables other than x{0}")]
    NotUnivariate(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    ctx: FieldCtx,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(ctx: FieldCtx, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % ctx.p()).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { ctx, coeffs }
    }

    pub fn from_elems(ctx: FieldCtx, coeffs: &[FpElem]) -> Self {
        Self::new(ctx, coeffs.iter().map(|c| c.value()).collect())
    }

    pub fn zero(ctx: FieldCtx) -> Self {
        Self { ctx, coeffs: Vec::new() }
    }

    pub fn constant(ctx: FieldCtx, c: u64) -> Self {
        Self::new(ctx, vec![c])
    }

    pub fn one(ctx: FieldCtx) -> Self {
        Self::constant(ctx, 1)
    }

    /// The indeterminate `t`.
    pub fn t(ctx: FieldCtx) -> Self {
        Self::new(ctx, vec![0, 1])
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FpElem {
        self.ctx.elem(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> FpElem {
        self.ctx.elem(self.coeffs.last().copied().unwrap_or(0))
    }

    /// `(lc, self / lc)`; the zero polynomial maps to `(0, 0)`.
    pub fn monic(&self) -> (FpElem, UniPoly) {
        let lc = self.lead();
        if lc.is_zero() {
            return (lc, self.clone());
        }
        let inv = lc.inv().expect("nonzero").value();
        (lc, self.scale_raw(inv))
    }

    fn scale_raw(&self, c: u64) -> UniPoly {
        Self::new(self.ctx, self.coeffs.iter().map(|&x| self.ctx.mul_raw(x, c % self.ctx.p())).collect())
    }

    pub fn scale(&self, c: FpElem) -> UniPoly {
        self.scale_raw(c.value())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.ctx.add_raw(self.coeff(i).value(), other.coeff(i).value()))
            .collect();
        Self::new(self.ctx, v)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.ctx.sub_raw(self.coeff(i).value(), other.coeff(i).value()))
            .collect();
        Self::new(self.ctx, v)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ctx);
        }
        let p = self.ctx.p();
        let mut v = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + a * b) % p;
            }
        }
        Self::new(self.ctx, v)
    }

    pub fn pow(&self, mut e: u64) -> UniPoly {
        let mut acc = Self::one(self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.ctx.mul_raw(c, i as u64 % self.ctx.p()))
            .collect();
        Self::new(self.ctx, v)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = d.lead().inv().unwrap().value();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(self.ctx), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = self.ctx.mul_raw(r[i + dd], inv);
            q[i] = c;
            if c != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = self.ctx.sub_raw(r[i + j], self.ctx.mul_raw(c, dc));
                }
            }
        }
        r.truncate(dd);
        (Self::new(self.ctx, q), Self::new(self.ctx, r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact univariate division");
        q
    }

    pub fn eval(&self, x: FpElem) -> FpElem {
        let v = self.coeffs.iter().rev().fold(0, |acc, &c| self.ctx.add_raw(self.ctx.mul_raw(acc, x.value()), c));
        self.ctx.elem(v)
    }

    /// `self(g)` for a univariate `g`.
    pub fn compose(&self, g: &UniPoly) -> UniPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(self.ctx), |acc, &c| acc.mul(g).add(&Self::constant(self.ctx, c)))
    }

    /// `self(g)` for a multivariate `g`.
    pub fn eval_multi(&self, g: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.to_multi(1, 0)?.substitute(std::slice::from_ref(g))
    }

    /// Embeds as a polynomial in `x_{var+1}` inside a ring with `nvars` variables.
    pub fn to_multi(&self, nvars: usize, var: usize) -> Result<MultiPoly, PolyError> {
        if var >= nvars {
            return Err(PolyError::BadVariable(var, nvars));
        }
        let terms = self.coeffs.iter().enumerate().filter(|t| *t.1 != 0).map(|(i, &c)| {
            let mut e = [0u32; 3];
            e[var] = i as u32;
            (ExponentVector(e), c)
        });
        MultiPoly::from_terms(self.ctx, nvars, terms)
    }

    /// Reads a polynomial that involves only `x_{var+1}`.
    pub fn from_multi(f: &MultiPoly, var: usize) -> Result<UniPoly, FormsError> {
        let mut coeffs = vec![0u64; f.degree_in(var).unwrap_or(0) as usize + 1];
        for (e, c) in f.terms() {
            if (0..3).any(|v| v != var && e.get(v) != 0) {
                return Err(FormsError::NotUnivariate(var + 1));
            }
            coeffs[e.get(var) as usize] = c.value();
        }
        Ok(Self::new(f.ctx(), coeffs))
    }

    /// Parses the polynomial grammar with `x1` as the variable.
    pub fn parse(ctx: FieldCtx, s: &str) -> Result<UniPoly, FormsError> {
        Self::from_multi(&MultiPoly::parse(ctx, 1, s)?, 0)
    }

    /// `f(x^p) -> f(x)`: the p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> UniPoly {
        let p = self.ctx.p() as usize;
        Self::new(self.ctx, self.coeffs.iter().step_by(p).copied().collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_multi(1, 0) {
            Ok(m) => write!(f, "{m}"),
            Err(_) => write!(f, "<exponent overflow>"),
        }
    }
}

/// Monic gcd by Euclid's algorithm.
pub fn uni_gcd(f: &UniPoly, g: &UniPoly) -> Result<UniPoly, FormsError> {
    if f.is_zero() && g.is_zero() {
        return Err(FormsError::BothZero);
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    Ok(a.monic().1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomp {
    pub unit: FpElem,
    /// Monic, squarefree, pairwise coprime, sorted by multiplicity.
    pub factors: Vec<(UniPoly, u64)>,
}

impl SquarefreeDecomp {
    pub fn reconstruct(&self) -> UniPoly {
        let ctx = self.unit.ctx();
        self.factors
            .iter()
            .fold(UniPoly::constant(ctx, self.unit.value()), |acc, (g, m)| acc.mul(&g.pow(*m)))
    }
}

fn sqf_monic(f: &UniPoly, out: &mut Vec<(UniPoly, u64)>, scale: u64) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let ctx = f.ctx();
    let df = f.derivative();
    let mut c = uni_gcd(f, &df).expect("f nonzero");
    let mut w = f.div_exact(&c);
    let mut i = 1u64;
    while !w.is_one() {
        let y = uni_gcd(&w, &c).expect("w nonzero");
        let fac = w.div_exact(&y);
        if !fac.is_one() {
            out.push((fac, i * scale));
        }
        c = c.div_exact(&y);
        w = y;
        i += 1;
    }
    if !c.is_one() {
        // Every remaining multiplicity is divisible by p.
        sqf_monic(&c.pth_root(), out, scale * ctx.p());
    }
}

/// Squarefree decomposition valid in characteristic p: the part whose
/// derivative vanishes is unwound through its p-th root.
pub fn squarefree_decompose(f: &UniPoly) -> Result<SquarefreeDecomp, FormsError> {
    if f.is_zero() {
        return Err(FormsError::ZeroInput);
    }
    let (unit, m) = f.monic();
    let mut factors = Vec::new();
    sqf_monic(&m, &mut factors, 1);
    factors.sort_by_key(|t| t.1);
    Ok(SquarefreeDecomp { unit, factors })
}

fn powmod(base: &UniPoly, mut e: u64, m: &UniPoly) -> UniPoly {
    let mut acc = UniPoly::one(base.ctx()).rem(m);
    let mut b = base.rem(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).rem(m);
        }
        b = b.mul(&b).rem(m);
        e >>= 1;
    }
    acc
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs
/// `(product of all irreducible factors of degree d, d)`.
pub fn distinct_degree_factor(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let ctx = f.ctx();
    let p = ctx.p();
    let x = UniPoly::t(ctx);
    let mut rest = f.monic().1;
    let mut out = Vec::new();
    let mut h = x.rem(&rest);
    let mut d = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = powmod(&h, p, &rest);
        let g = uni_gcd(&rest, &h.sub(&x)).expect("rest nonzero");
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(dr) = rest.degree().filter(|&k| k > 0) {
        out.push((rest, dr));
    }
    out
}

/// One squarefree part of a binary form. `None` stands for the factor `x2`,
/// which dehomogenization at `x2 = 1` would otherwise lose.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FormPart {
    dehom: Option<UniPoly>,
    mult: u64,
}

impl FormPart {
    fn degree(&self) -> usize {
        self.dehom.as_ref().map_or(1, |g| g.degree().unwrap())
    }

    fn homogenize(&self, ctx: FieldCtx) -> MultiPoly {
        match &self.dehom {
            None => MultiPoly::var(ctx, 2, 1),
            Some(g) => homogenize(g, g.degree().unwrap() as u32),
        }
    }

    // (irreducible degree, multiplicity) for each irreducible factor.
    fn profile(&self) -> Vec<(u32, u64)> {
        match &self.dehom {
            None => vec![(1, self.mult)],
            Some(g) => distinct_degree_factor(g)
                .into_iter()
                .flat_map(|(prod, d)| {
                    let count = prod.degree().unwrap() / d;
                    std::iter::repeat_n((d as u32, self.mult), count)
                })
                .collect(),
        }
    }
}

fn homogenize(g: &UniPoly, degree: u32) -> MultiPoly {
    let terms = g.coeffs().iter().enumerate().filter(|t| *t.1 != 0).map(|(i, &c)| {
        (ExponentVector([i as u32, degree - i as u32, 0]), c)
    });
    MultiPoly::from_terms(g.ctx(), 2, terms).expect("degrees bounded by the input form")
}

fn check_form(form: &MultiPoly) -> Result<u32, FormsError> {
    if form.nvars() != 2 {
        return Err(FormsError::NotBivariate);
    }
    if form.is_zero() {
        return Err(FormsError::ZeroInput);
    }
    if !form.is_homogeneous() {
        return Err(FormsError::NotHomogeneous);
    }
    Ok(form.total_degree().unwrap())
}

// Unit plus squarefree parts of a nonzero binary form.
fn factor_form(form: &MultiPoly) -> Result<(FpElem, Vec<FormPart>), FormsError> {
    let degree = check_form(form)?;
    let phi = UniPoly::from_multi(
        &form.substitute(&[MultiPoly::var(form.ctx(), 1, 0), MultiPoly::one(form.ctx(), 1)])?,
        0,
    )?;
    let x2_mult = degree as u64 - phi.degree().unwrap() as u64;
    let sqf = squarefree_decompose(&phi)?;
    let mut parts: Vec<FormPart> = Vec::new();
    if x2_mult > 0 {
        parts.push(FormPart { dehom: None, mult: x2_mult });
    }
    parts.extend(sqf.factors.into_iter().map(|(g, mult)| FormPart { dehom: Some(g), mult }));
    Ok((sqf.unit, parts))
}

/// Splits a binary form as `F = G * H^p` with `G` and `H` coprime, every
/// factor of `G` having multiplicity prime to p and `H` collecting the
/// factors whose multiplicity p divides.
pub fn gp_split(f: &HomogComponent) -> Result<(HomogComponent, HomogComponent), FormsError> {
    let ctx = f.form.ctx();
    let p = ctx.p();
    let (unit, parts) = factor_form(&f.form)?;
    let mut g = MultiPoly::constant(ctx, 2, unit.value());
    let mut h = MultiPoly::one(ctx, 2);
    for part in &parts {
        let base = part.homogenize(ctx);
        if part.mult % p == 0 {
            h = h.try_mul(&base.try_pow(part.mult / p)?)?;
        } else {
            g = g.try_mul(&base.try_pow(part.mult)?)?;
        }
    }
    let gd = g.total_degree().unwrap();
    let hd = h.total_degree().unwrap();
    Ok((HomogComponent { degree: gd, form: g }, HomogComponent { degree: hd, form: h }))
}

/// Squarefree parts of a binary form as homogeneous polynomials with their
/// multiplicities. Parts are pairwise coprime but not necessarily irreducible.
pub fn form_squarefree_parts(form: &MultiPoly) -> Result<Vec<(MultiPoly, u64)>, FormsError> {
    let (_, parts) = factor_form(form)?;
    Ok(parts.iter().map(|p| (p.homogenize(form.ctx()), p.mult)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinityReport {
    /// Distinct projective roots over the algebraic closure.
    pub count: u32,
    pub top_form_degree: u32,
    /// `(irreducible factor degree, multiplicity)`, sorted.
    pub factor_profile: Vec<(u32, u64)>,
    pub mod_p: bool,
}

fn report_for(parts: &[FormPart], top_form_degree: u32, mod_p: bool) -> InfinityReport {
    let count = parts.iter().map(|p| p.degree() as u32).sum();
    let mut factor_profile: Vec<(u32, u64)> = parts.iter().flat_map(|p| p.profile()).collect();
    factor_profile.sort_unstable();
    InfinityReport { count, top_form_degree, factor_profile, mod_p }
}

/// Distinct projective roots of `f^+`.
pub fn points_at_infinity(f: &MultiPoly) -> Result<InfinityReport, FormsError> {
    if f.nvars() != 2 {
        return Err(FormsError::NotBivariate);
    }
    let top = f.leading_form().map_err(|_| FormsError::ZeroInput)?;
    let (_, parts) = factor_form(&top.form)?;
    Ok(report_for(&parts, top.degree, false))
}

/// Distinct roots of the prime-to-p part of the top form of `f̄`.
pub fn points_at_infinity_mod_p(f: &MultiPoly) -> Result<InfinityReport, FormsError> {
    if f.nvars() != 2 {
        return Err(FormsError::NotBivariate);
    }
    if f.is_zero() {
        return Err(FormsError::ZeroInput);
    }
    let top = f.bar()?.leading_form()?;
    let p = f.ctx().p();
    let (_, parts) = factor_form(&top.form)?;
    let kept: Vec<FormPart> = parts.into_iter().filter(|part| part.mult % p != 0).collect();
    Ok(report_for(&kept, top.degree, true))
}
