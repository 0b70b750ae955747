//! Sparse polynomials over F_p in up to three variables.
//!
//! Terms are kept in graded-lex order (x1 > x2 > x3), highest term first, with
//! no zero coefficients. Equality, hashing and serialization all go through
//! that canonical form.

mod newton;
mod parse;
mod resultant;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::{FieldCtx, FpElem};

pub use newton::{is_triangle_polygon, newton_polygon};
pub use parse::{parse_terms, ParseError, RawTerm};
pub use resultant::{exact_div, resultant, sylvester_resultant};

/// Maximum number of variables.
pub const MAX_VARS: usize = 3;
/// Per-variable exponent cap; exceeding it is an error, never a wraparound.
pub const MAX_EXP: u32 = 1 << 16;

// Dense accumulation box for multiplication, in cells.
const DENSE_LIMIT: usize = 1 << 23;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live over different fields (p = {0} vs p = {1})")]
    ContextMismatch(u64, u64),
    #[error("arity mismatch: {0} vs {1} variables")]
    ArityMismatch(usize, usize),
    #[error("variable count {0} outside 1..=3")]
    BadArity(usize),
    #[error("variable index {0} out of range for {1} variables")]
    BadVariable(usize, usize),
    #[error("exponent exceeds the cap 2^16")]
    ExponentOverflow,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial lies in k[x1^p, x2^p]; it has no bar form")]
    NoBarForm,
    #[error("operation requires a bivariate polynomial")]
    NotBivariate,
    #[error("degree zero in variable x{0}")]
    DegreeZeroInVariable(usize),
    #[error("expected {expected} polynomials, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("exact division failed: divisor does not divide dividend")]
    NotDivisible,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Exponents of one monomial; unused trailing slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExponentVector(pub [u32; MAX_VARS]);

impl ExponentVector {
    pub fn new(exps: &[u32]) -> Self {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Self(e)
    }

    #[inline]
    pub fn total(&self) -> u32 {
        self.0[0] + self.0[1] + self.0[2]
    }

    #[inline]
    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.0[i] + other.0[i];
            if e[i] > MAX_EXP {
                return Err(PolyError::ExponentOverflow);
            }
        }
        Ok(Self(e))
    }

    /// `self / other` when every exponent of `other` is at most ours.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Self(e))
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A homogeneous piece of a polynomial together with its degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogComponent {
    pub degree: u32,
    pub form: MultiPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    ctx: FieldCtx,
    nvars: usize,
    // Descending graded-lex, nonzero reduced coefficients.
    terms: Vec<(ExponentVector, u64)>,
}

impl MultiPoly {
    pub fn zero(ctx: FieldCtx, nvars: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars), "variable count must be 1..=3");
        Self { ctx, nvars, terms: Vec::new() }
    }

    pub fn constant(ctx: FieldCtx, nvars: usize, c: u64) -> Self {
        Self::monomial(ctx, nvars, ExponentVector::default(), c)
    }

    pub fn one(ctx: FieldCtx, nvars: usize) -> Self {
        Self::constant(ctx, nvars, 1)
    }

    /// The variable `x_{var+1}` (0-based index).
    pub fn var(ctx: FieldCtx, nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        let mut e = [0; MAX_VARS];
        e[var] = 1;
        Self::monomial(ctx, nvars, ExponentVector(e), 1)
    }

    pub fn monomial(ctx: FieldCtx, nvars: usize, exps: ExponentVector, c: u64) -> Self {
        let mut p = Self::zero(ctx, nvars);
        debug_assert!(exps.0[nvars..].iter().all(|&e| e == 0));
        let c = c % ctx.p();
        if c != 0 {
            p.terms.push((exps, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_terms(
        ctx: FieldCtx,
        nvars: usize,
        terms: impl IntoIterator<Item = (ExponentVector, u64)>,
    ) -> Result<Self, PolyError> {
        if !(1..=MAX_VARS).contains(&nvars) {
            return Err(PolyError::BadArity(nvars));
        }
        let mut v: Vec<(ExponentVector, u64)> = Vec::new();
        for (e, c) in terms {
            if e.0.iter().any(|&x| x > MAX_EXP) {
                return Err(PolyError::ExponentOverflow);
            }
            if e.0[nvars..].iter().any(|&x| x != 0) {
                return Err(PolyError::BadVariable(nvars, nvars));
            }
            v.push((e, c % ctx.p()));
        }
        Ok(Self::from_raw_unsorted(ctx, nvars, v))
    }

    pub(crate) fn from_raw_unsorted(
        ctx: FieldCtx,
        nvars: usize,
        mut v: Vec<(ExponentVector, u64)>,
    ) -> Self {
        v.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut terms: Vec<(ExponentVector, u64)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match terms.last_mut() {
                Some((le, lc)) if *le == e => *lc = ctx.add_raw(*lc, c),
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
        Self { ctx, nvars, terms }
    }

    /// Trusted constructor: `terms` already canonical.
    pub(crate) fn from_sorted(ctx: FieldCtx, nvars: usize, terms: Vec<(ExponentVector, u64)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| t.1 != 0 && t.1 < ctx.p()));
        Self { ctx, nvars, terms }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending graded-lex) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (ExponentVector, FpElem)> + '_ {
        self.terms.iter().map(move |&(e, c)| (e, self.ctx.elem(c)))
    }

    pub(crate) fn raw_terms(&self) -> &[(ExponentVector, u64)] {
        &self.terms
    }

    pub fn coeff(&self, exps: &ExponentVector) -> FpElem {
        let c = self
            .terms
            .binary_search_by(|t| exps.cmp(&t.0))
            .map(|i| self.terms[i].1)
            .unwrap_or(0);
        self.ctx.elem(c)
    }

    pub fn leading_term(&self) -> Option<(ExponentVector, FpElem)> {
        self.terms.first().map(|&(e, c)| (e, self.ctx.elem(c)))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0.total())
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|t| t.0.get(var)).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.0.total() == 0)
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<FpElem> {
        match self.terms.as_slice() {
            [] => Some(self.ctx.zero()),
            [(e, c)] if e.total() == 0 => Some(self.ctx.elem(*c)),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((e, _)) => self.terms.iter().all(|t| t.0.total() == e.total()),
        }
    }

    fn compat(&self, other: &Self) -> Result<(), PolyError> {
        if self.ctx != other.ctx {
            return Err(PolyError::ContextMismatch(self.ctx.p(), other.ctx.p()));
        }
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn check_var(&self, var: usize) -> Result<(), PolyError> {
        if var >= self.nvars {
            Err(PolyError::BadVariable(var, self.nvars))
        } else {
            Ok(())
        }
    }

    /// `self + c * other`.
    pub fn try_add_scaled(&self, other: &Self, c: u64) -> Result<Self, PolyError> {
        self.compat(other)?;
        let ctx = self.ctx;
        let c = c % ctx.p();
        if c == 0 {
            return Ok(self.clone());
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0, ctx.mul_raw(b[j].1, c)));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = ctx.add_raw(a[i].1, ctx.mul_raw(b[j].1, c));
                    if s != 0 {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(e, bc)| (e, ctx.mul_raw(bc, c))));
        Ok(Self::from_sorted(ctx, self.nvars, out))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add_scaled(other, 1)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add_scaled(other, self.ctx.p() - 1)
    }

    pub fn scale(&self, c: FpElem) -> Self {
        assert_eq!(c.ctx(), self.ctx, "field context mismatch");
        self.scale_raw(c.value())
    }

    pub(crate) fn scale_raw(&self, c: u64) -> Self {
        let c = c % self.ctx.p();
        if c == 0 {
            return Self::zero(self.ctx, self.nvars);
        }
        let terms = self.terms.iter().map(|&(e, x)| (e, self.ctx.mul_raw(x, c))).collect();
        Self::from_sorted(self.ctx, self.nvars, terms)
    }

    /// Multiplies by `c * x^shift`.
    pub fn mul_monomial(&self, shift: &ExponentVector, c: FpElem) -> Result<Self, PolyError> {
        let c = c.value();
        if c == 0 {
            return Ok(Self::zero(self.ctx, self.nvars));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(e, x) in &self.terms {
            terms.push((e.checked_add(shift)?, self.ctx.mul_raw(x, c)));
        }
        // Adding a fixed vector preserves graded-lex order.
        Ok(Self::from_sorted(self.ctx, self.nvars, terms))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compat(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx, self.nvars));
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms[0];
            return other.mul_monomial(&e, self.ctx.elem(c));
        }
        if other.terms.len() == 1 {
            let (e, c) = other.terms[0];
            return self.mul_monomial(&e, self.ctx.elem(c));
        }
        let n = self.nvars;
        let mut dims = [1usize; MAX_VARS];
        for (v, dim) in dims.iter_mut().enumerate().take(n) {
            let d = self.degree_in(v).unwrap() + other.degree_in(v).unwrap();
            if d > MAX_EXP {
                return Err(PolyError::ExponentOverflow);
            }
            *dim = d as usize + 1;
        }
        let cells = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match cells {
            Some(c) if c <= DENSE_LIMIT && c <= 64 * (self.terms.len() * other.terms.len()).max(1024) => {
                Ok(self.mul_dense(other, dims))
            }
            _ => Ok(self.mul_hashed(other)),
        }
    }

    fn mul_dense(&self, other: &Self, dims: [usize; MAX_VARS]) -> Self {
        let ctx = self.ctx;
        let p = ctx.p();
        let strides = [dims[1] * dims[2], dims[2], 1];
        let index = |e: &ExponentVector| {
            e.0[0] as usize * strides[0] + e.0[1] as usize * strides[1] + e.0[2] as usize
        };
        let mut acc = vec![0u64; dims[0] * dims[1] * dims[2]];
        let b_idx: Vec<usize> = other.terms.iter().map(|t| index(&t.0)).collect();
        let b_coef: Vec<u64> = other.terms.iter().map(|t| t.1).collect();
        // Rows that can be accumulated before a reduction pass is required.
        let max_prod = (p - 1) * (p - 1);
        let rows_per_flush = if max_prod == 0 { usize::MAX } else { ((u64::MAX / 2) / max_prod) as usize };
        let mut since_flush = 0usize;
        for &(ea, ca) in &self.terms {
            let base = index(&ea);
            let row = &mut acc[base..];
            for (&ib, &cb) in b_idx.iter().zip(&b_coef) {
                row[ib] += ca * cb;
            }
            since_flush += 1;
            if since_flush >= rows_per_flush {
                acc.iter_mut().for_each(|x| *x %= p);
                since_flush = 0;
            }
        }
        let mut terms = Vec::new();
        if self.nvars <= 2 {
            // Walk the box directly in descending graded-lex order.
            let (d0, d1) = (dims[0] - 1, dims[1] - 1);
            for t in (0..=d0 + d1).rev() {
                let hi = t.min(d0);
                let lo = t.saturating_sub(d1);
                for e0 in (lo..=hi).rev() {
                    let e1 = t - e0;
                    let c = acc[e0 * strides[0] + e1 * strides[1]] % p;
                    if c != 0 {
                        terms.push((ExponentVector([e0 as u32, e1 as u32, 0]), c));
                    }
                }
            }
            Self::from_sorted(ctx, self.nvars, terms)
        } else {
            for (i, &x) in acc.iter().enumerate() {
                let c = x % p;
                if c != 0 {
                    let e0 = i / strides[0];
                    let e1 = (i % strides[0]) / strides[1];
                    let e2 = i % strides[1];
                    terms.push((ExponentVector([e0 as u32, e1 as u32, e2 as u32]), c));
                }
            }
            terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
            Self::from_sorted(ctx, self.nvars, terms)
        }
    }

    fn mul_hashed(&self, other: &Self) -> Self {
        let ctx = self.ctx;
        let mut acc: HashMap<ExponentVector, u64> = HashMap::new();
        for &(ea, ca) in &self.terms {
            for &(eb, cb) in &other.terms {
                let e = ExponentVector([ea.0[0] + eb.0[0], ea.0[1] + eb.0[1], ea.0[2] + eb.0[2]]);
                let slot = acc.entry(e).or_insert(0);
                *slot = ctx.add_raw(*slot, ctx.mul_raw(ca, cb));
            }
        }
        Self::from_raw_unsorted(ctx, self.nvars, acc.into_iter().collect())
    }

    /// Applies `x_i -> x_i^p` to every variable. Over F_p this is `f^p`.
    pub fn frobenius(&self) -> Result<Self, PolyError> {
        let p = self.ctx.p() as u32;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(e, c) in &self.terms {
            let mut ne = [0u32; MAX_VARS];
            for i in 0..MAX_VARS {
                ne[i] = e.0[i].checked_mul(p).filter(|&x| x <= MAX_EXP).ok_or(PolyError::ExponentOverflow)?;
            }
            terms.push((ExponentVector(ne), c));
        }
        Ok(Self::from_sorted(self.ctx, self.nvars, terms))
    }

    /// `self^e`, splitting `e` into base-p digits so that p-th powers cost a
    /// Frobenius relabelling instead of multiplications.
    pub fn try_pow(&self, e: u64) -> Result<Self, PolyError> {
        let one = Self::one(self.ctx, self.nvars);
        if e == 0 {
            return Ok(one);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.ctx.p();
        let mut result = one;
        let mut base = self.clone();
        let mut e = e;
        loop {
            let digit = e % p;
            if digit > 0 {
                let mut part = base.clone();
                for _ in 1..digit {
                    part = part.try_mul(&base)?;
                }
                result = result.try_mul(&part)?;
            }
            e /= p;
            if e == 0 {
                break;
            }
            base = base.frobenius()?;
        }
        Ok(result)
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self, PolyError> {
        self.check_var(var)?;
        let ctx = self.ctx;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(e, c) in &self.terms {
            let k = e.0[var] as u64 % ctx.p();
            if k == 0 {
                continue;
            }
            let mut ne = e;
            ne.0[var] -= 1;
            terms.push((ne, ctx.mul_raw(c, k)));
        }
        // Lowering one exponent may reorder terms of different degrees.
        Ok(Self::from_raw_unsorted(ctx, self.nvars, terms))
    }

    /// The operator `d^{n(p-1)} / dx_1^{p-1} ... dx_n^{p-1}`.
    ///
    /// Per term, the coefficient picks up the falling factorial
    /// `e(e-1)...(e-p+2)` in each variable. Those are p-1 consecutive
    /// integers, so mod p the product is `(p-1)! = -1` when `e ≡ p-1 (mod p)`
    /// and `0` otherwise. Cost is linear in the number of terms.
    pub fn nabla(&self) -> Self {
        let ctx = self.ctx;
        let p = ctx.p() as u32;
        let sign = if self.nvars.is_multiple_of(2) { 1 } else { ctx.p() - 1 };
        let mut terms = Vec::new();
        'terms: for &(e, c) in &self.terms {
            let mut ne = e;
            for v in 0..self.nvars {
                if e.0[v] % p != p - 1 {
                    continue 'terms;
                }
                ne.0[v] -= p - 1;
            }
            terms.push((ne, ctx.mul_raw(c, sign)));
        }
        // A uniform shift on surviving terms keeps their order.
        Self::from_sorted(ctx, self.nvars, terms)
    }

    /// `f(g_1, ..., g_n)`. The `gs` may live in a ring of different arity.
    pub fn substitute(&self, gs: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if gs.len() != self.nvars {
            return Err(PolyError::WrongCount { expected: self.nvars, got: gs.len() });
        }
        let target = &gs[0];
        for g in gs {
            if g.ctx != self.ctx {
                return Err(PolyError::ContextMismatch(self.ctx.p(), g.ctx.p()));
            }
            target.compat(g)?;
        }
        let terms: Vec<(ExponentVector, u64)> = self.terms.clone();
        substitute_horner(self.ctx, &terms, 0, gs)
    }

    /// Swaps the roles of `x1` and `x2`.
    pub fn swap_xy(&self) -> Self {
        assert!(self.nvars >= 2);
        let terms = self
            .terms
            .iter()
            .map(|&(e, c)| (ExponentVector([e.0[1], e.0[0], e.0[2]]), c))
            .collect();
        Self::from_raw_unsorted(self.ctx, self.nvars, terms)
    }

    /// Re-embeds into a ring with `nvars` variables; the dropped variables
    /// must not occur.
    pub fn with_nvars(&self, nvars: usize) -> Result<Self, PolyError> {
        if !(1..=MAX_VARS).contains(&nvars) {
            return Err(PolyError::BadArity(nvars));
        }
        if self.terms.iter().any(|t| t.0 .0[nvars..].iter().any(|&x| x != 0)) {
            return Err(PolyError::ArityMismatch(self.nvars, nvars));
        }
        Ok(Self { ctx: self.ctx, nvars, terms: self.terms.clone() })
    }

    /// Coefficients with respect to `var`, lowest power first. Each is a
    /// polynomial in the same ring not involving `var`.
    pub fn coefficients_in(&self, var: usize) -> Result<Vec<MultiPoly>, PolyError> {
        self.check_var(var)?;
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(ExponentVector, u64)>> = vec![Vec::new(); deg + 1];
        for &(e, c) in &self.terms {
            let k = e.0[var] as usize;
            let mut ne = e;
            ne.0[var] = 0;
            buckets[k].push((ne, c));
        }
        Ok(buckets
            .into_iter()
            .map(|b| Self::from_raw_unsorted(self.ctx, self.nvars, b))
            .collect())
    }

    /// Nonzero homogeneous components in ascending degree.
    pub fn homogeneous_components(&self) -> Result<Vec<HomogComponent>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut comps: Vec<HomogComponent> = Vec::new();
        // Terms are grouped by degree already (descending); walk in reverse.
        for &(e, c) in self.terms.iter().rev() {
            let d = e.total();
            match comps.last_mut() {
                Some(h) if h.degree == d => h.form.terms.push((e, c)),
                _ => comps.push(HomogComponent {
                    degree: d,
                    form: Self { ctx: self.ctx, nvars: self.nvars, terms: vec![(e, c)] },
                }),
            }
        }
        for h in &mut comps {
            h.form.terms.reverse();
        }
        Ok(comps)
    }

    /// The top-degree homogeneous form `f^+`.
    pub fn leading_form(&self) -> Result<HomogComponent, PolyError> {
        let d = self.total_degree().ok_or(PolyError::ZeroPolynomial)?;
        let terms: Vec<_> = self.terms.iter().take_while(|t| t.0.total() == d).copied().collect();
        Ok(HomogComponent { degree: d, form: Self::from_sorted(self.ctx, self.nvars, terms) })
    }

    /// Whether every exponent is divisible by p, i.e. `f ∈ k[x_1^p, ..., x_n^p]`.
    pub fn is_in_pth_subring(&self) -> bool {
        let p = self.ctx.p() as u32;
        self.terms.iter().all(|t| t.0 .0.iter().all(|&x| x % p == 0))
    }

    /// `f̄`: drop the top homogeneous components lying in `k[x^p]`, keeping
    /// everything up to the highest component that does not.
    pub fn bar(&self) -> Result<MultiPoly, PolyError> {
        let p = self.ctx.p() as u32;
        let cut = self
            .terms
            .iter()
            .find(|t| t.0 .0.iter().any(|&x| x % p != 0))
            .map(|t| t.0.total())
            .ok_or(PolyError::NoBarForm)?;
        let terms = self.terms.iter().filter(|t| t.0.total() <= cut).copied().collect();
        Ok(Self::from_sorted(self.ctx, self.nvars, terms))
    }

    /// Parses the text grammar; coefficients are reduced mod p.
    pub fn parse(ctx: FieldCtx, nvars: usize, s: &str) -> Result<Self, PolyError> {
        Self::parse_line(ctx, nvars, s, 1)
    }

    /// As [`MultiPoly::parse`], reporting errors against the given line number.
    pub fn parse_line(ctx: FieldCtx, nvars: usize, s: &str, line: usize) -> Result<Self, PolyError> {
        let raw = parse_terms(s, line, nvars)?;
        let terms = raw.into_iter().map(|t| {
            let c = (t.coeff % ctx.p() as u128) as u64;
            let c = if t.negative { ctx.neg_raw(c) } else { c };
            (ExponentVector(t.exps), c)
        });
        Self::from_terms(ctx, nvars, terms)
    }
}

// Horner evaluation in variable `var`, recursing into the remaining ones.
fn substitute_horner(
    ctx: FieldCtx,
    terms: &[(ExponentVector, u64)],
    var: usize,
    gs: &[MultiPoly],
) -> Result<MultiPoly, PolyError> {
    let target_n = gs[0].nvars;
    let zero = MultiPoly::zero(ctx, target_n);
    if terms.is_empty() {
        return Ok(zero);
    }
    if var == gs.len() {
        // Only the constant remains.
        let c = terms.iter().fold(0, |acc, t| ctx.add_raw(acc, t.1));
        return Ok(MultiPoly::constant(ctx, target_n, c));
    }
    let mut groups: Vec<(u32, Vec<(ExponentVector, u64)>)> = Vec::new();
    let mut sorted: Vec<(ExponentVector, u64)> = terms.to_vec();
    sorted.sort_by(|a, b| b.0 .0[var].cmp(&a.0 .0[var]));
    for (e, c) in sorted {
        let k = e.0[var];
        match groups.last_mut() {
            Some((gk, v)) if *gk == k => v.push((e, c)),
            _ => groups.push((k, vec![(e, c)])),
        }
    }
    let g = &gs[var];
    let mut acc = zero;
    let mut prev: Option<u32> = None;
    for (k, group) in &groups {
        if let Some(pk) = prev {
            acc = acc.try_mul(&g.try_pow((pk - k) as u64)?)?;
        }
        let inner = substitute_horner(ctx, group, var + 1, gs)?;
        acc = acc.try_add(&inner)?;
        prev = Some(*k);
    }
    if let Some(pk) = prev {
        if pk > 0 {
            acc = acc.try_mul(&g.try_pow(pk as u64)?)?;
        }
    }
    Ok(acc)
}

/// Determinant of the Jacobian matrix `[∂f_i/∂x_j]`.
pub fn jacobian_det(fs: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
    let n = fs.first().ok_or(PolyError::WrongCount { expected: 1, got: 0 })?.nvars;
    if fs.len() != n {
        return Err(PolyError::WrongCount { expected: n, got: fs.len() });
    }
    for f in fs {
        fs[0].compat(f)?;
    }
    let m: Vec<Vec<MultiPoly>> = fs
        .iter()
        .map(|f| (0..n).map(|j| f.partial_derivative(j)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    match n {
        1 => Ok(m[0][0].clone()),
        2 => m[0][0].try_mul(&m[1][1])?.try_sub(&m[0][1].try_mul(&m[1][0])?),
        _ => {
            let minor = |a: &MultiPoly, b: &MultiPoly, c: &MultiPoly, d: &MultiPoly| {
                a.try_mul(d)?.try_sub(&b.try_mul(c)?)
            };
            let c0 = minor(&m[1][1], &m[1][2], &m[2][1], &m[2][2])?;
            let c1 = minor(&m[1][0], &m[1][2], &m[2][0], &m[2][2])?;
            let c2 = minor(&m[1][0], &m[1][1], &m[2][0], &m[2][1])?;
            m[0][0]
                .try_mul(&c0)?
                .try_sub(&m[0][1].try_mul(&c1)?)?
                .try_add(&m[0][2].try_mul(&c2)?)
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = (0..self.nvars)
                .filter(|&v| e.0[v] > 0)
                .map(|v| match e.0[v] {
                    1 => format!("x{}", v + 1),
                    k => format!("x{}^{}", v + 1, k),
                })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                (_, false) => write!(f, "{}*{}", c, vars.join("*"))?,
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale_raw(self.ctx.p() - 1)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
