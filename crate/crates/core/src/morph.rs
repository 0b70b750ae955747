//! Elementary endomorphisms of `k[x1, x2]` and chains of them.
//!
//! A chain `[m1, m2, ..., mn]` is stored in application order: the image pair
//! starts at `(x1, x2)` and each map in turn substitutes the current pair into
//! its own images. So for `m1: x2 -> x2 + x1^3` followed by
//! `m2: x1 -> x1 + x2^2` the result is `(x1 + (x2 + x1^3)^2, x2 + x1^3)`,
//! which is the composed endomorphism `m1 ∘ m2` evaluated at `x1` and `x2`.
//! Composition order is therefore the reverse of the order in which the maps
//! act on the pair.
//!
//! Maps acting on `x1` are the swap-conjugates of maps acting on `x2`, with
//! `h` always written in the natural variables:
//!
//! | kind | acts on `x2`                      | acts on `x1`                      |
//! |------|-----------------------------------|-----------------------------------|
//! | T2   | `x2 -> x2 + h(x1)`                | `x1 -> x1 + h(x2)`                |
//! | T2S  | `x2 -> x2 + h(x1, x2^p)`          | `x1 -> x1 + h(x1^p, x2)`          |
//! | T3   | `x2 -> x2 + x2^p h(x1, x2^p)`     | `x1 -> x1 + x1^p h(x1^p, x2)`     |

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldCtx, FpElem};
use crate::forms::{FormsError, UniPoly};
use crate::poly::{ExponentVector, MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("a chain needs at least one map")]
    EmptyChain,
    #[error("maps belong to different fields (p = {0} vs p = {1})")]
    ContextMismatch(u64, u64),
    #[error("type 1 map has zero determinant")]
    SingularType1,
    #[error("type 3 map needs a nonzero h")]
    ZeroType3,
    #[error("h must be a polynomial in x1, x2")]
    NotBivariate,
    #[error("type (b) exponents a = {a}, b = {b} must be positive with a*b nonzero mod p")]
    TypeBExponents { a: u32, b: u32 },
    #[error("type (b) needs h1 and h2 of positive degree")]
    TypeBDegree,
    #[error("type (b) core must be a nonzero homogeneous polynomial")]
    TypeBCore,
    #[error("type (b) Jacobian condition fails: h1*h2 + a*t*h1'*h2 + b*t*h1*h2' = {0}")]
    TypeBCondition(String),
    #[error("deg_p is only defined for types 1, 2, 2* and 3")]
    NoDegP,
    #[error("expected a type 2* map")]
    NotType2Star,
    #[error("extension degree overflows u128")]
    DegreeOverflow,
    #[error("chain length must be positive")]
    ZeroLength,
    #[error("degree budget must be positive")]
    ZeroBudget,
    #[error("all kind weights are zero")]
    NoKinds,
    #[error("no map of the allowed kinds fits the degree budget {0}")]
    BudgetTooSmall(u32),
    #[error("chain line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Which variable a shear moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }
}

/// `x_i -> x_i h_i(u)` with `u = x1^a x2^b hcore^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeB {
    a: u32,
    b: u32,
    hcore: MultiPoly,
    h1: UniPoly,
    h2: UniPoly,
    unit: FpElem,
}

impl TypeB {
    /// Validates the exponents and the Jacobian condition
    /// `h1 h2 + a t h1' h2 + b t h1 h2' ∈ k^*`.
    pub fn new(a: u32, b: u32, hcore: MultiPoly, h1: UniPoly, h2: UniPoly) -> Result<Self, MorphError> {
        let ctx = hcore.ctx();
        let p = ctx.p();
        if h1.ctx() != ctx || h2.ctx() != ctx {
            let other = if h1.ctx() != ctx { h1.ctx() } else { h2.ctx() };
            return Err(MorphError::ContextMismatch(p, other.p()));
        }
        if a == 0 || b == 0 || ((a as u64 % p) * (b as u64 % p)).is_multiple_of(p) {
            return Err(MorphError::TypeBExponents { a, b });
        }
        if hcore.nvars() != 2 {
            return Err(MorphError::NotBivariate);
        }
        if hcore.is_zero() || !hcore.is_homogeneous() {
            return Err(MorphError::TypeBCore);
        }
        if h1.degree().unwrap_or(0) == 0 || h2.degree().unwrap_or(0) == 0 {
            return Err(MorphError::TypeBDegree);
        }
        let cond = jacobian_condition(a, b, &h1, &h2);
        match cond.degree() {
            Some(0) => Ok(Self { a, b, hcore, h1, h2, unit: cond.coeff(0) }),
            _ => Err(MorphError::TypeBCondition(cond.to_string())),
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn hcore(&self) -> &MultiPoly {
        &self.hcore
    }

    pub fn h1(&self) -> &UniPoly {
        &self.h1
    }

    pub fn h2(&self) -> &UniPoly {
        &self.h2
    }

    /// The constant Jacobian determinant of the image pair.
    pub fn unit(&self) -> FpElem {
        self.unit
    }

    /// `u = x1^a x2^b hcore^p`, expanded.
    pub fn u(&self) -> Result<MultiPoly, PolyError> {
        let ctx = self.hcore.ctx();
        let mono = MultiPoly::monomial(ctx, 2, ExponentVector::new(&[self.a, self.b]), 1);
        mono.try_mul(&self.hcore.frobenius()?)
    }

    /// `(s, t, d)`: lowest and highest `x1`-exponent of `u` and its degree.
    pub fn u_shape(&self) -> (u32, u32, u32) {
        let p = self.hcore.ctx().p() as u32;
        let lo = self.hcore.terms().map(|t| t.0.get(0)).min().unwrap_or(0);
        let hi = self.hcore.terms().map(|t| t.0.get(0)).max().unwrap_or(0);
        let d = self.a + self.b + p * self.hcore.total_degree().unwrap_or(0);
        (self.a + p * lo, self.a + p * hi, d)
    }

    /// `t deg h1 + (d - s) deg h2 + 1`.
    pub fn extension_degree(&self) -> u128 {
        let (s, t, d) = self.u_shape();
        let m = self.h1.degree().unwrap_or(0) as u128;
        let n = self.h2.degree().unwrap_or(0) as u128;
        t as u128 * m + (d - s) as u128 * n + 1
    }
}

/// `h1 h2 + a t h1' h2 + b t h1 h2'` as a polynomial in `t`.
pub fn jacobian_condition(a: u32, b: u32, h1: &UniPoly, h2: &UniPoly) -> UniPoly {
    let ctx = h1.ctx();
    let t = UniPoly::t(ctx);
    let base = h1.mul(h2);
    let da = t.mul(&h1.derivative()).mul(h2).scale(ctx.elem(a as u64));
    let db = t.mul(h1).mul(&h2.derivative()).scale(ctx.elem(b as u64));
    base.add(&da).add(&db)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryMap {
    /// `x1 -> a11 x1 + a12 x2 + a13`, `x2 -> a21 x1 + a22 x2 + a23`;
    /// coefficients in that order.
    Type1 { a: [FpElem; 6] },
    Type2 { axis: Axis, h: UniPoly },
    Type2Star { axis: Axis, h: MultiPoly },
    Type3 { axis: Axis, h: MultiPoly },
    TypeB(TypeB),
}

impl ElementaryMap {
    pub fn type1(a: [FpElem; 6]) -> Result<Self, MorphError> {
        let m = ElementaryMap::Type1 { a };
        m.validate()?;
        Ok(m)
    }

    /// `(x1, x2) -> (x2, x1)`.
    pub fn swap(ctx: FieldCtx) -> Self {
        let (z, o) = (ctx.zero(), ctx.one());
        ElementaryMap::Type1 { a: [z, o, z, o, z, z] }
    }

    pub fn type2(axis: Axis, h: UniPoly) -> Self {
        ElementaryMap::Type2 { axis, h }
    }

    pub fn type2_star(axis: Axis, h: MultiPoly) -> Result<Self, MorphError> {
        let m = ElementaryMap::Type2Star { axis, h };
        m.validate()?;
        Ok(m)
    }

    pub fn type3(axis: Axis, h: MultiPoly) -> Result<Self, MorphError> {
        let m = ElementaryMap::Type3 { axis, h };
        m.validate()?;
        Ok(m)
    }

    pub fn ctx(&self) -> FieldCtx {
        match self {
            ElementaryMap::Type1 { a } => a[0].ctx(),
            ElementaryMap::Type2 { h, .. } => h.ctx(),
            ElementaryMap::Type2Star { h, .. } | ElementaryMap::Type3 { h, .. } => h.ctx(),
            ElementaryMap::TypeB(b) => b.hcore.ctx(),
        }
    }

    pub fn validate(&self) -> Result<(), MorphError> {
        match self {
            ElementaryMap::Type1 { a } => {
                let ctx = a[0].ctx();
                if let Some(x) = a.iter().find(|x| x.ctx() != ctx) {
                    return Err(MorphError::ContextMismatch(ctx.p(), x.ctx().p()));
                }
                if (a[0] * a[4] - a[1] * a[3]).is_zero() {
                    return Err(MorphError::SingularType1);
                }
                Ok(())
            }
            ElementaryMap::Type2 { .. } => Ok(()),
            ElementaryMap::Type2Star { h, .. } => {
                if h.nvars() != 2 {
                    return Err(MorphError::NotBivariate);
                }
                Ok(())
            }
            ElementaryMap::Type3 { h, .. } => {
                if h.nvars() != 2 {
                    return Err(MorphError::NotBivariate);
                }
                if h.is_zero() {
                    return Err(MorphError::ZeroType3);
                }
                Ok(())
            }
            ElementaryMap::TypeB(b) => {
                TypeB::new(b.a, b.b, b.hcore.clone(), b.h1.clone(), b.h2.clone()).map(|_| ())
            }
        }
    }

    pub fn is_type_b(&self) -> bool {
        matches!(self, ElementaryMap::TypeB(_))
    }

    /// The image pair `(φ(x1), φ(x2))`.
    pub fn apply(&self) -> Result<(MultiPoly, MultiPoly), MorphError> {
        let ctx = self.ctx();
        let x1 = MultiPoly::var(ctx, 2, 0);
        let x2 = MultiPoly::var(ctx, 2, 1);
        match self {
            ElementaryMap::Type1 { a } => {
                let lin = |c1: FpElem, c2: FpElem, c0: FpElem| -> Result<MultiPoly, PolyError> {
                    x1.scale(c1).try_add(&x2.scale(c2))?.try_add(&MultiPoly::constant(ctx, 2, c0.value()))
                };
                Ok((lin(a[0], a[1], a[2])?, lin(a[3], a[4], a[5])?))
            }
            ElementaryMap::Type2 { axis, h } => {
                let other = 1 - axis.index();
                let shift = h.to_multi(2, other)?;
                Ok(shear(*axis, &x1, &x2, &shift)?)
            }
            ElementaryMap::Type2Star { axis, h } => {
                let shift = h.substitute(&p_power_args(*axis, &x1, &x2)?)?;
                Ok(shear(*axis, &x1, &x2, &shift)?)
            }
            ElementaryMap::Type3 { axis, h } => {
                let args = p_power_args(*axis, &x1, &x2)?;
                let v = &args[axis.index()];
                let shift = v.try_mul(&h.substitute(&args)?)?;
                Ok(shear(*axis, &x1, &x2, &shift)?)
            }
            ElementaryMap::TypeB(b) => {
                let u = b.u()?;
                Ok((x1.try_mul(&b.h1.eval_multi(&u)?)?, x2.try_mul(&b.h2.eval_multi(&u)?)?))
            }
        }
    }

    /// Exponent of p in the extension degree, for types 1, 2, 2* and 3.
    pub fn deg_p(&self) -> Result<u32, MorphError> {
        match self {
            ElementaryMap::Type1 { .. } | ElementaryMap::Type2 { .. } => Ok(0),
            ElementaryMap::Type2Star { axis, h } => Ok(h.degree_in(axis.index()).unwrap_or(0)),
            ElementaryMap::Type3 { axis, h } => Ok(1 + h.degree_in(axis.index()).unwrap_or(0)),
            ElementaryMap::TypeB(_) => Err(MorphError::NoDegP),
        }
    }

    /// `[k(x1, x2) : k(φ(x1), φ(x2))]`.
    pub fn extension_degree(&self) -> Result<u128, MorphError> {
        match self {
            ElementaryMap::TypeB(b) => Ok(b.extension_degree()),
            _ => {
                let p = self.ctx().p() as u128;
                p.checked_pow(self.deg_p()?).ok_or(MorphError::DegreeOverflow)
            }
        }
    }

    /// The constant Jacobian determinant of the image pair.
    pub fn jacobian_unit(&self) -> FpElem {
        match self {
            ElementaryMap::Type1 { a } => a[0] * a[4] - a[1] * a[3],
            ElementaryMap::TypeB(b) => b.unit,
            _ => self.ctx().one(),
        }
    }
}

/// `(x1, x2)` with the moved variable raised to the p-th power.
fn p_power_args(axis: Axis, x1: &MultiPoly, x2: &MultiPoly) -> Result<[MultiPoly; 2], PolyError> {
    Ok(match axis {
        Axis::X1 => [x1.frobenius()?, x2.clone()],
        Axis::X2 => [x1.clone(), x2.frobenius()?],
    })
}

fn shear(axis: Axis, x1: &MultiPoly, x2: &MultiPoly, shift: &MultiPoly) -> Result<(MultiPoly, MultiPoly), PolyError> {
    Ok(match axis {
        Axis::X1 => (x1.try_add(shift)?, x2.clone()),
        Axis::X2 => (x1.clone(), x2.try_add(shift)?),
    })
}

/// Splits a type 2* map into `(τ, ρ)` with `ρ` the type 2 part `h` at the
/// moved variable set to zero and `τ` the type 3 remainder (absent when it
/// vanishes). The chain `[τ, ρ]` has the same image pair as the original.
pub fn split_type2star(m: &ElementaryMap) -> Result<(Option<ElementaryMap>, ElementaryMap), MorphError> {
    let ElementaryMap::Type2Star { axis, h } = m else {
        return Err(MorphError::NotType2Star);
    };
    let v = axis.index();
    let other = 1 - v;
    let ctx = h.ctx();
    let mut base = Vec::new();
    let mut rest = Vec::new();
    for (e, c) in h.terms() {
        if e.get(v) == 0 {
            base.push((e, c.value()));
        } else {
            let mut q = e.0;
            q[v] -= 1;
            rest.push((ExponentVector(q), c.value()));
        }
    }
    let base = MultiPoly::from_terms(ctx, 2, base)?;
    let rest = MultiPoly::from_terms(ctx, 2, rest)?;
    let rho = ElementaryMap::Type2 { axis: *axis, h: UniPoly::from_multi(&base, other)? };
    let tau = (!rest.is_zero()).then_some(ElementaryMap::Type3 { axis: *axis, h: rest });
    Ok((tau, rho))
}

/// A nonempty sequence of maps over one field, in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismChain {
    maps: Vec<ElementaryMap>,
}

impl MorphismChain {
    pub fn new(maps: Vec<ElementaryMap>) -> Result<Self, MorphError> {
        let first = maps.first().ok_or(MorphError::EmptyChain)?;
        let ctx = first.ctx();
        for m in &maps {
            if m.ctx() != ctx {
                return Err(MorphError::ContextMismatch(ctx.p(), m.ctx().p()));
            }
            m.validate()?;
        }
        Ok(Self { maps })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.maps[0].ctx()
    }

    pub fn maps(&self) -> &[ElementaryMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when no map is of type (b).
    pub fn is_p_morphism(&self) -> bool {
        !self.maps.iter().any(ElementaryMap::is_type_b)
    }

    /// The image of `(x1, x2)` under the induced maps, first map first.
    pub fn apply(&self) -> Result<(MultiPoly, MultiPoly), MorphError> {
        let (mut g1, mut g2) = self.maps[0].apply()?;
        for m in &self.maps[1..] {
            let (i1, i2) = m.apply()?;
            let args = [g1, g2];
            g1 = i1.substitute(&args)?;
            g2 = i2.substitute(&args)?;
        }
        Ok((g1, g2))
    }

    /// Product of the per-map extension degrees.
    pub fn degree(&self) -> Result<u128, MorphError> {
        self.maps.iter().try_fold(1u128, |acc, m| {
            acc.checked_mul(m.extension_degree()?).ok_or(MorphError::DegreeOverflow)
        })
    }

    pub fn is_automorphism(&self) -> Result<bool, MorphError> {
        Ok(self.degree()? == 1)
    }

    /// The constant Jacobian determinant of the image pair.
    pub fn jacobian_unit(&self) -> FpElem {
        self.maps.iter().fold(self.ctx().one(), |acc, m| acc * m.jacobian_unit())
    }

    /// One map per line.
    pub fn to_text(&self) -> String {
        self.maps.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("\n")
    }

    /// Reads maps separated by newlines or `;`. Blank lines and `#` comments
    /// are skipped.
    pub fn parse(ctx: FieldCtx, text: &str) -> Result<Self, MorphError> {
        let mut maps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for item in line.split(';') {
                if item.trim().is_empty() {
                    continue;
                }
                maps.push(parse_map(ctx, item.trim(), i + 1)?);
            }
        }
        Self::new(maps)
    }
}

impl fmt::Display for MorphismChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn uni_in(h: &UniPoly, var: usize) -> String {
    match h.to_multi(2, var) {
        Ok(m) => m.to_string(),
        Err(_) => "<overflow>".into(),
    }
}

fn axis_tag(axis: Axis) -> &'static str {
    match axis {
        Axis::X1 => "axis=1",
        Axis::X2 => "axis=2",
    }
}

impl fmt::Display for ElementaryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryMap::Type1 { a } => {
                write!(f, "T1")?;
                for x in a {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            ElementaryMap::Type2 { axis: Axis::X2, h } => write!(f, "T2 {}", uni_in(h, 0)),
            ElementaryMap::Type2 { axis: Axis::X1, h } => write!(f, "T2 axis=1 {}", uni_in(h, 1)),
            ElementaryMap::Type2Star { axis, h } => write!(f, "T2S {} {h}", axis_tag(*axis)),
            ElementaryMap::Type3 { axis, h } => write!(f, "T3 {} {h}", axis_tag(*axis)),
            ElementaryMap::TypeB(b) => {
                write!(f, "TB a={} b={} hcore={} h1={} h2={}", b.a, b.b, b.hcore, b.h1, b.h2)
            }
        }
    }
}

/// Splits `key=value` fields; tokens without `=` extend the previous value.
fn keyed_fields(tokens: &[&str]) -> (Vec<String>, Vec<(String, String)>) {
    let mut loose = Vec::new();
    let mut fields: Vec<(String, String)> = Vec::new();
    for tok in tokens {
        if let Some((k, v)) = tok.split_once('=') {
            fields.push((k.to_string(), v.to_string()));
        } else if let Some(last) = fields.last_mut() {
            last.1.push(' ');
            last.1.push_str(tok);
        } else {
            loose.push(tok.to_string());
        }
    }
    (loose, fields)
}

fn parse_map(ctx: FieldCtx, item: &str, line: usize) -> Result<ElementaryMap, MorphError> {
    let perr = |message: String| MorphError::Parse { line, message };
    let tokens: Vec<&str> = item.split_whitespace().collect();
    let (kind, rest) = tokens.split_first().ok_or_else(|| perr("empty map".into()))?;
    let poly = |s: &str| MultiPoly::parse_line(ctx, 2, s, line).map_err(MorphError::from);
    match *kind {
        "T1" => {
            if rest.len() != 6 {
                return Err(perr(format!("T1 takes 6 coefficients, got {}", rest.len())));
            }
            let mut a = [ctx.zero(); 6];
            for (slot, tok) in a.iter_mut().zip(rest) {
                let v: i64 = tok.parse().map_err(|_| perr(format!("bad integer '{tok}'")))?;
                *slot = ctx.elem_i64(v);
            }
            ElementaryMap::type1(a)
        }
        "T2" | "T2S" | "T3" => {
            let (axis, body) = match rest.first() {
                Some(t) if t.starts_with("axis=") => {
                    let axis = match &t[5..] {
                        "1" => Axis::X1,
                        "2" => Axis::X2,
                        other => return Err(perr(format!("axis must be 1 or 2, got '{other}'"))),
                    };
                    (axis, &rest[1..])
                }
                _ => (Axis::X2, rest),
            };
            if body.is_empty() {
                return Err(perr(format!("{kind} needs a polynomial")));
            }
            let h = poly(&body.join(" "))?;
            match *kind {
                "T2" => {
                    let var = 1 - axis.index();
                    Ok(ElementaryMap::Type2 { axis, h: UniPoly::from_multi(&h, var)? })
                }
                "T2S" => ElementaryMap::type2_star(axis, h),
                _ => ElementaryMap::type3(axis, h),
            }
        }
        "TB" => {
            let (loose, fields) = keyed_fields(rest);
            if let Some(tok) = loose.first() {
                return Err(perr(format!("unexpected token '{tok}'")));
            }
            let get = |key: &str| -> Result<&str, MorphError> {
                fields
                    .iter()
                    .find(|f| f.0 == key)
                    .map(|f| f.1.as_str())
                    .ok_or_else(|| perr(format!("TB is missing {key}=")))
            };
            let int = |key: &str| -> Result<u32, MorphError> {
                let v = get(key)?;
                v.trim().parse().map_err(|_| perr(format!("bad integer {key}={v}")))
            };
            let uni = |key: &str| -> Result<UniPoly, MorphError> {
                Ok(UniPoly::from_multi(&MultiPoly::parse_line(ctx, 1, get(key)?, line)?, 0)?)
            };
            let tb = TypeB::new(int("a")?, int("b")?, poly(get("hcore")?)?, uni("h1")?, uni("h2")?)?;
            Ok(ElementaryMap::TypeB(tb))
        }
        other => Err(perr(format!("unknown map kind '{other}'"))),
    }
}

/// Relative weights for [`random_chain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindWeights {
    pub type1: u32,
    pub type2: u32,
    pub type2_star: u32,
    pub type3: u32,
    pub type_b: u32,
}

impl KindWeights {
    /// Types 1, 2, 2* and 3 only.
    pub const P_MORPHISM: KindWeights = KindWeights { type1: 3, type2: 3, type2_star: 2, type3: 1, type_b: 0 };
    /// The p-morphism mix plus type (b).
    pub const MIXED: KindWeights = KindWeights { type1: 3, type2: 2, type2_star: 1, type3: 1, type_b: 2 };

    pub fn only_type2() -> Self {
        KindWeights { type1: 0, type2: 1, type2_star: 0, type3: 0, type_b: 0 }
    }

    fn total(&self) -> u32 {
        self.type1 + self.type2 + self.type2_star + self.type3 + self.type_b
    }
}

/// Default cap on image degree: `3p^2`.
pub fn default_budget(p: u64) -> u32 {
    (3 * p * p).min(u32::MAX as u64) as u32
}

const ATTEMPTS: usize = 64;

/// A reproducible chain of `length` maps whose image pair never exceeds
/// total degree `budget` along the way. The same arguments give the same chain.
pub fn random_chain(
    ctx: FieldCtx,
    seed: u64,
    length: usize,
    weights: &KindWeights,
    budget: u32,
) -> Result<MorphismChain, MorphError> {
    if length == 0 {
        return Err(MorphError::ZeroLength);
    }
    if budget == 0 {
        return Err(MorphError::ZeroBudget);
    }
    if weights.total() == 0 {
        return Err(MorphError::NoKinds);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (ctx.p() << 40));
    let mut maps = Vec::with_capacity(length);
    let mut image: Option<(MultiPoly, MultiPoly)> = None;
    for _ in 0..length {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let m = random_map(&mut rng, ctx, weights);
            let (i1, i2) = m.apply()?;
            let next = match &image {
                None => (i1, i2),
                Some((g1, g2)) => {
                    let d1 = i1.total_degree().unwrap_or(0).max(i2.total_degree().unwrap_or(0)) as u64;
                    let d0 = g1.total_degree().unwrap_or(0).max(g2.total_degree().unwrap_or(0)) as u64;
                    if d1 * d0 > budget as u64 && d1 > 1 {
                        // Cheap reject before substituting.
                        continue;
                    }
                    let args = [g1.clone(), g2.clone()];
                    (i1.substitute(&args)?, i2.substitute(&args)?)
                }
            };
            let deg = next.0.total_degree().unwrap_or(0).max(next.1.total_degree().unwrap_or(0));
            if deg <= budget {
                maps.push(m);
                image = Some(next);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(MorphError::BudgetTooSmall(budget));
        }
    }
    MorphismChain::new(maps)
}

fn nonzero<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx) -> FpElem {
    ctx.elem(rng.gen_range(1..ctx.p()))
}

fn any_elem<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx) -> FpElem {
    ctx.elem(rng.gen_range(0..ctx.p()))
}

fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Axis {
    if rng.gen_bool(0.5) {
        Axis::X1
    } else {
        Axis::X2
    }
}

/// Polynomial with degree at most `dx` in the fixed variable and `dv` in the
/// moved one, written in natural variables for the given axis.
fn random_shear_poly<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx, axis: Axis, dx: u32, dv: u32) -> MultiPoly {
    let count = rng.gen_range(1..=3);
    let terms: Vec<(ExponentVector, u64)> = (0..count)
        .map(|_| {
            let fixed = rng.gen_range(0..=dx);
            let moved = rng.gen_range(0..=dv);
            let e = match axis {
                Axis::X2 => [fixed, moved],
                Axis::X1 => [moved, fixed],
            };
            (ExponentVector::new(&e), rng.gen_range(1..ctx.p()))
        })
        .collect();
    MultiPoly::from_terms(ctx, 2, terms).expect("small exponents")
}

fn random_map<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx, w: &KindWeights) -> ElementaryMap {
    let mut pick = rng.gen_range(0..w.total());
    let kinds = [w.type1, w.type2, w.type2_star, w.type3, w.type_b];
    let mut kind = 0;
    for (i, &k) in kinds.iter().enumerate() {
        if pick < k {
            kind = i;
            break;
        }
        pick -= k;
    }
    match kind {
        0 => loop {
            let a: [FpElem; 6] = std::array::from_fn(|_| any_elem(rng, ctx));
            if let Ok(m) = ElementaryMap::type1(a) {
                return m;
            }
        },
        1 => {
            let deg = rng.gen_range(1..=3);
            let mut coeffs: Vec<u64> = (0..deg).map(|_| any_elem(rng, ctx).value()).collect();
            coeffs.push(nonzero(rng, ctx).value());
            ElementaryMap::Type2 { axis: random_axis(rng), h: UniPoly::new(ctx, coeffs) }
        }
        2 => {
            let axis = random_axis(rng);
            let h = random_shear_poly(rng, ctx, axis, 2, 1);
            ElementaryMap::Type2Star { axis, h }
        }
        3 => loop {
            let axis = random_axis(rng);
            let h = random_shear_poly(rng, ctx, axis, 1, 0);
            if !h.is_zero() {
                return ElementaryMap::Type3 { axis, h };
            }
        },
        _ => random_type_b(rng, ctx),
    }
}

/// A random valid type (b) map. Falls back to the smallest admissible
/// monomial instance when sampling keeps failing.
fn random_type_b<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx) -> ElementaryMap {
    let p = ctx.p();
    for _ in 0..ATTEMPTS {
        let m = rng.gen_range(1..=2u32);
        let n = rng.gen_range(1..=2u32);
        let a = rng.gen_range(1..=p as u32 + 1);
        // Choose b >= 1 with 1 + a m + b n ≡ 0 (mod p).
        let Some(b) = (1..=2 * p as u32).find(|&b| (1 + a as u64 * m as u64 + b as u64 * n as u64).is_multiple_of(p)) else {
            continue;
        };
        let hcore = if rng.gen_bool(0.7) {
            MultiPoly::constant(ctx, 2, nonzero(rng, ctx).value())
        } else {
            let c1 = nonzero(rng, ctx).value();
            let c2 = any_elem(rng, ctx).value();
            MultiPoly::parse(ctx, 2, &format!("{c1}*x1 + {c2}*x2")).expect("linear form")
        };
        let alphas: Vec<FpElem> = (0..m).map(|i| if i + 1 == m { nonzero(rng, ctx) } else { any_elem(rng, ctx) }).collect();
        if let Some(beta) = solve_betas(ctx, a, b, &alphas, n) {
            let mut h1 = vec![1u64];
            h1.extend(alphas.iter().map(|x| x.value()));
            let mut h2 = vec![1u64];
            h2.extend(beta.iter().map(|x| x.value()));
            if let Ok(tb) = TypeB::new(a, b, hcore, UniPoly::new(ctx, h1), UniPoly::new(ctx, h2)) {
                return ElementaryMap::TypeB(tb);
            }
        }
    }
    fallback_type_b(ctx)
}

/// Smallest instance: `h1 = 1 + t`, `h2 = 1 + c t` or the `n = 2` variant at p = 2.
fn fallback_type_b(ctx: FieldCtx) -> ElementaryMap {
    let p = ctx.p() as u32;
    for m in 1..=2u32 {
        for n in 1..=2u32 {
            for a in 1..=p + 1 {
                for b in 1..=2 * p {
                    if (1 + a * m + b * n) % p != 0 {
                        continue;
                    }
                    let alphas: Vec<FpElem> = (0..m).map(|_| ctx.one()).collect();
                    if let Some(beta) = solve_betas(ctx, a, b, &alphas, n) {
                        let h1 = vec![1u64; m as usize + 1];
                        let mut h2 = vec![1u64];
                        h2.extend(beta.iter().map(|x| x.value()));
                        let hcore = MultiPoly::one(ctx, 2);
                        if let Ok(tb) = TypeB::new(a, b, hcore, UniPoly::new(ctx, h1), UniPoly::new(ctx, h2)) {
                            return ElementaryMap::TypeB(tb);
                        }
                    }
                }
            }
        }
    }
    unreachable!("an admissible type (b) instance exists for every prime")
}

/// Given `h1 = 1 + α_1 t + ... + α_m t^m`, solves for `β_1..β_n` (with
/// `β_0 = 1`) such that `Σ_{i+j=r} (1 + a i + b j) α_i β_j = 0` for
/// `r = 1..m+n`. Returns `None` when the system is inconsistent or the
/// solution has `β_n = 0`. Free unknowns are set to 1.
pub fn solve_betas(ctx: FieldCtx, a: u32, b: u32, alphas: &[FpElem], n: u32) -> Option<Vec<FpElem>> {
    let n = n as usize;
    let mut al = vec![ctx.one()];
    al.extend_from_slice(alphas);
    let mat = beta_system(ctx, a, b, &al, n);
    let sol = solve_linear(ctx, mat, n)?;
    if sol[n - 1].is_zero() {
        return None;
    }
    Some(sol)
}

/// Rows `r = 1..m+n` of `Σ_{i+j=r} (1 + a i + b j) α_i β_j = 0` as an
/// augmented system in `β_1..β_n`.
pub(crate) fn beta_system(ctx: FieldCtx, a: u32, b: u32, al: &[FpElem], n: usize) -> Vec<Vec<FpElem>> {
    let m = al.len() - 1;
    let (fa, fb) = (ctx.elem(a as u64), ctx.elem(b as u64));
    let mut mat = vec![vec![ctx.zero(); n + 1]; m + n];
    for r in 1..=m + n {
        for (i, &ai) in al.iter().enumerate() {
            if i > r || r - i > n {
                continue;
            }
            let j = r - i;
            let w = (ctx.one() + fa * ctx.elem(i as u64) + fb * ctx.elem(j as u64)) * ai;
            if j == 0 {
                mat[r - 1][n] = mat[r - 1][n] - w;
            } else {
                mat[r - 1][j - 1] = mat[r - 1][j - 1] + w;
            }
        }
    }
    mat
}

/// Solves an augmented system with `n` unknowns, setting free variables to
/// 1. `None` when inconsistent.
pub(crate) fn solve_linear(ctx: FieldCtx, mat: Vec<Vec<FpElem>>, n: usize) -> Option<Vec<FpElem>> {
    let (mut sol, kernel) = crate::linalg::solution_space(ctx, mat, n)?;
    for v in kernel {
        for (s, x) in sol.iter_mut().zip(v) {
            *s = *s + x;
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests;
