//! Exact division and Sylvester resultants.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use super::{ExponentVector, MultiPoly, PolyError};

/// `a / b` when `b` divides `a` exactly; [`PolyError::NotDivisible`] otherwise.
pub fn exact_div(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
    a.compat(b)?;
    let ctx = a.ctx();
    let (lb_e, lb_c) = match b.raw_terms().first() {
        Some(&t) => t,
        None => return Err(PolyError::ZeroPolynomial),
    };
    if b.num_terms() == 1 {
        let inv = ctx.inv_raw(lb_c).expect("nonzero leading coefficient");
        let mut terms = Vec::with_capacity(a.num_terms());
        for &(e, c) in a.raw_terms() {
            let q = e.checked_div(&lb_e).ok_or(PolyError::NotDivisible)?;
            terms.push((q, ctx.mul_raw(c, inv)));
        }
        return Ok(MultiPoly::from_sorted(ctx, a.nvars(), terms));
    }
    let inv = ctx.inv_raw(lb_c).expect("nonzero leading coefficient");
    let mut rem: BTreeMap<Reverse<ExponentVector>, u64> =
        a.raw_terms().iter().map(|&(e, c)| (Reverse(e), c)).collect();
    let mut quot: Vec<(ExponentVector, u64)> = Vec::new();
    while let Some((Reverse(e), c)) = rem.pop_first() {
        let qe = e.checked_div(&lb_e).ok_or(PolyError::NotDivisible)?;
        let qc = ctx.mul_raw(c, inv);
        quot.push((qe, qc));
        for &(be, bc) in &b.raw_terms()[1..] {
            let key = Reverse(qe.checked_add(&be)?);
            let sub = ctx.mul_raw(qc, bc);
            let slot = rem.entry(key).or_insert(0);
            *slot = ctx.sub_raw(*slot, sub);
            if *slot == 0 {
                rem.remove(&key);
            }
        }
    }
    // Quotient terms come out in strictly descending order.
    Ok(MultiPoly::from_sorted(ctx, a.nvars(), quot))
}

/// Determinant by fraction-free (Bareiss) elimination.
fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, zero: &MultiPoly, one: &MultiPoly) -> Result<MultiPoly, PolyError> {
    let n = m.len();
    if n == 0 {
        return Ok(one.clone());
    }
    let mut negate = false;
    let mut prev = one.clone();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(zero.clone()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let mut num = m[i][j].try_mul(&m[k][k])?;
                if !m[i][k].is_zero() && !m[k][j].is_zero() {
                    num = num.try_sub(&m[i][k].try_mul(&m[k][j])?)?;
                }
                m[i][j] = if prev == *one { num } else { exact_div(&num, &prev)? };
            }
            m[i][k] = zero.clone();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant of two polynomials given by coefficient lists (lowest power
/// first) in some eliminated variable. Leading coefficients must be
/// nonzero. Degree zero is allowed: `res(a, g) = a^{deg g}`.
pub fn sylvester_resultant(fc: &[MultiPoly], gc: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
    let first = fc.first().or(gc.first()).ok_or(PolyError::ZeroPolynomial)?;
    let zero = MultiPoly::zero(first.ctx(), first.nvars());
    let one = MultiPoly::one(first.ctx(), first.nvars());
    if fc.is_empty() || gc.is_empty() {
        return Err(PolyError::ZeroPolynomial);
    }
    if fc.last().unwrap().is_zero() || gc.last().unwrap().is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    let mut mat = vec![vec![zero.clone(); size]; size];
    for r in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    bareiss_det(mat, &zero, &one)
}

/// `res_{x_var}(f, g)`: a polynomial in the remaining variables (kept in the
/// same ring, with `x_var` absent).
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly, PolyError> {
    f.compat(g)?;
    f.check_var(var)?;
    if f.degree_in(var).unwrap_or(0) == 0 || g.degree_in(var).unwrap_or(0) == 0 {
        return Err(PolyError::DegreeZeroInVariable(var + 1));
    }
    sylvester_resultant(&f.coefficients_in(var)?, &g.coefficients_in(var)?)
}
