//! Linear systems over F_p.

use crate::field::{FieldCtx, FpElem};

/// Solution set of an augmented system `[A | b]` with `n` unknowns: a
/// particular solution and a basis of the kernel of `A`. `None` when the
/// system is inconsistent.
pub(crate) fn solution_space(
    ctx: FieldCtx,
    mut mat: Vec<Vec<FpElem>>,
    n: usize,
) -> Option<(Vec<FpElem>, Vec<Vec<FpElem>>)> {
    let rows = mat.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = mat[r][c].inv().expect("nonzero pivot");
        for x in mat[r].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c];
                for k in 0..=n {
                    let v = mat[r][k];
                    mat[i][k] = mat[i][k] - f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if mat[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut particular = vec![ctx.zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = mat[i][n];
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut v = vec![ctx.zero(); n];
            v[fc] = ctx.one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -mat[i][fc];
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_reports_kernel() {
        let ctx = FieldCtx::new(5).unwrap();
        let e = |v: &[i64]| v.iter().map(|&x| ctx.elem_i64(x)).collect::<Vec<_>>();
        // x + y = 2, 2x + 2y = 4 over F_5.
        let (part, ker) = solution_space(ctx, vec![e(&[1, 1, 2]), e(&[2, 2, 4])], 2).unwrap();
        assert_eq!(ker.len(), 1);
        assert_eq!(part[0] + part[1], ctx.elem(2));
        assert_eq!(ker[0][0] + ker[0][1], ctx.zero());
        assert!(solution_space(ctx, vec![e(&[1, 1, 2]), e(&[1, 1, 3])], 2).is_none());
    }
}
