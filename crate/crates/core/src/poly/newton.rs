//! Newton polygons of bivariate polynomials.
//!
//! The polygon is the convex hull of the exponent support with the origin
//! adjoined. Some authors omit the origin; here it is always included.

use super::{MultiPoly, PolyError};

type Pt = (i64, i64);

fn cross(o: Pt, a: Pt, b: Pt) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Hull vertices, counterclockwise starting at `(0, 0)`. A point or a
/// segment comes back as a 1- or 2-vertex list.
pub fn newton_polygon(f: &MultiPoly) -> Result<Vec<(u32, u32)>, PolyError> {
    if f.nvars() != 2 {
        return Err(PolyError::NotBivariate);
    }
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut pts: Vec<Pt> = f.raw_terms().iter().map(|t| (t.0.get(0) as i64, t.0.get(1) as i64)).collect();
    pts.push((0, 0));
    pts.sort_unstable();
    pts.dedup();
    if pts.len() == 1 {
        return Ok(vec![(0, 0)]);
    }
    // Andrew's monotone chain; (0,0) is the lexicographic minimum, so the
    // lower hull starts there.
    let mut lower: Vec<Pt> = Vec::new();
    for &q in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Pt> = Vec::new();
    for &q in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Ok(lower.into_iter().map(|(x, y)| (x as u32, y as u32)).collect())
}

/// True iff the polygon is the triangle `(0,0), (n,0), (0,m)`, counting a
/// point or an axis-aligned segment as a degenerate such triangle.
pub fn is_triangle_polygon(f: &MultiPoly) -> Result<bool, PolyError> {
    let v = newton_polygon(f)?;
    Ok(v.iter().all(|&(x, y)| x == 0 || y == 0))
}
