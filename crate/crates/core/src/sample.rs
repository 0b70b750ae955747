//! Seeded random polynomials for property tests and identity sweeps.

use rand::Rng;

use crate::field::FieldCtx;
use crate::poly::{ExponentVector, MultiPoly};

/// A random polynomial with at most `max_terms` terms of total degree at most
/// `max_deg`. May be zero only if `max_terms` is zero.
pub fn random_poly<R: Rng + ?Sized>(
    rng: &mut R,
    ctx: FieldCtx,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> MultiPoly {
    let count = if max_terms == 0 { 0 } else { rng.gen_range(1..=max_terms) };
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let total = rng.gen_range(0..=max_deg);
        let mut e = [0u32; 3];
        let mut left = total;
        for slot in e.iter_mut().take(nvars - 1) {
            *slot = rng.gen_range(0..=left);
            left -= *slot;
        }
        e[nvars - 1] = left;
        terms.push((ExponentVector(e), rng.gen_range(1..ctx.p())));
    }
    let f = MultiPoly::from_terms(ctx, nvars, terms).expect("exponents within bounds");
    if f.is_zero() && count > 0 {
        // Coefficients cancelled; fall back to a single nonzero term.
        MultiPoly::constant(ctx, nvars, 1)
    } else {
        f
    }
}

/// A random nonzero polynomial that is not in `k[x1^p, ..., xn^p]`.
pub fn random_poly_outside_pth<R: Rng + ?Sized>(
    rng: &mut R,
    ctx: FieldCtx,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> MultiPoly {
    loop {
        let f = random_poly(rng, ctx, nvars, max_deg, max_terms);
        if !f.is_in_pth_subring() {
            return f;
        }
    }
}
