//! The ring `k[X0', X1'][X0, …, Xn]`, its affine chart `k[z][X1, …, Xn]`, and evaluation at
//! functional points.

mod parse;
mod point;
mod poly;
mod sparse;

pub use parse::{parse_affine, parse_bi, parse_poly, AnyPolynomial};
pub use point::{evaluate_affine, evaluate_bi, FunctionalPoint, FunctionalPointJson};
pub use poly::{AffinePolynomial, BiPolynomial};
pub use sparse::Exponents;

/// Evaluates either representation at `f`.
pub fn evaluate(
    p: &AnyPolynomial,
    f: &FunctionalPoint,
) -> crate::Result<crate::series::TruncatedSeries> {
    match p {
        AnyPolynomial::Affine(a) => evaluate_affine(a, f),
        AnyPolynomial::Bi(b) => evaluate_bi(b, f),
    }
}

#[cfg(test)]
mod tests;

/// All exponent vectors of length `len` with entries summing to `total`, in reverse lexicographic
/// order (largest first).
pub fn compositions(len: usize, total: u32) -> Vec<Exponents> {
    fn rec(len: usize, total: u32, prefix: &mut Exponents, out: &mut Vec<Exponents>) {
        if len == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=total).rev() {
            prefix.push(k);
            rec(len - 1, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(len, total, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Exponent vectors of all monomials of `𝒜` with bidegree exactly `(a, b)`.
pub fn bi_monomials(n: usize, a: u32, b: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for xp in compositions(2, a) {
        for x in compositions(n + 1, b) {
            let mut e = xp.clone();
            e.extend_from_slice(&x);
            out.push(e);
        }
    }
    out
}

/// Exponent vectors `z^i·X^e` with `i ≤ a`, `|e| ≤ b`: `(a+1)·C(b+n, n)` columns ordered by
/// `i`, then total `X`-degree, then reverse lexicographically.
pub fn affine_monomials(n: usize, a: u32, b: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for i in 0..=a {
        for d in 0..=b {
            for x in compositions(n, d) {
                let mut e = vec![i];
                e.extend_from_slice(&x);
                out.push(e);
            }
        }
    }
    out
}
