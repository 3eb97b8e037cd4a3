//! Factorization of an `m²×m²` operator through a single diamond square.

use super::cmatrix::{fmt_shape, CMatrix, C64};
use super::diamond::{pair_index, DiamondContext};
use crate::error::{mismatch, Result};

/// Relative cutoff below which singular values are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct DiamondFactorization {
    pub b: CMatrix,
    pub c: CMatrix,
    pub b_prime: CMatrix,
}

impl DiamondFactorization {
    /// `b·(c◇c)·b′`.
    pub fn reconstruct(&self, ctx: &DiamondContext) -> Result<CMatrix> {
        let cc = super::diamond::diamond(&self.c, &self.c, ctx)?;
        Ok(&(&self.b * &cc) * &self.b_prime)
    }
}

/// Writes `a = b·(c◇c)·b′` with `c` diagonal and positive.
///
/// From `a = U·diag(λ)·V*`, the singular value at position `p + q·m` is read
/// as `λ_{p,q}`. A nonincreasing sequence `t_n ≥ max{λ_{p,n}, λ_{n,p} : p ≤ n}`
/// gives `c = diag(√t)`, whose diamond square is diagonal with entries
/// `r_{p,q} = √(t_p t_q) ≥ λ_{p,q}`. The ratios `s = √(λ/r)` go into
/// `b = U·diag(s)` and `b′ = diag(s)·V*`.
pub fn diamond_square_factor(a: &CMatrix, ctx: &DiamondContext) -> Result<DiamondFactorization> {
    let m = ctx.base_level();
    let n = m * m;
    if a.shape() != (n, n) {
        return Err(mismatch("diamond_square_factor", fmt_shape((n, n)), fmt_shape(a.shape())));
    }
    if a.is_zero() {
        return Ok(DiamondFactorization {
            b: CMatrix::zeros(n, n),
            c: CMatrix::zeros(m, m),
            b_prime: CMatrix::zeros(n, n),
        });
    }
    let svd = a.svd()?;
    let top = svd.sigma[0];
    let lambda: Vec<f64> =
        svd.sigma.iter().map(|&s| if s < SINGULAR_CUTOFF * top { 0.0 } else { s }).collect();
    let lam = |p: usize, q: usize| lambda[pair_index(p, q, m)];

    let mut t: Vec<f64> = (0..m)
        .map(|k| (0..=k).map(|p| lam(p, k).max(lam(k, p))).fold(0.0, f64::max))
        .collect();
    for k in (0..m.saturating_sub(1)).rev() {
        t[k] = t[k].max(t[k + 1]);
    }

    let mut s = vec![0.0; n];
    for p in 0..m {
        for q in 0..m {
            let r = (t[p] * t[q]).sqrt();
            let l = lam(p, q);
            s[pair_index(p, q, m)] = if r > 0.0 && l > 0.0 { (l / r).sqrt() } else { 0.0 };
        }
    }
    let f = CMatrix::diagonal(&s.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let c = CMatrix::diagonal(&t.iter().map(|&x| C64::new(x.sqrt(), 0.0)).collect::<Vec<_>>());
    Ok(DiamondFactorization { b: &svd.u * &f, c, b_prime: &f * &svd.v_adj })
}
