//! The graded diamond product.
//!
//! The pairing unitary `ι : C^{m²} → C^m ⊗ C^m` is the column-major index
//! pairing `i + j·m ↦ (i, j)`. With it, `a ◇ b = ι*(a ⊗ b)ι` and the flip
//! `Δ = ι*∇ι` sends `a ◇ b` to `b ◇ a` by conjugation.

use serde::{Deserialize, Serialize};

use super::cmatrix::{fmt_shape, CMatrix, ONE, ZERO};
use crate::error::{mismatch, Error, Result};

/// Position of the pair `(i, j)` under the column-major pairing of
/// `C^p ⊗ C^q` with `C^{pq}`.
#[inline]
pub fn pair_index(i: usize, j: usize, p: usize) -> usize {
    i + j * p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondContext {
    base_level: usize,
    /// `iota[p]` is the Kronecker-order index of the pair that `e_p` maps to.
    iota: Vec<usize>,
    delta: CMatrix,
}

impl DiamondContext {
    pub fn new(base_level: usize) -> Result<Self> {
        if base_level == 0 {
            return Err(Error::Precondition("diamond base level must be positive".into()));
        }
        let m = base_level;
        let mut iota = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                iota[pair_index(i, j, m)] = i * m + j;
            }
        }
        let mut delta = CMatrix::zeros(m * m, m * m);
        for i in 0..m {
            for j in 0..m {
                delta[(pair_index(j, i, m), pair_index(i, j, m))] = ONE;
            }
        }
        Ok(DiamondContext { base_level: m, iota, delta })
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    pub fn iota(&self) -> &[usize] {
        &self.iota
    }

    pub fn delta(&self) -> &CMatrix {
        &self.delta
    }

    /// `ι` as an m²×m² permutation matrix from `C^{m²}` into Kronecker order.
    pub fn iota_matrix(&self) -> CMatrix {
        let n = self.iota.len();
        let mut out = CMatrix::zeros(n, n);
        for (p, &k) in self.iota.iter().enumerate() {
            out[(k, p)] = ONE;
        }
        out
    }

    fn check_square(&self, op: &'static str, a: &CMatrix) -> Result<()> {
        let m = self.base_level;
        if a.shape() != (m, m) {
            return Err(mismatch(op, fmt_shape((m, m)), fmt_shape(a.shape())));
        }
        Ok(())
    }
}

/// `a ◇ b = ι*(a ⊗ b)ι` for `a, b` of size `m×m`, where `m` is the context
/// level; the result is `m²×m²`.
pub fn diamond(a: &CMatrix, b: &CMatrix, ctx: &DiamondContext) -> Result<CMatrix> {
    ctx.check_square("diamond", a)?;
    ctx.check_square("diamond", b)?;
    let n = ctx.iota.len();
    let m = ctx.base_level;
    let mut out = CMatrix::zeros(n, n);
    for p in 0..n {
        let (ia, ib) = (ctx.iota[p] / m, ctx.iota[p] % m);
        for q in 0..n {
            let (ja, jb) = (ctx.iota[q] / m, ctx.iota[q] % m);
            out[(p, q)] = a[(ia, ja)] * b[(ib, jb)];
        }
    }
    Ok(out)
}

/// Diamond of arbitrary rectangular operators with the same column-major
/// pairing on both sides: for `a: p×q` and `b: r×s` the result is `pr×qs`
/// with entry `[i + j·p, k + l·q] = a[i,k]·b[j,l]`.
///
/// On square `m×m` arguments this agrees with [`diamond`]; the rectangular
/// form carries the isometries between truncation levels.
pub fn diamond_rect(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = a.shape();
    let (r, s) = b.shape();
    let mut out = CMatrix::zeros(p * r, q * s);
    for j in 0..r {
        for l in 0..s {
            let bjl = b[(j, l)];
            if bjl == ZERO {
                continue;
            }
            for i in 0..p {
                for k in 0..q {
                    out[(pair_index(i, j, p), pair_index(k, l, q))] = a[(i, k)] * bjl;
                }
            }
        }
    }
    out
}

/// `Δ·M·Δ` for an `m²×m²` matrix `M`.
pub fn delta_conjugate(m: &CMatrix, ctx: &DiamondContext) -> Result<CMatrix> {
    let n = ctx.iota.len();
    if m.shape() != (n, n) {
        return Err(mismatch("delta_conjugate", fmt_shape((n, n)), fmt_shape(m.shape())));
    }
    Ok(&(&ctx.delta * m) * &ctx.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, seeded_rng};

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        a.max_abs_diff(b) / b.max_abs().max(1.0)
    }

    #[test]
    fn delta_is_unitary_involution() {
        for m in 1..5 {
            let ctx = DiamondContext::new(m).unwrap();
            let d = ctx.delta();
            let n = m * m;
            assert!((d * &d.adjoint()).max_abs_diff(&CMatrix::identity(n)) <= 1e-12);
            assert!((d * d).max_abs_diff(&CMatrix::identity(n)) <= 1e-12);
        }
    }

    #[test]
    fn iota_is_a_bijection() {
        let ctx = DiamondContext::new(4).unwrap();
        let mut seen = ctx.iota().to_vec();
        seen.sort();
        assert_eq!(seen, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn identity_diamond_identity() {
        let ctx = DiamondContext::new(3).unwrap();
        let i3 = CMatrix::identity(3);
        assert_eq!(diamond(&i3, &i3, &ctx).unwrap(), CMatrix::identity(9));
    }

    #[test]
    fn iota_conjugation_recovers_kron() {
        let mut rng = seeded_rng(5);
        let ctx = DiamondContext::new(3).unwrap();
        let a = gaussian_matrix(&mut rng, 3, 3);
        let b = gaussian_matrix(&mut rng, 3, 3);
        let iota = ctx.iota_matrix();
        let d = diamond(&a, &b, &ctx).unwrap();
        let back = &(&iota * &d) * &iota.adjoint();
        assert!(back.max_abs_diff(&a.kron(&b)) <= 1e-15);
        assert_eq!(diamond_rect(&a, &b), d);
    }

    #[test]
    fn product_adjoint_and_norm_rules() {
        let mut rng = seeded_rng(9);
        let ctx = DiamondContext::new(3).unwrap();
        for _ in 0..10 {
            let [a, b, c, d] = [0; 4].map(|_| gaussian_matrix(&mut rng, 3, 3));
            let lhs = &diamond(&a, &b, &ctx).unwrap() * &diamond(&c, &d, &ctx).unwrap();
            let rhs = diamond(&(&a * &c), &(&b * &d), &ctx).unwrap();
            assert!(rel(&lhs, &rhs) <= 1e-12);
            let adj = diamond(&a, &b, &ctx).unwrap().adjoint();
            assert!(rel(&adj, &diamond(&a.adjoint(), &b.adjoint(), &ctx).unwrap()) <= 1e-12);
            let n = diamond(&a, &b, &ctx).unwrap().op_norm();
            assert!((n - a.op_norm() * b.op_norm()).abs() <= 1e-10 * n);
        }
    }

    #[test]
    fn flip_swaps_factors() {
        let mut rng = seeded_rng(21);
        let ctx = DiamondContext::new(3).unwrap();
        let a = gaussian_matrix(&mut rng, 3, 3);
        let b = gaussian_matrix(&mut rng, 3, 3);
        let ab = diamond(&a, &b, &ctx).unwrap();
        let ba = diamond(&b, &a, &ctx).unwrap();
        assert!(rel(&delta_conjugate(&ab, &ctx).unwrap(), &ba) <= 1e-12);
        let aa = diamond(&a, &a, &ctx).unwrap();
        assert!(rel(&delta_conjugate(&aa, &ctx).unwrap(), &aa) <= 1e-12);
        let id = CMatrix::identity(9);
        assert_eq!(delta_conjugate(&id, &ctx).unwrap(), id);
    }

    #[test]
    fn rectangular_product_rule() {
        let mut rng = seeded_rng(2);
        let a = gaussian_matrix(&mut rng, 2, 3);
        let b = gaussian_matrix(&mut rng, 4, 1);
        let c = gaussian_matrix(&mut rng, 3, 2);
        let d = gaussian_matrix(&mut rng, 1, 3);
        let lhs = &diamond_rect(&a, &b) * &diamond_rect(&c, &d);
        let rhs = diamond_rect(&(&a * &c), &(&b * &d));
        assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let ctx = DiamondContext::new(2).unwrap();
        assert!(diamond(&CMatrix::identity(3), &CMatrix::identity(2), &ctx).is_err());
        assert!(delta_conjugate(&CMatrix::identity(3), &ctx).is_err());
        assert!(DiamondContext::new(0).is_err());
    }
}
