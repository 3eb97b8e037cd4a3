//! The algebraic tensor product `E ⊗ F`, carried by the spatial product
//! quantization, and the two ways of multiplying amplified elements into it.

use std::sync::Arc;

use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{diamond_rect, fmt_shape, CMatrix, DiamondContext};
use crate::quantum_space::{AmplifiedElement, OperatorSpace, DIMENSION_CAP};

/// `E`, `F` and the space `E ⊗ F` whose basis element `x_i ⊗ y_j` sits at
/// index `i·dim F + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPair {
    e: Arc<OperatorSpace>,
    f: Arc<OperatorSpace>,
    product: Arc<OperatorSpace>,
}

impl TensorPair {
    pub fn new(e: Arc<OperatorSpace>, f: Arc<OperatorSpace>) -> Result<Self> {
        let product = Arc::new(OperatorSpace::spatial_product(&e, &f)?);
        Ok(TensorPair { e, f, product })
    }

    pub fn e(&self) -> &Arc<OperatorSpace> {
        &self.e
    }

    pub fn f(&self) -> &Arc<OperatorSpace> {
        &self.f
    }

    pub fn product(&self) -> &Arc<OperatorSpace> {
        &self.product
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.f.dim() + j
    }

    fn check_factors(&self, u: &AmplifiedElement, v: &AmplifiedElement, op: &'static str) -> Result<()> {
        if **u.space() != *self.e {
            return Err(Error::Precondition(format!("{op}: left factor is not in E")));
        }
        if **v.space() != *self.f {
            return Err(Error::Precondition(format!("{op}: right factor is not in F")));
        }
        if u.level() != v.level() {
            return Err(mismatch(op, u.level(), v.level()));
        }
        Ok(())
    }

    fn check_target(&self, w: &AmplifiedElement, op: &'static str) -> Result<()> {
        if **w.space() != *self.product {
            return Err(Error::Precondition(format!("{op}: element is not in E ⊗ F")));
        }
        Ok(())
    }

    /// `u ⊙ v = Σ (a_i·b_j) x_i ⊗ y_j`.
    pub fn effros(&self, u: &AmplifiedElement, v: &AmplifiedElement) -> Result<AmplifiedElement> {
        self.check_factors(u, v, "effros")?;
        let coeffs = self.effros_coeffs(u.coeffs(), v.coeffs());
        AmplifiedElement::new(self.product.clone(), u.level(), coeffs)
    }

    /// `Σ (a_i·b_j)` per basis pair for conformable coefficient lists.
    pub(crate) fn effros_coeffs(&self, a: &[CMatrix], b: &[CMatrix]) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for ai in a {
            for bj in b {
                out.push(ai * bj);
            }
        }
        out
    }

    /// `u ◇ v = Σ (a_i ◇ b_j) x_i ⊗ y_j` at level `m²`.
    pub fn diamond_tensor(
        &self,
        u: &AmplifiedElement,
        v: &AmplifiedElement,
        ctx: &DiamondContext,
    ) -> Result<AmplifiedElement> {
        self.check_factors(u, v, "diamond_tensor")?;
        if ctx.base_level() != u.level() {
            return Err(mismatch("diamond_tensor", ctx.base_level(), u.level()));
        }
        let m = u.level();
        let mut coeffs = Vec::with_capacity(self.product.dim());
        for ai in u.coeffs() {
            for bj in v.coeffs() {
                coeffs.push(diamond_rect(ai, bj));
            }
        }
        AmplifiedElement::new(self.product.clone(), m * m, coeffs)
    }

    /// Coefficients of `a·(u ◇ v)·b` for `a: M×m²`, `b: m²×M`.
    pub(crate) fn rigged_coeffs(
        &self,
        a: &CMatrix,
        u: &[CMatrix],
        v: &[CMatrix],
        b: &CMatrix,
    ) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(u.len() * v.len());
        for x in u {
            for y in v {
                out.push(rigged_apply(a, x, y, b));
            }
        }
        out
    }

    /// `‖U‖` in `K(E ⊗_sp F)`, refusing assemblies beyond the dimension cap.
    pub fn spatial_norm(&self, w: &AmplifiedElement) -> Result<f64> {
        self.check_target(w, "spatial_norm")?;
        spatial_norm(w)
    }
}

/// Operator norm of the assembled `Σ C_ij ⊗ x_i ⊗ y_j`.
pub fn spatial_norm(w: &AmplifiedElement) -> Result<f64> {
    let s = w.space();
    let side = w.level() * s.out_dim().max(s.in_dim());
    if side > DIMENSION_CAP {
        return Err(Error::DimensionCap { size: side, cap: DIMENSION_CAP });
    }
    Ok(w.norm())
}

/// `a·(x ◇ y)·b` without forming the `m²×m²` diamond.
///
/// Row `r` of `a`, reshaped as `A_r[p, q] = a[r, p + q·m]`, turns into
/// `xᵀ·A_r·y` under right multiplication by `x ◇ y`.
pub fn rigged_apply(a: &CMatrix, x: &CMatrix, y: &CMatrix, b: &CMatrix) -> CMatrix {
    let m = x.rows();
    let (mx, my) = (x.cols(), y.cols());
    let xt = x.transpose();
    let mut ad = CMatrix::zeros(a.rows(), mx * my);
    for r in 0..a.rows() {
        let ar = CMatrix::from_fn(m, y.rows(), |p, q| a[(r, p + q * m)]);
        let t = &(&xt * &ar) * y;
        for p in 0..mx {
            for q in 0..my {
                ad[(r, p + q * mx)] = t[(p, q)];
            }
        }
    }
    &ad * b
}

/// Shape check for a rigged term `a: M×m²`, `b: m²×M`.
pub(crate) fn check_riggers(a: &CMatrix, b: &CMatrix, m: usize) -> Result<usize> {
    let big = a.rows();
    if a.cols() != m * m || b.shape() != (m * m, big) {
        return Err(mismatch(
            "rigged term",
            format!("a: Mx{0}, b: {0}xM", m * m),
            format!("a: {}, b: {}", fmt_shape(a.shape()), fmt_shape(b.shape())),
        ));
    }
    Ok(big)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::diamond;
    use crate::quantum_space::module_action;
    use crate::random::{gaussian_matrix, seeded_rng};

    fn pair(seed: u64) -> TensorPair {
        let mut rng = seeded_rng(seed);
        let e = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 2).unwrap());
        let f = Arc::new(OperatorSpace::column(2).unwrap());
        TensorPair::new(e, f).unwrap()
    }

    #[test]
    fn elementary_effros() {
        let p = pair(1);
        let mut rng = seeded_rng(2);
        let a = gaussian_matrix(&mut rng, 2, 2);
        let b = gaussian_matrix(&mut rng, 2, 2);
        let u = AmplifiedElement::elementary(p.e().clone(), a.clone(), 1).unwrap();
        let v = AmplifiedElement::elementary(p.f().clone(), b.clone(), 0).unwrap();
        let w = p.effros(&u, &v).unwrap();
        let want = AmplifiedElement::elementary(p.product().clone(), &a * &b, p.index(1, 0)).unwrap();
        assert!(w.max_abs_diff(&want) <= 1e-14);
        let zero = AmplifiedElement::zero(p.f().clone(), 2).unwrap();
        assert_eq!(p.effros(&u, &zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn effros_is_balanced() {
        let p = pair(3);
        let mut rng = seeded_rng(4);
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), 3).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), 3).unwrap();
        let a = gaussian_matrix(&mut rng, 3, 3);
        let i = CMatrix::identity(3);
        let lhs = p.effros(&module_action(&i, &u, &a).unwrap(), &v).unwrap();
        let rhs = p.effros(&u, &module_action(&a, &v, &i).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * lhs.coeffs()[0].max_abs().max(1.0));
    }

    #[test]
    fn rigged_apply_matches_dense() {
        let mut rng = seeded_rng(5);
        let m = 3;
        let ctx = DiamondContext::new(m).unwrap();
        let a = gaussian_matrix(&mut rng, 4, m * m);
        let b = gaussian_matrix(&mut rng, m * m, 4);
        let x = gaussian_matrix(&mut rng, m, m);
        let y = gaussian_matrix(&mut rng, m, m);
        let dense = &(&a * &diamond(&x, &y, &ctx).unwrap()) * &b;
        assert!(rigged_apply(&a, &x, &y, &b).max_abs_diff(&dense) <= 1e-12);
        // rectangular factors use the rectangular diamond
        let x = gaussian_matrix(&mut rng, m, 1);
        let y = gaussian_matrix(&mut rng, m, 2);
        let b = gaussian_matrix(&mut rng, 2, 5);
        let dense = &(&a * &diamond_rect(&x, &y)) * &b;
        assert!(rigged_apply(&a, &x, &y, &b).max_abs_diff(&dense) <= 1e-12);
    }

    #[test]
    fn elementary_diamond_tensor_norm() {
        let mut rng = seeded_rng(6);
        let e = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 2).unwrap());
        let f = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 1, 3).unwrap());
        let p = TensorPair::new(e, f).unwrap();
        let ctx = DiamondContext::new(2).unwrap();
        let a = gaussian_matrix(&mut rng, 2, 2);
        let b = gaussian_matrix(&mut rng, 2, 2);
        let u = AmplifiedElement::elementary(p.e().clone(), a.clone(), 0).unwrap();
        let v = AmplifiedElement::elementary(p.f().clone(), b.clone(), 1).unwrap();
        let w = p.diamond_tensor(&u, &v, &ctx).unwrap();
        let xy = p.e().basis()[0].kron(&p.f().basis()[1]);
        let want = a.op_norm() * b.op_norm() * xy.op_norm();
        assert!((spatial_norm(&w).unwrap() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn diamond_tensor_module_rule() {
        let p = pair(7);
        let mut rng = seeded_rng(8);
        let ctx = DiamondContext::new(2).unwrap();
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), 2).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), 2).unwrap();
        let [a, b, c, d] = [0; 4].map(|_| gaussian_matrix(&mut rng, 2, 2));
        let left = diamond(&a, &b, &ctx).unwrap();
        let right = diamond(&c, &d, &ctx).unwrap();
        let lhs = module_action(&left, &p.diamond_tensor(&u, &v, &ctx).unwrap(), &right).unwrap();
        let rhs = p
            .diamond_tensor(&module_action(&a, &u, &c).unwrap(), &module_action(&b, &v, &d).unwrap(), &ctx)
            .unwrap();
        let scale = lhs.coeffs().iter().map(CMatrix::max_abs).fold(1.0, f64::max);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }
}
