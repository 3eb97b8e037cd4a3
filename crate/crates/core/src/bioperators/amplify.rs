//! Strong and weak amplifications, diamond actions on amplified elements and
//! the identities relating them.

use serde::{Deserialize, Serialize};

use super::bioperator::Bioperator;
use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{delta_conjugate, diamond, fmt_shape, CMatrix, DiamondContext, C64};
use crate::quantum_space::{module_action, AmplifiedElement, SpaceKind};

fn check_inputs(r: &Bioperator, u: &AmplifiedElement, v: &AmplifiedElement, op: &'static str) -> Result<()> {
    if **u.space() != **r.dom_e() {
        return Err(Error::Precondition(format!("{op}: first argument is not in the first domain")));
    }
    if **v.space() != **r.dom_f() {
        return Err(Error::Precondition(format!("{op}: second argument is not in the second domain")));
    }
    if u.level() != v.level() {
        return Err(mismatch(op, u.level(), v.level()));
    }
    Ok(())
}

fn amplify_with(
    r: &Bioperator,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    level: usize,
    mut combine: impl FnMut(&CMatrix, &CMatrix) -> Result<CMatrix>,
) -> Result<AmplifiedElement> {
    let ng = r.cod_g().dim();
    let mut coeffs = vec![CMatrix::zeros(level, level); ng];
    let mut cache: Vec<Option<CMatrix>> = vec![None; r.dom_e().dim() * r.dom_f().dim()];
    let nf = r.dom_f().dim();
    for (i, j, k, c) in r.nonzero_terms() {
        let slot = &mut cache[i * nf + j];
        if slot.is_none() {
            *slot = Some(combine(&u.coeffs()[i], &v.coeffs()[j])?);
        }
        coeffs[k].add_block(0, 0, slot.as_ref().expect("filled above"), c);
    }
    AmplifiedElement::new(r.cod_g().clone(), level, coeffs)
}

/// `R_s(u, v) = Σ c_ijk (a_i·b_j) z_k` at the common level `m`.
pub fn strong_amplify(r: &Bioperator, u: &AmplifiedElement, v: &AmplifiedElement) -> Result<AmplifiedElement> {
    check_inputs(r, u, v, "strong_amplify")?;
    amplify_with(r, u, v, u.level(), |a, b| Ok(a * b))
}

/// `R_w(u, v) = Σ c_ijk (a_i ◇ b_j) z_k` at level `m²`.
pub fn weak_amplify(
    r: &Bioperator,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    ctx: &DiamondContext,
) -> Result<AmplifiedElement> {
    check_inputs(r, u, v, "weak_amplify")?;
    if ctx.base_level() != u.level() {
        return Err(mismatch("weak_amplify", ctx.base_level(), u.level()));
    }
    let m = u.level();
    amplify_with(r, u, v, m * m, |a, b| diamond(a, b, ctx))
}

/// `a ◇ u`: every coefficient `c` becomes `a ◇ c`.
pub fn diamond_act_left(a: &CMatrix, u: &AmplifiedElement, ctx: &DiamondContext) -> Result<AmplifiedElement> {
    let coeffs = u.coeffs().iter().map(|c| diamond(a, c, ctx)).collect::<Result<Vec<_>>>()?;
    let m = ctx.base_level();
    AmplifiedElement::new(u.space().clone(), m * m, coeffs)
}

/// `u ◇ a`: every coefficient `c` becomes `c ◇ a`.
pub fn diamond_act_right(u: &AmplifiedElement, a: &CMatrix, ctx: &DiamondContext) -> Result<AmplifiedElement> {
    let coeffs = u.coeffs().iter().map(|c| diamond(c, a, ctx)).collect::<Result<Vec<_>>>()?;
    let m = ctx.base_level();
    AmplifiedElement::new(u.space().clone(), m * m, coeffs)
}

/// `Δ·w·Δ` coefficient-wise for `w` at level `m²`.
pub fn delta_conjugate_element(w: &AmplifiedElement, ctx: &DiamondContext) -> Result<AmplifiedElement> {
    let coeffs = w.coeffs().iter().map(|c| delta_conjugate(c, ctx)).collect::<Result<Vec<_>>>()?;
    w.with_coeffs(coeffs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// Largest coefficient entry difference divided by the larger side's
    /// largest entry (or 1).
    pub relative_deviation: f64,
}

impl IdentityReport {
    pub fn compare(lhs: &AmplifiedElement, rhs: &AmplifiedElement) -> Self {
        let scale = lhs
            .coeffs()
            .iter()
            .chain(rhs.coeffs())
            .map(CMatrix::max_abs)
            .fold(1.0, f64::max);
        IdentityReport {
            lhs_norm: lhs.norm(),
            rhs_norm: rhs.norm(),
            relative_deviation: lhs.max_abs_diff(rhs) / scale,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.relative_deviation <= tol
    }
}

/// Compares `R_w(u·P, P·v)` with `R_s(u ◇ P, P ◇ v)` for a projection `P`.
pub fn compression_identity_check(
    r: &Bioperator,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    p: &CMatrix,
    ctx: &DiamondContext,
) -> Result<IdentityReport> {
    check_inputs(r, u, v, "compression_identity_check")?;
    let m = u.level();
    if p.shape() != (m, m) {
        return Err(mismatch("compression_identity_check", fmt_shape((m, m)), fmt_shape(p.shape())));
    }
    if !p.is_projection(1e-10) {
        return Err(Error::Precondition("P must be an orthogonal projection".into()));
    }
    let id = CMatrix::identity(m);
    let up = module_action(&id, u, p)?;
    let pv = module_action(p, v, &id)?;
    let weak = weak_amplify(r, &up, &pv, ctx)?;
    let strong = strong_amplify(r, &diamond_act_right(u, p, ctx)?, &diamond_act_left(p, v, ctx)?)?;
    Ok(IdentityReport::compare(&weak, &strong))
}

/// Compares `(R^op)_w(v, u)` with `Δ·R_w(u, v)·Δ`.
pub fn opposite_identity_check(
    r: &Bioperator,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    ctx: &DiamondContext,
) -> Result<IdentityReport> {
    let lhs = weak_amplify(&r.opposite(), v, u, ctx)?;
    let rhs = delta_conjugate_element(&weak_amplify(r, u, v, ctx)?, ctx)?;
    Ok(IdentityReport::compare(&lhs, &rhs))
}

/// `v ∘ (1 ⊗ φ) ∘ u` for a bifunctional `f` on a row space × column space,
/// where `φ` is the operator with matrix `F_ij = f(e_i, e_j)`.
///
/// `u` over the column space assembles to an `(m·k)×m` operator, `v` over
/// the row space to `m×(m·h)`; the composition is `m×m`.
pub fn compose_through_operator(
    f: &Bioperator,
    v: &AmplifiedElement,
    u: &AmplifiedElement,
) -> Result<CMatrix> {
    if f.cod_g().dim() != 1 {
        return Err(Error::Precondition("expected a bifunctional".into()));
    }
    let row_kinds = [SpaceKind::Row, SpaceKind::ConjugateRow];
    let col_kinds = [SpaceKind::Column, SpaceKind::ConjugateColumn];
    if !row_kinds.contains(&f.dom_e().kind()) || !col_kinds.contains(&f.dom_f().kind()) {
        return Err(Error::Precondition("expected a bifunctional on row space × column space".into()));
    }
    check_inputs(f, v, u, "compose_through_operator")?;
    let phi = bifunctional_matrix(f);
    let m = u.level();
    let middle = CMatrix::identity(m).kron(&phi);
    Ok(&(&v.assembled() * &middle) * &u.assembled())
}

/// `F_ij = f(e_i, e_j)`. Its operator norm is the norm of `f` on
/// row space × column space.
pub fn bifunctional_matrix(f: &Bioperator) -> CMatrix {
    let (ne, nf, _) = f.dims();
    CMatrix::from_fn(ne, nf, |i, j| f.coefficient(i, j, 0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFactorReport {
    pub product_norm: f64,
    pub u_norm: f64,
    pub v_norm: f64,
    /// Entry deviation between the assembled `T_s(u, v)` and `U·V`.
    pub identity_error: f64,
}

/// For the canonical tensor map `T`, writes `T_s(u, v) = U·V` with
/// `U = u ⊗ 1` and `V` a factor-permuted `v ⊗ 1`, so that
/// `‖T_s(u, v)‖ ≤ ‖U‖‖V‖ = ‖u‖‖v‖`.
pub fn canonical_tensor_factor_check(
    t: &Bioperator,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
) -> Result<ProductFactorReport> {
    if t.cod_g().kind() != SpaceKind::SpatialProduct {
        return Err(Error::Precondition("expected the canonical tensor map".into()));
    }
    let ts = strong_amplify(t, u, v)?;
    let (he, kf) = (t.dom_e().in_dim(), t.dom_f().out_dim());
    let hf = t.dom_f().in_dim();
    let m = u.level();
    let big_u = u.assembled().kron(&CMatrix::identity(kf));
    let va = v.assembled();
    // Rows (s, g, b) and columns (c, g', d) of V pick v's entry at
    // rows (s, b), columns (c, d) when g = g'.
    let big_v = CMatrix::from_fn(m * he * kf, m * he * hf, |row, col| {
        let (s, rest) = (row / (he * kf), row % (he * kf));
        let (g, b) = (rest / kf, rest % kf);
        let (c, rest) = (col / (he * hf), col % (he * hf));
        let (g2, d) = (rest / hf, rest % hf);
        if g == g2 {
            va[(s * kf + b, c * hf + d)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let uv = big_u.try_mul(&big_v)?;
    let assembled = ts.assembled();
    Ok(ProductFactorReport {
        product_norm: assembled.op_norm(),
        u_norm: u.norm(),
        v_norm: v.norm(),
        identity_error: uv.max_abs_diff(&assembled),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::matrix_core::{matrix_unit, rank_one};
    use crate::quantum_space::{make_omega, make_varpi, OperatorSpace};
    use crate::random::{gaussian_matrix, seeded_rng, unit_vector};

    fn random_bioperator(seed: u64) -> Bioperator {
        let mut rng = seeded_rng(seed);
        let e = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 2).unwrap());
        let f = Arc::new(OperatorSpace::column(2).unwrap());
        let g = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 1, 2).unwrap());
        let c = crate::random::gaussian_vector(&mut rng, 8);
        Bioperator::new(e, f, g, c).unwrap()
    }

    #[test]
    fn scalar_multiplication_is_matrix_product() {
        let mut rng = seeded_rng(1);
        let r = Bioperator::scalar_multiplication();
        let a = gaussian_matrix(&mut rng, 3, 3);
        let b = gaussian_matrix(&mut rng, 3, 3);
        let c = r.dom_e().clone();
        let u = AmplifiedElement::elementary(c.clone(), a.clone(), 0).unwrap();
        let v = AmplifiedElement::elementary(c, b.clone(), 0).unwrap();
        let w = strong_amplify(&r, &u, &v).unwrap();
        assert!(w.coeffs()[0].max_abs_diff(&(&a * &b)) <= 1e-14);
    }

    #[test]
    fn inner_product_counterexample_values() {
        let n = 3;
        let hc = Arc::new(OperatorSpace::column(n).unwrap());
        let hbar_r = Arc::new(OperatorSpace::conjugate_row(n).unwrap());
        let hbar_c = Arc::new(OperatorSpace::conjugate_column(n).unwrap());
        let ip = Bioperator::inner_product(hc.clone(), hbar_r.clone()).unwrap();
        let omega = make_omega(n, n, hc.clone()).unwrap();
        let varpi = make_varpi(n, n, hbar_r).unwrap();
        let s = strong_amplify(&ip, &omega, &varpi).unwrap();
        assert!((s.norm() - n as f64).abs() <= 1e-10);
        let ip_c = Bioperator::inner_product(hc.clone(), hbar_c.clone()).unwrap();
        let ctx = DiamondContext::new(n).unwrap();
        let omega_bar = make_omega(n, n, hbar_c).unwrap();
        let w = weak_amplify(&ip_c, &omega, &omega_bar, &ctx).unwrap();
        assert!((w.norm() - (n as f64).sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn strong_amplification_is_bilinear() {
        let r = random_bioperator(2);
        let mut rng = seeded_rng(3);
        let u1 = AmplifiedElement::random(&mut rng, r.dom_e().clone(), 2).unwrap();
        let u2 = AmplifiedElement::random(&mut rng, r.dom_e().clone(), 2).unwrap();
        let v = AmplifiedElement::random(&mut rng, r.dom_f().clone(), 2).unwrap();
        let lhs = strong_amplify(&r, &u1.try_add(&u2).unwrap(), &v).unwrap();
        let rhs = strong_amplify(&r, &u1, &v).unwrap().try_add(&strong_amplify(&r, &u2, &v).unwrap()).unwrap();
        assert!(IdentityReport::compare(&lhs, &rhs).holds(1e-12));
    }

    #[test]
    fn diamond_with_projection_preserves_norm() {
        let mut rng = seeded_rng(4);
        let s = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 3).unwrap());
        let ctx = DiamondContext::new(3).unwrap();
        let u = AmplifiedElement::random(&mut rng, s, 3).unwrap();
        let e = unit_vector(&mut rng, 3);
        let p1 = rank_one(&e, &e).unwrap();
        let p2 = &matrix_unit(3, 0, 0) + &matrix_unit(3, 2, 2);
        for p in [&p1, &p2] {
            let l = diamond_act_left(p, &u, &ctx).unwrap().norm();
            let r = diamond_act_right(&u, p, &ctx).unwrap().norm();
            assert!((l - u.norm()).abs() <= 1e-10 * u.norm());
            assert!((r - u.norm()).abs() <= 1e-10 * u.norm());
        }
    }

    #[test]
    fn diamond_module_rule() {
        let mut rng = seeded_rng(5);
        let s = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 2).unwrap());
        let ctx = DiamondContext::new(2).unwrap();
        let u = AmplifiedElement::random(&mut rng, s, 2).unwrap();
        let [a, b, c] = [0; 3].map(|_| gaussian_matrix(&mut rng, 2, 2));
        let ab = diamond(&a, &b, &ctx).unwrap();
        let lhs = module_action(&ab, &diamond_act_left(&c, &u, &ctx).unwrap(), &CMatrix::identity(4)).unwrap();
        let bu = module_action(&b, &u, &CMatrix::identity(2)).unwrap();
        let rhs = diamond_act_left(&(&a * &c), &bu, &ctx).unwrap();
        assert!(IdentityReport::compare(&lhs, &rhs).holds(1e-12));
    }

    #[test]
    fn compression_identity_cases() {
        let r = random_bioperator(6);
        let mut rng = seeded_rng(7);
        for (m, p) in [
            (2, CMatrix::identity(2)),
            (2, CMatrix::zeros(2, 2)),
            (3, matrix_unit(3, 1, 1)),
        ] {
            let ctx = DiamondContext::new(m).unwrap();
            let u = AmplifiedElement::random(&mut rng, r.dom_e().clone(), m).unwrap();
            let v = AmplifiedElement::random(&mut rng, r.dom_f().clone(), m).unwrap();
            let rep = compression_identity_check(&r, &u, &v, &p, &ctx).unwrap();
            assert!(rep.holds(1e-12), "{rep:?}");
            if p.is_zero() {
                assert_eq!(rep.lhs_norm, 0.0);
                assert_eq!(rep.rhs_norm, 0.0);
            }
        }
    }

    #[test]
    fn opposite_identity() {
        let r = random_bioperator(8);
        let mut rng = seeded_rng(9);
        let ctx = DiamondContext::new(3).unwrap();
        let u = AmplifiedElement::random(&mut rng, r.dom_e().clone(), 3).unwrap();
        let v = AmplifiedElement::random(&mut rng, r.dom_f().clone(), 3).unwrap();
        let rep = opposite_identity_check(&r, &u, &v, &ctx).unwrap();
        assert!(rep.holds(1e-12));
        assert!((rep.lhs_norm - rep.rhs_norm).abs() <= 1e-12 * rep.rhs_norm);
    }

    #[test]
    fn composition_matches_strong_amplification() {
        let mut rng = seeded_rng(10);
        let hr = Arc::new(OperatorSpace::row(3).unwrap());
        let kc = Arc::new(OperatorSpace::column(2).unwrap());
        let fm = gaussian_matrix(&mut rng, 3, 2);
        let f = Bioperator::bifunctional(hr.clone(), kc.clone(), &fm).unwrap();
        let v = AmplifiedElement::random(&mut rng, hr.clone(), 2).unwrap();
        let u = AmplifiedElement::random(&mut rng, kc.clone(), 2).unwrap();
        let comp = compose_through_operator(&f, &v, &u).unwrap();
        let s = strong_amplify(&f, &v, &u).unwrap();
        assert!(comp.max_abs_diff(&s.coeffs()[0]) <= 1e-12 * comp.max_abs().max(1.0));
        assert!(comp.op_norm() <= fm.op_norm() * v.norm() * u.norm() * (1.0 + 1e-12));
        let zero = Bioperator::bifunctional(hr, kc, &CMatrix::zeros(3, 2)).unwrap();
        assert!(compose_through_operator(&zero, &v, &u).unwrap().is_zero());
    }

    #[test]
    fn rank_one_bifunctional_composition() {
        let hr = Arc::new(OperatorSpace::row(2).unwrap());
        let kc = Arc::new(OperatorSpace::column(2).unwrap());
        let mut rng = seeded_rng(11);
        let fm = gaussian_matrix(&mut rng, 2, 1).try_mul(&gaussian_matrix(&mut rng, 1, 2)).unwrap();
        let f = Bioperator::bifunctional(hr.clone(), kc.clone(), &fm).unwrap();
        let b = gaussian_matrix(&mut rng, 2, 2);
        let a = gaussian_matrix(&mut rng, 2, 2);
        let v = AmplifiedElement::elementary(hr, b.clone(), 1).unwrap();
        let u = AmplifiedElement::elementary(kc, a.clone(), 0).unwrap();
        let comp = compose_through_operator(&f, &v, &u).unwrap();
        let want = (&b * &a).scale(fm[(1, 0)]);
        assert!(comp.max_abs_diff(&want) <= 1e-12);
    }

    #[test]
    fn canonical_tensor_factorization() {
        let mut rng = seeded_rng(12);
        let e = Arc::new(OperatorSpace::random_generic(&mut rng, 2, 2, 3).unwrap());
        let f = Arc::new(OperatorSpace::random_generic(&mut rng, 3, 2, 2).unwrap());
        let t = Bioperator::canonical_tensor(e.clone(), f.clone()).unwrap();
        let u = AmplifiedElement::random(&mut rng, e, 2).unwrap();
        let v = AmplifiedElement::random(&mut rng, f, 2).unwrap();
        let rep = canonical_tensor_factor_check(&t, &u, &v).unwrap();
        assert!(rep.identity_error <= 1e-12 * rep.product_norm.max(1.0));
        assert!(rep.product_norm <= rep.u_norm * rep.v_norm * (1.0 + 1e-12));
    }
}
