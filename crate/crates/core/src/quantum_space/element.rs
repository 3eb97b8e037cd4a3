//! Amplified elements `u = Σ a_i x_i ∈ K_m E` and their quantum norms.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::space::{OperatorSpace, DIMENSION_CAP};
use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{fmt_shape, CMatrix, C64};
use crate::random::gaussian_matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct AmplifiedElement {
    space: Arc<OperatorSpace>,
    level: usize,
    coeffs: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    space: Arc<OperatorSpace>,
    level: usize,
    coeffs: Vec<CMatrix>,
}

impl From<AmplifiedElement> for ElementRepr {
    fn from(u: AmplifiedElement) -> Self {
        ElementRepr { space: u.space, level: u.level, coeffs: u.coeffs }
    }
}

impl TryFrom<ElementRepr> for AmplifiedElement {
    type Error = Error;

    fn try_from(r: ElementRepr) -> Result<Self> {
        AmplifiedElement::new(r.space, r.level, r.coeffs)
    }
}

impl AmplifiedElement {
    pub fn new(space: Arc<OperatorSpace>, level: usize, coeffs: Vec<CMatrix>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Precondition("amplification level must be positive".into()));
        }
        if coeffs.len() != space.dim() {
            return Err(mismatch("amplified element", space.dim(), coeffs.len()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.shape() != (level, level)) {
            return Err(mismatch(
                "amplified element",
                fmt_shape((level, level)),
                fmt_shape(c.shape()),
            ));
        }
        let side = level * space.out_dim().max(space.in_dim());
        if side > DIMENSION_CAP {
            return Err(Error::DimensionCap { size: side, cap: DIMENSION_CAP });
        }
        Ok(AmplifiedElement { space, level, coeffs })
    }

    pub fn zero(space: Arc<OperatorSpace>, level: usize) -> Result<Self> {
        let coeffs = vec![CMatrix::zeros(level, level); space.dim()];
        Self::new(space, level, coeffs)
    }

    /// `a·x_index`.
    pub fn elementary(space: Arc<OperatorSpace>, a: CMatrix, index: usize) -> Result<Self> {
        let level = a.rows();
        if index >= space.dim() {
            return Err(mismatch("elementary", format!("index < {}", space.dim()), index));
        }
        let mut coeffs = vec![CMatrix::zeros(level, level); space.dim()];
        coeffs[index] = a;
        Self::new(space, level, coeffs)
    }

    /// Level-one element with scalar coordinates `x`.
    pub fn from_scalars(space: Arc<OperatorSpace>, x: &[C64]) -> Result<Self> {
        let coeffs = x.iter().map(|&z| CMatrix::scalar(z)).collect();
        Self::new(space, 1, coeffs)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, space: Arc<OperatorSpace>, level: usize) -> Result<Self> {
        let coeffs = (0..space.dim()).map(|_| gaussian_matrix(rng, level, level)).collect();
        Self::new(space, level, coeffs)
    }

    pub fn space(&self) -> &Arc<OperatorSpace> {
        &self.space
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<CMatrix> {
        self.coeffs
    }

    /// Same space and level, new coefficients.
    pub fn with_coeffs(&self, coeffs: Vec<CMatrix>) -> Result<Self> {
        Self::new(self.space.clone(), self.level, coeffs)
    }

    /// `Σ_i coeffs_i ⊗ basis_i`, of size `(m·k)×(m·h)`.
    pub fn assembled(&self) -> CMatrix {
        let (k, h) = (self.space.out_dim(), self.space.in_dim());
        let m = self.level;
        let mut out = CMatrix::zeros(m * k, m * h);
        for (c, x) in self.coeffs.iter().zip(self.space.basis()) {
            for i in 0..m {
                for j in 0..m {
                    let z = c[(i, j)];
                    if z != C64::new(0.0, 0.0) {
                        out.add_block(i * k, j * h, x, z);
                    }
                }
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.assembled().op_norm()
    }

    pub fn scale(&self, z: C64) -> Self {
        AmplifiedElement {
            space: self.space.clone(),
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.scale(z)).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(C64::new(t, 0.0))
    }

    pub fn try_add(&self, other: &AmplifiedElement) -> Result<Self> {
        self.check_compatible("add", other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(AmplifiedElement { space: self.space.clone(), level: self.level, coeffs })
    }

    /// Largest coefficient-wise entry difference; infinite if incompatible.
    pub fn max_abs_diff(&self, other: &AmplifiedElement) -> f64 {
        if self.check_compatible("compare", other).is_err() {
            return f64::INFINITY;
        }
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    fn check_compatible(&self, op: &'static str, other: &AmplifiedElement) -> Result<()> {
        if !Arc::ptr_eq(&self.space, &other.space) && self.space != other.space {
            return Err(Error::Precondition(format!("{op}: elements live in different spaces")));
        }
        if self.level != other.level {
            return Err(mismatch(op, self.level, other.level));
        }
        Ok(())
    }
}

/// Quantum norm `‖u‖` of the concrete quantization at the level of `u`.
pub fn amplified_norm(u: &AmplifiedElement) -> f64 {
    u.norm()
}

/// `‖x‖` for `x = Σ x_i basis_i`, the level-one quantum norm.
pub fn underlying_norm(space: &OperatorSpace, x: &[C64]) -> Result<f64> {
    Ok(space.combine(x)?.op_norm())
}

/// `‖p·x‖` computed at the level of the rank-one projection `p`.
pub fn underlying_norm_via_projection(
    space: &Arc<OperatorSpace>,
    x: &[C64],
    p: &CMatrix,
) -> Result<f64> {
    if !p.is_projection(1e-10) || (p.trace().re - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition("expected a rank-one orthogonal projection".into()));
    }
    if x.len() != space.dim() {
        return Err(mismatch("underlying_norm", space.dim(), x.len()));
    }
    let coeffs = x.iter().map(|&z| p.scale(z)).collect();
    Ok(AmplifiedElement::new(space.clone(), p.rows(), coeffs)?.norm())
}

/// `a·u·b`, acting on every coefficient.
pub fn module_action(a: &CMatrix, u: &AmplifiedElement, b: &CMatrix) -> Result<AmplifiedElement> {
    let m = u.level;
    if a.shape() != (m, m) {
        return Err(mismatch("module_action", fmt_shape((m, m)), fmt_shape(a.shape())));
    }
    if b.shape() != (m, m) {
        return Err(mismatch("module_action", fmt_shape((m, m)), fmt_shape(b.shape())));
    }
    transport(a, u, b)
}

/// `a·u·b` for rectangular `a: r×m`, `b: m×r`, moving `u` to level `r`.
pub fn transport(a: &CMatrix, u: &AmplifiedElement, b: &CMatrix) -> Result<AmplifiedElement> {
    let m = u.level;
    if a.cols() != m || b.rows() != m || a.rows() != b.cols() {
        return Err(mismatch(
            "transport",
            format!("r x {m} and {m} x r"),
            format!("{} and {}", fmt_shape(a.shape()), fmt_shape(b.shape())),
        ));
    }
    let coeffs = u.coeffs.iter().map(|c| &(a * c) * b).collect();
    AmplifiedElement::new(u.space.clone(), a.rows(), coeffs)
}

/// Zero-pads every coefficient into the top-left corner of `M_{new_level}`.
pub fn corner_embed(u: &AmplifiedElement, new_level: usize) -> Result<AmplifiedElement> {
    if new_level < u.level {
        return Err(Error::LevelTooSmall { op: "corner_embed", required: u.level, found: new_level });
    }
    let coeffs = u
        .coeffs
        .iter()
        .map(|c| c.pad_to(new_level, new_level))
        .collect::<Result<Vec<_>>>()?;
    AmplifiedElement::new(u.space.clone(), new_level, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::{make_corner_isometries, rank_one};
    use crate::random::{seeded_rng, unit_vector};

    fn generic(seed: u64) -> Arc<OperatorSpace> {
        let mut rng = seeded_rng(seed);
        Arc::new(OperatorSpace::random_generic(&mut rng, 3, 2, 3).unwrap())
    }

    #[test]
    fn elementary_norm_is_product() {
        let space = generic(1);
        let mut rng = seeded_rng(2);
        for i in 0..space.dim() {
            let a = gaussian_matrix(&mut rng, 3, 3);
            let u = AmplifiedElement::elementary(space.clone(), a.clone(), i).unwrap();
            let want = a.op_norm() * space.basis()[i].op_norm();
            assert!((u.norm() - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn zero_element_has_zero_norm() {
        let u = AmplifiedElement::zero(generic(1), 4).unwrap();
        assert_eq!(amplified_norm(&u), 0.0);
    }

    #[test]
    fn column_norm_formula() {
        let space = Arc::new(OperatorSpace::column(3).unwrap());
        let mut rng = seeded_rng(4);
        let u = AmplifiedElement::random(&mut rng, space, 2).unwrap();
        let mut g = CMatrix::zeros(2, 2);
        for c in u.coeffs() {
            g += &(&c.adjoint() * c);
        }
        let want = g.op_norm().sqrt();
        assert!((u.norm() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn underlying_norm_cases() {
        let col = Arc::new(OperatorSpace::column(3).unwrap());
        let mut rng = seeded_rng(5);
        let e = unit_vector(&mut rng, 3);
        let x1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!((underlying_norm(&col, &x1).unwrap() - 1.0).abs() <= 1e-14);
        let x: Vec<C64> = crate::random::gaussian_vector(&mut rng, 3);
        let base = underlying_norm(&col, &x).unwrap();
        let doubled: Vec<C64> = x.iter().map(|z| z * 2.0).collect();
        assert!((underlying_norm(&col, &doubled).unwrap() - 2.0 * base).abs() <= 1e-12 * base);
        let p = rank_one(&e, &e).unwrap();
        let via = underlying_norm_via_projection(&col, &x, &p).unwrap();
        assert!((via - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn module_action_identity_and_isometry() {
        let space = generic(7);
        let mut rng = seeded_rng(8);
        let u = AmplifiedElement::random(&mut rng, space, 2).unwrap();
        let i2 = CMatrix::identity(2);
        assert_eq!(module_action(&i2, &u, &i2).unwrap(), u);
        let s = &make_corner_isometries(2, 2)[1];
        let moved = transport(s, &u, &s.adjoint()).unwrap();
        assert!((moved.norm() - u.norm()).abs() <= 1e-12 * u.norm());
        assert!(module_action(&CMatrix::identity(3), &u, &i2).is_err());
    }

    #[test]
    fn corner_embedding() {
        let space = generic(9);
        let mut rng = seeded_rng(10);
        let u = AmplifiedElement::random(&mut rng, space, 2).unwrap();
        assert_eq!(corner_embed(&u, 2).unwrap(), u);
        let big = corner_embed(&u, 5).unwrap();
        assert!((big.norm() - u.norm()).abs() <= 1e-12 * u.norm());
        let twice = corner_embed(&corner_embed(&u, 3).unwrap(), 5).unwrap();
        assert_eq!(twice, big);
        assert!(corner_embed(&u, 1).is_err());
    }

    #[test]
    fn json_inlines_space() {
        let space = generic(11);
        let mut rng = seeded_rng(12);
        let u = AmplifiedElement::random(&mut rng, space, 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&u).unwrap();
        assert_eq!(v["level"], 2);
        assert_eq!(v["space"]["kind"], "generic");
        let back: AmplifiedElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, u);
    }
}
