//! Linear maps between operator spaces and lower estimates of their
//! completely bounded norms.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::element::{corner_embed, AmplifiedElement};
use super::space::{OperatorSpace, SpaceKind};
use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{fmt_shape, vec_norm, CMatrix, C64, ONE, ZERO};
use crate::optimize::{maximize, Budget};
use crate::random::gaussian_matrix;

/// `φ: E → F` with `φ(x_j) = Σ_i matrix[i, j]·y_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    domain: Arc<OperatorSpace>,
    codomain: Arc<OperatorSpace>,
    matrix: CMatrix,
}

impl LinearMap {
    pub fn new(domain: Arc<OperatorSpace>, codomain: Arc<OperatorSpace>, matrix: CMatrix) -> Result<Self> {
        let want = (codomain.dim(), domain.dim());
        if matrix.shape() != want {
            return Err(mismatch("linear map", fmt_shape(want), fmt_shape(matrix.shape())));
        }
        Ok(LinearMap { domain, codomain, matrix })
    }

    pub fn identity(space: Arc<OperatorSpace>) -> Self {
        let n = space.dim();
        LinearMap { domain: space.clone(), codomain: space, matrix: CMatrix::identity(n) }
    }

    /// The map sending the `k`-th basis vector of `E` to that of `F`.
    pub fn formal_identity(domain: Arc<OperatorSpace>, codomain: Arc<OperatorSpace>) -> Result<Self> {
        if domain.dim() != codomain.dim() {
            return Err(mismatch("formal_identity", domain.dim(), codomain.dim()));
        }
        let n = domain.dim();
        Self::new(domain, codomain, CMatrix::identity(n))
    }

    /// Functional `E → C` with values `f[j]` on the basis.
    pub fn functional(domain: Arc<OperatorSpace>, f: &[C64]) -> Result<Self> {
        Self::new(domain, Arc::new(OperatorSpace::scalars()), CMatrix::row(f))
    }

    pub fn domain(&self) -> &Arc<OperatorSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<OperatorSpace> {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `φ_∞(u)`: `φ` applied to the basis slot.
    pub fn apply(&self, u: &AmplifiedElement) -> Result<AmplifiedElement> {
        if **u.space() != *self.domain {
            return Err(Error::Precondition("element is not in the domain of the map".into()));
        }
        let coeffs = self.apply_coeffs(u.coeffs(), u.level());
        AmplifiedElement::new(self.codomain.clone(), u.level(), coeffs)
    }

    fn apply_coeffs(&self, coeffs: &[CMatrix], level: usize) -> Vec<CMatrix> {
        (0..self.codomain.dim())
            .map(|i| {
                let mut out = CMatrix::zeros(level, level);
                for (j, c) in coeffs.iter().enumerate() {
                    let z = self.matrix[(i, j)];
                    if z != ZERO {
                        out.add_block(0, 0, c, z);
                    }
                }
                out
            })
            .collect()
    }

    /// `‖φ_∞(u)‖ / ‖u‖` for raw coefficients at `level`.
    fn ratio(&self, coeffs: &[CMatrix], level: usize) -> f64 {
        let Ok(u) = AmplifiedElement::new(self.domain.clone(), level, coeffs.to_vec()) else {
            return f64::NAN;
        };
        let den = u.norm();
        if den <= 0.0 {
            return f64::NAN;
        }
        let Ok(v) = AmplifiedElement::new(self.codomain.clone(), level, self.apply_coeffs(coeffs, level)) else {
            return f64::NAN;
        };
        v.norm() / den
    }
}

#[derive(Clone, Debug, Default)]
pub struct CbOptions {
    pub budget: Budget,
    pub seed: u64,
    pub parallel: bool,
    /// Extra starting points; lower-level witnesses are corner-embedded.
    pub witnesses: Vec<AmplifiedElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbEstimate {
    /// `‖φ_∞(w)‖/‖w‖` for the reported witness `w`; a certified lower bound.
    pub value: f64,
    /// Unit-norm witness.
    pub witness: AmplifiedElement,
    pub level: usize,
    pub candidates: usize,
}

/// Lower estimate of `sup{‖φ_∞(u)‖ : u ∈ K_m E, ‖u‖ ≤ 1}` at level `m`.
pub fn cb_norm_estimate(phi: &LinearMap, level: usize, opts: &CbOptions) -> Result<CbEstimate> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let mut starts = Vec::with_capacity(opts.witnesses.len());
    for w in &opts.witnesses {
        if **w.space() != *phi.domain {
            return Err(Error::Precondition("witness is not in the domain of the map".into()));
        }
        starts.push(corner_embed(w, level)?.into_coeffs());
    }
    let dim = phi.domain.dim();
    let objective = |x: &[CMatrix]| phi.ratio(x, level);
    let random_start =
        |rng: &mut crate::random::Rng64| (0..dim).map(|_| gaussian_matrix(rng, level, level)).collect();
    let out = maximize(&objective, &starts, &random_start, opts.budget, opts.seed, opts.parallel);
    let w = AmplifiedElement::new(phi.domain.clone(), level, out.state)?;
    let n = w.norm();
    let witness = if n > 0.0 { w.scale_real(1.0 / n) } else { w };
    Ok(CbEstimate { value: out.value.max(0.0), witness, level, candidates: out.evaluations })
}

/// Estimates at levels `1..=max_level`, each seeded with the previous best
/// witness so that the sequence is nondecreasing.
pub fn cb_norm_profile(phi: &LinearMap, max_level: usize, opts: &CbOptions) -> Result<Vec<CbEstimate>> {
    let mut out: Vec<CbEstimate> = Vec::with_capacity(max_level);
    for level in 1..=max_level {
        let mut o = opts.clone();
        o.witnesses.retain(|w| w.level() <= level);
        if let Some(prev) = out.last() {
            o.witnesses.push(prev.witness.clone());
        }
        o.seed = crate::random::derive_seed(opts.seed, level as u64);
        let est = cb_norm_estimate(phi, level, &o)?;
        out.push(est);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalNorm {
    pub value: f64,
    /// `false` when `value` is only an upper bound.
    pub exact: bool,
}

/// Norm of the functional with basis values `f`.
///
/// Exact on Hilbertian spaces (Euclidean norm of `f`) and on full matrix
/// spaces with the matrix-unit basis (trace norm). Otherwise returns the
/// trace norm of the minimal Frobenius-norm extension to the ambient matrix
/// space, an upper bound.
pub fn functional_norm(space: &OperatorSpace, f: &[C64]) -> Result<FunctionalNorm> {
    if f.len() != space.dim() {
        return Err(mismatch("functional_norm", space.dim(), f.len()));
    }
    if space.is_hilbertian() {
        return Ok(FunctionalNorm { value: vec_norm(f), exact: true });
    }
    let (k, h) = (space.out_dim(), space.in_dim());
    if has_matrix_unit_basis(space) {
        let g = CMatrix::from_fn(k, h, |i, j| f[i * h + j]);
        return Ok(FunctionalNorm { value: g.trace_norm(), exact: true });
    }
    // Rows of `a` are the vectorized basis; solve a·g = f with minimal ‖g‖₂.
    let n = space.dim();
    let a = DMatrix::from_fn(n, k * h, |i, p| space.basis()[i].as_slice()[p]);
    let gram = &a * a.adjoint();
    let rhs = DVector::from_column_slice(f);
    let y = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Malformed("singular basis Gram matrix".into()))?;
    let g = a.adjoint() * y;
    let gm = CMatrix::from_fn(k, h, |i, j| g[i * h + j]);
    Ok(FunctionalNorm { value: gm.trace_norm(), exact: false })
}

fn has_matrix_unit_basis(space: &OperatorSpace) -> bool {
    if !matches!(space.kind(), SpaceKind::Generic | SpaceKind::FiniteRank) {
        return false;
    }
    let (k, h) = (space.out_dim(), space.in_dim());
    space.dim() == k * h
        && space.basis().iter().enumerate().all(|(idx, b)| {
            b.as_slice().iter().enumerate().all(|(p, &z)| z == if p == idx { ONE } else { ZERO })
        })
}
