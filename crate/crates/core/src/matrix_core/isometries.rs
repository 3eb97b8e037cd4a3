//! Rank-one operators and the families of isometries used to glue
//! amplified elements together.

use super::cmatrix::{CMatrix, C64, ONE};
use super::diamond::diamond_rect;
use crate::error::{mismatch, Error, Result};

/// `ξ∘η`, the rank-one operator `ζ ↦ ⟨ζ, η⟩ξ`.
pub fn rank_one(xi: &[C64], eta: &[C64]) -> Result<CMatrix> {
    if xi.len() != eta.len() {
        return Err(mismatch("rank_one", xi.len(), eta.len()));
    }
    if xi.is_empty() {
        return Err(Error::Precondition("rank_one of empty vectors".into()));
    }
    let n = xi.len();
    Ok(CMatrix::from_fn(n, n, |i, j| xi[i] * eta[j].conj()))
}

/// Matrix unit `e_i∘e_j` in `M_m`.
pub fn matrix_unit(m: usize, i: usize, j: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m, m);
    out[(i, j)] = ONE;
    out
}

/// Partial isometries with a common rank-one initial projection.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialIsometries {
    /// `q_k = e_k∘e_0`.
    pub q: Vec<CMatrix>,
    /// `P = e_0∘e_0`.
    pub p: CMatrix,
}

/// `q_k = e_k∘e_0` for `k < n` in `M_m`, so that `q_k*q_l = δ_kl·P` with
/// `P = e_0∘e_0`, and the final projections `e_k∘e_k` are pairwise orthogonal.
pub fn make_partial_isometries(n: usize, m: usize) -> Result<PartialIsometries> {
    if n == 0 {
        return Err(Error::Precondition("need at least one partial isometry".into()));
    }
    if m < n {
        return Err(Error::LevelTooSmall { op: "make_partial_isometries", required: n, found: m });
    }
    let q = (0..n).map(|k| matrix_unit(m, k, 0)).collect();
    Ok(PartialIsometries { q, p: matrix_unit(m, 0, 0) })
}

/// `S_1, …, S_n` of size `(n·m)×m`, `S_k` embedding `C^m` as the `k`-th block.
pub fn make_corner_isometries(n: usize, m: usize) -> Vec<CMatrix> {
    (0..n)
        .map(|k| {
            let mut s = CMatrix::zeros(n * m, m);
            for i in 0..m {
                s[(k * m + i, i)] = ONE;
            }
            s
        })
        .collect()
}

/// Block partial isometries `q_k = S_k S_1*` in `M_{n·m}` with initial
/// projection `P = S_1 S_1*` of rank `m`.
pub fn make_block_partial_isometries(n: usize, m: usize) -> PartialIsometries {
    let s = make_corner_isometries(n, m);
    let q: Vec<CMatrix> = s.iter().map(|sk| sk * &s[0].adjoint()).collect();
    let p = q[0].clone();
    PartialIsometries { q, p }
}

/// Isometry `S: C^m → C^{m·n}` with `u ◇ e_k e_k* = S·u·S*` for `u ∈ M_m`,
/// where `e_k` is the `k`-th standard vector of `C^n`.
pub fn right_slot_isometry(m: usize, n: usize, k: usize) -> CMatrix {
    diamond_rect(&CMatrix::identity(m), &CMatrix::basis_column(n, k))
}

/// Isometry `S: C^m → C^{n·m}` with `e_k e_k* ◇ u = S·u·S*` for `u ∈ M_m`.
pub fn left_slot_isometry(m: usize, n: usize, k: usize) -> CMatrix {
    diamond_rect(&CMatrix::basis_column(n, k), &CMatrix::identity(m))
}
