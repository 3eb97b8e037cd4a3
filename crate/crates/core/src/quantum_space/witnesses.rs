//! The witness elements `ω = Σ q_k* e_k` and `ϖ = Σ q_k e_k`.

use std::sync::Arc;

use super::element::AmplifiedElement;
use super::space::OperatorSpace;
use crate::error::{Error, Result};
use crate::matrix_core::{make_block_partial_isometries, make_partial_isometries, CMatrix};

fn check_hilbertian(space: &OperatorSpace, n: usize) -> Result<()> {
    if !space.is_hilbertian() {
        return Err(Error::Precondition(format!(
            "witnesses need a column or row space, got {}",
            space.kind().as_str()
        )));
    }
    if space.dim() < n {
        return Err(Error::LevelTooSmall { op: "witness", required: n, found: space.dim() });
    }
    Ok(())
}

/// `Σ_k a_k e_k` with the remaining basis coefficients zero.
fn spread(space: Arc<OperatorSpace>, level: usize, leading: Vec<CMatrix>) -> Result<AmplifiedElement> {
    let mut coeffs = leading;
    coeffs.resize(space.dim(), CMatrix::zeros(level, level));
    AmplifiedElement::new(space, level, coeffs)
}

/// `ω = Σ_{k<n} q_k*⊗e_k` at level `m` with rank-one partial isometries.
pub fn make_omega(n: usize, m: usize, space: Arc<OperatorSpace>) -> Result<AmplifiedElement> {
    check_hilbertian(&space, n)?;
    let pi = make_partial_isometries(n, m)?;
    spread(space, m, pi.q.iter().map(CMatrix::adjoint).collect())
}

/// `ϖ = Σ_{k<n} q_k⊗e_k` at level `m` with rank-one partial isometries.
pub fn make_varpi(n: usize, m: usize, space: Arc<OperatorSpace>) -> Result<AmplifiedElement> {
    check_hilbertian(&space, n)?;
    let pi = make_partial_isometries(n, m)?;
    spread(space, m, pi.q)
}

/// `ω` built from block partial isometries `q_k = S_k S_1*` at level `n·block`.
pub fn make_block_omega(n: usize, block: usize, space: Arc<OperatorSpace>) -> Result<AmplifiedElement> {
    check_hilbertian(&space, n)?;
    let pi = make_block_partial_isometries(n, block);
    spread(space, n * block, pi.q.iter().map(CMatrix::adjoint).collect())
}

/// `ϖ` built from block partial isometries `q_k = S_k S_1*` at level `n·block`.
pub fn make_block_varpi(n: usize, block: usize, space: Arc<OperatorSpace>) -> Result<AmplifiedElement> {
    check_hilbertian(&space, n)?;
    let pi = make_block_partial_isometries(n, block);
    spread(space, n * block, pi.q)
}
