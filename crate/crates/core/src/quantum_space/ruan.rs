//! Checkers for the bimodule norm axioms and the orthogonal-support bound.

use serde::{Deserialize, Serialize};

use super::element::{module_action, AmplifiedElement};
use crate::error::{mismatch, Error, Result};
use crate::matrix_core::CMatrix;

/// Slack allowed on exact inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-12;
/// Relative tolerance for exact equalities.
pub const EQUALITY_TOL: f64 = 1e-10;

const SUPPORT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs + INEQUALITY_SLACK * rhs.max(1.0);
        InequalityReport { lhs, rhs, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiiReport {
    pub norm_sum: f64,
    pub norm_u: f64,
    pub norm_v: f64,
    pub deviation: f64,
    pub holds: bool,
}

/// `‖a·u·b‖ ≤ ‖a‖‖u‖‖b‖`.
pub fn check_ruan_ri(a: &CMatrix, u: &AmplifiedElement, b: &CMatrix) -> Result<InequalityReport> {
    let lhs = module_action(a, u, b)?.norm();
    Ok(InequalityReport::new(lhs, a.op_norm() * u.norm() * b.op_norm()))
}

/// `‖u + v‖ = max(‖u‖, ‖v‖)` when `u` lives in the corner `P·P` and `v` in
/// the corner `Q·Q` with `PQ = 0`.
pub fn check_ruan_rii(
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    p: &CMatrix,
    q: &CMatrix,
) -> Result<RiiReport> {
    if u.level() != v.level() {
        return Err(mismatch("check_ruan_rii", u.level(), v.level()));
    }
    for (name, proj) in [("P", p), ("Q", q)] {
        if proj.shape() != (u.level(), u.level()) || !proj.is_projection(SUPPORT_TOL) {
            return Err(Error::Precondition(format!("{name} is not a projection at level {}", u.level())));
        }
    }
    if (p * q).max_abs() > SUPPORT_TOL {
        return Err(Error::Precondition("PQ != 0".into()));
    }
    if module_action(p, u, p)?.max_abs_diff(u) > SUPPORT_TOL * u_scale(u) {
        return Err(Error::Precondition("PuP != u".into()));
    }
    if module_action(q, v, q)?.max_abs_diff(v) > SUPPORT_TOL * u_scale(v) {
        return Err(Error::Precondition("QvQ != v".into()));
    }
    let norm_sum = u.try_add(v)?.norm();
    let (norm_u, norm_v) = (u.norm(), v.norm());
    let target = norm_u.max(norm_v);
    let deviation = (norm_sum - target).abs();
    Ok(RiiReport {
        norm_sum,
        norm_u,
        norm_v,
        deviation,
        holds: deviation <= EQUALITY_TOL * target.max(f64::MIN_POSITIVE),
    })
}

fn u_scale(u: &AmplifiedElement) -> f64 {
    u.coeffs().iter().map(CMatrix::max_abs).fold(1.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSide {
    Left,
    Right,
}

/// `‖Σ u_k‖ ≤ (Σ ‖u_k‖²)^{1/2}` for terms with pairwise orthogonal left (or
/// right) supports `P_k`.
pub fn check_orthogonal_sum_bound(
    terms: &[AmplifiedElement],
    supports: &[CMatrix],
    side: SupportSide,
) -> Result<InequalityReport> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Precondition("need at least one term".into()))?;
    if supports.len() != terms.len() {
        return Err(mismatch("check_orthogonal_sum_bound", terms.len(), supports.len()));
    }
    let m = first.level();
    let id = CMatrix::identity(m);
    for (k, (u, p)) in terms.iter().zip(supports).enumerate() {
        if p.shape() != (m, m) || !p.is_projection(SUPPORT_TOL) {
            return Err(Error::Precondition(format!("support {k} is not a projection")));
        }
        let cut = match side {
            SupportSide::Left => module_action(p, u, &id)?,
            SupportSide::Right => module_action(&id, u, p)?,
        };
        if cut.max_abs_diff(u) > SUPPORT_TOL * u_scale(u) {
            return Err(Error::Precondition(format!("term {k} is not supported by its projection")));
        }
        for (l, q) in supports.iter().enumerate().skip(k + 1) {
            if (p * q).max_abs() > SUPPORT_TOL {
                return Err(Error::Precondition(format!("supports {k} and {l} are not orthogonal")));
            }
        }
    }
    let mut sum = first.clone();
    for u in &terms[1..] {
        sum = sum.try_add(u)?;
    }
    let bound = terms.iter().map(|u| u.norm().powi(2)).sum::<f64>().sqrt();
    Ok(InequalityReport::new(sum.norm(), bound))
}
