//! Lower estimates of the strong and weak completely bounded norms.

use serde::{Deserialize, Serialize};

use super::amplify::{strong_amplify, weak_amplify};
use super::bioperator::Bioperator;
use crate::error::{Error, Result};
use crate::matrix_core::{CMatrix, DiamondContext};
use crate::optimize::{maximize, Budget};
use crate::quantum_space::{corner_embed, AmplifiedElement};
use crate::random::{gaussian_matrix, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplification {
    Strong,
    Weak,
}

#[derive(Clone, Debug, Default)]
pub struct BiEstimateOptions {
    pub budget: Budget,
    pub seed: u64,
    pub parallel: bool,
    /// Starting pairs; lower-level pairs are corner-embedded.
    pub witnesses: Vec<(AmplifiedElement, AmplifiedElement)>,
}

/// A certified lower bound `‖R_·(u, v)‖/(‖u‖‖v‖)` with its unit witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub level: usize,
    pub value: f64,
    pub witness_u: AmplifiedElement,
    pub witness_v: AmplifiedElement,
    #[serde(skip)]
    pub candidates: usize,
}

/// `‖R_·(u, v)‖ / (‖u‖‖v‖)`, NaN for a zero argument.
pub fn amplification_ratio(
    r: &Bioperator,
    kind: Amplification,
    u: &AmplifiedElement,
    v: &AmplifiedElement,
    ctx: Option<&DiamondContext>,
) -> Result<f64> {
    let den = u.norm() * v.norm();
    let out = match kind {
        Amplification::Strong => strong_amplify(r, u, v)?,
        Amplification::Weak => {
            let owned;
            let ctx = match ctx {
                Some(c) => c,
                None => {
                    owned = DiamondContext::new(u.level())?;
                    &owned
                }
            };
            weak_amplify(r, u, v, ctx)?
        }
    };
    Ok(if den > 0.0 { out.norm() / den } else { f64::NAN })
}

fn estimate(
    r: &Bioperator,
    kind: Amplification,
    level: usize,
    opts: &BiEstimateOptions,
) -> Result<WitnessReport> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let ctx = DiamondContext::new(level)?;
    let (ne, nf) = (r.dom_e().dim(), r.dom_f().dim());
    let mut starts = Vec::with_capacity(opts.witnesses.len());
    for (u, v) in &opts.witnesses {
        let mut s = corner_embed(u, level)?.into_coeffs();
        s.extend(corner_embed(v, level)?.into_coeffs());
        starts.push(s);
    }
    let split = |x: &[CMatrix]| -> Result<(AmplifiedElement, AmplifiedElement)> {
        Ok((
            AmplifiedElement::new(r.dom_e().clone(), level, x[..ne].to_vec())?,
            AmplifiedElement::new(r.dom_f().clone(), level, x[ne..].to_vec())?,
        ))
    };
    let objective = |x: &[CMatrix]| match split(x) {
        Ok((u, v)) => amplification_ratio(r, kind, &u, &v, Some(&ctx)).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    let random_start =
        |rng: &mut Rng64| (0..ne + nf).map(|_| gaussian_matrix(rng, level, level)).collect();
    let out = maximize(&objective, &starts, &random_start, opts.budget, opts.seed, opts.parallel);
    let (u, v) = split(&out.state)?;
    let (nu, nv) = (u.norm(), v.norm());
    Ok(WitnessReport {
        level,
        value: out.value.max(0.0),
        witness_u: if nu > 0.0 { u.scale_real(1.0 / nu) } else { u },
        witness_v: if nv > 0.0 { v.scale_real(1.0 / nv) } else { v },
        candidates: out.evaluations,
    })
}

/// Lower estimate of `sup ‖R_s(u, v)‖` over unit `u, v` at level `m`.
pub fn estimate_scb(r: &Bioperator, level: usize, opts: &BiEstimateOptions) -> Result<WitnessReport> {
    estimate(r, Amplification::Strong, level, opts)
}

/// Lower estimate of `sup ‖R_w(u, v)‖` over unit `u, v` at level `m`.
pub fn estimate_wcb(r: &Bioperator, level: usize, opts: &BiEstimateOptions) -> Result<WitnessReport> {
    estimate(r, Amplification::Weak, level, opts)
}
