//! Certified brackets `lower ≤ ‖U‖ ≤ upper` for the Haagerup and four-named
//! tensor norms.
//!
//! Every upper bound is the bound of a representation that reassembles to
//! `U`; every lower bound is either the spatial norm or a pairing with a
//! completely contractive multiplication, both of which sit below the
//! Haagerup norm and hence below the four-named norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pair::{spatial_norm, TensorPair};
use super::representation::{
    as_effros_terms, as_rigged_terms, factorized_rigged_representation, merge_effros, merge_rigged,
    EffrosTerm, RiggedTerm, TensorRepresentation,
};
use crate::error::{Error, Result};
use crate::matrix_core::{CMatrix, C64};
use crate::optimize::{maximize, nelder_mead, Budget};
use crate::quantum_space::AmplifiedElement;
use crate::random::{derived_rng, gaussian_matrix, Rng64};
use rand_distr::{Distribution, Normal};

/// A bracket counts as resolved when `(upper − lower)/upper` is at most this.
pub const RESOLVED_GAP: f64 = 1e-6;
/// Relative amount by which a lower bound may exceed an upper bound before
/// the pair is reported as inconsistent rather than clamped.
pub const CONSISTENCY_SLACK: f64 = 1e-9;
/// Full Hermitian gauges are searched up to this many real parameters;
/// beyond it only diagonal gauges are tried.
const FULL_GAUGE_PARAMS: usize = 36;
/// Rigged gauges are searched up to this many real parameters.
const RIGGED_GAUGE_PARAMS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerMethod {
    Spatial,
    /// `‖Σ C_ij ⊗ x_i W y_j‖/‖W‖` for a contraction `W`, which no single
    /// Effros representation can beat.
    FunctionalPairing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperMethod {
    RawRepresentation,
    MergedGauged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: LowerMethod,
    pub upper_method: UpperMethod,
    pub witness: TensorRepresentation,
    /// `upper − lower`.
    pub gap: f64,
}

impl NormBracket {
    /// `(upper − lower)/upper`, zero for a zero element.
    pub fn relative_gap(&self) -> f64 {
        if self.upper > 0.0 {
            self.gap / self.upper
        } else {
            0.0
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.relative_gap() <= RESOLVED_GAP
    }

    pub fn report(&self, case: impl Into<String>, seed: u64) -> BracketReport {
        BracketReport {
            case: case.into(),
            lower: self.lower,
            upper: self.upper,
            gap: self.gap,
            lower_method: self.lower_method,
            upper_method: self.upper_method,
            resolved: self.is_resolved(),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub case: String,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub lower_method: LowerMethod,
    pub upper_method: UpperMethod,
    pub resolved: bool,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketOptions {
    /// Restarts and iterations of the gauge and pairing searches.
    pub budget: Budget,
    pub seed: u64,
    pub parallel: bool,
    /// Whether to run the gauge search at all.
    pub gauge: bool,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { budget: Budget { restarts: 3, iterations: 150 }, seed: 0, parallel: false, gauge: true }
    }
}

struct Candidate {
    bound: f64,
    rep: TensorRepresentation,
    method: UpperMethod,
}

fn consider(best: &mut Option<Candidate>, bound: f64, rep: TensorRepresentation, method: UpperMethod) {
    if bound.is_finite() && best.as_ref().is_none_or(|b| bound < b.bound) {
        *best = Some(Candidate { bound, rep, method });
    }
}

fn check_target(pair: &TensorPair, target: &AmplifiedElement) -> Result<()> {
    if **target.space() != **pair.product() {
        return Err(Error::Precondition("element is not in E ⊗ F".into()));
    }
    Ok(())
}

fn check_reps(pair: &TensorPair, target: &AmplifiedElement, reps: &[TensorRepresentation]) -> Result<()> {
    for (k, rep) in reps.iter().enumerate() {
        let err = rep.reconstruction_error(pair, target)?;
        if err > super::representation::RECONSTRUCTION_TOL {
            return Err(Error::Precondition(format!(
                "representation {k} misses the element by {err:e} (relative)"
            )));
        }
    }
    Ok(())
}

fn finish(lower: (f64, LowerMethod), best: Candidate) -> Result<NormBracket> {
    let (mut lower, lower_method) = lower;
    let upper = best.bound;
    if lower > upper {
        if lower - upper <= CONSISTENCY_SLACK * upper.max(f64::MIN_POSITIVE) {
            lower = upper;
        } else {
            return Err(Error::InconsistentBracket { lower, upper });
        }
    }
    Ok(NormBracket {
        lower,
        upper,
        lower_method,
        upper_method: best.method,
        witness: best.rep,
        gap: upper - lower,
    })
}

fn resolved(lower: f64, upper: f64) -> bool {
    upper <= 0.0 || (upper - lower) / upper <= RESOLVED_GAP
}

/// Brackets the Haagerup norm of `U` using the given representations, each
/// of which must reassemble to `U` corner-embedded at its level.
pub fn haagerup_bracket(
    pair: &TensorPair,
    target: &AmplifiedElement,
    reps: &[TensorRepresentation],
    opts: &BracketOptions,
) -> Result<NormBracket> {
    check_target(pair, target)?;
    if reps.is_empty() {
        return Err(Error::NoRepresentation("the Haagerup bracket needs a representation".into()));
    }
    check_reps(pair, target, reps)?;
    let mut best = None;
    let mut best_single: Option<EffrosTerm> = None;
    for rep in reps {
        let terms = as_effros_terms(rep)?;
        let list = TensorRepresentation::EffrosList(terms.clone());
        consider(&mut best, list.bound(), list, UpperMethod::RawRepresentation);
        let merged = merge_effros(&terms)?;
        let bound = merged.bound();
        if best_single.as_ref().is_none_or(|b| bound < b.bound()) {
            best_single = Some(merged.clone());
        }
        let single = TensorRepresentation::SingleEffros(merged);
        if single.reconstructs(pair, target) {
            consider(&mut best, bound, single, UpperMethod::MergedGauged);
        }
    }
    let current = best.as_ref().map_or(f64::INFINITY, |b| b.bound);
    let lower = lower_unless_resolved(pair, target, current, opts)?;
    if opts.gauge && !resolved(lower.0, current) {
        if let Some(term) = best_single {
            let gauged = gauge_effros(&term, opts)?;
            let rep = TensorRepresentation::SingleEffros(gauged);
            if rep.reconstructs(pair, target) {
                consider(&mut best, rep.bound(), rep, UpperMethod::MergedGauged);
            }
        }
    }
    let best = best.ok_or_else(|| Error::NoRepresentation("no usable representation".into()))?;
    finish(lower, best)
}

/// Brackets the four-named norm of `U`. Rigged representations are used as
/// given and merged; Effros representations are converted; the
/// factorization of every coefficient of `U` is always added, so `reps` may
/// be empty.
pub fn fournamed_bracket(
    pair: &TensorPair,
    target: &AmplifiedElement,
    reps: &[TensorRepresentation],
    opts: &BracketOptions,
) -> Result<NormBracket> {
    check_target(pair, target)?;
    check_reps(pair, target, reps)?;
    let mut all: Vec<TensorRepresentation> = reps.to_vec();
    all.push(factorized_rigged_representation(pair, target)?);
    let mut best = None;
    let mut best_single: Option<RiggedTerm> = None;
    for rep in &all {
        let terms = as_rigged_terms(rep)?;
        let list = TensorRepresentation::RiggedList(terms.clone());
        if list.reconstructs(pair, target) {
            consider(&mut best, list.bound(), list, UpperMethod::RawRepresentation);
        }
        let merged = merge_rigged(&terms)?;
        let bound = merged.bound();
        let single = TensorRepresentation::SingleRigged(merged.clone());
        if single.reconstructs(pair, target) {
            if best_single.as_ref().is_none_or(|b| bound < b.bound()) {
                best_single = Some(merged);
            }
            consider(&mut best, bound, single, UpperMethod::MergedGauged);
        }
    }
    let current = best.as_ref().map_or(f64::INFINITY, |b| b.bound);
    let lower = lower_unless_resolved(pair, target, current, opts)?;
    if opts.gauge && !resolved(lower.0, current) {
        if let Some(term) = best_single.filter(|t| 4 * t.inner_level() <= RIGGED_GAUGE_PARAMS) {
            let rep = TensorRepresentation::SingleRigged(gauge_rigged(&term, opts));
            if rep.reconstructs(pair, target) {
                consider(&mut best, rep.bound(), rep, UpperMethod::MergedGauged);
            }
        }
    }
    let best = best.ok_or_else(|| Error::NoRepresentation("no usable representation".into()))?;
    finish(lower, best)
}

/// Both brackets of one element, computed so that the chain
/// `spatial ≤ h-upper ≤ 4-upper` holds: the best four-named representation
/// is converted and offered to the Haagerup bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainBrackets {
    pub spatial: f64,
    pub haagerup: NormBracket,
    pub fournamed: NormBracket,
}

pub fn chain_brackets(
    pair: &TensorPair,
    target: &AmplifiedElement,
    reps: &[TensorRepresentation],
    opts: &BracketOptions,
) -> Result<ChainBrackets> {
    let fournamed = fournamed_bracket(pair, target, reps, opts)?;
    let mut h_reps = reps.to_vec();
    h_reps.push(super::representation::elementary_representation(pair, target)?);
    h_reps.push(fournamed.witness.clone());
    let haagerup = haagerup_bracket(pair, target, &h_reps, opts)?;
    Ok(ChainBrackets { spatial: spatial_norm(target)?, haagerup, fournamed })
}

/// The spatial norm when it already meets `upper`, the full lower bound
/// otherwise.
fn lower_unless_resolved(
    pair: &TensorPair,
    target: &AmplifiedElement,
    upper: f64,
    opts: &BracketOptions,
) -> Result<(f64, LowerMethod)> {
    let spatial = spatial_norm(target)?;
    if resolved(spatial, upper) {
        Ok((spatial, LowerMethod::Spatial))
    } else {
        haagerup_lower_bound(pair, target, opts)
    }
}

/// `max(‖U‖_spatial, sup_W ‖Σ C_ij ⊗ x_i W y_j‖/‖W‖)`.
///
/// For `U = u ⊙ v` the pairing equals `‖u·(I ⊗ W)·v‖` on assemblies, so it
/// is at most `‖u‖‖v‖‖W‖` and bounds the Haagerup norm from below.
pub fn haagerup_lower_bound(
    pair: &TensorPair,
    target: &AmplifiedElement,
    opts: &BracketOptions,
) -> Result<(f64, LowerMethod)> {
    check_target(pair, target)?;
    let spatial = spatial_norm(target)?;
    let (e, f) = (pair.e(), pair.f());
    let (rows, cols) = (e.in_dim(), f.out_dim());
    if spatial == 0.0 {
        return Ok((0.0, LowerMethod::Spatial));
    }
    let nf = f.dim();
    let terms: Vec<(usize, usize, &CMatrix)> = target
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, c)| (idx / nf, idx % nf, c))
        .collect();
    let objective = |x: &[CMatrix]| {
        let w = &x[0];
        let nw = w.op_norm();
        if nw == 0.0 {
            return f64::NAN;
        }
        let mut acc: Option<CMatrix> = None;
        for &(i, j, c) in &terms {
            let block = &(&e.basis()[i] * w) * &f.basis()[j];
            let t = c.kron(&block);
            acc = Some(match acc {
                Some(a) => &a + &t,
                None => t,
            });
        }
        acc.map_or(0.0, |a| a.op_norm()) / nw
    };
    let start = vec![CMatrix::from_fn(rows, cols, |i, j| C64::new(f64::from(u8::from(i == j)), 0.0))];
    let random_start = |rng: &mut Rng64| vec![gaussian_matrix(rng, rows, cols)];
    let budget = Budget { restarts: opts.budget.restarts, iterations: opts.budget.iterations };
    let out = maximize(&objective, &[start], &random_start, budget, opts.seed, opts.parallel);
    Ok(if out.value > spatial {
        (out.value, LowerMethod::FunctionalPairing)
    } else {
        (spatial, LowerMethod::Spatial)
    })
}

/// Hermitian matrix from real parameters: the diagonal first, then the real
/// and imaginary parts of each upper entry when `full`.
fn hermitian_from(x: &[f64], l: usize, full: bool) -> CMatrix {
    let mut h = CMatrix::zeros(l, l);
    for i in 0..l {
        h[(i, i)] = C64::new(x[i], 0.0);
    }
    if full {
        let mut k = l;
        for i in 0..l {
            for j in i + 1..l {
                let z = C64::new(x[k], x[k + 1]);
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
                k += 2;
            }
        }
    }
    h
}

/// `(e^H, e^{-H})` for Hermitian `H`.
fn exp_pair(h: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (vals, vecs) = h.hermitian_eigen()?;
    let scale = |s: f64| {
        let d: Vec<C64> = vals.iter().map(|&l| C64::new((s * l).exp(), 0.0)).collect();
        &(&vecs * &CMatrix::diagonal(&d)) * &vecs.adjoint()
    };
    Ok((scale(1.0), scale(-1.0)))
}

/// Best of several Nelder–Mead runs; run 0 starts at the origin.
fn search<F: Fn(&[f64]) -> f64 + Sync>(f: &F, params: usize, opts: &BracketOptions) -> Vec<f64> {
    let restarts = opts.budget.restarts.max(1);
    let max_evals = opts.budget.iterations.max(1) * (params + 1).min(40);
    let run = |r: usize| {
        let x0: Vec<f64> = if r == 0 {
            vec![0.0; params]
        } else {
            let mut rng = derived_rng(opts.seed, r as u64);
            let n = Normal::new(0.0, 0.3).expect("valid normal");
            (0..params).map(|_| n.sample(&mut rng)).collect()
        };
        let first = nelder_mead(f, &x0, 0.3, max_evals, 1e-12);
        // a second pass from the end point refreshes a collapsed simplex
        let second = nelder_mead(f, &first.x, 0.05, max_evals / 2 + 1, 1e-13);
        if second.value <= first.value {
            second
        } else {
            first
        }
    };
    let results: Vec<_> = if opts.parallel {
        (0..restarts).into_par_iter().map(run).collect()
    } else {
        (0..restarts).map(run).collect()
    };
    let mut best = 0;
    for (r, m) in results.iter().enumerate() {
        if m.value < results[best].value {
            best = r;
        }
    }
    results.into_iter().nth(best).map(|m| m.x).unwrap_or_default()
}

fn right_multiply(u: &AmplifiedElement, g: &CMatrix) -> AmplifiedElement {
    let coeffs = u.coeffs().iter().map(|c| c * g).collect();
    u.with_coeffs(coeffs).expect("same shape")
}

fn left_multiply(g: &CMatrix, v: &AmplifiedElement) -> AmplifiedElement {
    let coeffs = v.coeffs().iter().map(|c| g * c).collect();
    v.with_coeffs(coeffs).expect("same shape")
}

/// Minimizes `‖u·g‖‖g⁻¹·v‖` over `g = e^H`, `H` Hermitian (diagonal when
/// the level is large), and returns the rebalanced product `(u g) ⊙ (g⁻¹ v)`.
pub fn gauge_effros(term: &EffrosTerm, opts: &BracketOptions) -> Result<EffrosTerm> {
    let l = term.level();
    let full = l * l <= FULL_GAUGE_PARAMS;
    let params = if full { l * l } else { l };
    let cost = |x: &[f64]| -> f64 {
        let h = hermitian_from(x, l, full);
        match exp_pair(&h) {
            Ok((g, gi)) => right_multiply(&term.u, &g).norm() * left_multiply(&gi, &term.v).norm(),
            Err(_) => f64::NAN,
        }
    };
    let x = search(&cost, params, opts);
    let base = term.bound();
    if x.is_empty() || cost(&x) >= base {
        return Ok(term.clone());
    }
    let (g, gi) = exp_pair(&hermitian_from(&x, l, full))?;
    let u = right_multiply(&term.u, &g);
    let v = left_multiply(&gi, &term.v);
    let (nu, nv) = (u.norm(), v.norm());
    let s = if nu > 0.0 && nv > 0.0 { (nv / nu).sqrt() } else { 1.0 };
    EffrosTerm::new(u.scale_real(s), v.scale_real(1.0 / s))
}

fn scale_columns(a: &CMatrix, d: &[f64]) -> CMatrix {
    CMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * d[j])
}

fn scale_rows(b: &CMatrix, d: &[f64]) -> CMatrix {
    CMatrix::from_fn(b.rows(), b.cols(), |i, j| b[(i, j)] * d[i])
}

fn diag(x: &[f64]) -> CMatrix {
    let d: Vec<C64> = x.iter().map(|&t| C64::new(t.exp(), 0.0)).collect();
    CMatrix::diagonal(&d)
}

/// Applies positive diagonal gauges through
/// `a(u ◇ v)b = a(g_L⁻¹ ◇ h_L⁻¹)((g_L u g_R) ◇ (h_L v h_R))(g_R⁻¹ ◇ h_R⁻¹)b`.
fn apply_rigged_gauge(t: &RiggedTerm, x: &[f64]) -> RiggedTerm {
    let m = t.inner_level();
    let (gl, rest) = x.split_at(m);
    let (gr, rest) = rest.split_at(m);
    let (hl, hr) = rest.split_at(m);
    let left: Vec<f64> = (0..m * m).map(|k| (-gl[k % m] - hl[k / m]).exp()).collect();
    let right: Vec<f64> = (0..m * m).map(|k| (-gr[k % m] - hr[k / m]).exp()).collect();
    let u = t.u.with_coeffs(t.u.coeffs().iter().map(|c| &(&diag(gl) * c) * &diag(gr)).collect());
    let v = t.v.with_coeffs(t.v.coeffs().iter().map(|c| &(&diag(hl) * c) * &diag(hr)).collect());
    RiggedTerm {
        a: scale_columns(&t.a, &left),
        u: u.expect("same shape"),
        v: v.expect("same shape"),
        b: scale_rows(&t.b, &right),
    }
}

/// Minimizes the rigged bound over positive diagonal gauges of the four
/// sides of `u` and `v`.
pub fn gauge_rigged(term: &RiggedTerm, opts: &BracketOptions) -> RiggedTerm {
    let m = term.inner_level();
    let cost = |x: &[f64]| apply_rigged_gauge(term, x).bound();
    let x = search(&cost, 4 * m, opts);
    if x.is_empty() || cost(&x) >= term.bound() {
        return term.clone();
    }
    apply_rigged_gauge(term, &x)
}
