//! The experiment suites.
//!
//! Every section draws from a seed derived from the master seed and the
//! section name, so its rows are the same whether it runs alone, inside
//! `all`, serially or in parallel.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{ExperimentConfig, Suite};
use super::report::{CaseRow, Report, Section, Worst};
use crate::bioperators::{
    amplification_ratio, bifunctional_matrix, canonical_tensor_factor_check, compose_through_operator,
    compression_identity_check, diamond_act_right, estimate_scb, estimate_wcb, opposite_identity_check,
    strong_amplify, Amplification, BiEstimateOptions, Bioperator, WitnessReport,
};
use crate::error::Result;
use crate::matrix_core::{diamond, diamond_square_factor, inner, rank_one, CMatrix, DiamondContext, C64};
use crate::quantum_space::{
    cb_norm_estimate, check_orthogonal_sum_bound, check_ruan_ri, check_ruan_rii, functional_norm,
    make_omega, make_varpi, module_action, AmplifiedElement, CbOptions, LinearMap, OperatorSpace,
    SupportSide, EQUALITY_TOL, INEQUALITY_SLACK,
};
use crate::random::{derive_seed, derived_rng, gaussian_matrix, gaussian_vector, seeded_rng, Rng64};
use crate::tensor_products::{
    balance_effros, chain_brackets, equality_suite, merge_effros, merge_rigged, normalize_rigged,
    BracketOptions, EffrosTerm, RiggedTerm, TensorPair, TensorRepresentation, RECONSTRUCTION_TOL,
    RESOLVED_GAP,
};

pub const GROWTH: &str = "growth";
pub const COUNTEREXAMPLES: &str = "counterexamples";
pub const BOUNDS: &str = "bounds";
pub const RUAN: &str = "ruan";
pub const IDENTITIES: &str = "identities";
pub const MERGES: &str = "merges";
pub const CHAIN: &str = "chain";
pub const EQUALITIES: &str = "equalities";
pub const FACTORIZATION: &str = "factorization";

/// Exact values that are reached by a witness.
pub const EXACT_TOL: f64 = 1e-10;
/// Estimated suprema against their closed-form values.
pub const GROWTH_TOL: f64 = 1e-9;
/// Sampled values against claimed upper bounds.
pub const BOUND_TOL: f64 = 1e-8;
/// Relative tolerance of the structural identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Absolute slack of the norm chain.
pub const CHAIN_TOL: f64 = 1e-9;
/// Relative reconstruction error of the diamond-square factorization.
pub const FACTOR_TOL: f64 = 1e-8;

/// Largest level used by the sampled boundedness checks.
const BOUND_MAX_LEVEL: usize = 3;
/// Largest Hilbert dimension of the equality cases.
const EQUALITY_MAX_H: usize = 3;

fn section_seed(master: u64, name: &str) -> u64 {
    let tag = name.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    derive_seed(master, tag)
}

fn arc(space: OperatorSpace) -> Arc<OperatorSpace> {
    Arc::new(space)
}

/// Largest entry difference relative to the larger entry of either side.
fn rel_matrix(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    let scale = lhs.max_abs().max(rhs.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        lhs.max_abs_diff(rhs) / scale
    }
}

fn rel_element(lhs: &AmplifiedElement, rhs: &AmplifiedElement) -> f64 {
    let scale = lhs.coeffs().iter().chain(rhs.coeffs()).map(CMatrix::max_abs).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        lhs.max_abs_diff(rhs) / scale
    }
}

fn rel_scalar(value: f64, target: f64) -> f64 {
    if target == 0.0 {
        value.abs()
    } else {
        (value - target).abs() / target.abs()
    }
}

// ---------------------------------------------------------------- growth

/// The cb estimate of the formal identity `H_c(n) → H_r(n)` at level `n`,
/// seeded with `ω`, against `√n`.
pub fn growth_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, GROWTH);
    let rows = (1..=cfg.max_n)
        .map(|n| {
            let hc = arc(OperatorSpace::column(n)?);
            let hr = arc(OperatorSpace::row(n)?);
            let phi = LinearMap::formal_identity(hc.clone(), hr)?;
            let opts = CbOptions {
                budget: cfg.budget,
                seed: derive_seed(seed, n as u64),
                parallel: cfg.parallel,
                witnesses: vec![make_omega(n, n, hc)?],
            };
            let est = cb_norm_estimate(&phi, n, &opts)?;
            Ok(CaseRow::equal("identity_column_to_row", est.value, (n as f64).sqrt(), GROWTH_TOL)
                .with_n(n)
                .with_candidates(est.candidates)
                .with_witness(&est.witness))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Section::new(GROWTH, rows))
}

// ------------------------------------------------------- counterexamples

/// Strong and weak amplifications of the inner product at the witnesses.
pub fn counterexample_section(cfg: &ExperimentConfig) -> Result<Section> {
    let mut rows = Vec::with_capacity(3 * cfg.max_n);
    for n in 1..=cfg.max_n {
        let hc = arc(OperatorSpace::column(n)?);
        let hr = arc(OperatorSpace::row(n)?);
        let hc_bar = arc(OperatorSpace::conjugate_column(n)?);
        let hr_bar = arc(OperatorSpace::conjugate_row(n)?);
        let ctx = DiamondContext::new(n)?;
        let root = (n as f64).sqrt();
        let cases = [
            ("scb_inner_column_conjugate_row", Amplification::Strong, &hc, &hr_bar, n as f64),
            ("wcb_inner_column_conjugate_column", Amplification::Weak, &hc, &hc_bar, root),
            ("wcb_inner_row_conjugate_row", Amplification::Weak, &hr, &hr_bar, root),
        ];
        for (name, kind, h, h_bar, expected) in cases {
            let ip = Bioperator::inner_product(h.clone(), h_bar.clone())?;
            // ω has unit norm over column-shaped bases, ϖ over row-shaped ones.
            let unit = |s: &Arc<OperatorSpace>| {
                if s.out_dim() >= s.in_dim() {
                    make_omega(n, n, s.clone())
                } else {
                    make_varpi(n, n, s.clone())
                }
            };
            let (u, v) = (unit(h)?, unit(h_bar)?);
            let value = amplification_ratio(&ip, kind, &u, &v, Some(&ctx))?;
            rows.push(
                CaseRow::equal(name, value, expected, EXACT_TOL)
                    .with_n(n)
                    .with_witness(&json!({ "u": u, "v": v })),
            );
        }
    }
    Ok(Section::new(COUNTEREXAMPLES, rows))
}

fn bi_options(cfg: &ExperimentConfig, seed: u64) -> BiEstimateOptions {
    BiEstimateOptions { budget: cfg.budget, seed, parallel: cfg.parallel, witnesses: Vec::new() }
}

fn estimate_row(name: &str, level: usize, est: &WitnessReport, bound: f64) -> CaseRow {
    CaseRow::at_most(name, est.value, bound, BOUND_TOL)
        .with_n(level)
        .with_candidates(est.candidates)
        .with_witness(&json!({ "u": est.witness_u, "v": est.witness_v }))
}

/// Searched amplified values against the norms claimed for functionals,
/// products of functionals, row × column bifunctionals and the canonical
/// tensor map.
pub fn bounds_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, BOUNDS);
    let mut rng = seeded_rng(seed);

    let e = arc(OperatorSpace::random_generic(&mut rng, 3, 2, 2)?);
    let f = gaussian_vector(&mut rng, 3);
    let f_norm = functional_norm(&e, &f)?.value;
    let functional = LinearMap::functional(e, &f)?;

    let e2 = arc(OperatorSpace::random_generic(&mut rng, 2, 2, 2)?);
    let f2 = arc(OperatorSpace::random_generic(&mut rng, 3, 1, 3)?);
    let (g1, g2) = (gaussian_vector(&mut rng, 2), gaussian_vector(&mut rng, 3));
    let product_bound = functional_norm(&e2, &g1)?.value * functional_norm(&f2, &g2)?.value;
    let product = Bioperator::product_of_functionals(e2, &g1, f2, &g2)?;

    let pairing = Bioperator::bifunctional(
        arc(OperatorSpace::row(3)?),
        arc(OperatorSpace::column(2)?),
        &gaussian_matrix(&mut rng, 3, 2),
    )?;
    let pairing_bound = bifunctional_matrix(&pairing).op_norm();

    let tensor = Bioperator::canonical_tensor(
        arc(OperatorSpace::random_generic(&mut rng, 2, 2, 2)?),
        arc(OperatorSpace::random_generic(&mut rng, 2, 1, 2)?),
    )?;

    let mut rows = Vec::new();
    for level in 1..=cfg.max_n.min(BOUND_MAX_LEVEL) {
        let s = |k: u64| derive_seed(seed, 16 * level as u64 + k);
        let opts = CbOptions { budget: cfg.budget, seed: s(0), parallel: cfg.parallel, witnesses: Vec::new() };
        let est = cb_norm_estimate(&functional, level, &opts)?;
        rows.push(
            CaseRow::at_most("functional_cb", est.value, f_norm, BOUND_TOL)
                .with_n(level)
                .with_candidates(est.candidates)
                .with_witness(&est.witness),
        );
        let checks: [(&str, &Bioperator, Amplification, f64); 5] = [
            ("product_of_functionals_scb", &product, Amplification::Strong, product_bound),
            ("product_of_functionals_wcb", &product, Amplification::Weak, product_bound),
            ("row_column_bifunctional_scb", &pairing, Amplification::Strong, pairing_bound),
            ("row_column_bifunctional_wcb", &pairing, Amplification::Weak, pairing_bound),
            ("canonical_tensor_scb", &tensor, Amplification::Strong, 1.0),
        ];
        for (k, (name, r, kind, bound)) in checks.into_iter().enumerate() {
            let opts = bi_options(cfg, s(k as u64 + 1));
            let est = match kind {
                Amplification::Strong => estimate_scb(r, level, &opts)?,
                Amplification::Weak => estimate_wcb(r, level, &opts)?,
            };
            rows.push(estimate_row(name, level, &est, bound));
        }
    }
    Ok(Section::new(BOUNDS, rows))
}

// ---------------------------------------------------------------- axioms

fn random_subset(rng: &mut Rng64, m: usize) -> Vec<bool> {
    loop {
        let mask: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
        if mask.iter().any(|&b| b) && mask.iter().any(|&b| !b) {
            return mask;
        }
    }
}

fn diagonal_projection(mask: &[bool]) -> CMatrix {
    let d: Vec<C64> = mask.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect();
    CMatrix::diagonal(&d)
}

/// Orthogonal projection onto the span of `r` random vectors in `C^m`.
fn random_projection(rng: &mut Rng64, m: usize, r: usize) -> Result<CMatrix> {
    if r == 0 {
        return Ok(CMatrix::zeros(m, m));
    }
    let svd = gaussian_matrix(rng, m, m).svd()?;
    let q = CMatrix::from_fn(m, r, |i, j| svd.u[(i, j)]);
    Ok(&q * &q.adjoint())
}

/// (RI), (RII) and the orthogonal-support bound on the concrete spaces.
pub fn ruan_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, RUAN);
    let mut rng = seeded_rng(seed);
    let spaces = [
        ("column", arc(OperatorSpace::column(3)?)),
        ("row", arc(OperatorSpace::row(3)?)),
        ("full_matrices", arc(OperatorSpace::full_matrices(2, 2)?)),
        ("random", arc(OperatorSpace::random_generic(&mut rng, 3, 2, 2)?)),
    ];
    let mut rows = Vec::new();
    for (index, (name, space)) in spaces.iter().enumerate() {
        let (mut ri, mut rii, mut sum) = (Worst::default(), Worst::default(), Worst::default());
        for s in 0..cfg.samples as u64 {
            let sample = derive_seed(seed, 1000 * index as u64 + s);
            let mut rng = seeded_rng(sample);

            let m = rng.random_range(1..=3);
            let u = AmplifiedElement::random(&mut rng, space.clone(), m)?;
            let (a, b) = (gaussian_matrix(&mut rng, m, m), gaussian_matrix(&mut rng, m, m));
            let rep = check_ruan_ri(&a, &u, &b)?;
            ri.push((rep.lhs - rep.rhs) / rep.rhs.max(1.0), sample);

            let m = rng.random_range(2..=4);
            let mask = random_subset(&mut rng, m);
            let p = diagonal_projection(&mask);
            let q = &CMatrix::identity(m) - &p;
            let u = module_action(&p, &AmplifiedElement::random(&mut rng, space.clone(), m)?, &p)?;
            let v = module_action(&q, &AmplifiedElement::random(&mut rng, space.clone(), m)?, &q)?;
            let rep = check_ruan_rii(&u, &v, &p, &q)?;
            rii.push(rep.deviation / rep.norm_u.max(rep.norm_v), sample);

            let count = rng.random_range(1..=5);
            let level = count + rng.random_range(0..=1);
            let side = if rng.random_bool(0.5) { SupportSide::Left } else { SupportSide::Right };
            // support k is e_k, the last one also takes the spare coordinate
            let supports: Vec<CMatrix> = (0..count)
                .map(|k| {
                    let mask: Vec<bool> =
                        (0..level).map(|i| i == k || (k + 1 == count && i >= count)).collect();
                    diagonal_projection(&mask)
                })
                .collect();
            let id = CMatrix::identity(level);
            let terms = supports
                .iter()
                .map(|p| {
                    let w = AmplifiedElement::random(&mut rng, space.clone(), level)?;
                    match side {
                        SupportSide::Left => module_action(p, &w, &id),
                        SupportSide::Right => module_action(&id, &w, p),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let rep = check_orthogonal_sum_bound(&terms, &supports, side)?;
            sum.push((rep.lhs - rep.rhs) / rep.rhs.max(1.0), sample);
        }
        rows.push(ri.row(format!("ri_{name}"), INEQUALITY_SLACK));
        rows.push(rii.row(format!("rii_{name}"), EQUALITY_TOL));
        rows.push(sum.row(format!("orthogonal_sum_{name}"), INEQUALITY_SLACK));
    }
    Ok(Section::new(RUAN, rows))
}

fn random_bioperator(rng: &mut Rng64) -> Result<Bioperator> {
    let e = arc(OperatorSpace::random_generic(rng, 2, 2, 2)?);
    let f = arc(OperatorSpace::random_generic(rng, 2, 1, 2)?);
    let g = arc(OperatorSpace::random_generic(rng, 2, 2, 1)?);
    Bioperator::new(e, f, g, gaussian_vector(rng, 8))
}

fn apply(a: &CMatrix, x: &[C64]) -> Vec<C64> {
    (a * &CMatrix::column(x)).as_slice().to_vec()
}

fn rank_one_identities(rng: &mut Rng64) -> Result<f64> {
    let n = rng.random_range(1..=4);
    let [x, y, x2, y2] = [0; 4].map(|_| gaussian_vector(rng, n));
    let lhs = &rank_one(&x, &y)? * &rank_one(&x2, &y2)?;
    let rhs = rank_one(&x, &y2)?.scale(inner(&x2, &y));
    let a = gaussian_matrix(rng, n, n);
    let module = rel_matrix(&(&a * &rank_one(&x, &y)?), &rank_one(&apply(&a, &x), &y)?);
    let norm = rel_scalar(rank_one(&x, &y)?.op_norm(), crate::matrix_core::vec_norm(&x) * crate::matrix_core::vec_norm(&y));
    Ok(rel_matrix(&lhs, &rhs).max(module).max(norm))
}

fn diamond_identities(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let ctx = DiamondContext::new(m)?;
    let [a, b, c, d] = [0; 4].map(|_| gaussian_matrix(rng, m, m));
    let product = rel_matrix(&(&diamond(&a, &b, &ctx)? * &diamond(&c, &d, &ctx)?), &diamond(&(&a * &c), &(&b * &d), &ctx)?);
    let adjoint = rel_matrix(&diamond(&a, &b, &ctx)?.adjoint(), &diamond(&a.adjoint(), &b.adjoint(), &ctx)?);
    let norm = rel_scalar(diamond(&a, &b, &ctx)?.op_norm(), a.op_norm() * b.op_norm());
    Ok(product.max(adjoint).max(norm))
}

fn diamond_module_identities(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let ctx = DiamondContext::new(m)?;
    let space = arc(OperatorSpace::random_generic(rng, 2, 2, 2)?);
    let u = AmplifiedElement::random(rng, space, m)?;
    let [a, b, c] = [0; 3].map(|_| gaussian_matrix(rng, m, m));
    let (id, id2) = (CMatrix::identity(m), CMatrix::identity(m * m));
    let left = module_action(&diamond(&a, &b, &ctx)?, &diamond_act_right(&u, &c, &ctx)?, &id2)?;
    let left_rhs = diamond_act_right(&module_action(&a, &u, &id)?, &(&b * &c), &ctx)?;
    let right = module_action(&id2, &diamond_act_right(&u, &a, &ctx)?, &diamond(&b, &c, &ctx)?)?;
    let right_rhs = diamond_act_right(&module_action(&id, &u, &b)?, &(&a * &c), &ctx)?;
    Ok(rel_element(&left, &left_rhs).max(rel_element(&right, &right_rhs)))
}

fn random_pair(rng: &mut Rng64) -> Result<TensorPair> {
    let e = arc(OperatorSpace::random_generic(rng, 2, 2, 2)?);
    let f = arc(OperatorSpace::random_generic(rng, 2, 2, 1)?);
    TensorPair::new(e, f)
}

fn rigged_diamond_identity(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let ctx = DiamondContext::new(m)?;
    let pair = random_pair(rng)?;
    let u = AmplifiedElement::random(rng, pair.e().clone(), m)?;
    let v = AmplifiedElement::random(rng, pair.f().clone(), m)?;
    let [a, b, c, d] = [0; 4].map(|_| gaussian_matrix(rng, m, m));
    let lhs = module_action(&diamond(&a, &b, &ctx)?, &pair.diamond_tensor(&u, &v, &ctx)?, &diamond(&c, &d, &ctx)?)?;
    let rhs = pair.diamond_tensor(&module_action(&a, &u, &c)?, &module_action(&b, &v, &d)?, &ctx)?;
    Ok(rel_element(&lhs, &rhs))
}

fn balanced_identity(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let pair = random_pair(rng)?;
    let u = AmplifiedElement::random(rng, pair.e().clone(), m)?;
    let v = AmplifiedElement::random(rng, pair.f().clone(), m)?;
    let a = gaussian_matrix(rng, m, m);
    let id = CMatrix::identity(m);
    let lhs = pair.effros(&module_action(&id, &u, &a)?, &v)?;
    let rhs = pair.effros(&u, &module_action(&a, &v, &id)?)?;
    Ok(rel_element(&lhs, &rhs))
}

fn compression_identity(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let ctx = DiamondContext::new(m)?;
    let r = random_bioperator(rng)?;
    let u = AmplifiedElement::random(rng, r.dom_e().clone(), m)?;
    let v = AmplifiedElement::random(rng, r.dom_f().clone(), m)?;
    let rank = rng.random_range(0..=m);
    let p = random_projection(rng, m, rank)?;
    Ok(compression_identity_check(&r, &u, &v, &p, &ctx)?.relative_deviation)
}

fn opposite_identity(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=3);
    let ctx = DiamondContext::new(m)?;
    let r = random_bioperator(rng)?;
    let u = AmplifiedElement::random(rng, r.dom_e().clone(), m)?;
    let v = AmplifiedElement::random(rng, r.dom_f().clone(), m)?;
    Ok(opposite_identity_check(&r, &u, &v, &ctx)?.relative_deviation)
}

fn operator_composition_identity(rng: &mut Rng64) -> Result<f64> {
    let (h, k, m) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
    let f = Bioperator::bifunctional(
        arc(OperatorSpace::row(h)?),
        arc(OperatorSpace::column(k)?),
        &gaussian_matrix(rng, h, k),
    )?;
    let v = AmplifiedElement::random(rng, f.dom_e().clone(), m)?;
    let u = AmplifiedElement::random(rng, f.dom_f().clone(), m)?;
    let composed = compose_through_operator(&f, &v, &u)?;
    let strong = strong_amplify(&f, &v, &u)?;
    Ok(rel_matrix(&composed, &strong.coeffs()[0]))
}

fn canonical_tensor_identity(rng: &mut Rng64) -> Result<f64> {
    let m = rng.random_range(1..=2);
    let pair = random_pair(rng)?;
    let t = Bioperator::canonical_tensor(pair.e().clone(), pair.f().clone())?;
    let u = AmplifiedElement::random(rng, pair.e().clone(), m)?;
    let v = AmplifiedElement::random(rng, pair.f().clone(), m)?;
    let rep = canonical_tensor_factor_check(&t, &u, &v)?;
    let scale = strong_amplify(&t, &u, &v)?.assembled().max_abs();
    Ok(if scale == 0.0 { rep.identity_error } else { rep.identity_error / scale })
}

type IdentityCheck = fn(&mut Rng64) -> Result<f64>;

const IDENTITY_CHECKS: [(&str, IdentityCheck); 9] = [
    ("rank_one_composition", rank_one_identities),
    ("diamond_product_adjoint_norm", diamond_identities),
    ("diamond_module", diamond_module_identities),
    ("rigged_diamond", rigged_diamond_identity),
    ("balanced_effros_product", balanced_identity),
    ("weak_compression", compression_identity),
    ("opposite_weak_amplification", opposite_identity),
    ("composition_through_operator", operator_composition_identity),
    ("canonical_tensor_factorization", canonical_tensor_identity),
];

/// Every structural identity over `samples` seeds; each row reports the
/// worst relative deviation.
pub fn identities_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, IDENTITIES);
    let mut rows = Vec::with_capacity(IDENTITY_CHECKS.len());
    for (index, (name, check)) in IDENTITY_CHECKS.iter().enumerate() {
        let mut worst = Worst::default();
        for s in 0..cfg.samples as u64 {
            let sample = derive_seed(seed, 1000 * index as u64 + s);
            worst.push(check(&mut seeded_rng(sample))?, sample);
        }
        rows.push(worst.row(*name, IDENTITY_TOL));
    }
    Ok(Section::new(IDENTITIES, rows))
}

// ----------------------------------------------------------------- chain

fn random_small_space(rng: &mut Rng64) -> Result<Arc<OperatorSpace>> {
    let (k, h) = (rng.random_range(1..=2), rng.random_range(1..=2));
    let dim = rng.random_range(1..=(k * h).min(3));
    Ok(arc(OperatorSpace::random_generic(rng, dim, k, h)?))
}

fn random_effros_terms(rng: &mut Rng64, pair: &TensorPair, count: usize, m: usize) -> Result<Vec<EffrosTerm>> {
    (0..count)
        .map(|_| {
            // unequal factor scales exercise the balancing step
            let s = rng.random_range(-1.0..1.0_f64).exp();
            let u = AmplifiedElement::random(rng, pair.e().clone(), m)?.scale_real(s);
            let v = AmplifiedElement::random(rng, pair.f().clone(), m)?.scale_real(1.0 / (s * s));
            EffrosTerm::new(u, v)
        })
        .collect()
}

fn random_rigged_terms(rng: &mut Rng64, pair: &TensorPair, count: usize, m: usize, big: usize) -> Result<Vec<RiggedTerm>> {
    (0..count)
        .map(|_| {
            let a = gaussian_matrix(rng, big, m * m);
            let u = AmplifiedElement::random(rng, pair.e().clone(), m)?;
            let v = AmplifiedElement::random(rng, pair.f().clone(), m)?;
            let b = gaussian_matrix(rng, m * m, big).scale_real(rng.random_range(0.2..2.0));
            RiggedTerm::new(a, u, v, b)
        })
        .collect()
}

fn gram_norm(blocks: impl Iterator<Item = CMatrix>) -> f64 {
    let mut sum: Option<CMatrix> = None;
    for g in blocks {
        sum = Some(match sum {
            None => g,
            Some(s) => &s + &g,
        });
    }
    sum.map_or(0.0, |s| s.op_norm().sqrt())
}

/// Merging several Effros or rigged terms into one: reconstruction and the
/// norm identities and bounds of the merged factors.
pub fn merges_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, MERGES);
    let names = [
        "effros_reconstruction",
        "effros_left_factor_norm",
        "effros_right_factor_norm",
        "effros_norm_bound",
        "rigged_reconstruction",
        "rigged_unit_factors",
        "rigged_left_rigger_norm",
        "rigged_right_rigger_norm",
        "rigged_norm_bound",
    ];
    let mut worst = [Worst::default(); 9];
    for s in 0..cfg.samples as u64 {
        let sample = derive_seed(seed, s);
        let mut rng = seeded_rng(sample);
        let pair = TensorPair::new(random_small_space(&mut rng)?, random_small_space(&mut rng)?)?;

        let (count, m) = (rng.random_range(1..=4), rng.random_range(1..=2));
        let terms = random_effros_terms(&mut rng, &pair, count, m)?;
        let target = TensorRepresentation::EffrosList(terms.clone()).assemble(&pair)?;
        let merged = merge_effros(&terms)?;
        let rep = TensorRepresentation::SingleEffros(merged.clone());
        worst[0].push(rep.reconstruction_error(&pair, &target)?, sample);
        let balanced = balance_effros(&terms);
        let left = gram_norm(balanced.iter().map(|t| {
            let a = t.u.assembled();
            &a * &a.adjoint()
        }));
        let right = gram_norm(balanced.iter().map(|t| {
            let a = t.v.assembled();
            &a.adjoint() * &a
        }));
        worst[1].push(rel_scalar(merged.u.norm(), left), sample);
        worst[2].push(rel_scalar(merged.v.norm(), right), sample);
        let raw: f64 = terms.iter().map(EffrosTerm::bound).sum();
        worst[3].push((merged.bound() - raw) / raw, sample);

        let (count, m, big) = (rng.random_range(1..=3), rng.random_range(1..=2), rng.random_range(1..=3));
        let terms = random_rigged_terms(&mut rng, &pair, count, m, big)?;
        let target = TensorRepresentation::RiggedList(terms.clone()).assemble(&pair)?;
        let merged = merge_rigged(&terms)?;
        let rep = TensorRepresentation::SingleRigged(merged.clone());
        worst[4].push(rep.reconstruction_error(&pair, &target)?, sample);
        worst[5].push((merged.u.norm() - 1.0).abs().max((merged.v.norm() - 1.0).abs()), sample);
        let normal = normalize_rigged(&terms);
        let left = gram_norm(normal.iter().map(|t| &t.a * &t.a.adjoint()));
        let right = gram_norm(normal.iter().map(|t| &t.b.adjoint() * &t.b));
        worst[6].push(rel_scalar(merged.a.op_norm(), left), sample);
        worst[7].push(rel_scalar(merged.b.op_norm(), right), sample);
        let raw: f64 = terms.iter().map(RiggedTerm::bound).sum();
        worst[8].push((merged.bound() - raw) / raw, sample);
    }
    let tolerances = [
        RECONSTRUCTION_TOL,
        EQUALITY_TOL,
        EQUALITY_TOL,
        INEQUALITY_SLACK,
        RECONSTRUCTION_TOL,
        EQUALITY_TOL,
        EQUALITY_TOL,
        EQUALITY_TOL,
        INEQUALITY_SLACK,
    ];
    let rows = names.iter().zip(&worst).zip(tolerances).map(|((name, w), tol)| w.row(*name, tol)).collect();
    Ok(Section::new(MERGES, rows))
}

fn bracket_options(cfg: &ExperimentConfig, seed: u64) -> BracketOptions {
    BracketOptions { budget: cfg.budget, seed, parallel: cfg.parallel, gauge: true }
}

/// `spatial ≤ h ≤ 4` on random elements given by random Effros lists.
pub fn chain_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, CHAIN);
    let run = |s: u64| -> Result<CaseRow> {
        let sample = derive_seed(seed, s);
        let mut rng = seeded_rng(sample);
        let pair = TensorPair::new(random_small_space(&mut rng)?, random_small_space(&mut rng)?)?;
        let (count, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
        let list = TensorRepresentation::EffrosList(random_effros_terms(&mut rng, &pair, count, m)?);
        let target = list.assemble(&pair)?;
        let chain = chain_brackets(&pair, &target, &[list], &bracket_options(cfg, sample))?;
        let (h, four) = (&chain.haagerup, &chain.fournamed);
        let violation = (chain.spatial - h.upper).max(h.lower - four.upper).max(h.upper - four.upper);
        Ok(CaseRow::at_most(format!("instance_{s}"), violation, 0.0, CHAIN_TOL)
            .with_bracket(h.report("haagerup", sample))
            .with_witness(&json!({
                "spatial": chain.spatial,
                "fournamed": four.report("fournamed", sample),
            })))
    };
    let ids: Vec<u64> = (0..cfg.samples as u64).collect();
    let rows = if cfg.parallel {
        ids.par_iter().map(|&s| run(s)).collect::<Result<Vec<_>>>()?
    } else {
        ids.iter().map(|&s| run(s)).collect::<Result<Vec<_>>>()?
    };
    Ok(Section::new(CHAIN, rows))
}

// ------------------------------------------------------------ equalities

/// All seven equality cases for `h ≤ 3` (bounded by `max_n`), both auxiliary
/// spaces, `samples` seeds each.
pub fn equalities_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, EQUALITIES);
    let outcomes = equality_suite(cfg.max_n.min(EQUALITY_MAX_H), cfg.samples, seed, &bracket_options(cfg, seed))?;
    let rows = outcomes
        .iter()
        .map(|o| {
            let space = if o.case.uses_space() { o.space.map(|s| format!("/{}", s.as_str())) } else { None };
            let name = format!("{}/h={}{}/seed={}", o.case.as_str(), o.hilbert_dim, space.unwrap_or_default(), o.seed);
            let mut row = CaseRow::at_most(name.clone(), o.gap, 0.0, RESOLVED_GAP)
                .with_n(o.hilbert_dim)
                .with_bracket(o.haagerup.report(name, o.seed));
            if !row.passed {
                row = row.with_witness(&json!({ "haagerup": o.haagerup.witness, "fournamed": o.fournamed.as_ref().map(|f| &f.witness) }));
            }
            row
        })
        .collect();
    Ok(Section::new(EQUALITIES, rows))
}

// --------------------------------------------------------- factorization

/// `a = b(c ◇ c)b′` for random `a ∈ M_{m²}`, `m ∈ {2, 3}`; every fourth
/// sample is rank-deficient.
pub fn factorization_section(cfg: &ExperimentConfig) -> Result<Section> {
    let seed = section_seed(cfg.seed, FACTORIZATION);
    let mut rows = Vec::new();
    for m in [2usize, 3] {
        let ctx = DiamondContext::new(m)?;
        let n = m * m;
        let (mut error, mut positive) = (Worst::default(), Worst::default());
        for s in 0..cfg.samples as u64 {
            let sample = derive_seed(seed, 1000 * m as u64 + s);
            let mut rng = derived_rng(sample, 0);
            let a = if s % 4 == 3 {
                let r = rng.random_range(1..n);
                &gaussian_matrix(&mut rng, n, r) * &gaussian_matrix(&mut rng, r, n)
            } else {
                gaussian_matrix(&mut rng, n, n)
            };
            let fac = diamond_square_factor(&a, &ctx)?;
            let rebuilt = fac.reconstruct(&ctx)?;
            error.push((&a - &rebuilt).op_norm() / a.op_norm(), sample);
            // c must be diagonal with nonnegative real entries
            let off = CMatrix::from_fn(m, m, |i, j| {
                let z = fac.c[(i, j)];
                if i == j {
                    C64::new(z.im.abs() + (-z.re).max(0.0), 0.0)
                } else {
                    z
                }
            });
            positive.push(off.max_abs(), sample);
        }
        rows.push(error.row(format!("diamond_square_m{m}"), FACTOR_TOL));
        rows.push(positive.row(format!("diagonal_positive_c_m{m}"), 0.0));
    }
    Ok(Section::new(FACTORIZATION, rows))
}

// ---------------------------------------------------------------- runner

/// The sections making up one named suite.
pub fn suite_sections(suite: Suite, cfg: &ExperimentConfig) -> Result<Vec<Section>> {
    Ok(match suite {
        Suite::Growth => vec![growth_section(cfg)?],
        Suite::Counterexamples => vec![counterexample_section(cfg)?, bounds_section(cfg)?],
        Suite::Axioms => vec![ruan_section(cfg)?, identities_section(cfg)?],
        Suite::Chain => vec![merges_section(cfg)?, chain_section(cfg)?],
        Suite::Equalities => vec![equalities_section(cfg)?],
        Suite::Factorization => vec![factorization_section(cfg)?],
        Suite::All => {
            let per = if cfg.parallel {
                Suite::INDIVIDUAL.par_iter().map(|&s| suite_sections(s, cfg)).collect::<Result<Vec<_>>>()?
            } else {
                Suite::INDIVIDUAL.iter().map(|&s| suite_sections(s, cfg)).collect::<Result<Vec<_>>>()?
            };
            per.into_iter().flatten().collect()
        }
    })
}

/// Runs the configured suite and writes the report to the output path, if
/// one is set.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let sections = suite_sections(cfg.suite, cfg)?;
    let report = Report::new(cfg.suite, cfg.seed, cfg.max_n, cfg.budget, cfg.samples, sections);
    if let Some(path) = &cfg.output_path {
        super::report::write_report(&report, cfg.format, path)?;
    }
    Ok(report)
}

pub fn run_growth(cfg: &ExperimentConfig) -> Result<Report> {
    run_suite(&ExperimentConfig { suite: Suite::Growth, ..cfg.clone() })
}

pub fn run_counterexamples(cfg: &ExperimentConfig) -> Result<Report> {
    run_suite(&ExperimentConfig { suite: Suite::Counterexamples, ..cfg.clone() })
}
