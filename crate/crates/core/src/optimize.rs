//! Seeded random-restart hill climbing over lists of matrices, and a
//! Nelder–Mead simplex minimizer over real vectors.
//!
//! Every estimator in the crate that reports a supremum as a lower bound runs
//! through [`maximize`]: each restart draws from its own derived seed, so the
//! merged result is identical whether restarts run serially or on rayon.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix_core::CMatrix;
use crate::random::{derived_rng, gaussian_matrix, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { restarts: 32, iterations: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub value: f64,
    pub state: Vec<CMatrix>,
    /// Index of the restart that produced `state`.
    pub restart: usize,
    /// Number of objective evaluations across all restarts.
    pub evaluations: usize,
}

const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-7;
const MAX_STEP: f64 = 2.0;

/// Maximizes `objective` by hill climbing from each start.
///
/// Restart `r` begins at `starts[r]` when present and at `random_start`
/// otherwise, so the total number of restarts is
/// `max(budget.restarts, starts.len())`. NaN objective values count as `-∞`.
/// Ties between restarts go to the lowest index.
pub fn maximize<F, S>(
    objective: &F,
    starts: &[Vec<CMatrix>],
    random_start: &S,
    budget: Budget,
    seed: u64,
    parallel: bool,
) -> SearchOutcome
where
    F: Fn(&[CMatrix]) -> f64 + Sync,
    S: Fn(&mut Rng64) -> Vec<CMatrix> + Sync,
{
    let total = budget.restarts.max(starts.len()).max(1);
    let run = |r: usize| {
        let mut rng = derived_rng(seed, r as u64);
        let init = match starts.get(r) {
            Some(s) => s.clone(),
            None => random_start(&mut rng),
        };
        climb(objective, init, budget.iterations, &mut rng)
    };
    let results: Vec<(f64, Vec<CMatrix>, usize)> = if parallel {
        (0..total).into_par_iter().map(run).collect()
    } else {
        (0..total).map(run).collect()
    };
    let evaluations = results.iter().map(|r| r.2).sum();
    let mut best = 0;
    for (r, res) in results.iter().enumerate() {
        if res.0 > results[best].0 {
            best = r;
        }
    }
    let (value, state, _) = results.into_iter().nth(best).expect("at least one restart");
    SearchOutcome { value, state, restart: best, evaluations }
}

fn score<F: Fn(&[CMatrix]) -> f64>(objective: &F, x: &[CMatrix]) -> f64 {
    let v = objective(x);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn climb<F: Fn(&[CMatrix]) -> f64>(
    objective: &F,
    init: Vec<CMatrix>,
    iterations: usize,
    rng: &mut Rng64,
) -> (f64, Vec<CMatrix>, usize) {
    let mut best = init;
    let mut best_val = score(objective, &best);
    let mut evals = 1;
    let mut step = INITIAL_STEP;
    for _ in 0..iterations {
        let size = rms(&best).max(1e-12);
        let trial: Vec<CMatrix> = best
            .iter()
            .map(|c| c + &gaussian_matrix(rng, c.rows(), c.cols()).scale_real(step * size))
            .collect();
        let val = score(objective, &trial);
        evals += 1;
        if val > best_val {
            best = trial;
            best_val = val;
            step = (step * 1.5).min(MAX_STEP);
        } else {
            step *= 0.7;
            if step < MIN_STEP {
                step = INITIAL_STEP;
            }
        }
    }
    (best_val, best, evals)
}

/// Root-mean-square entry size of a matrix list.
fn rms(x: &[CMatrix]) -> f64 {
    let (sum, count) = x.iter().fold((0.0, 0usize), |(s, n), c| {
        (s + c.frobenius_norm().powi(2), n + c.rows() * c.cols())
    });
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Derivative-free minimization by the Nelder–Mead simplex method, started
/// from the axis simplex `x0 + step·e_i`. Stops after `max_evals`
/// evaluations or when the spread of simplex values drops below `tol`.
/// NaN values count as `+∞`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> Minimum {
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    if n == 0 {
        let (x, value) = simplex.pop().expect("one vertex");
        return Minimum { x, value, evaluations: evals };
    }
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if (worst - best).abs() <= tol * best.abs().max(1e-300) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            };
            evals += 1;
            if fc < worst.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evaluations: evals }
}
