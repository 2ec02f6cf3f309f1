//! Search strategies over the free parameters of a [`Problem`].
//!
//! Low-dimensional problems get an exhaustive lexicographic grid, evaluated
//! once and reusable across thresholds, followed by zoom refinement around
//! the best well-separated grid points. Larger problems get a multi-start
//! compass search that moves probability mass between pairs of feasible
//! outputs within a row.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::model::PolicyKernel;

use super::config::SearchConfig;
use super::problem::{Problem, Rates};

/// Largest free dimension searched exhaustively.
pub const EXHAUSTIVE_MAX_DIM: usize = 4;

/// Largest exhaustive grid, in points.
pub const EXHAUSTIVE_GRID_CAP: u64 = 2_500_000;

/// Evaluation budget of one compass-search start.
pub const LOCAL_EVAL_BUDGET: usize = 100_000;

/// Re-centerings allowed at one zoom level before shrinking anyway.
const MAX_RECENTER: usize = 25;

/// Best candidate found by a search, as full kernel rows.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub rows: Vec<Vec<f64>>,
    pub rates: Rates,
}

pub(crate) fn uses_grid(problem: &Problem, search: &SearchConfig) -> bool {
    let d = problem.dim();
    d <= EXHAUSTIVE_MAX_DIM
        && (search.grid_points_per_parameter as u64)
            .checked_pow(d as u32)
            .is_some_and(|n| n <= EXHAUSTIVE_GRID_CAP)
}

/// Rates at every point of the exhaustive grid, in lexicographic order of
/// the parameter vector. Out-of-domain points hold `None`.
pub(crate) struct GridTable {
    points: usize,
    dim: usize,
    rates: Vec<Option<Rates>>,
}

impl GridTable {
    pub fn build(problem: &Problem, search: &SearchConfig) -> Self {
        let dim = problem.dim();
        let points = search.grid_points_per_parameter;
        let total = points.pow(dim as u32);
        let eval = |idx: usize| {
            let theta = grid_params(idx, points, dim);
            problem
                .in_domain(&theta)
                .then(|| problem.evaluate_params(&theta))
        };
        let rates = if search.parallel {
            (0..total).into_par_iter().map(eval).collect()
        } else {
            (0..total).map(eval).collect()
        };
        GridTable { points, dim, rates }
    }

    fn step(&self) -> f64 {
        1.0 / (self.points - 1) as f64
    }

    fn digits(&self, idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.dim];
        let mut rest = idx;
        for slot in d.iter_mut().rev() {
            *slot = rest % self.points;
            rest /= self.points;
        }
        d
    }
}

/// Parameter vector of grid point `idx`; the first parameter is the most
/// significant digit.
fn grid_params(idx: usize, points: usize, dim: usize) -> Vec<f64> {
    let scale = 1.0 / (points - 1) as f64;
    let mut theta = vec![0.0; dim];
    let mut rest = idx;
    for t in theta.iter_mut().rev() {
        *t = (rest % points) as f64 * scale;
        rest /= points;
    }
    theta
}

fn zoom_subdivisions(dim: usize) -> usize {
    match dim {
        0..=2 => 10,
        3 => 6,
        _ => 4,
    }
}

/// Repeatedly grids a shrinking window around the incumbent. Each level
/// lays `r + 1` points per axis over `[c - h, c + h]`; the next level's
/// half-width is the current spacing `2h / r`. When the winner sits on the
/// window's edge the window is re-centered at the same size first.
fn zoom_refine(
    problem: &Problem,
    start: Vec<f64>,
    start_rates: Rates,
    half_width: f64,
    threshold: f64,
    tolerance: f64,
) -> (Vec<f64>, Rates) {
    let dim = start.len();
    let (mut center, mut best) = (start, start_rates);
    if dim == 0 {
        return (center, best);
    }
    let r = zoom_subdivisions(dim);
    let mut h = half_width;
    let mut recenter = 0;
    let mut theta = vec![0.0; dim];
    while h > tolerance {
        let spacing = 2.0 * h / r as f64;
        let mut winner: Option<(Vec<f64>, Rates, bool)> = None;
        let mut offsets = vec![0usize; dim];
        'window: loop {
            let mut inside = true;
            for i in 0..dim {
                let t = center[i] + (offsets[i] as f64 - (r / 2) as f64) * spacing;
                if !(-1e-12..=1.0 + 1e-12).contains(&t) {
                    inside = false;
                }
                theta[i] = t.clamp(0.0, 1.0);
            }
            if inside && problem.in_domain(&theta) {
                let rates = problem.evaluate_params(&theta);
                let incumbent = winner.as_ref().map_or(&best, |w| &w.1);
                if rates.better_than(incumbent, threshold) {
                    let edge = offsets.iter().any(|&o| o == 0 || o == r);
                    winner = Some((theta.clone(), rates, edge));
                }
            }
            for i in (0..dim).rev() {
                offsets[i] += 1;
                if offsets[i] <= r {
                    continue 'window;
                }
                offsets[i] = 0;
            }
            break;
        }
        if let Some((t, rates, edge)) = winner {
            center = t;
            best = rates;
            if edge && recenter < MAX_RECENTER {
                recenter += 1;
                continue;
            }
        }
        recenter = 0;
        h = spacing;
    }
    (center, best)
}

/// Grid phase plus refinement for one threshold.
pub(crate) fn search_grid(
    problem: &Problem,
    table: &GridTable,
    threshold: f64,
    search: &SearchConfig,
    seeds: &[PolicyKernel],
) -> Candidate {
    let dim = table.dim;
    let mut best_idx: Option<usize> = None;
    let mut feasible: Vec<(f64, usize)> = Vec::new();
    for (idx, r) in table.rates.iter().enumerate() {
        let Some(r) = r else { continue };
        if r.feasible(threshold) {
            feasible.push((r.privacy, idx));
        }
        let better = match best_idx {
            None => true,
            Some(b) => r.better_than(table.rates[b].as_ref().expect("evaluated"), threshold),
        };
        if better {
            best_idx = Some(idx);
        }
    }
    let best_idx = best_idx.expect("the grid contains the origin");
    let mut best_theta = grid_params(best_idx, table.points, dim);
    let mut best = table.rates[best_idx].expect("evaluated");

    // Refinement starts: the best feasible grid points, pairwise more than
    // two grid steps apart. Without feasible points, the max-utility point.
    feasible.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut starts: Vec<usize> = Vec::new();
    for &(_, idx) in &feasible {
        if starts.len() >= search.restarts {
            break;
        }
        let d = table.digits(idx);
        let far = starts.iter().all(|&s| {
            table
                .digits(s)
                .iter()
                .zip(&d)
                .any(|(a, b)| a.abs_diff(*b) > 2)
        });
        if far {
            starts.push(idx);
        }
    }
    if starts.is_empty() {
        starts.push(best_idx);
    }
    let mut start_points: Vec<(Vec<f64>, Rates)> = starts
        .iter()
        .map(|&i| {
            (
                grid_params(i, table.points, dim),
                table.rates[i].expect("evaluated"),
            )
        })
        .collect();
    for seed in seeds {
        if problem.admissible(seed.rows()) {
            let theta = problem.params_from_rows(seed.rows());
            let rates = problem.evaluate_params(&theta);
            start_points.push((theta, rates));
        }
    }

    for (theta, rates) in start_points {
        let (t, r) = zoom_refine(
            problem,
            theta,
            rates,
            table.step(),
            threshold,
            search.local_step_tolerance,
        );
        if r.better_than(&best, threshold) {
            best = r;
            best_theta = t;
        }
    }
    Candidate {
        rows: problem.rows_from_params(&best_theta),
        rates: best,
    }
}

/// Kernel whose free rows are independent flat-Dirichlet draws.
pub(crate) fn random_rows<R: Rng + ?Sized>(problem: &Problem, rng: &mut R) -> Vec<Vec<f64>> {
    let dim = problem.dim();
    let mut theta = Vec::with_capacity(dim);
    for f in &problem.free {
        let draws: Vec<f64> = f.outputs.iter().map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        theta.extend(draws[..draws.len() - 1].iter().map(|d| d / total));
    }
    problem.rows_from_params(&theta)
}

/// Compass search over pairwise mass transfers within free rows. Improves
/// utility until the threshold is met, then lowers privacy while keeping it.
fn compass_search(
    problem: &Problem,
    mut rows: Vec<Vec<f64>>,
    threshold: f64,
    tolerance: f64,
) -> Candidate {
    let mut best = problem.evaluate_rows(&rows);
    let mut step = 0.25;
    let mut evals = 0;
    while step >= tolerance && evals < LOCAL_EVAL_BUDGET {
        let mut improved = false;
        for f in &problem.free {
            for &to in &f.outputs {
                for &from in &f.outputs {
                    if to == from {
                        continue;
                    }
                    let delta = step.min(rows[f.pair][from]);
                    if delta <= 0.0 {
                        continue;
                    }
                    let saved = (rows[f.pair][from], rows[f.pair][to]);
                    rows[f.pair][from] -= delta;
                    rows[f.pair][to] += delta;
                    let rates = problem.evaluate_rows(&rows);
                    evals += 1;
                    if rates.better_than(&best, threshold) {
                        best = rates;
                        improved = true;
                    } else {
                        rows[f.pair][from] = saved.0;
                        rows[f.pair][to] = saved.1;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Candidate { rows, rates: best }
}

/// Multi-start local search: given seeds, the identity kernel when
/// admissible, then `restarts` random kernels.
pub(crate) fn search_local(
    problem: &Problem,
    threshold: f64,
    search: &SearchConfig,
    rng_seed: u64,
    seeds: &[PolicyKernel],
    identity: Option<&PolicyKernel>,
) -> Candidate {
    let mut starts: Vec<Vec<Vec<f64>>> = seeds
        .iter()
        .chain(identity)
        .filter(|k| problem.admissible(k.rows()))
        .map(|k| k.rows().to_vec())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..search.restarts {
        starts.push(random_rows(problem, &mut rng));
    }
    let run =
        |rows: Vec<Vec<f64>>| compass_search(problem, rows, threshold, search.local_step_tolerance);
    let results: Vec<Candidate> = if search.parallel {
        starts.into_par_iter().map(run).collect()
    } else {
        starts.into_iter().map(run).collect()
    };
    let mut best: Option<Candidate> = None;
    for c in results {
        if best
            .as_ref()
            .is_none_or(|b| c.rates.better_than(&b.rates, threshold))
        {
            best = Some(c);
        }
    }
    best.expect("at least one start")
}
