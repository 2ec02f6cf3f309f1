use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{blockwise_extend, induced_output_laws, PolicyKernel, SourceModel};

use super::config::{GuaranteeConfig, SearchConfig, TradeoffPoint};
use super::objective::{guarantee_check, privacy_objective};
use super::problem::Problem;
use super::search::{random_rows, search_grid, search_local, uses_grid, Candidate, GridTable};

/// Default allowance for the heuristic search at the longer block length.
pub const MONOTONICITY_SLACK: f64 = 1e-3;

/// Seed for sweep point `(lambda_index, s_index)`.
pub fn point_seed(seed: u64, lambda_index: usize, s_index: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(lambda_index as u64 ^ mix(s_index as u64).rotate_left(17)))
}

/// Free parameters of an admissible kernel: for each row with at least two
/// feasible outputs, the probabilities of all but its last feasible output.
pub fn kernel_parameters(model: &SourceModel, kernel: &PolicyKernel) -> Result<Vec<f64>> {
    let problem = Problem::new(model, kernel.k(), kernel.s())?;
    Ok(problem.params_from_rows(kernel.rows()))
}

/// A kernel admissible at `(k, s)` whose free rows are independent draws
/// from the flat Dirichlet law over their feasible outputs.
pub fn random_kernel<R: Rng + ?Sized>(
    model: &SourceModel,
    k: usize,
    s: f64,
    rng: &mut R,
) -> Result<PolicyKernel> {
    let problem = Problem::new(model, k, s)?;
    let rows = random_rows(&problem, rng);
    problem.kernel(rows)
}

/// Exact re-evaluation of a kernel found by a search.
fn finish(
    model: &SourceModel,
    cfg: &GuaranteeConfig,
    kernel: PolicyKernel,
) -> Result<TradeoffPoint> {
    let laws = induced_output_laws(model, &kernel)?;
    let g = guarantee_check(&laws, cfg, &model.prior)?;
    let p = privacy_objective(&laws)?;
    Ok(TradeoffPoint {
        lambda: cfg.lambda,
        s: cfg.s,
        k: cfg.k,
        privacy_rate: p.rate,
        utility_rate: g.utility_rate,
        kernel,
        feasible: g.pass,
    })
}

fn identity_if_admissible(model: &SourceModel, cfg: &GuaranteeConfig) -> Option<PolicyKernel> {
    PolicyKernel::identity(model, cfg.k, cfg.s).ok()
}

/// Minimizes the privacy rate over kernels meeting the utility guarantee.
///
/// Returns `feasible = false` with the highest-utility kernel found when no
/// candidate meets the guarantee. Deterministic given `search.seed`.
pub fn optimize_policy(
    model: &SourceModel,
    cfg: &GuaranteeConfig,
    search: &SearchConfig,
) -> Result<TradeoffPoint> {
    optimize_policy_with_seeds(model, cfg, search, &[])
}

/// [`optimize_policy`] that also starts from the given kernels, when they
/// are admissible at `(cfg.k, cfg.s)`.
pub fn optimize_policy_with_seeds(
    model: &SourceModel,
    cfg: &GuaranteeConfig,
    search: &SearchConfig,
    seeds: &[PolicyKernel],
) -> Result<TradeoffPoint> {
    optimize_seeded(model, cfg, search, search.seed, seeds)
}

fn optimize_seeded(
    model: &SourceModel,
    cfg: &GuaranteeConfig,
    search: &SearchConfig,
    rng_seed: u64,
    seeds: &[PolicyKernel],
) -> Result<TradeoffPoint> {
    cfg.validate()?;
    search.validate()?;
    let problem = Problem::new(model, cfg.k, cfg.s)?;
    let threshold = cfg.threshold(&model.prior);
    let candidate = if uses_grid(&problem, search) {
        let table = GridTable::build(&problem, search);
        search_grid(&problem, &table, threshold, search, seeds)
    } else {
        let identity = identity_if_admissible(model, cfg);
        search_local(
            &problem,
            threshold,
            search,
            rng_seed,
            seeds,
            identity.as_ref(),
        )
    };
    finish(model, cfg, problem.kernel(candidate.rows)?)
}

/// One optimized point per `(lambda, s)`, ordered by `s` and then `lambda`
/// as given. The grid table for each `s` is shared by all its lambdas.
///
/// With `search.share_candidates`, every point finally adopts the best
/// kernel among all points of the sweep that is admissible at its `s` and
/// meets its guarantee, which makes each curve nondecreasing in lambda and
/// the curves ordered in `s` by construction.
pub fn tradeoff_sweep(
    model: &SourceModel,
    lambdas: &[f64],
    s_values: &[f64],
    template: &GuaranteeConfig,
    search: &SearchConfig,
) -> Result<Vec<TradeoffPoint>> {
    search.validate()?;
    let mut points = Vec::with_capacity(lambdas.len() * s_values.len());
    for (si, &s) in s_values.iter().enumerate() {
        let cfgs: Vec<GuaranteeConfig> = lambdas
            .iter()
            .map(|&lambda| GuaranteeConfig {
                lambda,
                s,
                ..*template
            })
            .collect();
        for c in &cfgs {
            c.validate()?;
        }
        let problem = Problem::new(model, template.k, s)?;
        let identity = identity_if_admissible(model, &cfgs[0]);
        let table = uses_grid(&problem, search).then(|| GridTable::build(&problem, search));
        let solve = |(li, cfg): (usize, &GuaranteeConfig)| -> Result<TradeoffPoint> {
            let threshold = cfg.threshold(&model.prior);
            let c: Candidate = match &table {
                Some(t) => search_grid(&problem, t, threshold, search, &[]),
                None => search_local(
                    &problem,
                    threshold,
                    search,
                    point_seed(search.seed, li, si),
                    &[],
                    identity.as_ref(),
                ),
            };
            finish(model, cfg, problem.kernel(c.rows)?)
        };
        let curve: Vec<Result<TradeoffPoint>> = if search.parallel {
            cfgs.par_iter().enumerate().map(solve).collect()
        } else {
            cfgs.iter().enumerate().map(solve).collect()
        };
        for p in curve {
            points.push(p?);
        }
    }
    if search.share_candidates {
        share_candidates(model, template, &mut points)?;
    }
    Ok(points)
}

fn share_candidates(
    model: &SourceModel,
    template: &GuaranteeConfig,
    points: &mut [TradeoffPoint],
) -> Result<()> {
    let pool: Vec<PolicyKernel> = points.iter().map(|p| p.kernel.clone()).collect();
    for point in points.iter_mut() {
        let cfg = GuaranteeConfig {
            lambda: point.lambda,
            s: point.s,
            ..*template
        };
        for kernel in &pool {
            if kernel == &point.kernel {
                continue;
            }
            // same rows, re-validated against this point's supply slack
            let Ok(moved) = PolicyKernel::new(
                kernel.k(),
                point.s,
                kernel.x_alphabet().clone(),
                kernel.z_alphabet().clone(),
                kernel.rows().to_vec(),
            ) else {
                continue;
            };
            let laws = induced_output_laws(model, &moved)?;
            let g = guarantee_check(&laws, &cfg, &model.prior)?;
            if !g.pass {
                continue;
            }
            let p = privacy_objective(&laws)?;
            if !point.feasible || p.rate < point.privacy_rate {
                point.privacy_rate = p.rate;
                point.utility_rate = g.utility_rate;
                point.kernel = moved;
                point.feasible = true;
            }
        }
    }
    Ok(())
}

/// Outcome of [`monotonicity_check`].
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub k: usize,
    pub l: usize,
    /// Optimum at block length `k`.
    pub short: TradeoffPoint,
    /// Optimum at block length `k * l`.
    pub long: TradeoffPoint,
    /// Privacy rate of the `l`-fold blockwise extension of the short optimum.
    pub extended_rate: f64,
    /// Whether that extension meets the guarantee at length `k * l`.
    pub extended_feasible: bool,
    pub slack: f64,
}

impl MonotonicityReport {
    /// `opt_k >= opt_kl - slack`, with both optima feasible.
    pub fn holds(&self) -> bool {
        self.short.feasible
            && self.long.feasible
            && self.short.privacy_rate >= self.long.privacy_rate - self.slack
    }
}

impl fmt::Display for MonotonicityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "opt at k={}: {:.12}", self.k, self.short.privacy_rate)?;
        writeln!(
            f,
            "opt at n={}: {:.12}",
            self.k * self.l,
            self.long.privacy_rate
        )?;
        writeln!(
            f,
            "extension of the k-optimum: rate {:.12}, feasible {}",
            self.extended_rate, self.extended_feasible
        )?;
        write!(
            f,
            "opt_k >= opt_n - {}: {}",
            self.slack,
            if self.holds() { "holds" } else { "violated" }
        )
    }
}

/// Optimizes at block lengths `k` and `k * l` and compares. The longer
/// search is seeded with the blockwise extension of the shorter optimum.
pub fn monotonicity_check(
    model: &SourceModel,
    cfg: &GuaranteeConfig,
    l: usize,
    search: &SearchConfig,
) -> Result<MonotonicityReport> {
    if l == 0 {
        return Err(Error::InvalidConfig(
            "repetition count must be positive".into(),
        ));
    }
    let short = optimize_policy(model, cfg, search)?;
    let long_cfg = GuaranteeConfig {
        k: cfg.k * l,
        ..*cfg
    };
    let extended = blockwise_extend(&short.kernel, l)?;
    let ext_point = finish(model, &long_cfg, extended.clone())?;
    let long = if l == 1 {
        short.clone()
    } else {
        optimize_policy_with_seeds(model, &long_cfg, search, &[extended])?
    };
    Ok(MonotonicityReport {
        k: cfg.k,
        l,
        short,
        long,
        extended_rate: ext_point.privacy_rate,
        extended_feasible: ext_point.feasible,
        slack: MONOTONICITY_SLACK,
    })
}

/// Best finite-block-length privacy rate over `k = 1..=k_max`.
///
/// This is an upper bound on the asymptotic minimal privacy exponent, which
/// is an infimum over all block lengths; it is never that infimum itself.
#[derive(Clone, Debug)]
pub struct AsymptoticBound {
    /// Optimum at each block length, `per_k[i]` for `k = i + 1`.
    pub per_k: Vec<TradeoffPoint>,
    /// Index into `per_k` of the smallest feasible privacy rate.
    pub best: Option<usize>,
}

impl AsymptoticBound {
    pub fn best_point(&self) -> Option<&TradeoffPoint> {
        self.best.map(|i| &self.per_k[i])
    }

    /// The upper bound, or `None` when no block length was feasible.
    pub fn upper_bound(&self) -> Option<f64> {
        self.best_point().map(|p| p.privacy_rate)
    }
}

impl fmt::Display for AsymptoticBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.per_k {
            writeln!(
                f,
                "k={}: privacy rate {:.12} (feasible {})",
                p.k, p.privacy_rate, p.feasible
            )?;
        }
        match self.best_point() {
            Some(p) => write!(
                f,
                "upper bound on the asymptotic privacy exponent: {:.12} (attained at k={})",
                p.privacy_rate, p.k
            ),
            None => write!(f, "no block length met the guarantee"),
        }
    }
}

/// Optimizes every block length up to `k_max`. Longer searches are seeded
/// with blockwise extensions of the optima at each divisor length.
pub fn asymptotic_guarantee(
    model: &SourceModel,
    template: &GuaranteeConfig,
    k_max: usize,
    search: &SearchConfig,
) -> Result<AsymptoticBound> {
    if k_max == 0 {
        return Err(Error::InvalidConfig("k_max must be positive".into()));
    }
    let mut per_k: Vec<TradeoffPoint> = Vec::with_capacity(k_max);
    let mut best: Option<usize> = None;
    for k in 1..=k_max {
        let cfg = GuaranteeConfig { k, ..*template };
        let mut seeds = Vec::new();
        for d in 1..k {
            if k % d == 0 && per_k[d - 1].feasible {
                seeds.push(blockwise_extend(&per_k[d - 1].kernel, k / d)?);
            }
        }
        let point = optimize_policy_with_seeds(model, &cfg, search, &seeds)?;
        let improves = point.feasible
            && best.is_none_or(|b: usize| point.privacy_rate < per_k[b].privacy_rate);
        per_k.push(point);
        if improves {
            best = Some(k - 1);
        }
    }
    Ok(AsymptoticBound { per_k, best })
}
