//! Seeded consistency suites tying the independent evaluators together.
//!
//! Each suite draws its random instances from a ChaCha stream seeded by the
//! caller, so a `(suite, trials, seed)` triple always yields the same report.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bayes::{
    exact_min_error, exact_min_error_iid, exponent_chernoff, exponent_lower_bound_repeated,
    exponent_sanov, exponent_t, TestTarget,
};
use crate::error::{Error, Result};
use crate::model::{blockwise_extend, induced_output_laws, OutputLaws, SourceModel};
use crate::optimizer::{
    monotonicity_check, privacy_objective, random_kernel, utility_rate, GuaranteeConfig,
    SearchConfig,
};
use crate::probkit::{chernoff_information, primal_t_oracle, t_divergence, Pmf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// `min(T(a||b;c), T(a||c;b)) = min(C(a,b), C(a,c))` on random triples.
    OrderingIdentity,
    /// Dual T search against the brute-force primal on binary triples.
    PrimalDual,
    /// Chernoff, T and Sanov forms of the exponent on random binary models.
    Exponents,
    /// Finite-length lower bound against exact errors of random kernels.
    FiniteBound,
    /// Empirical exponents at growing horizons approach the limit.
    Convergence,
    /// Blockwise extension induces product laws and keeps both rates.
    Tensorization,
    /// Optimum at `k = 1` against `n = 2`.
    Monotonicity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::OrderingIdentity,
        Suite::PrimalDual,
        Suite::Exponents,
        Suite::FiniteBound,
        Suite::Convergence,
        Suite::Tensorization,
        Suite::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OrderingIdentity => "ordering-identity",
            Suite::PrimalDual => "primal-dual",
            Suite::Exponents => "exponents",
            Suite::FiniteBound => "finite-bound",
            Suite::Convergence => "convergence",
            Suite::Tensorization => "tensorization",
            Suite::Monotonicity => "monotonicity",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::OrderingIdentity => 200,
            Suite::PrimalDual => 50,
            Suite::Exponents => 20,
            Suite::FiniteBound => 50,
            Suite::Tensorization => 50,
            Suite::Convergence | Suite::Monotonicity => 1,
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::OrderingIdentity => 1e-6,
            Suite::PrimalDual => 1e-3,
            Suite::Exponents => 2e-3,
            Suite::FiniteBound => 0.0,
            Suite::Convergence => 0.02,
            Suite::Tensorization => 1e-9,
            Suite::Monotonicity => crate::optimizer::MONOTONICITY_SLACK,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub checks: usize,
    pub failures: usize,
    /// Largest deviation seen, in the suite's own units. For `finite-bound` this is
    /// the largest amount by which a bound exceeded the exact exponent
    /// (negative when every bound held).
    pub worst_delta: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} {}  trials={} checks={} failures={} worst_delta={:.3e} tolerance={:.0e}",
            self.suite.name(),
            if self.passed() { "PASS" } else { "FAIL" },
            self.trials,
            self.checks,
            self.failures,
            self.worst_delta,
            self.tolerance
        )
    }
}

struct Tally {
    checks: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, delta: f64, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        if delta > self.worst || delta.is_nan() {
            self.worst = delta;
        }
    }

    fn finish(self, suite: Suite, trials: usize) -> SuiteReport {
        SuiteReport {
            suite,
            trials,
            checks: self.checks,
            failures: self.failures,
            worst_delta: self.worst,
            tolerance: suite.tolerance(),
        }
    }
}

/// Full-support pmf with weights drawn uniformly from `[0.02, 1)` and
/// normalized.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Pmf {
    let w: Vec<f64> = (0..size).map(|_| rng.random_range(0.02..1.0)).collect();
    let total: f64 = w.iter().sum();
    Pmf::from_probs(w.into_iter().map(|x| x / total).collect()).expect("normalized")
}

/// Binary per-slot laws with each `P(Y=0)` uniform in `[0.05, 0.95]`.
pub fn random_binary_laws<R: Rng + ?Sized>(rng: &mut R) -> OutputLaws {
    let alphabet = crate::model::Alphabet::new(vec![0.0, 1.0]).expect("sorted");
    let weights = [0, 1, 2, 3].map(|_| {
        let p = rng.random_range(0.05..0.95);
        vec![p, 1.0 - p]
    });
    OutputLaws::new(1, alphabet, weights).expect("normalized")
}

/// Supply slack under which the identity policy is admissible.
pub fn identity_slack(model: &SourceModel) -> f64 {
    model
        .z_alphabet
        .values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Runs `suite` with `trials` random instances (its default when `None`).
pub fn run_suite(
    suite: Suite,
    model: &SourceModel,
    trials: Option<usize>,
    seed: u64,
) -> Result<SuiteReport> {
    let trials = trials.unwrap_or(suite.default_trials());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    let tol = suite.tolerance();
    match suite {
        Suite::OrderingIdentity => {
            for _ in 0..trials {
                let size = rng.random_range(2..=5);
                let [a, b, c] = [0, 1, 2].map(|_| random_pmf(&mut rng, size));
                let t = t_divergence(&a, &b, &c)?
                    .value
                    .min(t_divergence(&a, &c, &b)?.value);
                let ch = chernoff_information(&a, &b)?
                    .value
                    .min(chernoff_information(&a, &c)?.value);
                let d = (t - ch).abs();
                tally.record(d, d <= tol);
            }
        }
        Suite::PrimalDual => {
            for _ in 0..trials {
                let [a, b, c] = [0, 1, 2].map(|_| random_pmf(&mut rng, 2));
                let dual = t_divergence(&a, &b, &c)?.value;
                let primal = primal_t_oracle(&a, &b, &c, 1e-3)?.value;
                let d = (dual - primal).abs();
                tally.record(d, d <= tol);
            }
        }
        Suite::Exponents => {
            let mut cases = vec![OutputLaws::from_source(model)];
            cases.extend((0..trials).map(|_| random_binary_laws(&mut rng)));
            for laws in &cases {
                for target in TestTarget::ALL {
                    let c = exponent_chernoff(laws, target)?.value;
                    let t = exponent_t(laws, target)?.value;
                    let s = exponent_sanov(laws, target, 1e-3)?.value;
                    let d = (c - t).abs().max((c - s).abs());
                    tally.record(d, d <= tol);
                }
            }
        }
        Suite::FiniteBound => {
            let s = identity_slack(model);
            for _ in 0..trials {
                let kernel = random_kernel(model, 1, s, &mut rng)?;
                let laws = induced_output_laws(model, &kernel)?;
                for target in TestTarget::ALL {
                    for n in 1..=10 {
                        let e = exact_min_error(&laws, &model.prior, target, n)?.exponent();
                        let b = exponent_lower_bound_repeated(&laws, &model.prior, target, n)?;
                        tally.record(b - e, e >= b);
                    }
                    for n in [100, 400] {
                        let e = exact_min_error_iid(&laws, &model.prior, target, n)?.exponent();
                        let b = exponent_lower_bound_repeated(&laws, &model.prior, target, n)?;
                        tally.record(b - e, e >= b);
                    }
                }
            }
        }
        Suite::Convergence => {
            let laws = OutputLaws::from_source(model);
            for target in TestTarget::ALL {
                let limit = exponent_chernoff(&laws, target)?.value;
                let gaps = [100, 200, 400, 800].map(|n| {
                    exact_min_error_iid(&laws, &model.prior, target, n)
                        .map(|e| (e.exponent() - limit).abs())
                });
                let gaps: Vec<f64> = gaps.into_iter().collect::<Result<_>>()?;
                let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
                tally.record(gaps[3], gaps[3] <= tol && decreasing);
            }
        }
        Suite::Tensorization => {
            let s = identity_slack(model);
            for _ in 0..trials {
                let kernel = random_kernel(model, 1, s, &mut rng)?;
                let laws = induced_output_laws(model, &kernel)?;
                for l in [2, 3] {
                    let ext = induced_output_laws(model, &blockwise_extend(&kernel, l)?)?;
                    let prod = laws.power(l)?;
                    let mut d: f64 = 0.0;
                    for (a, b) in ext.laws().iter().zip(prod.laws()) {
                        for (x, y) in a.probs().iter().zip(b.probs()) {
                            d = d.max((x - y).abs());
                        }
                    }
                    d = d
                        .max((privacy_objective(&ext)?.rate - privacy_objective(&laws)?.rate).abs())
                        .max((utility_rate(&ext)? - utility_rate(&laws)?).abs());
                    tally.record(d, d <= tol);
                }
            }
        }
        Suite::Monotonicity => {
            let cfg = GuaranteeConfig::new(0.1, 1, identity_slack(model));
            let search = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            let r = monotonicity_check(model, &cfg, 2, &search)?;
            let same_rate = (r.extended_rate - r.short.privacy_rate).abs() <= 1e-9;
            tally.record(
                r.long.privacy_rate - r.short.privacy_rate,
                r.holds() && r.extended_feasible && same_rate,
            );
        }
    }
    Ok(tally.finish(suite, trials))
}
