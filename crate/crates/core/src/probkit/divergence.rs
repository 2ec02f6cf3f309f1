use crate::error::{Error, Result};

use super::pmf::Pmf;
use super::search::golden_section_max;

/// Argument tolerance of every one-dimensional dual search.
pub const DUAL_TOLERANCE: f64 = 1e-10;

/// Rounding slack below zero that is silently clamped for nonnegative quantities.
pub const CLAMP_SLACK: f64 = 1e-12;

/// How divergences treat zero weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SupportMode {
    /// Every argument must have full support.
    #[default]
    Full,
    /// Zeros are allowed. KL uses `0 ln 0 = 0` and fails only where the
    /// first argument has mass the second lacks; Chernoff information is
    /// taken over the common support and is infinite when that is empty.
    Relaxed,
}

/// Chernoff information together with its optimal exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chernoff {
    pub value: f64,
    pub mu: f64,
}

pub(crate) fn require_full(p: &[f64], which: &str) -> Result<()> {
    match p.iter().position(|&w| w <= 0.0) {
        Some(i) => Err(Error::Support(format!(
            "{which} has zero mass at index {i}; full support is required"
        ))),
        None => Ok(()),
    }
}

/// Clamp rounding noise below zero; larger negative values are an error.
pub(crate) fn clamp_nonnegative(value: f64, what: &str) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else if value == 0.0 {
        // normalizes -0.0
        Ok(0.0)
    } else if value >= -CLAMP_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "{what} evaluated to {value:e} < 0"
        )))
    }
}

/// `ln sum exp(x_i)`, with `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let s: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

/// `sum p ln(p / q)` over aligned slices with `0 ln 0 = 0`; `+inf` when `p`
/// has mass where `q` has none.
pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).ln();
        }
    }
    acc
}

pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    kl_divergence_with(p, q, SupportMode::Full)
}

/// Kullback-Leibler divergence `D(p || q)` in nats.
pub fn kl_divergence_with(p: &Pmf, q: &Pmf, mode: SupportMode) -> Result<f64> {
    let qw = p.aligned(q)?;
    match mode {
        SupportMode::Full => {
            require_full(p.probs(), "first pmf")?;
            require_full(&qw, "second pmf")?;
        }
        SupportMode::Relaxed => {
            if let Some(i) = p
                .probs()
                .iter()
                .zip(qw.iter())
                .position(|(&a, &b)| a > 0.0 && b <= 0.0)
            {
                return Err(Error::Support(format!(
                    "second pmf has zero mass at {:?} where the first has mass",
                    p.labels()[i]
                )));
            }
        }
    }
    clamp_nonnegative(kl_slices(p.probs(), &qw), "KL divergence")
}

/// `-ln sum_a q1(a)^mu q2(a)^(1 - mu)` restricted to the common support,
/// from precomputed logarithms.
#[inline]
fn chernoff_objective(mu: f64, logs: &[(f64, f64)]) -> f64 {
    -log_sum_exp(logs.iter().map(|&(l1, l2)| mu * l1 + (1.0 - mu) * l2))
}

/// Chernoff information over aligned slices, zeros handled as in
/// [`SupportMode::Relaxed`].
pub(crate) fn chernoff_slices(q1: &[f64], q2: &[f64]) -> Result<Chernoff> {
    let logs: Vec<(f64, f64)> = q1
        .iter()
        .zip(q2)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if logs.is_empty() {
        // Disjoint supports: a single observation identifies the law.
        return Ok(Chernoff {
            value: f64::INFINITY,
            mu: 0.5,
        });
    }
    if logs.iter().all(|(l1, l2)| l1 == l2) {
        return Ok(Chernoff {
            value: 0.0,
            mu: 0.5,
        });
    }
    let (mu, value) =
        golden_section_max(|m| chernoff_objective(m, &logs), 0.0, 1.0, DUAL_TOLERANCE);
    // The objective's limits at the endpoints are nonnegative; keep them as
    // candidates so a boundary optimum is reported exactly.
    let mut best = Chernoff { value, mu };
    for end in [0.0, 1.0] {
        let v = chernoff_objective(end, &logs);
        if v > best.value {
            best = Chernoff { value: v, mu: end };
        }
    }
    best.value = clamp_nonnegative(best.value, "Chernoff information")?;
    Ok(best)
}

pub fn chernoff_information(q1: &Pmf, q2: &Pmf) -> Result<Chernoff> {
    chernoff_information_with(q1, q2, SupportMode::Full)
}

/// Chernoff information `max_{mu in [0,1]} -ln sum q1^mu q2^(1-mu)` in nats.
pub fn chernoff_information_with(q1: &Pmf, q2: &Pmf, mode: SupportMode) -> Result<Chernoff> {
    let q2w = q1.aligned(q2)?;
    if mode == SupportMode::Full {
        require_full(q1.probs(), "first pmf")?;
        require_full(&q2w, "second pmf")?;
    }
    chernoff_slices(q1.probs(), &q2w)
}
