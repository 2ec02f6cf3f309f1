//! Exact minimal Bayes error probabilities at finite length.
//!
//! `alpha = sum_y min_h sum_{(u,p) on side h} p_{U,P}(u,p) p_{Y|u,p}(y)`.
//! Two independent routes compute it: enumeration of every output sequence
//! (any block length, small horizons), and a sum over type classes for
//! i.i.d. single-slot laws, where each class contributes its multinomial
//! size times the per-sequence probabilities.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::model::{OutputLaws, Prior};
use crate::probkit::log_sum_exp;
use crate::probkit::simplex::{composition_count, Compositions};

use super::decision::side_divergences;
use super::target::{TestTarget, TypeVector};

/// Default cap on the number of enumerated sequences, `2^22`.
pub const ENUMERATION_CAP: u128 = 1 << 22;

/// Cap on the number of type classes summed by the i.i.d. path.
pub const TYPE_CLASS_CAP: u128 = 50_000_000;

/// A minimal error probability at horizon `slots`, with its logarithm kept
/// separately so tiny values keep their exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactError {
    pub alpha: f64,
    pub ln_alpha: f64,
    pub slots: usize,
}

impl ExactError {
    /// `(1/n) ln(1/alpha)` in nats per slot.
    pub fn exponent(&self) -> f64 {
        -self.ln_alpha / self.slots as f64
    }
}

fn side_weights(prior: &Prior, target: TestTarget) -> [[(usize, f64); 2]; 2] {
    [0, 1].map(|h| {
        let idx = target.side_indices(h);
        let pairs = target.side(h);
        [0, 1].map(|j| (idx[j], prior.get(pairs[j].0, pairs[j].1)))
    })
}

pub fn exact_min_error(
    laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n_blocks: usize,
) -> Result<ExactError> {
    exact_min_error_with_cap(laws, prior, target, n_blocks, ENUMERATION_CAP)
}

/// Exact error over `n_blocks` i.i.d. blocks by enumerating every sequence.
pub fn exact_min_error_with_cap(
    laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n_blocks: usize,
    cap: u128,
) -> Result<ExactError> {
    if n_blocks == 0 {
        return Err(Error::InvalidConfig(
            "horizon must be at least one block".into(),
        ));
    }
    let b = laws.block_count();
    let sequences = (b as u128)
        .checked_pow(n_blocks as u32)
        .unwrap_or(u128::MAX);
    if sequences > cap {
        return Err(Error::EnumerationCap { sequences, cap });
    }
    let probs: [&[f64]; 4] = [0, 1, 2, 3].map(|i| laws.laws()[i].probs());
    let sides = side_weights(prior, target);

    // Depth-first over sequences with running products per law.
    fn walk(
        depth: usize,
        n: usize,
        prefix: [f64; 4],
        probs: &[&[f64]; 4],
        sides: &[[(usize, f64); 2]; 2],
        acc: &mut f64,
    ) {
        if depth == n {
            let g = sides.map(|s| s.iter().map(|&(i, w)| w * prefix[i]).sum::<f64>());
            *acc += g[0].min(g[1]);
            return;
        }
        for y in 0..probs[0].len() {
            let next = [0, 1, 2, 3].map(|i| prefix[i] * probs[i][y]);
            if next.iter().all(|&v| v == 0.0) {
                continue;
            }
            walk(depth + 1, n, next, probs, sides, acc);
        }
    }

    let mut alpha = 0.0;
    walk(0, n_blocks, [1.0; 4], &probs, &sides, &mut alpha);
    Ok(ExactError {
        alpha,
        ln_alpha: alpha.ln(),
        slots: laws.k() * n_blocks,
    })
}

/// `ln` of the probability of one sequence with the given counts.
fn ln_sequence_prob(counts: &[u64], ln_probs: &[f64]) -> f64 {
    counts
        .iter()
        .zip(ln_probs)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &lp)| c as f64 * lp)
        .sum()
}

/// Per-type terms of the exact i.i.d. error: for each type class, the log
/// class size, the grouped log-likelihoods of one member sequence, and the
/// type itself.
fn for_each_type_class(
    block_laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n: usize,
    mut visit: impl FnMut(&[u64], f64, [f64; 2]),
) -> Result<()> {
    if block_laws.k() != 1 {
        return Err(Error::NotSingleSlot(block_laws.k()));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("horizon must be positive".into()));
    }
    let d = block_laws.block_count();
    let classes = composition_count(d, n as u64);
    if classes > TYPE_CLASS_CAP {
        return Err(Error::EnumerationCap {
            sequences: classes,
            cap: TYPE_CLASS_CAP,
        });
    }
    let ln_probs: [Vec<f64>; 4] = [0, 1, 2, 3].map(|i| {
        block_laws.laws()[i]
            .probs()
            .iter()
            .map(|p| p.ln())
            .collect()
    });
    let sides = side_weights(prior, target);
    let ln_n_fact = ln_factorial(n as u64);
    for counts in Compositions::new(d, n as u64) {
        let ln_class = ln_n_fact - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>();
        let grouped = sides.map(|s| {
            log_sum_exp(
                s.iter()
                    .map(|&(i, w)| w.ln() + ln_sequence_prob(&counts, &ln_probs[i])),
            )
        });
        visit(&counts, ln_class, grouped);
    }
    Ok(())
}

/// Exact error of `n` i.i.d. single-slot observations via type classes,
/// accumulated in log space.
pub fn exact_min_error_iid(
    block_laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n: usize,
) -> Result<ExactError> {
    let mut terms = Vec::new();
    for_each_type_class(block_laws, prior, target, n, |_, ln_class, g| {
        terms.push(ln_class + g[0].min(g[1]));
    })?;
    let ln_alpha = log_sum_exp(terms.iter().copied());
    Ok(ExactError {
        alpha: ln_alpha.exp(),
        ln_alpha,
        slots: n,
    })
}

/// Probability, under the prior mixture, that the Bayes-optimal decision
/// and the type-based test disagree after `n` i.i.d. observations.
pub fn decision_disagreement(
    block_laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n: usize,
) -> Result<f64> {
    let mut terms = Vec::new();
    let mut failure = None;
    for_each_type_class(block_laws, prior, target, n, |counts, ln_class, g| {
        let bayes = if g[0] >= g[1] { 0 } else { 1 };
        let t = TypeVector::new(counts.to_vec()).expect("nonempty type");
        let [d0, d1] = side_divergences(&t.empirical(), block_laws, target);
        if d0.is_nan() || d1.is_nan() {
            failure.get_or_insert(Error::Numerical("NaN divergence in type test".into()));
        }
        let typed = if d0 <= d1 { 0 } else { 1 };
        if bayes != typed {
            // mixture probability of the class: sum over both sides
            terms.push(ln_class + log_sum_exp(g));
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(log_sum_exp(terms).exp())
}
