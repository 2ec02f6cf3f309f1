//! Asymptotic error exponents of the composite tests.
//!
//! Three independent characterizations are provided: the minimal Chernoff
//! information over cross-hypothesis pairs, the minimal T-divergence over
//! the eight composite terms, and a brute-force constrained KL minimization
//! over the type-test decision regions.

use crate::error::{Error, Result};
use crate::model::{OutputLaws, Prior};
use crate::probkit::simplex::Compositions;
use crate::probkit::{
    check_grid, chernoff_slices, for_each_lattice_edge, grid_divisions, t_divergence,
};

use super::decision::side_divergences;
use super::target::{ExponentMethod, ExponentReport, TestTarget};

/// `((u, p), (u', p'))`
pub type LawPair = ((usize, usize), (usize, usize));

fn pair_of(i: usize) -> (usize, usize) {
    (i / 2, i % 2)
}

fn require_full_support(laws: &OutputLaws) -> Result<()> {
    if laws.all_full_support() {
        Ok(())
    } else {
        Err(Error::Support("exponent requires full-support laws".into()))
    }
}

fn require_single_slot(laws: &OutputLaws) -> Result<()> {
    if laws.k() == 1 {
        Ok(())
    } else {
        Err(Error::NotSingleSlot(laws.k()))
    }
}

/// `min C(a || b)` over laws `a` on side 1 and `b` on side 0, for laws over
/// blocks of any length. Zeros are handled on the common support, so the
/// value is `+inf` when some pair has disjoint supports.
///
/// Returns the value (per block, not per slot) and the attaining pair.
pub fn min_grouped_chernoff(laws: &OutputLaws, target: TestTarget) -> Result<(f64, LawPair)> {
    let mut best = (f64::INFINITY, (target.side(1)[0], target.side(0)[0]));
    for a in target.side_indices(1) {
        for b in target.side_indices(0) {
            let c = chernoff_slices(laws.laws()[a].probs(), laws.laws()[b].probs())?;
            if c.value < best.0 {
                best = (c.value, (pair_of(a), pair_of(b)));
            }
        }
    }
    Ok(best)
}

/// Minimal Chernoff information between the two sides of the test.
pub fn exponent_chernoff(block_laws: &OutputLaws, target: TestTarget) -> Result<ExponentReport> {
    require_single_slot(block_laws)?;
    require_full_support(block_laws)?;
    let (value, argmin_pair) = min_grouped_chernoff(block_laws, target)?;
    Ok(ExponentReport {
        value,
        argmin_pair,
        method: ExponentMethod::Chernoff,
    })
}

/// Minimum of `T(a || b; c)` over every law `a` and both orderings `(b, c)`
/// of the laws on the other side.
pub fn exponent_t(block_laws: &OutputLaws, target: TestTarget) -> Result<ExponentReport> {
    require_single_slot(block_laws)?;
    require_full_support(block_laws)?;
    let laws = block_laws.laws();
    let mut best = ExponentReport {
        value: f64::INFINITY,
        argmin_pair: ((0, 0), (0, 0)),
        method: ExponentMethod::Tform,
    };
    for h in 0..2 {
        let [o1, o2] = target.side_indices(1 - h);
        for a in target.side_indices(h) {
            for (b, c) in [(o1, o2), (o2, o1)] {
                let t = t_divergence(&laws[a], &laws[b], &laws[c])?;
                if t.value < best.value {
                    best.value = t.value;
                    best.argmin_pair = (pair_of(a), pair_of(b));
                }
            }
        }
    }
    Ok(best)
}

/// Bisection steps used to locate a region boundary on a grid edge.
const BOUNDARY_BISECTIONS: usize = 60;

/// Brute-force exponent from the type test's decision regions.
///
/// Every lattice pmf `t` (spacing `grid_step`) is charged the divergence to
/// the closest law on the side the type test rejects; points on the
/// boundary belong to both regions. Where the decision flips along a grid
/// edge the boundary point is located by bisection and evaluated too.
pub fn exponent_sanov(
    block_laws: &OutputLaws,
    target: TestTarget,
    grid_step: f64,
) -> Result<ExponentReport> {
    require_single_slot(block_laws)?;
    require_full_support(block_laws)?;
    let d = block_laws.block_count();
    let m = grid_divisions(grid_step)?;
    check_grid(d, m)?;
    let scale = 1.0 / m as f64;

    // Charge for t: rejected side's divergence; on the boundary both agree.
    let charge = |t: &[f64]| -> (f64, usize) {
        let [d0, d1] = side_divergences(t, block_laws, target);
        if d0 <= d1 {
            (d1, 1)
        } else {
            (d0, 0)
        }
    };
    let mut best = (f64::INFINITY, vec![0.0; d], 0usize);
    let consider = |t: &[f64], best: &mut (f64, Vec<f64>, usize)| {
        let (v, side) = charge(t);
        if v < best.0 {
            *best = (v, t.to_vec(), side);
        }
    };

    let mut t = vec![0.0; d];
    for c in Compositions::new(d, m) {
        for (ti, &ci) in t.iter_mut().zip(&c) {
            *ti = ci as f64 * scale;
        }
        consider(&t, &mut best);
    }

    let gap = |t: &[f64]| {
        let [d0, d1] = side_divergences(t, block_laws, target);
        d0 - d1
    };
    let (mut ta, mut tb, mut tx) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for_each_lattice_edge(d, m, |a, b| {
        for i in 0..d {
            ta[i] = a[i] as f64 * scale;
            tb[i] = b[i] as f64 * scale;
        }
        let (ga, gb) = (gap(&ta), gap(&tb));
        if !(ga.is_finite() && gb.is_finite())
            || ga.signum() == gb.signum()
            || ga == 0.0
            || gb == 0.0
        {
            return;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BOUNDARY_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            for i in 0..d {
                tx[i] = ta[i] + mid * (tb[i] - ta[i]);
            }
            if gap(&tx).signum() == ga.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        for i in 0..d {
            tx[i] = (ta[i] + s * (tb[i] - ta[i])).max(0.0);
        }
        consider(&tx, &mut best);
    });

    // Attribute the minimum to the closest rejected-side law and the closest
    // accepted-side law at the minimizing type.
    let (value, t_star, rejected) = best;
    let closest = |h: usize| {
        target
            .side_indices(h)
            .into_iter()
            .map(|i| {
                (
                    crate::probkit::kl_slices(&t_star, block_laws.laws()[i].probs()),
                    i,
                )
            })
            .fold(
                (f64::INFINITY, 0),
                |acc, x| if x.0 < acc.0 { x } else { acc },
            )
            .1
    };
    Ok(ExponentReport {
        value,
        argmin_pair: (pair_of(closest(rejected)), pair_of(closest(1 - rejected))),
        method: ExponentMethod::Sanov,
    })
}

/// Finite-length lower bound on the error exponent for laws over blocks of
/// length `n = laws.k()`: `(min C - ln(8 p_max)) / n`. Negative for short
/// blocks, where it is vacuous but still valid.
pub fn exponent_lower_bound(laws: &OutputLaws, prior: &Prior, target: TestTarget) -> Result<f64> {
    exponent_lower_bound_repeated(laws, prior, target, 1)
}

/// [`exponent_lower_bound`] for `n_blocks` independent repetitions of
/// `laws`, without forming the product laws. Chernoff information
/// tensorizes, so the product's minimal value is `n_blocks` times the
/// per-block one.
pub fn exponent_lower_bound_repeated(
    laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
    n_blocks: usize,
) -> Result<f64> {
    if n_blocks == 0 {
        return Err(Error::InvalidConfig(
            "horizon must be at least one block".into(),
        ));
    }
    let (c, _) = min_grouped_chernoff(laws, target)?;
    let slots = (laws.k() * n_blocks) as f64;
    Ok((c * n_blocks as f64 - prior.correction()) / slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::exact::{exact_min_error, exact_min_error_iid};
    use crate::fixtures::example_model;
    use crate::model::Alphabet;
    use crate::probkit::{chernoff_information, Pmf};

    fn source_laws() -> OutputLaws {
        OutputLaws::from_source(&example_model())
    }

    fn identical() -> OutputLaws {
        let a = Alphabet::new(vec![0.0, 1.0]).unwrap();
        let w = vec![0.35, 0.65];
        OutputLaws::new(1, a, [w.clone(), w.clone(), w.clone(), w]).unwrap()
    }

    #[test]
    fn identical_laws_have_zero_exponent() {
        for t in TestTarget::ALL {
            assert_eq!(exponent_chernoff(&identical(), t).unwrap().value, 0.0);
            assert_eq!(exponent_t(&identical(), t).unwrap().value, 0.0);
            assert!(exponent_sanov(&identical(), t, 1e-2).unwrap().value.abs() < 1e-15);
        }
    }

    #[test]
    fn utility_exponent_of_the_fixture() {
        let b = |t| Pmf::bernoulli(t).unwrap();
        let candidates = [(0.8, 0.1), (0.8, 0.25), (0.9, 0.1), (0.9, 0.25)]
            .map(|(x, y)| chernoff_information(&b(x), &b(y)).unwrap().value);
        let min = candidates.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, candidates[1]);
        let r = exponent_chernoff(&source_laws(), TestTarget::Utility).unwrap();
        assert!((r.value - min).abs() < 1e-12);
        assert_eq!(r.argmin_pair, ((1, 0), (0, 1)));
    }

    #[test]
    fn three_characterizations_agree_on_the_fixture() {
        for t in TestTarget::ALL {
            let c = exponent_chernoff(&source_laws(), t).unwrap().value;
            let tf = exponent_t(&source_laws(), t).unwrap().value;
            let s = exponent_sanov(&source_laws(), t, 1e-3).unwrap().value;
            assert!((c - tf).abs() < 1e-6, "{t}: {c} vs {tf}");
            assert!((c - s).abs() < 2e-3, "{t}: {c} vs {s}");
        }
    }

    #[test]
    fn sanov_is_stable_across_resolutions() {
        for t in TestTarget::ALL {
            let coarse = exponent_sanov(&source_laws(), t, 1e-2).unwrap().value;
            let fine = exponent_sanov(&source_laws(), t, 1e-3).unwrap().value;
            assert!((coarse - fine).abs() <= 1e-2);
        }
    }

    #[test]
    fn sanov_rejects_large_alphabets() {
        let a = Alphabet::new((0..5).map(f64::from).collect()).unwrap();
        let w = vec![0.2; 5];
        let laws = OutputLaws::new(1, a, [w.clone(), w.clone(), w.clone(), w]).unwrap();
        assert!(matches!(
            exponent_sanov(&laws, TestTarget::Utility, 0.1),
            Err(Error::OversizedAlphabet { size: 5, .. })
        ));
    }

    #[test]
    fn lower_bound_single_slot_uniform_prior() {
        let (c, _) = min_grouped_chernoff(&source_laws(), TestTarget::Privacy).unwrap();
        let b =
            exponent_lower_bound(&source_laws(), &Prior::uniform(), TestTarget::Privacy).unwrap();
        assert!((b - (c - 2f64.ln())).abs() < 1e-15);
        let b = exponent_lower_bound(&identical(), &Prior::uniform(), TestTarget::Utility).unwrap();
        assert!((b + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_holds_against_exact_errors() {
        let laws = source_laws();
        for t in TestTarget::ALL {
            for n in 1..=8 {
                let prod = laws.power(n).unwrap();
                let bound = exponent_lower_bound(&prod, &Prior::uniform(), t).unwrap();
                let via_tensor =
                    exponent_lower_bound_repeated(&laws, &Prior::uniform(), t, n).unwrap();
                assert!((bound - via_tensor).abs() < 1e-9);
                let e = exact_min_error(&laws, &Prior::uniform(), t, n).unwrap();
                assert!(e.exponent() >= bound);
            }
            for n in [100, 400] {
                let bound = exponent_lower_bound_repeated(&laws, &Prior::uniform(), t, n).unwrap();
                let e = exact_min_error_iid(&laws, &Prior::uniform(), t, n).unwrap();
                assert!(e.exponent() >= bound);
            }
        }
    }
}
