use crate::error::{Error, Result};
use crate::model::{OutputLaws, Prior};
use crate::probkit::{kl_slices, log_sum_exp};

use super::target::{TestTarget, TypeVector};

/// Bayes-optimal decision on an observed slot sequence.
///
/// Decides 0 iff the prior-weighted likelihood of side 0 is at least that
/// of side 1; ties go to 0.
pub fn map_decision(
    y_seq: &[f64],
    laws: &OutputLaws,
    prior: &Prior,
    target: TestTarget,
) -> Result<u8> {
    map_decision_weighted(y_seq, laws, prior.joint(), target)
}

/// [`map_decision`] with arbitrary nonnegative prior weights; only their
/// ratios matter.
pub fn map_decision_weighted(
    y_seq: &[f64],
    laws: &OutputLaws,
    weights: [[f64; 2]; 2],
    target: TestTarget,
) -> Result<u8> {
    let k = laws.k();
    if y_seq.is_empty() || !y_seq.len().is_multiple_of(k) {
        return Err(Error::LengthMismatch(format!(
            "sequence of {} slots is not a positive multiple of the block length {k}",
            y_seq.len()
        )));
    }
    let blocks = y_seq
        .chunks(k)
        .map(|b| laws.alphabet().block_index(b))
        .collect::<Result<Vec<_>>>()?;
    let log_lik = laws.laws().clone().map(|law| {
        let w = law.probs();
        blocks.iter().map(|&b| w[b].ln()).sum::<f64>()
    });
    let grouped = |h: usize| {
        log_sum_exp(
            target
                .side(h)
                .into_iter()
                .map(|(u, p)| weights[u][p].ln() + log_lik[2 * u + p]),
        )
    };
    Ok(if grouped(0) >= grouped(1) { 0 } else { 1 })
}

/// `min_{law on side h} D(t || law)` for both sides.
pub(crate) fn side_divergences(t: &[f64], laws: &OutputLaws, target: TestTarget) -> [f64; 2] {
    [0, 1].map(|h| {
        target
            .side_indices(h)
            .into_iter()
            .map(|i| kl_slices(t, laws.laws()[i].probs()))
            .fold(f64::INFINITY, f64::min)
    })
}

/// The asymptotic type-based test: 0 iff the type is at least as close (in
/// KL) to side 0 as to side 1.
pub fn type_test_decision(
    t: &TypeVector,
    block_laws: &OutputLaws,
    target: TestTarget,
) -> Result<u8> {
    if block_laws.k() != 1 {
        return Err(Error::NotSingleSlot(block_laws.k()));
    }
    if t.counts().len() != block_laws.block_count() {
        return Err(Error::AlphabetMismatch(format!(
            "type over {} symbols, laws over {}",
            t.counts().len(),
            block_laws.block_count()
        )));
    }
    let [d0, d1] = side_divergences(&t.empirical(), block_laws, target);
    Ok(if d0 <= d1 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_model;
    use crate::model::Alphabet;

    fn source_laws() -> OutputLaws {
        OutputLaws::from_source(&example_model())
    }

    #[test]
    fn equal_laws_always_decide_zero() {
        let a = Alphabet::new(vec![0.0, 1.0]).unwrap();
        let w = vec![0.3, 0.7];
        let laws = OutputLaws::new(1, a, [w.clone(), w.clone(), w.clone(), w]).unwrap();
        for seq in [vec![0.0], vec![1.0], vec![0.0, 1.0, 1.0]] {
            for t in TestTarget::ALL {
                assert_eq!(map_decision(&seq, &laws, &Prior::uniform(), t).unwrap(), 0);
            }
        }
    }

    #[test]
    fn single_observation_of_zero() {
        // u=0 mass at 0: 0.25 (0.1 + 0.25) = 0.0875; u=1: 0.25 (0.8 + 0.9) = 0.425
        let laws = source_laws();
        assert_eq!(
            map_decision(&[0.0], &laws, &Prior::uniform(), TestTarget::Utility).unwrap(),
            1
        );
        // p=0 at 0: 0.25 (0.1 + 0.8) = 0.225; p=1: 0.25 (0.25 + 0.9) = 0.2875
        assert_eq!(
            map_decision(&[0.0], &laws, &Prior::uniform(), TestTarget::Privacy).unwrap(),
            1
        );
        // y=1: u=0: 0.25 (0.9 + 0.75), u=1: 0.25 (0.2 + 0.1)
        assert_eq!(
            map_decision(&[1.0], &laws, &Prior::uniform(), TestTarget::Utility).unwrap(),
            0
        );
    }

    #[test]
    fn rescaling_prior_does_not_change_decisions() {
        let laws = source_laws();
        let w = [[0.1, 0.2], [0.3, 0.4]];
        let scaled = w.map(|r| r.map(|x| x * 17.5));
        for seq in [vec![0.0], vec![1.0, 0.0], vec![1.0, 1.0, 0.0, 0.0, 1.0]] {
            for t in TestTarget::ALL {
                assert_eq!(
                    map_decision_weighted(&seq, &laws, w, t).unwrap(),
                    map_decision_weighted(&seq, &laws, scaled, t).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_unknown_symbol_and_bad_length() {
        let laws = source_laws();
        assert!(matches!(
            map_decision(&[2.0], &laws, &Prior::uniform(), TestTarget::Utility),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(map_decision(&[], &laws, &Prior::uniform(), TestTarget::Utility).is_err());
    }

    #[test]
    fn type_test_on_the_laws_themselves() {
        // TypeVector counts reproducing 0.1/0.9 and 0.8/0.2 exactly
        let laws = source_laws();
        let near0 = TypeVector::new(vec![1, 9]).unwrap();
        let near1 = TypeVector::new(vec![8, 2]).unwrap();
        assert_eq!(
            type_test_decision(&near0, &laws, TestTarget::Utility).unwrap(),
            0
        );
        assert_eq!(
            type_test_decision(&near1, &laws, TestTarget::Utility).unwrap(),
            1
        );
        let p1 = TypeVector::new(vec![1, 3]).unwrap(); // law (0,1)
        assert_eq!(
            type_test_decision(&p1, &laws, TestTarget::Privacy).unwrap(),
            1
        );
    }
}
