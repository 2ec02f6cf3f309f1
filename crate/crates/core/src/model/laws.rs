use crate::error::{Error, Result};
use crate::probkit::Pmf;

use super::alphabet::Alphabet;
use super::policy::PolicyKernel;
use super::source::{law_index, SourceModel};

/// Tolerance on the total mass of an induced law.
pub const LAW_TOLERANCE: f64 = 1e-10;

/// The four output laws `p_{Y^k|u,p}` over blocks of `k` symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputLaws {
    k: usize,
    alphabet: Alphabet,
    laws: [Pmf; 4],
}

impl OutputLaws {
    /// Wraps four weight vectors over the `|X|^k` blocks of `alphabet`.
    pub fn new(k: usize, alphabet: Alphabet, weights: [Vec<f64>; 4]) -> Result<Self> {
        let labels = alphabet.block_labels(k);
        let mut laws = Vec::with_capacity(4);
        for w in weights {
            laws.push(Pmf::with_tolerance(labels.clone(), w, LAW_TOLERANCE)?);
        }
        Ok(OutputLaws {
            k,
            alphabet,
            laws: laws.try_into().expect("four laws"),
        })
    }

    /// Per-slot laws of the source itself, as seen through the identity map.
    pub fn from_source(model: &SourceModel) -> Self {
        OutputLaws {
            k: 1,
            alphabet: model.x_alphabet.clone(),
            laws: model.cond.clone(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn law(&self, u: usize, p: usize) -> &Pmf {
        &self.laws[law_index(u, p)]
    }

    pub fn laws(&self) -> &[Pmf; 4] {
        &self.laws
    }

    /// Number of output blocks.
    pub fn block_count(&self) -> usize {
        self.laws[0].len()
    }

    /// Laws of `l` independent consecutive blocks.
    pub fn power(&self, l: usize) -> Result<OutputLaws> {
        if l == 0 {
            return Err(Error::InvalidConfig("power must be positive".into()));
        }
        let b = self.block_count();
        let total = b.pow(l as u32);
        let weights = self.laws.clone().map(|law| {
            let w = law.probs();
            (0..total)
                .map(|mut idx| {
                    let mut prod = 1.0;
                    for _ in 0..l {
                        prod *= w[idx % b];
                        idx /= b;
                    }
                    prod
                })
                .collect()
        });
        OutputLaws::new(self.k * l, self.alphabet.clone(), weights)
    }

    pub fn all_full_support(&self) -> bool {
        self.laws.iter().all(Pmf::is_full_support)
    }
}

/// Probability of every length-`k` block under an i.i.d. per-slot law.
pub(crate) fn block_probs(per_slot: &[f64], k: usize) -> Vec<f64> {
    let a = per_slot.len();
    (0..a.pow(k as u32))
        .map(|mut idx| {
            let mut prod = 1.0;
            for _ in 0..k {
                prod *= per_slot[idx % a];
                idx /= a;
            }
            prod
        })
        .collect()
}

/// Input-pair weights `P(x^k | u, p) P(z^k)` for each of the four laws,
/// indexed like kernel rows.
pub(crate) fn input_pair_weights(model: &SourceModel, k: usize) -> [Vec<f64>; 4] {
    let pz = block_probs(model.noise.probs(), k);
    model.cond.clone().map(|c| {
        let px = block_probs(c.probs(), k);
        px.iter()
            .flat_map(|a| pz.iter().map(move |b| a * b))
            .collect()
    })
}

/// Pushes the source through the policy:
/// `p(y^k | u,p) = sum_{x,z} P(x^k|u,p) P(z^k) q(y^k | x^k, z^k)`.
pub fn induced_output_laws(model: &SourceModel, policy: &PolicyKernel) -> Result<OutputLaws> {
    if policy.x_alphabet() != &model.x_alphabet || policy.z_alphabet() != &model.z_alphabet {
        return Err(Error::AlphabetMismatch(
            "policy alphabets differ from the model's".into(),
        ));
    }
    policy.ensure_valid()?;
    let k = policy.k();
    let n_out = model.x_alphabet.block_count(k);
    let weights = input_pair_weights(model, k).map(|w| {
        let mut law = vec![0.0; n_out];
        for (row, &wi) in policy.rows().iter().zip(&w) {
            if wi == 0.0 {
                continue;
            }
            for (acc, q) in law.iter_mut().zip(row) {
                *acc += wi * q;
            }
        }
        law
    });
    OutputLaws::new(k, model.x_alphabet.clone(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_model;

    #[test]
    fn identity_reproduces_source() {
        let m = example_model();
        let id = PolicyKernel::identity(&m, 1, 1.0).unwrap();
        let laws = induced_output_laws(&m, &id).unwrap();
        for i in 0..4 {
            for (a, b) in laws.laws()[i].probs().iter().zip(m.cond[i].probs()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_block_is_product() {
        let m = example_model();
        let id = PolicyKernel::identity(&m, 2, 1.0).unwrap();
        let laws = induced_output_laws(&m, &id).unwrap();
        let prod = OutputLaws::from_source(&m).power(2).unwrap();
        for i in 0..4 {
            for (a, b) in laws.laws()[i].probs().iter().zip(prod.laws()[i].probs()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_policy_is_point_mass() {
        let m = example_model();
        let c = PolicyKernel::constant(&m, 1, 2.0, &[1.0]).unwrap();
        let laws = induced_output_laws(&m, &c).unwrap();
        for law in laws.laws() {
            assert_eq!(law.probs()[0], 0.0);
            assert!((law.probs()[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_parameter_family_matches_hand_expansion() {
        // s = 1: (1,0) -> 1 and (0,1) -> 0 are forced; a = q(0|0,0), b = q(0|1,1).
        // p(Y=0|u,p) = P(x=0) P(z=0) a + P(x=0) P(z=1) + P(x=1) P(z=1) b
        let m = example_model();
        let (a, b) = (0.37, 0.81);
        let pol = PolicyKernel::from_fn(&m, 1, 1.0, |x, z| match (x, z) {
            (0, 0) => vec![a, 1.0 - a],
            (0, 1) => vec![1.0, 0.0],
            (1, 0) => vec![0.0, 1.0],
            _ => vec![b, 1.0 - b],
        })
        .unwrap();
        let laws = induced_output_laws(&m, &pol).unwrap();
        let pz0 = 0.2;
        for (i, p0) in [0.1, 0.25, 0.8, 0.9].into_iter().enumerate() {
            let y0 = p0 * pz0 * a + p0 * (1.0 - pz0) + (1.0 - p0) * (1.0 - pz0) * b;
            assert!((laws.laws()[i].probs()[0] - y0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_policy() {
        let m = example_model();
        let rows = vec![vec![0.5, 0.5]; 4];
        let bad =
            PolicyKernel::unvalidated(1, 1.0, m.x_alphabet.clone(), m.z_alphabet.clone(), rows)
                .unwrap();
        assert!(matches!(
            induced_output_laws(&m, &bad),
            Err(Error::InvalidPolicy(_))
        ));
    }
}
