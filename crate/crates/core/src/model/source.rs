use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probkit::{Pmf, MASS_TOLERANCE};

use super::alphabet::Alphabet;

/// Index of the law for hypothesis pair `(u, p)` in every four-law array.
#[inline]
pub fn law_index(u: usize, p: usize) -> usize {
    2 * u + p
}

/// Joint prior `p_{U,P}` over the four hypothesis pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prior {
    joint: [[f64; 2]; 2],
}

impl Prior {
    pub fn new(joint: [[f64; 2]; 2]) -> Result<Self> {
        let flat = joint.iter().flatten();
        if flat.clone().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidModel(format!(
                "prior {joint:?} has a negative entry"
            )));
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidModel(format!("prior sums to {total}, not 1")));
        }
        let prior = Prior { joint };
        debug_assert!(prior.p_max() >= 0.25 - MASS_TOLERANCE);
        Ok(prior)
    }

    pub fn uniform() -> Self {
        Prior {
            joint: [[0.25; 2]; 2],
        }
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(w: [[f64; 2]; 2]) -> Result<Self> {
        let total: f64 = w.iter().flatten().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidModel(
                "prior weights must have positive finite mass".into(),
            ));
        }
        Self::new(w.map(|row| row.map(|x| x / total)))
    }

    pub fn get(&self, u: usize, p: usize) -> f64 {
        self.joint[u][p]
    }

    pub fn joint(&self) -> [[f64; 2]; 2] {
        self.joint
    }

    /// Largest joint prior probability, always at least 1/4.
    pub fn p_max(&self) -> f64 {
        self.joint.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// `ln(8 p_max)`, the finite-length correction of the exponent bound.
    pub fn correction(&self) -> f64 {
        (8.0 * self.p_max()).ln()
    }
}

/// The hypothesis-driven source: prior, four conditional input laws and noise.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    pub x_alphabet: Alphabet,
    pub z_alphabet: Alphabet,
    pub prior: Prior,
    /// Input laws `p_{X|u,p}` in the order `(0,0), (0,1), (1,0), (1,1)`.
    pub cond: [Pmf; 4],
    pub noise: Pmf,
}

impl SourceModel {
    pub fn new(
        x_alphabet: Alphabet,
        z_alphabet: Alphabet,
        prior: Prior,
        cond: [Vec<f64>; 4],
        noise: Vec<f64>,
    ) -> Result<Self> {
        let x_labels = x_alphabet.block_labels(1);
        let z_labels = z_alphabet.block_labels(1);
        let mut laws = Vec::with_capacity(4);
        for (i, c) in cond.into_iter().enumerate() {
            let pmf = Pmf::new(x_labels.clone(), c)
                .map_err(|e| Error::InvalidModel(format!("cond[{i}]: {e}")))?;
            if !pmf.is_full_support() {
                return Err(Error::Support(format!(
                    "cond[{i}] must have full support on the input alphabet"
                )));
            }
            laws.push(pmf);
        }
        let noise =
            Pmf::new(z_labels, noise).map_err(|e| Error::InvalidModel(format!("noise: {e}")))?;
        let cond: [Pmf; 4] = laws.try_into().expect("four laws");
        Ok(SourceModel {
            x_alphabet,
            z_alphabet,
            prior,
            cond,
            noise,
        })
    }

    pub fn cond(&self, u: usize, p: usize) -> &Pmf {
        &self.cond[law_index(u, p)]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            x_alphabet: self.x_alphabet.values().to_vec(),
            z_alphabet: self.z_alphabet.values().to_vec(),
            prior: PriorField::Nested(self.prior.joint()),
            cond: self.cond.clone().map(|p| p.probs().to_vec()),
            noise: self.noise.probs().to_vec(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }
}

/// On-disk model description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub x_alphabet: Vec<f64>,
    pub z_alphabet: Vec<f64>,
    pub prior: PriorField,
    pub cond: [Vec<f64>; 4],
    pub noise: Vec<f64>,
}

/// The prior as a 2x2 matrix or its row-major flattening.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorField {
    Nested([[f64; 2]; 2]),
    Flat([f64; 4]),
}

impl ModelFile {
    pub fn into_model(self) -> Result<SourceModel> {
        let joint = match self.prior {
            PriorField::Nested(m) => m,
            PriorField::Flat([a, b, c, d]) => [[a, b], [c, d]],
        };
        SourceModel::new(
            Alphabet::new(self.x_alphabet)?,
            Alphabet::new(self.z_alphabet)?,
            Prior::new(joint)?,
            self.cond,
            self.noise,
        )
    }
}
