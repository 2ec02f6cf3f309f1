use std::borrow::Cow;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Pmf`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability mass function on a finite, labeled alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(labels, probs, MASS_TOLERANCE)
    }

    /// Like [`Pmf::new`] but accepts a total mass within `tol` of one.
    pub fn with_tolerance(labels: Vec<String>, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "{} labels but {} weights",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidPmf(format!("duplicate label {l:?}")));
            }
        }
        if let Some((i, w)) = probs
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidPmf(format!(
                "weight {w} at {:?} is not a nonnegative real",
                labels[i]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidPmf(format!("weights sum to {total}, not 1")));
        }
        Ok(Pmf { labels, probs })
    }

    /// A pmf labeled `"0"`, `"1"`, ... in order.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs)
    }

    /// Binary pmf with mass `theta` on symbol `"0"` and `1 - theta` on `"1"`.
    pub fn bernoulli(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidPmf(format!(
                "Bernoulli parameter {theta} outside [0, 1]"
            )));
        }
        Self::from_probs(vec![theta, 1.0 - theta])
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_probs(vec![1.0 / n as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }

    /// Every weight is strictly positive.
    pub fn is_full_support(&self) -> bool {
        self.probs.iter().all(|&w| w > 0.0)
    }

    /// The weights of `other` listed in the label order of `self`.
    pub(crate) fn aligned<'a>(&self, other: &'a Pmf) -> Result<Cow<'a, [f64]>> {
        if self.labels == other.labels {
            return Ok(Cow::Borrowed(&other.probs));
        }
        if self.labels.len() != other.labels.len() {
            return Err(Error::AlphabetMismatch(format!(
                "alphabets of size {} and {}",
                self.labels.len(),
                other.labels.len()
            )));
        }
        let mut out = Vec::with_capacity(self.len());
        for l in &self.labels {
            match other.prob(l) {
                Some(w) => out.push(w),
                None => {
                    return Err(Error::AlphabetMismatch(format!(
                        "label {l:?} missing from the second pmf"
                    )))
                }
            }
        }
        Ok(Cow::Owned(out))
    }
}

impl fmt::Display for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, w)) in self.labels.iter().zip(&self.probs).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}: {w}")?;
        }
        write!(f, "}}")
    }
}
