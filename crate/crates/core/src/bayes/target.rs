use std::fmt;

use crate::error::{Error, Result};
use crate::model::law_index;
use crate::probkit::Pmf;

/// Which hypothesis the composite test decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestTarget {
    /// Test on `U`; each side mixes the laws over `p`.
    Utility,
    /// Test on `P`; each side mixes the laws over `u`.
    Privacy,
}

impl TestTarget {
    pub const ALL: [TestTarget; 2] = [TestTarget::Utility, TestTarget::Privacy];

    /// The `(u, p)` pairs whose laws make up hypothesis value `h`.
    pub fn side(self, h: usize) -> [(usize, usize); 2] {
        match self {
            TestTarget::Utility => [(h, 0), (h, 1)],
            TestTarget::Privacy => [(0, h), (1, h)],
        }
    }

    pub(crate) fn side_indices(self, h: usize) -> [usize; 2] {
        self.side(h).map(|(u, p)| law_index(u, p))
    }

    pub fn name(self) -> &'static str {
        match self {
            TestTarget::Utility => "utility",
            TestTarget::Privacy => "privacy",
        }
    }
}

impl fmt::Display for TestTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TestTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "utility" | "u" => Ok(TestTarget::Utility),
            "privacy" | "p" => Ok(TestTarget::Privacy),
            other => Err(Error::InvalidConfig(format!(
                "unknown test target {other:?}"
            ))),
        }
    }
}

/// Occurrence counts of each symbol in a sequence of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeVector {
    counts: Vec<u64>,
    n: u64,
}

impl TypeVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidConfig("type over an empty alphabet".into()));
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidConfig("type of an empty sequence".into()));
        }
        Ok(TypeVector { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The empirical pmf `counts / n`.
    pub fn empirical(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    pub fn to_pmf(&self, labels: Vec<String>) -> Result<Pmf> {
        Pmf::new(labels, self.empirical())
    }
}

/// Which characterization produced an exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentMethod {
    /// Minimal Chernoff information over the cross-hypothesis pairs.
    Chernoff,
    /// Minimal T-divergence over the eight composite terms.
    Tform,
    /// Constrained KL minimization over the type decision regions.
    Sanov,
}

impl fmt::Display for ExponentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ExponentMethod::Chernoff => "chernoff",
            ExponentMethod::Tform => "t-form",
            ExponentMethod::Sanov => "sanov",
        })
    }
}

/// An error exponent (nats per slot) with the pair of laws attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentReport {
    pub value: f64,
    /// `((u, p), (u', p'))` of the two laws achieving the minimum.
    pub argmin_pair: ((usize, usize), (usize, usize)),
    pub method: ExponentMethod,
}

impl fmt::Display for ExponentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ((u1, p1), (u2, p2)) = self.argmin_pair;
        write!(
            f,
            "{:<9} {:.12}  attained by laws ({u1},{p1}) vs ({u2},{p2})",
            self.method, self.value
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sides_partition_the_laws() {
        for t in TestTarget::ALL {
            let mut all: Vec<usize> = (0..2).flat_map(|h| t.side_indices(h)).collect();
            all.sort();
            assert_eq!(all, vec![0, 1, 2, 3]);
        }
        assert_eq!(TestTarget::Utility.side(1), [(1, 0), (1, 1)]);
        assert_eq!(TestTarget::Privacy.side(1), [(0, 1), (1, 1)]);
    }

    #[test]
    fn parse_target() {
        assert_eq!(
            "Utility".parse::<TestTarget>().unwrap(),
            TestTarget::Utility
        );
        assert!("both".parse::<TestTarget>().is_err());
    }

    #[test]
    fn type_vector() {
        let t = TypeVector::new(vec![1, 3]).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.empirical(), vec![0.25, 0.75]);
        assert!(TypeVector::new(vec![0, 0]).is_err());
    }
}
