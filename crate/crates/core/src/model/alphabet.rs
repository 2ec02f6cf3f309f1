use crate::error::{Error, Result};

/// Values closer than this are the same symbol.
pub(crate) const VALUE_TOLERANCE: f64 = 1e-9;

/// A finite, strictly increasing set of resource values.
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    values: Vec<f64>,
}

impl Alphabet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModel("alphabet is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(
                "alphabet has a non-finite value".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModel(format!(
                "alphabet {values:?} is not strictly increasing"
            )));
        }
        Ok(Alphabet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, value: f64) -> Result<usize> {
        self.values
            .iter()
            .position(|v| (v - value).abs() <= VALUE_TOLERANCE)
            .ok_or(Error::UnknownSymbol(value))
    }

    /// Number of blocks of length `k`.
    pub fn block_count(&self, k: usize) -> usize {
        self.values.len().pow(k as u32)
    }

    /// Symbol indices of block number `idx`, first slot most significant.
    pub fn block_indices(&self, k: usize, mut idx: usize) -> Vec<usize> {
        let a = self.values.len();
        let mut out = vec![0; k];
        for slot in (0..k).rev() {
            out[slot] = idx % a;
            idx /= a;
        }
        out
    }

    pub fn block_values(&self, k: usize, idx: usize) -> Vec<f64> {
        self.block_indices(k, idx)
            .into_iter()
            .map(|i| self.values[i])
            .collect()
    }

    pub fn block_index(&self, values: &[f64]) -> Result<usize> {
        let a = self.values.len();
        values
            .iter()
            .try_fold(0usize, |acc, &v| Ok(acc * a + self.index_of(v)?))
    }

    /// Label of a block: its values joined by commas, e.g. `"0,1"`.
    pub fn block_label(&self, k: usize, idx: usize) -> String {
        format_block(&self.block_values(k, idx))
    }

    pub fn block_labels(&self, k: usize) -> Vec<String> {
        (0..self.block_count(k))
            .map(|i| self.block_label(k, i))
            .collect()
    }
}

pub(crate) fn format_block(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn parse_block(label: &str) -> Result<Vec<f64>> {
    label
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidModel(format!("bad block label {label:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted() {
        assert!(Alphabet::new(vec![1.0, 0.0]).is_err());
        assert!(Alphabet::new(vec![0.0, 0.0]).is_err());
        assert!(Alphabet::new(vec![]).is_err());
    }

    #[test]
    fn block_round_trip() {
        let a = Alphabet::new(vec![0.0, 1.0, 2.5]).unwrap();
        for idx in 0..a.block_count(3) {
            let v = a.block_values(3, idx);
            assert_eq!(a.block_index(&v).unwrap(), idx);
            assert_eq!(parse_block(&a.block_label(3, idx)).unwrap(), v);
        }
        assert_eq!(a.block_label(2, 1), "0,1");
        assert!(matches!(a.index_of(3.0), Err(Error::UnknownSymbol(_))));
    }
}
