use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::alphabet::{format_block, parse_block, Alphabet, VALUE_TOLERANCE};
use super::source::SourceModel;

/// Largest block length a dense kernel may have.
pub const DEFAULT_BLOCK_CAP: usize = 3;

/// Allowed deviation of a kernel row's total mass from one.
pub const ROW_TOLERANCE: f64 = 1e-10;

/// Output blocks `y` with `0 <= sum(y + z - x) / k <= s`, in block order.
pub fn feasible_outputs(
    x_alphabet: &Alphabet,
    x_block: &[f64],
    z_block: &[f64],
    s: f64,
) -> Result<Vec<Vec<f64>>> {
    if x_block.len() != z_block.len() {
        return Err(Error::LengthMismatch(format!(
            "input block has {} slots, noise block {}",
            x_block.len(),
            z_block.len()
        )));
    }
    let k = x_block.len();
    Ok((0..x_alphabet.block_count(k))
        .map(|i| x_alphabet.block_values(k, i))
        .filter(|y| satisfies_supply(x_block, z_block, y, s))
        .collect())
}

/// The per-block supply constraint.
pub(crate) fn satisfies_supply(x: &[f64], z: &[f64], y: &[f64], s: f64) -> bool {
    let k = x.len() as f64;
    let total: f64 = x.iter().zip(z).zip(y).map(|((x, z), y)| y + z - x).sum();
    let slack = VALUE_TOLERANCE * k;
    total >= -slack && total <= k * s + slack
}

/// A randomized k-slot management map `q(y^k | x^k, z^k)`.
///
/// Rows are dense: one weight vector over all `|X|^k` output blocks for
/// each of the `|X|^k |Z|^k` input pairs. Input pair `(x, z)` sits at row
/// `x_index * |Z|^k + z_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyKernel {
    k: usize,
    s: f64,
    x_alphabet: Alphabet,
    z_alphabet: Alphabet,
    rows: Vec<Vec<f64>>,
}

/// One broken invariant of a [`PolicyKernel`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Positive mass on an output block that breaks the supply constraint.
    InfeasibleMass {
        x: Vec<f64>,
        z: Vec<f64>,
        y: Vec<f64>,
        mass: f64,
    },
    /// A row whose weights do not sum to one.
    Normalization {
        x: Vec<f64>,
        z: Vec<f64>,
        total: f64,
    },
    /// A negative or non-finite weight.
    BadWeight {
        x: Vec<f64>,
        z: Vec<f64>,
        y: Vec<f64>,
        weight: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InfeasibleMass { x, z, y, mass } => write!(
                f,
                "input ({}; {}) puts mass {mass} on infeasible output ({})",
                format_block(x),
                format_block(z),
                format_block(y)
            ),
            Violation::Normalization { x, z, total } => write!(
                f,
                "input ({}; {}) has total mass {total}",
                format_block(x),
                format_block(z)
            ),
            Violation::BadWeight { x, z, y, weight } => write!(
                f,
                "input ({}; {}) has weight {weight} on output ({})",
                format_block(x),
                format_block(z),
                format_block(y)
            ),
        }
    }
}

/// Every violation found in a kernel; empty iff the kernel is valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl PolicyKernel {
    /// Builds a kernel after checking shapes only. Call [`PolicyKernel::validate`]
    /// (or use [`PolicyKernel::new`]) before trusting it.
    pub fn unvalidated(
        k: usize,
        s: f64,
        x_alphabet: Alphabet,
        z_alphabet: Alphabet,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("block length must be positive".into()));
        }
        if k > DEFAULT_BLOCK_CAP {
            return Err(Error::BlockCap {
                k,
                cap: DEFAULT_BLOCK_CAP,
            });
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "supply slack {s} must be >= 0"
            )));
        }
        let n_out = x_alphabet.block_count(k);
        let n_in = n_out * z_alphabet.block_count(k);
        if rows.len() != n_in || rows.iter().any(|r| r.len() != n_out) {
            return Err(Error::InvalidConfig(format!(
                "kernel needs {n_in} rows of {n_out} weights"
            )));
        }
        Ok(PolicyKernel {
            k,
            s,
            x_alphabet,
            z_alphabet,
            rows,
        })
    }

    /// Builds a kernel and rejects it unless [`PolicyKernel::validate`] is clean.
    pub fn new(
        k: usize,
        s: f64,
        x_alphabet: Alphabet,
        z_alphabet: Alphabet,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let kernel = Self::unvalidated(k, s, x_alphabet, z_alphabet, rows)?;
        kernel.ensure_valid()?;
        Ok(kernel)
    }

    /// Builds a kernel from a row function `(x_block_index, z_block_index) -> weights`.
    pub fn from_fn(
        model: &SourceModel,
        k: usize,
        s: f64,
        mut row: impl FnMut(usize, usize) -> Vec<f64>,
    ) -> Result<Self> {
        let nz = model.z_alphabet.block_count(k);
        let n_in = model.x_alphabet.block_count(k) * nz;
        let rows = (0..n_in).map(|i| row(i / nz, i % nz)).collect();
        Self::new(
            k,
            s,
            model.x_alphabet.clone(),
            model.z_alphabet.clone(),
            rows,
        )
    }

    /// `y = x`, feasible when every noise value lies in `[0, s]`.
    pub fn identity(model: &SourceModel, k: usize, s: f64) -> Result<Self> {
        let n_out = model.x_alphabet.block_count(k);
        Self::from_fn(model, k, s, |xi, _| {
            let mut r = vec![0.0; n_out];
            r[xi] = 1.0;
            r
        })
    }

    /// Every input pair mapped to the fixed output block `y`.
    pub fn constant(model: &SourceModel, k: usize, s: f64, y: &[f64]) -> Result<Self> {
        if y.len() != k {
            return Err(Error::LengthMismatch(format!(
                "constant output has {} slots, expected {k}",
                y.len()
            )));
        }
        let yi = model.x_alphabet.block_index(y)?;
        let n_out = model.x_alphabet.block_count(k);
        Self::from_fn(model, k, s, |_, _| {
            let mut r = vec![0.0; n_out];
            r[yi] = 1.0;
            r
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x_alphabet
    }

    pub fn z_alphabet(&self) -> &Alphabet {
        &self.z_alphabet
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x_index: usize, z_index: usize) -> &[f64] {
        &self.rows[x_index * self.z_alphabet.block_count(self.k) + z_index]
    }

    /// `(x_index, z_index)` of row `pair`.
    pub fn input_pair(&self, pair: usize) -> (usize, usize) {
        let nz = self.z_alphabet.block_count(self.k);
        (pair / nz, pair % nz)
    }

    /// Output block indices allowed by the supply constraint for row `pair`.
    pub fn feasible_output_indices(&self, pair: usize) -> Vec<usize> {
        let (xi, zi) = self.input_pair(pair);
        let x = self.x_alphabet.block_values(self.k, xi);
        let z = self.z_alphabet.block_values(self.k, zi);
        (0..self.x_alphabet.block_count(self.k))
            .filter(|&yi| {
                satisfies_supply(&x, &z, &self.x_alphabet.block_values(self.k, yi), self.s)
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (pair, row) in self.rows.iter().enumerate() {
            let (xi, zi) = self.input_pair(pair);
            let x = self.x_alphabet.block_values(self.k, xi);
            let z = self.z_alphabet.block_values(self.k, zi);
            let mut total = 0.0;
            for (yi, &w) in row.iter().enumerate() {
                let y = self.x_alphabet.block_values(self.k, yi);
                if !w.is_finite() || w < 0.0 {
                    violations.push(Violation::BadWeight {
                        x: x.clone(),
                        z: z.clone(),
                        y,
                        weight: w,
                    });
                    continue;
                }
                total += w;
                if w > 0.0 && !satisfies_supply(&x, &z, &y, self.s) {
                    violations.push(Violation::InfeasibleMass {
                        x: x.clone(),
                        z: z.clone(),
                        y,
                        mass: w,
                    });
                }
            }
            if (total - 1.0).abs() > ROW_TOLERANCE {
                violations.push(Violation::Normalization { x, z, total });
            }
        }
        ValidationReport { violations }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidPolicy(report))
        }
    }

    /// `tau * self + (1 - tau) * other`, row by row.
    pub fn mix(&self, other: &PolicyKernel, tau: f64) -> Result<PolicyKernel> {
        if self.k != other.k
            || self.x_alphabet != other.x_alphabet
            || self.z_alphabet != other.z_alphabet
        {
            return Err(Error::AlphabetMismatch(
                "kernels have different shapes".into(),
            ));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| tau * x + (1.0 - tau) * y)
                    .collect()
            })
            .collect();
        PolicyKernel::new(
            self.k,
            self.s.max(other.s),
            self.x_alphabet.clone(),
            self.z_alphabet.clone(),
            rows,
        )
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(pair, row)| {
                let (xi, zi) = self.input_pair(pair);
                let output_probs = row
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(yi, w)| (self.x_alphabet.block_label(self.k, yi), *w))
                    .collect();
                PolicyRow {
                    input: [
                        self.x_alphabet.block_values(self.k, xi),
                        self.z_alphabet.block_values(self.k, zi),
                    ],
                    output_probs,
                }
            })
            .collect();
        let file = PolicyFile {
            k: self.k,
            s: self.s,
            rows,
        };
        serde_json::to_string_pretty(&file).expect("policy serializes")
    }

    /// Parses a policy file against the model's alphabets and validates it.
    pub fn from_json(text: &str, model: &SourceModel) -> Result<Self> {
        let file: PolicyFile = serde_json::from_str(text)?;
        let PolicyFile {
            k,
            s,
            rows: entries,
        } = file;
        if k == 0 || k > DEFAULT_BLOCK_CAP {
            return Err(Error::BlockCap {
                k,
                cap: DEFAULT_BLOCK_CAP,
            });
        }
        let xa = &model.x_alphabet;
        let za = &model.z_alphabet;
        let n_out = xa.block_count(k);
        let nz = za.block_count(k);
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; n_out * nz];
        for entry in entries {
            let [x, z] = &entry.input;
            if x.len() != k || z.len() != k {
                return Err(Error::LengthMismatch(format!(
                    "policy row input has blocks of length {} and {}, expected {k}",
                    x.len(),
                    z.len()
                )));
            }
            let pair = xa.block_index(x)? * nz + za.block_index(z)?;
            let mut row = vec![0.0; n_out];
            for (label, w) in &entry.output_probs {
                let y = parse_block(label)?;
                if y.len() != k {
                    return Err(Error::LengthMismatch(format!(
                        "output block {label:?} does not have {k} slots"
                    )));
                }
                row[xa.block_index(&y)?] += w;
            }
            if rows[pair].replace(row).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate policy row for input ({}; {})",
                    format_block(x),
                    format_block(z)
                )));
            }
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(pair, r)| {
                r.ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "policy has no row for input ({}; {})",
                        xa.block_label(k, pair / nz),
                        za.block_label(k, pair % nz)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PolicyKernel::new(k, s, xa.clone(), za.clone(), rows)
    }
}

/// The `kl`-slot kernel that applies `policy` independently to each of `l`
/// consecutive k-slot sub-blocks.
pub fn blockwise_extend(policy: &PolicyKernel, l: usize) -> Result<PolicyKernel> {
    if l == 0 {
        return Err(Error::InvalidConfig(
            "repetition count must be positive".into(),
        ));
    }
    let n = policy.k * l;
    if n > DEFAULT_BLOCK_CAP {
        return Err(Error::BlockCap {
            k: n,
            cap: DEFAULT_BLOCK_CAP,
        });
    }
    let bx = policy.x_alphabet.block_count(policy.k);
    let bz = policy.z_alphabet.block_count(policy.k);
    let digits = |mut idx: usize, base: usize| -> Vec<usize> {
        let mut d = vec![0; l];
        for j in (0..l).rev() {
            d[j] = idx % base;
            idx /= base;
        }
        d
    };
    let n_out = bx.pow(l as u32);
    let n_z = bz.pow(l as u32);
    let mut rows = Vec::with_capacity(n_out * n_z);
    for xi in 0..n_out {
        let xs = digits(xi, bx);
        for zi in 0..n_z {
            let zs = digits(zi, bz);
            let sub_rows: Vec<&[f64]> = xs
                .iter()
                .zip(&zs)
                .map(|(&x, &z)| policy.row(x, z))
                .collect();
            let row = (0..n_out)
                .map(|yi| {
                    digits(yi, bx)
                        .iter()
                        .zip(&sub_rows)
                        .map(|(&y, r)| r[y])
                        .product()
                })
                .collect();
            rows.push(row);
        }
    }
    PolicyKernel::new(
        n,
        policy.s,
        policy.x_alphabet.clone(),
        policy.z_alphabet.clone(),
        rows,
    )
}

/// On-disk policy description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub k: usize,
    pub s: f64,
    pub rows: Vec<PolicyRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRow {
    /// `[x_block, z_block]`
    pub input: [Vec<f64>; 2],
    /// Output block label (values joined by commas) to probability.
    pub output_probs: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_model;

    fn binary() -> Alphabet {
        Alphabet::new(vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn feasible_outputs_single_slot() {
        let a = binary();
        assert_eq!(
            feasible_outputs(&a, &[1.0], &[0.0], 1.0).unwrap(),
            vec![vec![1.0]]
        );
        assert_eq!(
            feasible_outputs(&a, &[0.0], &[1.0], 2.0).unwrap(),
            vec![vec![0.0], vec![1.0]]
        );
    }

    #[test]
    fn feasible_outputs_two_slots() {
        // (1,1),(0,0): sum(y) - 2 in [0, 2] forces y = (1,1)
        let a = binary();
        assert_eq!(
            feasible_outputs(&a, &[1.0, 1.0], &[0.0, 0.0], 1.0).unwrap(),
            vec![vec![1.0, 1.0]]
        );
        assert!(matches!(
            feasible_outputs(&a, &[1.0], &[0.0, 0.0], 1.0),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn feasible_outputs_may_be_empty() {
        let a = binary();
        // y + 3 - 0 <= 1 has no solution in {0, 1}
        assert!(feasible_outputs(&a, &[0.0], &[3.0], 1.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn identity_with_zero_noise_is_valid() {
        let m = SourceModel::new(
            binary(),
            Alphabet::new(vec![0.0]).unwrap(),
            crate::model::Prior::uniform(),
            [
                vec![0.5, 0.5],
                vec![0.5, 0.5],
                vec![0.5, 0.5],
                vec![0.5, 0.5],
            ],
            vec![1.0],
        )
        .unwrap();
        let id = PolicyKernel::identity(&m, 1, 0.0).unwrap();
        assert!(id.validate().is_valid());
    }

    #[test]
    fn reports_infeasible_mass() {
        let m = example_model();
        // row (x=1, z=0) may only output 1; put half its mass on 0
        let rows = vec![
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![0.0, 1.0],
        ];
        let k = PolicyKernel::unvalidated(1, 1.0, m.x_alphabet.clone(), m.z_alphabet.clone(), rows)
            .unwrap();
        let report = k.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0],
            Violation::InfeasibleMass {
                x: vec![1.0],
                z: vec![0.0],
                y: vec![0.0],
                mass: 0.5
            }
        );
        assert!(matches!(
            PolicyKernel::new(
                1,
                1.0,
                m.x_alphabet.clone(),
                m.z_alphabet.clone(),
                k.rows().to_vec()
            ),
            Err(Error::InvalidPolicy(_))
        ));
    }

    #[test]
    fn reports_normalization() {
        let m = example_model();
        let rows = vec![
            vec![0.98, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
        ];
        let k = PolicyKernel::unvalidated(1, 1.0, m.x_alphabet.clone(), m.z_alphabet.clone(), rows)
            .unwrap();
        let report = k.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::Normalization { .. }
        ));
    }

    #[test]
    fn block_cap_enforced() {
        let m = example_model();
        assert!(matches!(
            PolicyKernel::identity(&m, 4, 1.0),
            Err(Error::BlockCap { .. })
        ));
    }

    #[test]
    fn extend_once_is_identity() {
        let m = example_model();
        let id = PolicyKernel::identity(&m, 1, 1.0).unwrap();
        assert_eq!(blockwise_extend(&id, 1).unwrap(), id);
    }

    #[test]
    fn extension_rows() {
        let m = example_model();
        let base = PolicyKernel::from_fn(&m, 1, 2.0, |x, z| match (x, z) {
            (0, 0) => vec![0.3, 0.7],
            (0, 1) => vec![0.6, 0.4],
            (1, 0) => vec![0.0, 1.0],
            _ => vec![0.2, 0.8],
        })
        .unwrap();
        let ext = blockwise_extend(&base, 2).unwrap();
        assert_eq!(ext.rows().len(), 16);
        assert!(ext.validate().is_valid());
        // x = (0,1), z = (1,1): rows (0,1) and (1,1); y = (0,1)
        let xi = m.x_alphabet.block_index(&[0.0, 1.0]).unwrap();
        let zi = m.z_alphabet.block_index(&[1.0, 1.0]).unwrap();
        let yi = m.x_alphabet.block_index(&[0.0, 1.0]).unwrap();
        assert!((ext.row(xi, zi)[yi] - 0.6 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let m = example_model();
        let base = PolicyKernel::from_fn(&m, 1, 2.0, |x, z| match (x, z) {
            (0, 0) => vec![0.3, 0.7],
            (0, 1) => vec![0.6, 0.4],
            (1, 0) => vec![0.0, 1.0],
            _ => vec![0.2, 0.8],
        })
        .unwrap();
        let back = PolicyKernel::from_json(&base.to_json(), &m).unwrap();
        assert_eq!(base, back);
    }

    #[test]
    fn json_missing_row() {
        let m = example_model();
        let text = r#"{"k":1,"s":1,"rows":[{"input":[[0],[0]],"output_probs":{"0":1}}]}"#;
        assert!(matches!(
            PolicyKernel::from_json(text, &m),
            Err(Error::InvalidConfig(_))
        ));
    }
}
