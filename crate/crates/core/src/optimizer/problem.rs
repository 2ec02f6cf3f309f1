//! Free-parameter view of the kernels admissible at a given `(k, s)`, with
//! a fast evaluator of the two Chernoff rates used inside the search loops.
//!
//! Rows whose input pair admits a single output are forced. Every other row
//! contributes the probabilities of all but its last feasible output, so a
//! parameter vector lives in a product of simplices.

use crate::bayes::TestTarget;
use crate::error::{Error, Result};
use crate::model::{input_pair_weights, Alphabet, PolicyKernel, SourceModel, ROW_TOLERANCE};

/// A row with at least two feasible outputs.
#[derive(Clone, Debug)]
pub(crate) struct FreeRow {
    pub pair: usize,
    pub outputs: Vec<usize>,
}

/// Utility and privacy rates (nats per slot) of one candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Rates {
    pub utility: f64,
    pub privacy: f64,
}

impl Rates {
    pub fn feasible(&self, threshold: f64) -> bool {
        self.utility >= threshold
    }

    /// Strict preference: feasible beats infeasible, lower privacy among
    /// feasible, higher utility among infeasible.
    pub fn better_than(&self, other: &Rates, threshold: f64) -> bool {
        match (self.feasible(threshold), other.feasible(threshold)) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.privacy < other.privacy,
            (false, false) => self.utility > other.utility,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub k: usize,
    pub s: f64,
    pub n_out: usize,
    x_alphabet: Alphabet,
    z_alphabet: Alphabet,
    /// Forced rows filled in, free rows zero.
    base_rows: Vec<Vec<f64>>,
    pub free: Vec<FreeRow>,
    weights: [Vec<f64>; 4],
    /// Contribution of the forced rows to each law.
    base_laws: [Vec<f64>; 4],
    cross: [[(usize, usize); 4]; 2],
}

fn cross_pairs(target: TestTarget) -> [(usize, usize); 4] {
    let [a0, a1] = target.side_indices(1);
    let [b0, b1] = target.side_indices(0);
    [(a0, b0), (a0, b1), (a1, b0), (a1, b1)]
}

impl Problem {
    pub fn new(model: &SourceModel, k: usize, s: f64) -> Result<Self> {
        let n_out = model.x_alphabet.block_count(k);
        let n_in = n_out * model.z_alphabet.block_count(k);
        let shape = PolicyKernel::unvalidated(
            k,
            s,
            model.x_alphabet.clone(),
            model.z_alphabet.clone(),
            vec![vec![0.0; n_out]; n_in],
        )?;
        let weights = input_pair_weights(model, k);
        let mut base_rows = vec![vec![0.0; n_out]; n_in];
        let mut free = Vec::new();
        for (pair, row) in base_rows.iter_mut().enumerate() {
            let outputs = shape.feasible_output_indices(pair);
            match outputs.len() {
                0 => {
                    let (xi, zi) = shape.input_pair(pair);
                    return Err(Error::NoFeasibleOutput {
                        x: model.x_alphabet.block_values(k, xi),
                        z: model.z_alphabet.block_values(k, zi),
                        s,
                    });
                }
                1 => row[outputs[0]] = 1.0,
                _ => free.push(FreeRow { pair, outputs }),
            }
        }
        let base_laws = [0, 1, 2, 3].map(|i| {
            let mut law = vec![0.0; n_out];
            for (row, &w) in base_rows.iter().zip(&weights[i]) {
                for (acc, q) in law.iter_mut().zip(row) {
                    *acc += w * q;
                }
            }
            law
        });
        Ok(Problem {
            k,
            s,
            n_out,
            x_alphabet: model.x_alphabet.clone(),
            z_alphabet: model.z_alphabet.clone(),
            base_rows,
            free,
            weights,
            base_laws,
            cross: [
                cross_pairs(TestTarget::Utility),
                cross_pairs(TestTarget::Privacy),
            ],
        })
    }

    /// Number of free parameters.
    pub fn dim(&self) -> usize {
        self.free.iter().map(|f| f.outputs.len() - 1).sum()
    }

    /// Whether every row's free parameters lie in its simplex.
    pub fn in_domain(&self, theta: &[f64]) -> bool {
        let mut at = 0;
        for f in &self.free {
            let m = f.outputs.len() - 1;
            let part = &theta[at..at + m];
            if part.iter().any(|&t| !(-1e-12..=1.0 + 1e-12).contains(&t)) {
                return false;
            }
            if part.iter().sum::<f64>() > 1.0 + 1e-12 {
                return false;
            }
            at += m;
        }
        true
    }

    pub fn rows_from_params(&self, theta: &[f64]) -> Vec<Vec<f64>> {
        let mut rows = self.base_rows.clone();
        let mut at = 0;
        for f in &self.free {
            let m = f.outputs.len() - 1;
            let row = &mut rows[f.pair];
            let mut used = 0.0;
            for (j, &t) in theta[at..at + m].iter().enumerate() {
                let t = t.clamp(0.0, 1.0);
                row[f.outputs[j]] = t;
                used += t;
            }
            row[f.outputs[m]] = (1.0 - used).max(0.0);
            at += m;
        }
        rows
    }

    /// Inverse of [`Problem::rows_from_params`] for admissible rows.
    pub fn params_from_rows(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        self.free
            .iter()
            .flat_map(|f| {
                let row = &rows[f.pair];
                f.outputs[..f.outputs.len() - 1]
                    .iter()
                    .map(move |&o| row[o])
            })
            .collect()
    }

    /// Whether `rows` is a normalized kernel that only uses feasible outputs.
    pub fn admissible(&self, rows: &[Vec<f64>]) -> bool {
        if rows.len() != self.base_rows.len() {
            return false;
        }
        let mut allowed = vec![vec![false; self.n_out]; rows.len()];
        for (pair, base) in self.base_rows.iter().enumerate() {
            for (o, &b) in base.iter().enumerate() {
                allowed[pair][o] = b > 0.0;
            }
        }
        for f in &self.free {
            for &o in &f.outputs {
                allowed[f.pair][o] = true;
            }
        }
        rows.iter().zip(&allowed).all(|(row, ok)| {
            row.len() == self.n_out
                && row
                    .iter()
                    .zip(ok)
                    .all(|(&q, &a)| q >= 0.0 && (a || q == 0.0))
                && (row.iter().sum::<f64>() - 1.0).abs() <= ROW_TOLERANCE
        })
    }

    pub fn kernel(&self, rows: Vec<Vec<f64>>) -> Result<PolicyKernel> {
        PolicyKernel::new(
            self.k,
            self.s,
            self.x_alphabet.clone(),
            self.z_alphabet.clone(),
            rows,
        )
    }

    pub fn evaluate_params(&self, theta: &[f64]) -> Rates {
        let mut laws = self.base_laws.clone();
        let mut at = 0;
        for f in &self.free {
            let m = f.outputs.len() - 1;
            let mut used = 0.0;
            let mut add = |o: usize, q: f64| {
                for (law, w) in laws.iter_mut().zip(&self.weights) {
                    law[o] += w[f.pair] * q;
                }
            };
            for (j, &t) in theta[at..at + m].iter().enumerate() {
                let t = t.clamp(0.0, 1.0);
                add(f.outputs[j], t);
                used += t;
            }
            add(f.outputs[m], (1.0 - used).max(0.0));
            at += m;
        }
        self.rates(&laws)
    }

    pub fn evaluate_rows(&self, rows: &[Vec<f64>]) -> Rates {
        let laws = [0, 1, 2, 3].map(|i| {
            let mut law = vec![0.0; self.n_out];
            for (row, &w) in rows.iter().zip(&self.weights[i]) {
                if w == 0.0 {
                    continue;
                }
                for (acc, q) in law.iter_mut().zip(row) {
                    *acc += w * q;
                }
            }
            law
        });
        self.rates(&laws)
    }

    fn rates(&self, laws: &[Vec<f64>; 4]) -> Rates {
        let mut buf = Vec::with_capacity(self.n_out);
        let mut grouped = |pairs: &[(usize, usize); 4]| {
            pairs
                .iter()
                .map(|&(a, b)| fast_chernoff(&laws[a], &laws[b], &mut buf))
                .fold(f64::INFINITY, f64::min)
                / self.k as f64
        };
        Rates {
            utility: grouped(&self.cross[0]),
            privacy: grouped(&self.cross[1]),
        }
    }
}

/// Chernoff information on the common support by safeguarded Newton
/// iteration on the stationarity condition. Agrees with the golden-section
/// evaluator to rounding; only used to rank candidates.
pub(crate) fn fast_chernoff(a: &[f64], b: &[f64], buf: &mut Vec<(f64, f64)>) -> f64 {
    buf.clear();
    for (&x, &y) in a.iter().zip(b) {
        if x > 0.0 && y > 0.0 {
            let (lx, ly) = (x.ln(), y.ln());
            buf.push((ly, lx - ly));
        }
    }
    if buf.is_empty() {
        return f64::INFINITY;
    }
    // value, mean and variance of the log-ratio under the tilted law at mu
    let stats = |mu: f64| {
        let top = buf
            .iter()
            .map(|&(base, d)| base + mu * d)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut s, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &(base, d) in buf.iter() {
            let w = (base + mu * d - top).exp();
            s += w;
            m1 += w * d;
            m2 += w * d * d;
        }
        let mean = m1 / s;
        (-(top + s.ln()), mean, (m2 / s - mean * mean).max(0.0))
    };
    let (v0, g0, _) = stats(0.0);
    if g0 >= 0.0 {
        return v0.max(0.0);
    }
    let (v1, g1, _) = stats(1.0);
    if g1 <= 0.0 {
        return v1.max(0.0);
    }
    let (mut lo, mut hi, mut mu) = (0.0, 1.0, 0.5);
    let mut value = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (v, g, var) = stats(mu);
        value = v;
        if g > 0.0 {
            hi = mu;
        } else {
            lo = mu;
        }
        let newton = mu - g / var;
        let next = if var > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - mu).abs() < 1e-14 || hi - lo < 1e-14 {
            break;
        }
        mu = next;
    }
    value.max(v0).max(v1).max(0.0)
}
