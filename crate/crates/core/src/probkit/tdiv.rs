//! The composite-test divergence `T(q1 || q2; q3)`.
//!
//! `T` is the minimum of `D(t || q2)` over pmfs `t` that are at least as
//! close (in KL) to `q1` as to either `q2` or `q3`. Its Lagrange dual is
//!
//! ```text
//! T(q1 || q2; q3) = max_{0 <= mu <= 1, nu >= 0} -ln sum_a q1^(mu+nu) q2^(1-mu) q3^(-nu)
//! ```
//!
//! The dual objective is jointly concave in `(mu, nu)` and non-positive on
//! the line `nu = (1 - mu) D(q1||q2) / D(q1||q3)`, so the maximum is
//! attained in the triangle with corners `(0,0)`, `(1,0)` and
//! `(0, D(q1||q2)/D(q1||q3))`. [`t_divergence`] searches that triangle.
//! [`primal_t_oracle`] evaluates the primal by brute force on a simplex
//! grid and shares no code path with the dual.

use crate::error::{Error, Result};

use super::divergence::{clamp_nonnegative, kl_slices, log_sum_exp, require_full, DUAL_TOLERANCE};
use super::pmf::Pmf;
use super::search::golden_section_max;
use super::simplex::{composition_count, Compositions};

/// Dual variables of the T-divergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualPoint {
    pub mu: f64,
    pub nu: f64,
}

/// Optimal value of the T-divergence with its maximizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TPoint {
    pub value: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Outcome of the brute-force primal evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimalT {
    /// Minimum found, or `f64::INFINITY` when no evaluated point is feasible.
    pub value: f64,
    /// Lattice points of the simplex that were evaluated.
    pub grid_points: u64,
    /// Constraint-boundary crossings on grid edges that were evaluated.
    pub boundary_points: u64,
}

impl PrimalT {
    pub fn is_feasible(&self) -> bool {
        self.value.is_finite()
    }
}

/// Whether the primal oracle also evaluates the exact points where a
/// constraint boundary crosses an edge of the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GridMode {
    /// Lattice points only.
    Plain,
    /// Lattice points plus boundary crossings on lattice edges.
    #[default]
    Crossings,
}

/// Largest alphabet accepted by the grid oracles.
pub const GRID_ALPHABET_LIMIT: usize = 4;

/// Largest number of lattice points a grid oracle will visit.
pub const GRID_POINT_CAP: u128 = 50_000_000;

struct Triple {
    logs: Vec<[f64; 3]>,
}

impl Triple {
    fn new(q1: &Pmf, q2: &Pmf, q3: &Pmf) -> Result<(Self, Vec<f64>, Vec<f64>)> {
        let w2 = q1.aligned(q2)?.into_owned();
        let w3 = q1.aligned(q3)?.into_owned();
        require_full(q1.probs(), "q1")?;
        require_full(&w2, "q2")?;
        require_full(&w3, "q3")?;
        let logs = q1
            .probs()
            .iter()
            .zip(&w2)
            .zip(&w3)
            .map(|((a, b), c)| [a.ln(), b.ln(), c.ln()])
            .collect();
        Ok((Triple { logs }, w2, w3))
    }

    #[inline]
    fn objective(&self, mu: f64, nu: f64) -> f64 {
        -log_sum_exp(
            self.logs
                .iter()
                .map(|[l1, l2, l3]| (mu + nu) * l1 + (1.0 - mu) * l2 - nu * l3),
        )
    }
}

/// `T_{mu,nu}(q1 || q2; q3) = -ln sum_a q1^(mu+nu) q2^(1-mu) q3^(-nu)`.
pub fn t_mu_nu(q1: &Pmf, q2: &Pmf, q3: &Pmf, point: DualPoint) -> Result<f64> {
    if !point.mu.is_finite() || !point.nu.is_finite() {
        return Err(Error::Numerical(format!("non-finite dual point {point:?}")));
    }
    let (t, _, _) = Triple::new(q1, q2, q3)?;
    Ok(t.objective(point.mu, point.nu))
}

/// `T(q1 || q2; q3)`, the maximum of [`t_mu_nu`] over the dual region.
///
/// The search is a nested golden-section maximization over the triangle
/// `B1 = {mu >= 0, nu >= 0, nu <= (1 - mu) D(q1||q2) / D(q1||q3)}`: the
/// inner search maximizes over `nu` for fixed `mu`, and the outer search
/// maximizes the resulting profile, which is concave because partial
/// maximization preserves joint concavity. When `D(q1||q3) = 0` the region
/// collapses to the segment `nu = 0`.
pub fn t_divergence(q1: &Pmf, q2: &Pmf, q3: &Pmf) -> Result<TPoint> {
    let (tri, w2, w3) = Triple::new(q1, q2, q3)?;
    let d12 = kl_slices(q1.probs(), &w2);
    let d13 = kl_slices(q1.probs(), &w3);
    if q1.probs() == &w2[..] {
        // t = q2 is feasible in the primal
        return Ok(TPoint {
            value: 0.0,
            mu: 0.0,
            nu: 0.0,
        });
    }

    let slope = if d13 > 0.0 { d12 / d13 } else { 0.0 };
    let inner = |mu: f64| -> (f64, f64) {
        let width = slope * (1.0 - mu);
        if width <= 0.0 {
            return (0.0, tri.objective(mu, 0.0));
        }
        let (nu, v) = golden_section_max(|nu| tri.objective(mu, nu), 0.0, width, DUAL_TOLERANCE);
        // The edge nu = 0 is part of the region.
        let v0 = tri.objective(mu, 0.0);
        if v0 >= v {
            (0.0, v0)
        } else {
            (nu, v)
        }
    };

    let (mu, value) = golden_section_max(|mu| inner(mu).1, 0.0, 1.0, DUAL_TOLERANCE);
    let mut best = TPoint {
        value,
        mu,
        nu: inner(mu).0,
    };
    for corner in [(0.0, 0.0), (1.0, 0.0), (0.0, slope)] {
        let v = tri.objective(corner.0, corner.1);
        if v > best.value {
            best = TPoint {
                value: v,
                mu: corner.0,
                nu: corner.1,
            };
        }
    }
    best.value = clamp_nonnegative(best.value, "T divergence")?;
    Ok(best)
}

/// Validate a grid step and return the number of subdivisions `m = 1/step`.
pub(crate) fn grid_divisions(step: f64) -> Result<u64> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidGridStep(step));
    }
    let m = (1.0 / step).round();
    if ((1.0 / step) - m).abs() > 1e-6 * m {
        return Err(Error::InvalidGridStep(step));
    }
    Ok(m as u64)
}

pub(crate) fn check_grid(alphabet: usize, divisions: u64) -> Result<()> {
    if alphabet > GRID_ALPHABET_LIMIT {
        return Err(Error::OversizedAlphabet {
            size: alphabet,
            limit: GRID_ALPHABET_LIMIT,
        });
    }
    let points = composition_count(alphabet, divisions);
    if points > GRID_POINT_CAP {
        return Err(Error::GridTooLarge {
            points,
            cap: GRID_POINT_CAP,
        });
    }
    Ok(())
}

/// Calls `visit(a, b)` once for every edge `{a, b}` of the simplex lattice
/// with `m` subdivisions, where `b = a + e_i - e_j` with `i < j`.
pub(crate) fn for_each_lattice_edge(d: usize, m: u64, mut visit: impl FnMut(&[u64], &[u64])) {
    let mut nb = vec![0u64; d];
    for a in Compositions::new(d, m) {
        for j in 1..d {
            if a[j] == 0 {
                continue;
            }
            for i in 0..j {
                nb.copy_from_slice(&a);
                nb[i] += 1;
                nb[j] -= 1;
                visit(&a, &nb);
            }
        }
    }
}

pub fn primal_t_oracle(q1: &Pmf, q2: &Pmf, q3: &Pmf, grid_step: f64) -> Result<PrimalT> {
    primal_t_oracle_with(q1, q2, q3, grid_step, GridMode::default())
}

/// Brute-force primal form of the T-divergence:
/// `min D(t || q2)` subject to `D(t||q1) <= D(t||q2)` and `D(t||q1) <= D(t||q3)`,
/// over the lattice `{c * grid_step}` of the simplex.
///
/// Both constraints are affine in `t` (the entropy terms cancel), so in
/// [`GridMode::Crossings`] the oracle also evaluates the exact point where
/// either constraint changes sign along each lattice edge. On a binary
/// alphabet that makes the oracle exact up to rounding.
pub fn primal_t_oracle_with(
    q1: &Pmf,
    q2: &Pmf,
    q3: &Pmf,
    grid_step: f64,
    mode: GridMode,
) -> Result<PrimalT> {
    let d = q1.len();
    let m = grid_divisions(grid_step)?;
    check_grid(d, m)?;
    let w2 = q1.aligned(q2)?.into_owned();
    let w3 = q1.aligned(q3)?.into_owned();
    require_full(q1.probs(), "q1")?;
    require_full(&w2, "q2")?;
    require_full(&w3, "q3")?;
    let w1 = q1.probs();

    // D(t||q1) - D(t||q2) = sum t ln(q2/q1), likewise for q3.
    let g2: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| (b / a).ln()).collect();
    let g3: Vec<f64> = w1.iter().zip(&w3).map(|(a, c)| (c / a).ln()).collect();
    let dot = |g: &[f64], t: &[f64]| -> f64 { g.iter().zip(t).map(|(x, y)| x * y).sum() };
    let scale = 1.0 / m as f64;
    let to_pmf = |c: &[u64], buf: &mut Vec<f64>| {
        buf.clear();
        buf.extend(c.iter().map(|&x| x as f64 * scale));
    };

    let mut best = f64::INFINITY;
    let mut grid_points = 0u64;
    let mut t = Vec::with_capacity(d);
    for c in Compositions::new(d, m) {
        grid_points += 1;
        to_pmf(&c, &mut t);
        if dot(&g2, &t) <= 0.0 && dot(&g3, &t) <= 0.0 {
            best = best.min(kl_slices(&t, &w2));
        }
    }

    let mut boundary_points = 0u64;
    if mode == GridMode::Crossings {
        let (mut ta, mut tb, mut tx) = (Vec::new(), Vec::new(), vec![0.0; d]);
        let slack = 1e-12;
        for_each_lattice_edge(d, m, |a, b| {
            to_pmf(a, &mut ta);
            to_pmf(b, &mut tb);
            for (g, other) in [(&g2, &g3), (&g3, &g2)] {
                let (ga, gb) = (dot(g, &ta), dot(g, &tb));
                if (ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0) {
                    let s = ga / (ga - gb);
                    for k in 0..d {
                        tx[k] = (ta[k] + s * (tb[k] - ta[k])).max(0.0);
                    }
                    boundary_points += 1;
                    if dot(other, &tx) <= slack {
                        best = best.min(kl_slices(&tx, &w2));
                    }
                }
            }
        });
    }

    let value = if best.is_finite() {
        clamp_nonnegative(best, "primal T")?
    } else {
        best
    };
    Ok(PrimalT {
        value,
        grid_points,
        boundary_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::divergence::chernoff_information;

    fn bern(t: f64) -> Pmf {
        Pmf::bernoulli(t).unwrap()
    }

    #[test]
    fn t_mu_nu_collapses_at_corners() {
        let (a, b, c) = (bern(0.8), bern(0.1), bern(0.25));
        let v = t_mu_nu(&a, &b, &c, DualPoint { mu: 1.0, nu: 0.0 }).unwrap();
        assert!(v.abs() < 1e-15);
        let v = t_mu_nu(&a, &b, &c, DualPoint { mu: 0.0, nu: 0.0 }).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn t_mu_nu_hand_evaluation() {
        // mu = nu = 1/2: weights q1^1 q2^(1/2) q3^(-1/2)
        let s = 0.8 * (0.1f64 / 0.25).sqrt() + 0.2 * (0.9f64 / 0.75).sqrt();
        let v = t_mu_nu(
            &bern(0.8),
            &bern(0.1),
            &bern(0.25),
            DualPoint { mu: 0.5, nu: 0.5 },
        )
        .unwrap();
        assert!((v - (-s.ln())).abs() < 1e-15);
    }

    #[test]
    fn t_of_equal_first_pair_is_zero() {
        let q = Pmf::from_probs(vec![0.3, 0.5, 0.2]).unwrap();
        let r = Pmf::from_probs(vec![0.6, 0.1, 0.3]).unwrap();
        assert_eq!(t_divergence(&q, &q, &r).unwrap().value, 0.0);
    }

    #[test]
    fn degenerate_third_argument_reduces_to_chernoff() {
        let (a, b) = (bern(0.7), bern(0.2));
        let t = t_divergence(&a, &b, &a).unwrap();
        let c = chernoff_information(&a, &b).unwrap();
        assert!((t.value - c.value).abs() < 1e-12);
        assert_eq!(t.nu, 0.0);
    }

    #[test]
    fn primal_equal_pair_is_zero() {
        let q = bern(0.4);
        let p = primal_t_oracle(&q, &q, &bern(0.9), 0.01).unwrap();
        assert!(p.value.abs() < 1e-15);
    }

    #[test]
    fn primal_counts_grid_points() {
        let p =
            primal_t_oracle_with(&bern(0.3), &bern(0.6), &bern(0.8), 0.5, GridMode::Plain).unwrap();
        assert_eq!(p.grid_points, 3);
        assert_eq!(p.boundary_points, 0);
    }

    #[test]
    fn primal_rejects_bad_inputs() {
        let big = Pmf::uniform(5).unwrap();
        assert!(matches!(
            primal_t_oracle(&big, &big, &big, 0.1),
            Err(Error::OversizedAlphabet { .. })
        ));
        let b = bern(0.5);
        assert!(matches!(
            primal_t_oracle(&b, &b, &b, 0.3),
            Err(Error::InvalidGridStep(_))
        ));
        assert!(matches!(
            primal_t_oracle(&b, &b, &b, 0.0),
            Err(Error::InvalidGridStep(_))
        ));
    }

    #[test]
    fn lattice_edges_binary() {
        let mut edges = Vec::new();
        for_each_lattice_edge(2, 3, |a, b| edges.push((a.to_vec(), b.to_vec())));
        assert_eq!(edges.len(), 3);
        assert_eq!(edges[0], (vec![0, 3], vec![1, 2]));
    }
}
