//! Probability-simplex primitives: pmfs, KL divergence, Chernoff
//! information and the composite-test T-divergence.
//!
//! All logarithms are natural; every divergence is in nats.

mod divergence;
mod pmf;
pub mod search;
pub mod simplex;
mod tdiv;

pub use divergence::{
    chernoff_information, chernoff_information_with, kl_divergence, kl_divergence_with,
    log_sum_exp, Chernoff, SupportMode, CLAMP_SLACK, DUAL_TOLERANCE,
};
pub use pmf::{Pmf, MASS_TOLERANCE};
pub use tdiv::{
    primal_t_oracle, primal_t_oracle_with, t_divergence, t_mu_nu, DualPoint, GridMode, PrimalT,
    TPoint, GRID_ALPHABET_LIMIT, GRID_POINT_CAP,
};

pub(crate) use divergence::{chernoff_slices, kl_slices};
pub(crate) use tdiv::{check_grid, for_each_lattice_edge, grid_divisions};
