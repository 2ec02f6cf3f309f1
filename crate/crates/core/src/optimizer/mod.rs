//! Policy search: minimize the privacy Chernoff rate over kernels that meet
//! a utility guarantee, and trace the resulting trade-off curves.

mod config;
mod objective;
mod problem;
mod search;
mod sweep;

pub use config::{GuaranteeConfig, SearchConfig, TradeoffPoint};
pub use objective::{
    guarantee_check, privacy_objective, utility_rate, GuaranteeOutcome, PrivacyObjective,
    GUARANTEE_SLACK,
};
pub use search::{EXHAUSTIVE_GRID_CAP, EXHAUSTIVE_MAX_DIM, LOCAL_EVAL_BUDGET};
pub use sweep::{
    asymptotic_guarantee, kernel_parameters, monotonicity_check, optimize_policy,
    optimize_policy_with_seeds, point_seed, random_kernel, tradeoff_sweep, AsymptoticBound,
    MonotonicityReport, MONOTONICITY_SLACK,
};
