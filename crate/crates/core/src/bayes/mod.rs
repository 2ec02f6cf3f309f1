//! Bayesian composite hypothesis tests on the output process: optimal
//! decisions, exact finite-length error probabilities, and the asymptotic
//! error exponents.

mod decision;
mod exact;
mod exponent;
mod target;

pub use decision::{map_decision, map_decision_weighted, type_test_decision};
pub use exact::{
    decision_disagreement, exact_min_error, exact_min_error_iid, exact_min_error_with_cap,
    ExactError, ENUMERATION_CAP, TYPE_CLASS_CAP,
};
pub use exponent::{
    exponent_chernoff, exponent_lower_bound, exponent_lower_bound_repeated, exponent_sanov,
    exponent_t, min_grouped_chernoff, LawPair,
};
pub use target::{ExponentMethod, ExponentReport, TestTarget, TypeVector};
