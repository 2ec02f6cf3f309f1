use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PolicyKernel, Prior};

/// The utility guarantee a policy must meet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeConfig {
    /// Required utility exponent in nats per slot.
    pub lambda: f64,
    /// Add the finite-length term `ln(8 p_max) / k` to the threshold.
    pub include_correction: bool,
    /// Block length.
    pub k: usize,
    /// Supply slack.
    pub s: f64,
}

impl GuaranteeConfig {
    pub fn new(lambda: f64, k: usize, s: f64) -> Self {
        GuaranteeConfig {
            lambda,
            include_correction: false,
            k,
            s,
        }
    }

    pub fn with_correction(mut self, on: bool) -> Self {
        self.include_correction = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda {} must be >= 0",
                self.lambda
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("block length must be positive".into()));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "supply slack {} must be >= 0",
                self.s
            )));
        }
        Ok(())
    }

    /// `lambda`, plus `ln(8 p_max) / k` when the correction is on.
    pub fn threshold(&self, prior: &Prior) -> f64 {
        if self.include_correction {
            self.lambda + prior.correction() / self.k as f64
        } else {
            self.lambda
        }
    }
}

/// Knobs of the policy search. Every result records the config it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid resolution per free parameter for the exhaustive phase.
    pub grid_points_per_parameter: usize,
    /// Local refinements (low dimension) or random starts (high dimension).
    pub restarts: usize,
    pub seed: u64,
    /// Refinement stops once the step falls below this.
    pub local_step_tolerance: f64,
    /// Evaluate sweep points and grid tables on the rayon pool. Results are
    /// identical either way.
    pub parallel: bool,
    /// Let every sweep point also consider the kernels found for the other
    /// points of the same sweep.
    pub share_candidates: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_points_per_parameter: 101,
            restarts: 4,
            seed: 20_240_601,
            local_step_tolerance: 1e-9,
            parallel: true,
            share_candidates: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_parameter < 2 {
            return Err(Error::InvalidConfig(
                "need at least 2 grid points per parameter".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        if !(self.local_step_tolerance > 0.0 && self.local_step_tolerance < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "local step tolerance {} must lie in (0, 1)",
                self.local_step_tolerance
            )));
        }
        Ok(())
    }
}

/// One point of a privacy-utility trade-off curve.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub lambda: f64,
    pub s: f64,
    pub k: usize,
    /// Minimal privacy Chernoff information per slot.
    pub privacy_rate: f64,
    /// Minimal utility Chernoff information per slot.
    pub utility_rate: f64,
    pub kernel: PolicyKernel,
    /// Whether `kernel` meets the utility guarantee. When no candidate does,
    /// `kernel` is the one with the largest utility rate.
    pub feasible: bool,
}
