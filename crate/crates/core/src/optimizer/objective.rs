use crate::bayes::{min_grouped_chernoff, TestTarget};
use crate::error::Result;
use crate::model::{OutputLaws, Prior};

use super::config::GuaranteeConfig;

/// Slack allowed when re-verifying a guarantee with the exact evaluators.
pub const GUARANTEE_SLACK: f64 = 1e-9;

/// Outcome of [`guarantee_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuaranteeOutcome {
    pub pass: bool,
    /// `utility_rate - threshold`.
    pub margin: f64,
    pub utility_rate: f64,
    pub threshold: f64,
}

/// Privacy objective of a kernel's laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrivacyObjective {
    /// Minimal privacy Chernoff information per slot; `+inf` when some pair
    /// of laws has disjoint supports.
    pub rate: f64,
    /// Some law lacks full support, so the rate was taken on common supports.
    pub degenerate: bool,
}

/// Minimal utility Chernoff information per slot.
pub fn utility_rate(laws: &OutputLaws) -> Result<f64> {
    let (c, _) = min_grouped_chernoff(laws, TestTarget::Utility)?;
    Ok(c / laws.k() as f64)
}

pub fn privacy_objective(laws: &OutputLaws) -> Result<PrivacyObjective> {
    let (c, _) = min_grouped_chernoff(laws, TestTarget::Privacy)?;
    Ok(PrivacyObjective {
        rate: c / laws.k() as f64,
        degenerate: !laws.all_full_support(),
    })
}

/// Compares the utility rate of `laws` with the threshold of `cfg`.
/// Passes when the margin is at least `-GUARANTEE_SLACK`.
pub fn guarantee_check(
    laws: &OutputLaws,
    cfg: &GuaranteeConfig,
    prior: &Prior,
) -> Result<GuaranteeOutcome> {
    let utility = utility_rate(laws)?;
    let threshold = cfg.threshold(prior);
    let margin = utility - threshold;
    Ok(GuaranteeOutcome {
        pass: margin >= -GUARANTEE_SLACK,
        margin,
        utility_rate: utility,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::exponent_chernoff;
    use crate::fixtures::example_model;
    use crate::model::{induced_output_laws, Alphabet, PolicyKernel};

    fn identical() -> OutputLaws {
        let a = Alphabet::new(vec![0.0, 1.0]).unwrap();
        let w = vec![0.4, 0.6];
        OutputLaws::new(1, a, [w.clone(), w.clone(), w.clone(), w]).unwrap()
    }

    #[test]
    fn identical_laws() {
        let cfg = GuaranteeConfig::new(0.0, 1, 1.0);
        let g = guarantee_check(&identical(), &cfg, &Prior::uniform()).unwrap();
        assert!(g.pass);
        assert_eq!(g.margin, 0.0);
        let g =
            guarantee_check(&identical(), &cfg.with_correction(true), &Prior::uniform()).unwrap();
        assert!(!g.pass);
        assert!((g.margin + 2f64.ln()).abs() < 1e-15);
        assert_eq!(privacy_objective(&identical()).unwrap().rate, 0.0);
    }

    #[test]
    fn constant_kernel_is_perfectly_private() {
        let m = example_model();
        let c = PolicyKernel::constant(&m, 1, 2.0, &[1.0]).unwrap();
        let p = privacy_objective(&induced_output_laws(&m, &c).unwrap()).unwrap();
        assert_eq!(p.rate, 0.0);
        assert!(p.degenerate);
    }

    #[test]
    fn identity_policy_on_the_fixture() {
        let m = example_model();
        let laws = induced_output_laws(&m, &PolicyKernel::identity(&m, 1, 1.0).unwrap()).unwrap();
        let u = exponent_chernoff(&laws, TestTarget::Utility).unwrap().value;
        let p = exponent_chernoff(&laws, TestTarget::Privacy).unwrap().value;
        assert!(u > 0.1);
        let g =
            guarantee_check(&laws, &GuaranteeConfig::new(0.1, 1, 1.0), &Prior::uniform()).unwrap();
        assert_eq!(g.pass, u >= 0.1);
        assert_eq!(g.utility_rate, u);
        assert_eq!(privacy_objective(&laws).unwrap().rate, p);
    }
}
