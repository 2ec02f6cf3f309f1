use chernoff_tradeoff::bayes::{
    exponent_sanov, exponent_t, min_grouped_chernoff, ExponentMethod, ExponentReport,
};
use chernoff_tradeoff::model::induced_output_laws;

use crate::error::{CliError, CliResult};
use crate::inputs::{load_model, load_policy};
use crate::ExponentArgs;

/// Largest tolerated gap between the three characterizations.
pub const CROSS_CHECK_TOLERANCE: f64 = 2e-3;

pub fn run(args: &ExponentArgs) -> CliResult<()> {
    let loaded = load_model(args.common.model.as_ref())?;
    let policy = load_policy(Some(&args.common.policy), &loaded.model)?;
    let laws = induced_output_laws(&loaded.model, &policy)?;
    println!("model     {}", loaded.source);
    println!(
        "policy    {} (k = {}, s = {})",
        args.common.policy,
        policy.k(),
        policy.s()
    );
    let mut worst: f64 = 0.0;
    for target in args.common.target.targets() {
        let (block_value, argmin_pair) = min_grouped_chernoff(&laws, target)?;
        let chernoff = ExponentReport {
            value: block_value / laws.k() as f64,
            argmin_pair,
            method: ExponentMethod::Chernoff,
        };
        println!("[{}]", target.name());
        println!("  {chernoff}");
        if args.cross_check {
            let t = exponent_t(&laws, target)?;
            let sanov = exponent_sanov(&laws, target, args.grid_step)?;
            for other in [t, sanov] {
                let delta = (other.value - chernoff.value).abs();
                worst = worst.max(delta);
                println!("  {other}  delta={delta:.3e}");
            }
        }
    }
    if worst > CROSS_CHECK_TOLERANCE {
        return Err(CliError::CrossCheck(format!(
            "largest delta {worst:.3e} exceeds {CROSS_CHECK_TOLERANCE:e}"
        )));
    }
    Ok(())
}
