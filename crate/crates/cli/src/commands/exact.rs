use chernoff_tradeoff::bayes::{
    exact_min_error, exact_min_error_iid, exponent_lower_bound_repeated,
};
use chernoff_tradeoff::model::induced_output_laws;

use crate::error::CliResult;
use crate::inputs::{load_model, load_policy};
use crate::{ExactArgs, MethodArg};

pub fn run(args: &ExactArgs) -> CliResult<()> {
    let loaded = load_model(args.common.model.as_ref())?;
    let policy = load_policy(Some(&args.common.policy), &loaded.model)?;
    let laws = induced_output_laws(&loaded.model, &policy)?;
    let prior = &loaded.model.prior;
    println!("model     {}", loaded.source);
    println!(
        "policy    {} (k = {}, s = {}), n = {} blocks, method = {}",
        args.common.policy,
        policy.k(),
        policy.s(),
        args.n,
        args.method.name()
    );
    for target in args.common.target.targets() {
        let err = match args.method {
            MethodArg::Enumerate => exact_min_error(&laws, prior, target, args.n)?,
            MethodArg::Types => exact_min_error_iid(&laws, prior, target, args.n)?,
        };
        let bound = exponent_lower_bound_repeated(&laws, prior, target, args.n)?;
        let exponent = err.exponent();
        println!("[{}]", target.name());
        println!("  alpha     {:e}", err.alpha);
        println!("  ln alpha  {}", err.ln_alpha);
        println!("  exponent  {exponent}");
        println!(
            "  bound     {bound}  {}",
            if exponent >= bound { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
