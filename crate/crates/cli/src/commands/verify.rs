use chernoff_tradeoff::verify::{run_suite, Suite};

use crate::error::{CliError, CliResult};
use crate::inputs::load_model;
use crate::VerifyArgs;

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let suites = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>()?]
    };
    let loaded = load_model(args.model.as_ref())?;
    println!("model {}  seed {}", loaded.source, args.seed);
    let mut failed = 0;
    for suite in suites {
        let report = run_suite(suite, &loaded.model, args.trials, args.seed)?;
        println!("{report}");
        if !report.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
