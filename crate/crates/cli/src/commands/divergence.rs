use chernoff_tradeoff::probkit::{
    chernoff_information_with, kl_divergence_with, t_divergence, SupportMode,
};

use crate::error::{CliError, CliResult};
use crate::inputs::parse_pmf;
use crate::DivergenceArgs;

pub fn run(args: &DivergenceArgs) -> CliResult<()> {
    let pmfs = args
        .pmfs
        .iter()
        .map(|a| parse_pmf(a))
        .collect::<CliResult<Vec<_>>>()?;
    let mode = if args.relaxed {
        SupportMode::Relaxed
    } else {
        SupportMode::Full
    };
    let none_selected = !(args.kl || args.chernoff || args.t);
    let (kl, chernoff) = (args.kl || none_selected, args.chernoff || none_selected);
    let t = args.t || (none_selected && pmfs.len() == 3);
    if t && pmfs.len() != 3 {
        return Err(CliError::Input("--t needs three pmfs".into()));
    }
    if kl {
        println!(
            "kl        {}",
            kl_divergence_with(&pmfs[0], &pmfs[1], mode)?
        );
    }
    if chernoff {
        let c = chernoff_information_with(&pmfs[0], &pmfs[1], mode)?;
        println!("chernoff  {}  mu={}", c.value, c.mu);
    }
    if t {
        let r = t_divergence(&pmfs[0], &pmfs[1], &pmfs[2])?;
        println!("t         {}  mu={} nu={}", r.value, r.mu, r.nu);
    }
    Ok(())
}
