use std::io::Write as _;
use std::path::Path;

use serde_json::json;

use chernoff_tradeoff::optimizer::{tradeoff_sweep, GuaranteeConfig, SearchConfig};

use crate::error::{CliError, CliResult};
use crate::inputs::{load_model, parse_grid};
use crate::output::{
    manifest_path, sha256_hex, timestamp, tradeoff_csv, tradeoff_svg, write_file, FileDigest,
    RunManifest,
};
use crate::{Switch, TradeoffArgs};

pub fn run(args: &TradeoffArgs) -> CliResult<()> {
    let started_at = timestamp();
    let loaded = load_model(args.model.as_ref())?;
    let lambdas = parse_grid(&args.lambda_grid)?;
    let s_values = parse_grid(&args.s)?;
    let correction = args.correction == Switch::On;

    let defaults = SearchConfig::default();
    let search = SearchConfig {
        grid_points_per_parameter: args
            .grid_points
            .unwrap_or(defaults.grid_points_per_parameter),
        restarts: args.restarts.unwrap_or(defaults.restarts),
        seed: args.seed.unwrap_or(defaults.seed),
        parallel: !args.serial,
        ..defaults
    };
    // lambda and s are overwritten per point
    let template = GuaranteeConfig::new(0.0, args.k, 1.0).with_correction(correction);
    let points = tradeoff_sweep(&loaded.model, &lambdas, &s_values, &template, &search)?;

    let csv = tradeoff_csv(&loaded.model, &points)?;
    let mut outputs = Vec::new();
    match &args.out_csv {
        Some(path) => {
            write_file(path, &csv)?;
            outputs.push((path.as_path(), sha256_hex(&csv)));
        }
        None => {
            std::io::stdout()
                .write_all(&csv)
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let Some(path) = &args.out_svg {
        let svg = tradeoff_svg(&points);
        write_file(path, svg.as_bytes())?;
        outputs.push((path.as_path(), sha256_hex(svg.as_bytes())));
    }

    let infeasible = points.iter().filter(|p| !p.feasible).count();
    if infeasible > 0 {
        eprintln!("warning: {infeasible} point(s) could not meet their utility guarantee");
    }

    let parameters = json!({
        "model": loaded.source,
        "lambda_grid": lambdas,
        "s": s_values,
        "k": args.k,
        "correction": correction,
        "search": search,
    });
    let finished_at = timestamp();
    let digests = |list: &[(&Path, String)]| -> Vec<FileDigest> {
        list.iter()
            .map(|(p, h)| FileDigest {
                path: p.display().to_string(),
                sha256: h.clone(),
            })
            .collect()
    };
    for (artifact, _) in &outputs {
        let manifest = RunManifest {
            command: "tradeoff".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            parameters: parameters.clone(),
            inputs: vec![FileDigest {
                path: loaded.source.clone(),
                sha256: sha256_hex(loaded.text.as_bytes()),
            }],
            outputs: digests(&outputs),
            started_at: started_at.clone(),
            finished_at: finished_at.clone(),
        };
        manifest.write(&manifest_path(artifact))?;
    }
    Ok(())
}
