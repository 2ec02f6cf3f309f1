//! Reading models, policies and pmfs from the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use chernoff_tradeoff::fixtures::{example_model, EXAMPLE_MODEL_JSON};
use chernoff_tradeoff::model::{PolicyKernel, SourceModel};
use chernoff_tradeoff::probkit::Pmf;
use chernoff_tradeoff::verify::identity_slack;

use crate::error::{CliError, CliResult};

pub const BUNDLED_MODEL: &str = "<bundled example>";

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// A loaded model with the text it came from, for digests.
pub struct LoadedModel {
    pub model: SourceModel,
    pub source: String,
    pub text: String,
}

pub fn load_model(path: Option<&PathBuf>) -> CliResult<LoadedModel> {
    match path {
        None => Ok(LoadedModel {
            model: example_model(),
            source: BUNDLED_MODEL.into(),
            text: EXAMPLE_MODEL_JSON.into(),
        }),
        Some(p) => {
            let text = read_text(p)?;
            let model = SourceModel::from_json(&text)?;
            Ok(LoadedModel {
                model,
                source: p.display().to_string(),
                text,
            })
        }
    }
}

/// `identity` (the default) or a policy JSON file.
pub fn load_policy(choice: Option<&str>, model: &SourceModel) -> CliResult<PolicyKernel> {
    match choice {
        None | Some("identity") => Ok(PolicyKernel::identity(model, 1, identity_slack(model))?),
        Some(path) => {
            let text = read_text(Path::new(path))?;
            Ok(PolicyKernel::from_json(&text, model)?)
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PmfFile {
    Probs(Vec<f64>),
    Labeled(BTreeMap<String, f64>),
    Full {
        labels: Vec<String>,
        probs: Vec<f64>,
    },
}

/// `bern:theta` (mass `theta` on symbol 0), or a JSON file holding an array
/// of probabilities, a `{label: prob}` map, or `{labels, probs}`.
pub fn parse_pmf(arg: &str) -> CliResult<Pmf> {
    if let Some(theta) = arg.strip_prefix("bern:") {
        let theta: f64 = theta
            .parse()
            .map_err(|_| CliError::Input(format!("bad Bernoulli parameter in {arg:?}")))?;
        return Ok(Pmf::bernoulli(theta)?);
    }
    let text = read_text(Path::new(arg))?;
    let file: PmfFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok(match file {
        PmfFile::Probs(p) => Pmf::from_probs(p)?,
        PmfFile::Labeled(m) => {
            let (labels, probs) = m.into_iter().unzip();
            Pmf::new(labels, probs)?
        }
        PmfFile::Full { labels, probs } => Pmf::new(labels, probs)?,
    })
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(arg: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("bad grid {arg:?}"));
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() == 3 {
        let [start, stop, step] =
            [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
        let (start, stop, step) = (start?, stop?, step?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // rounding keeps 0.07 from printing as 0.07000000000000001
        return Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    arg.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid() {
        let g = parse_grid("0:0.16:0.01").unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[7], 0.07);
        assert_eq!(g[16], 0.16);
        assert_eq!(parse_grid("1,2").unwrap(), vec![1.0, 2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn inline_bernoulli() {
        let p = parse_pmf("bern:0.25").unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        assert!(matches!(parse_pmf("bern:x"), Err(CliError::Input(_))));
    }
}
