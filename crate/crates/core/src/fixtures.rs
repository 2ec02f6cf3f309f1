//! Bundled models.

use crate::model::SourceModel;

/// JSON text of the binary example model: uniform prior, input laws with
/// `P(X=0)` of 0.1, 0.25, 0.8 and 0.9 for `(u,p)` = (0,0), (0,1), (1,0),
/// (1,1), and noise with `P(Z=0) = 0.2`.
pub const EXAMPLE_MODEL_JSON: &str = include_str!("../fixtures/example.json");

pub fn example_model() -> SourceModel {
    SourceModel::from_json(EXAMPLE_MODEL_JSON).expect("bundled model is valid")
}
