//! The managed system: hypotheses, sources, noise, randomized management
//! policies, and the output laws they induce.

mod alphabet;
mod laws;
mod policy;
mod source;

pub use alphabet::Alphabet;
pub use laws::{induced_output_laws, OutputLaws, LAW_TOLERANCE};
pub use policy::{
    blockwise_extend, feasible_outputs, PolicyFile, PolicyKernel, PolicyRow, ValidationReport,
    Violation, DEFAULT_BLOCK_CAP, ROW_TOLERANCE,
};
pub use source::{law_index, ModelFile, Prior, PriorField, SourceModel};

pub(crate) use laws::input_pair_weights;
