pub mod bayes;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod optimizer;
pub mod probkit;
pub mod verify;

pub use error::{Error, Result};
