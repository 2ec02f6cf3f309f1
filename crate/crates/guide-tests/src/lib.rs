//! Each book chapter is compiled as module docs so `cargo test` runs its
//! snippets.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/divergences.md")]
pub mod divergences {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/exponents.md")]
pub mod exponents {}

#[doc = include_str!("../../../book/src/exact-errors.md")]
pub mod exact_errors {}

#[doc = include_str!("../../../book/src/tradeoff.md")]
pub mod tradeoff {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
