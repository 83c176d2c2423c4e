//! The chapters of the `book/` guide, compiled as doc-tests so that every
//! Rust snippet in the book runs against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/gaussians.md")]
pub mod gaussians {}
#[doc = include_str!("../../../book/src/fusion.md")]
pub mod fusion {}
#[doc = include_str!("../../../book/src/goals.md")]
pub mod goals {}
#[doc = include_str!("../../../book/src/rollout.md")]
pub mod rollout {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
