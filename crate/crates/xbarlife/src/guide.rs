//! The narrative guide, rendered with mdbook from `book/` at the repository
//! root. Each chapter is included here as module documentation so that every
//! code block in the book compiles and runs under `cargo test --doc`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/crossbar-model.md")]
pub mod crossbar_model {}

#[doc = include_str!("../../../book/src/read-disturbance.md")]
pub mod read_disturbance {}

#[doc = include_str!("../../../book/src/cost-model.md")]
pub mod cost_model {}

#[doc = include_str!("../../../book/src/workloads.md")]
pub mod workloads {}

#[doc = include_str!("../../../book/src/placement.md")]
pub mod placement {}

#[doc = include_str!("../../../book/src/configuration.md")]
pub mod configuration {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
