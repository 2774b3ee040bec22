//! Scenario runner for the `mqv` toolkit: TOML scenarios in, CSV and JSON artifacts out.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use config::Scenario;
pub use error::CliError;
pub use run::{run, Summary};
