// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Failure};
pub use config::{Cli, RunConfig};
