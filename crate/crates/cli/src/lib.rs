//! Command-line harness around [`confspec`]: configuration, experiment
//! runner, report files and a self-test.

// `!(x > 0)` style tests are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod mapspec;
pub mod output;
pub mod report;

pub use error::{exit, CliError};
