//! Configuration, dispatch and artifact writing for the `qcosym` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_with, CliConfig, Command, Job};
pub use error::{CliError, CliResult};
pub use run::{execute, load};
