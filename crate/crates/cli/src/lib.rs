//! Command-line surface for the charp criteria: single-instance reports,
//! family scans with JSONL logs, and Künneth product checks.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod scan;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, EXIT_NEGATIVE, EXIT_POSITIVE, EXIT_UNSUPPORTED, EXIT_USAGE};
