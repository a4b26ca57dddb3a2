//! Command-line front end for the `sin2jp` library.

pub mod commands;
pub mod report;
pub mod survey;

pub use commands::{run, Cli, Command};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CERTIFICATE_FAILED: i32 = 1;
    pub const BUDGET_EXCEEDED: i32 = 2;
    pub const INVALID_INPUT: i32 = 3;
}
