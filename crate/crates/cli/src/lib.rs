//! Command implementations behind the `wseq` binary.
//!
//! The binary itself only parses arguments and moves bytes between files and
//! standard streams; everything observable lives here so it can be tested
//! without spawning processes.

pub mod batch;
pub mod commands;
pub mod format;

pub use commands::{
    cmd_build, cmd_gen, cmd_query, cmd_verify, BuildOptions, VerifyOptions, VerifyReport,
};
