//! Library surface of the command-line tool: the run configuration and the
//! verification suite, exposed so integration tests can drive the checks
//! in-process.

pub mod checks;
pub mod config;
