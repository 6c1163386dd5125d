//! Batch front end: expression evaluation, check suites over a seeded toric
//! corpus or a suite file, and fan queries.

pub mod commands;
pub mod corpus;
pub mod report;
pub mod run;
pub mod suite;

pub use commands::{run, Cli};
