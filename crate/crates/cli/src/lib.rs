//! Library side of the command-line front end: config schema, experiment
//! runners, and artifact persistence. Kept as a library so the acceptance
//! suite can drive complete runs in-process.

pub mod artifacts;
pub mod config;
pub mod runner;
