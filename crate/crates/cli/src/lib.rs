//! Library side of the scenario runner: configuration, execution and the
//! reference-trajectory file format. The binary in `main.rs` is a thin clap
//! wrapper over these.

pub mod config;
pub mod reference;
pub mod scenario;
