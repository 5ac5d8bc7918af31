//! Library surface of the `qotto` binary: config schema and resolution,
//! artifact emission, finite-shot readout emulation, and the subcommand
//! dispatcher. The binary in `main.rs` is a thin wrapper over
//! [`run::execute`]; exposing the modules as a library lets integration
//! tests exercise the same code paths the binary runs.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod shots;
