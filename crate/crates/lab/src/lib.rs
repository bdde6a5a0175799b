//! Evolver, file formats, comparison harness and command-line driver built
//! on `dnls-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod evolver;
pub mod formats;
pub mod harness;
pub mod scatter;
pub mod signature;
