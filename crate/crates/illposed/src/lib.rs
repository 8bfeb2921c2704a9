//! Std companion to `illposed-core`: PGM and CSV files, key=value
//! configuration, parsers for the command-line specs, the seeded desk
//! experiments and the subcommands behind the `illposed` binary.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod experiments;
pub mod output;
pub mod pgm;
pub mod specs;

pub use illposed_core as core;
