//! Command-line front end for the optimal-search toolkit: strict-JSON
//! scenario files in, CSV curve data and JSON summaries out.
//!
//! The binary exposes five subcommands — `plan`, `curves`, `compare`,
//! `mean-time`, and `examples` — documented on [`runner::Command`] and
//! [`runner::run_examples`]. All artifacts are written atomically so a
//! crashed run never leaves a half-written file behind.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod scenarios;
