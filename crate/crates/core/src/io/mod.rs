//! Configuration loading, CSV export, text reports and the command line.

pub mod cli;
pub mod config;
pub mod export;
pub mod quantity;
pub mod report;
pub mod sidecar;
