//! Experiment runner for the block-iteration framework: configuration files,
//! the built-in figure experiments, CSV tables and SVG plots.

pub mod config;
pub mod experiments;
pub mod output;
