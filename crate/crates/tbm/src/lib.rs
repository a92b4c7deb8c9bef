//! Command-line driver and HTTP service for the TBM decision engine.

pub mod cli;
pub mod service;
