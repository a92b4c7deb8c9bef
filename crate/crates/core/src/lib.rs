//! Decision engine for choosing TBM thrust and torque.
//!
//! Two surrogate networks (penetration rate and cutter life) are trained
//! from tunnelling records; an exhaustive grid search then picks the
//! setting that minimizes cutter cost plus schedule cost per metre.

pub mod api;
pub mod decision;
pub mod domain;
pub mod error;
pub mod io;
pub mod model;
pub mod preprocess;
pub mod sabpnn;
pub mod synth;

pub use error::{Error, Result};
