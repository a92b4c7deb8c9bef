use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::check;
use crate::error::Result;

/// A stretch of tunnel over which cutter wear was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WearInterval {
    /// Chainage at the start of the interval, m.
    pub start: f64,
    /// Chainage at the end of the interval, m.
    pub end: f64,
    /// Wear summed over every cutter on the cutterhead, mm.
    pub total_wear: f64,
    /// Cutterhead diameter, m.
    pub cutterhead_diameter: f64,
}

/// Excavated volume per millimetre of total cutter wear, m³/mm:
/// `π·D²·l / (4·W)` with `l = end − start`.
pub fn cutter_life_from_wear(interval: &WearInterval) -> Result<f64> {
    let length = interval.end - interval.start;
    check(
        length.is_finite() && length > 0.0,
        "length",
        "end must be greater than start",
    )?;
    check(
        interval.total_wear.is_finite() && interval.total_wear > 0.0,
        "total_wear",
        "must be > 0",
    )?;
    let d = interval.cutterhead_diameter;
    check(d.is_finite() && d > 0.0, "cutterhead_diameter", "must be > 0")?;
    Ok(PI * d * d * length / (4.0 * interval.total_wear))
}
