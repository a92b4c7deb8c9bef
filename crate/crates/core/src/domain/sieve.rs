//! Sieve-test analytics for muck samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveBin {
    /// Sieve opening, mm.
    pub opening_mm: f64,
    /// Mass retained on this sieve, g.
    pub retained_g: f64,
}

/// One sieve test. Bins are ordered coarsest first; the pan catches
/// everything finer than the last sieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveAnalysis {
    pub sample_id: String,
    pub bins: Vec<SieveBin>,
    pub pan_mass: f64,
}

impl SieveAnalysis {
    pub fn validate(&self) -> Result<()> {
        if self.bins.is_empty() {
            return Err(Error::invalid("bins", "at least one sieve is required"));
        }
        for (i, bin) in self.bins.iter().enumerate() {
            if !(bin.opening_mm.is_finite() && bin.opening_mm > 0.0) {
                return Err(Error::invalid(
                    "sieve_mm",
                    format!("opening #{i} must be > 0, got {}", bin.opening_mm),
                ));
            }
            if !(bin.retained_g.is_finite() && bin.retained_g >= 0.0) {
                return Err(Error::invalid(
                    "retained_g",
                    format!("mass on {} mm sieve must be >= 0", bin.opening_mm),
                ));
            }
        }
        if self
            .bins
            .windows(2)
            .any(|w| w[1].opening_mm >= w[0].opening_mm)
        {
            return Err(Error::invalid(
                "sieve_mm",
                "sieve openings must be strictly decreasing",
            ));
        }
        if !(self.pan_mass.is_finite() && self.pan_mass >= 0.0) {
            return Err(Error::invalid("pan_mass", "must be >= 0"));
        }
        if self.total_mass() <= 0.0 {
            return Err(Error::invalid("total_mass", "sample has zero total mass"));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.bins.iter().map(|b| b.retained_g).sum::<f64>() + self.pan_mass
    }

    /// Cumulative retained percent after each sieve, coarsest first.
    pub fn cumulative_retained_pct(&self) -> Vec<f64> {
        let total = self.total_mass();
        let mut acc = 0.0;
        self.bins
            .iter()
            .map(|b| {
                acc += b.retained_g;
                100.0 * acc / total
            })
            .collect()
    }
}

/// Sum over the sieve stack of cumulative retained percentages.
///
/// Ranges from 0 (everything in the pan) to `100·n` (everything on the
/// coarsest sieve).
pub fn coarseness_index(sample: &SieveAnalysis) -> Result<f64> {
    sample.validate()?;
    Ok(sample.cumulative_retained_pct().iter().sum())
}

/// Characteristic sizes of a sample's gradation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrainSize {
    pub mean_mm: f64,
    pub phi16: f64,
    pub phi50: f64,
    pub phi84: f64,
    /// Set when a percentile fell outside the sieve stack and was clamped
    /// to the finest or coarsest opening.
    pub clamped: bool,
}

/// Mean of the 16th, 50th and 84th percent-finer sizes.
///
/// Percent passing is interpolated linearly in `log10(size)` between
/// adjacent sieve openings.
pub fn mean_grain_size(sample: &SieveAnalysis) -> Result<GrainSize> {
    sample.validate()?;

    let occupied: Vec<&SieveBin> = sample.bins.iter().filter(|b| b.retained_g > 0.0).collect();
    if sample.pan_mass == 0.0 && occupied.len() == 1 {
        let d = occupied[0].opening_mm;
        return Ok(GrainSize {
            mean_mm: d,
            phi16: d,
            phi50: d,
            phi84: d,
            clamped: false,
        });
    }

    // Gradation curve, finest sieve first: (log10 size, percent passing).
    let curve: Vec<(f64, f64)> = sample
        .bins
        .iter()
        .zip(sample.cumulative_retained_pct())
        .rev()
        .map(|(b, cum)| (b.opening_mm.log10(), (100.0 - cum).max(0.0)))
        .collect();

    let mut clamped = false;
    let mut size_at = |p: f64| -> f64 {
        let (d, c) = percentile_size(&curve, p);
        clamped |= c;
        d
    };
    let phi16 = size_at(16.0);
    let phi50 = size_at(50.0);
    let phi84 = size_at(84.0);

    Ok(GrainSize {
        mean_mm: (phi16 + phi50 + phi84) / 3.0,
        phi16,
        phi50,
        phi84,
        clamped,
    })
}

fn percentile_size(curve: &[(f64, f64)], p: f64) -> (f64, bool) {
    let j = match curve.iter().position(|&(_, passing)| passing >= p) {
        Some(j) => j,
        // mass on the coarsest sieve has no upper bound
        None => return (10f64.powf(curve[curve.len() - 1].0), true),
    };
    let (x1, y1) = curve[j];
    if j == 0 {
        // p falls in the pan unless the curve hits it exactly
        return (10f64.powf(x1), y1 > p);
    }
    let (x0, y0) = curve[j - 1];
    let t = (p - y0) / (y1 - y0);
    (10f64.powf(x0 + t * (x1 - x0)), false)
}
