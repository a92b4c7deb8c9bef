//! Domain types shared across the engine.
//!
//! Units are fixed everywhere: thrust kN, torque kN·m, penetration rate
//! mm/min, cutter life m³/mm, UCS MPa, particle sizes mm, lengths m.

mod sieve;
mod wear;

pub use sieve::{coarseness_index, mean_grain_size, GrainSize, SieveAnalysis, SieveBin};
pub use wear::{cutter_life_from_wear, WearInterval};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sieves in the standard stack (63 … 2.36 mm).
pub const STANDARD_SIEVE_COUNT: usize = 6;

/// Surrounding-rock class, stored ordinally: class II → 2 … class V → 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RockClass(u8);

impl RockClass {
    pub const II: RockClass = RockClass(2);
    pub const III: RockClass = RockClass(3);
    pub const IV: RockClass = RockClass(4);
    pub const V: RockClass = RockClass(5);

    pub fn new(ordinal: u8) -> Result<Self> {
        if (2..=5).contains(&ordinal) {
            Ok(RockClass(ordinal))
        } else {
            Err(Error::invalid(
                "src",
                format!("rock class must be 2..=5 (II..V), got {ordinal}"),
            ))
        }
    }

    pub fn ordinal(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for RockClass {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        RockClass::new(v)
    }
}

impl From<RockClass> for u8 {
    fn from(c: RockClass) -> u8 {
        c.0
    }
}

/// Muck geometry type observed on the conveyor.
///
/// Every class contains rock debris; slices and blocks are optional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct MuckGeometry(u8);

impl MuckGeometry {
    pub const DEBRIS: MuckGeometry = MuckGeometry(1);
    pub const DEBRIS_SLICES: MuckGeometry = MuckGeometry(2);
    pub const DEBRIS_BLOCKS: MuckGeometry = MuckGeometry(3);
    pub const DEBRIS_SLICES_BLOCKS: MuckGeometry = MuckGeometry(4);

    pub const ALL: [MuckGeometry; 4] = [
        Self::DEBRIS,
        Self::DEBRIS_SLICES,
        Self::DEBRIS_BLOCKS,
        Self::DEBRIS_SLICES_BLOCKS,
    ];

    pub fn new(category: u8) -> Result<Self> {
        if (1..=4).contains(&category) {
            Ok(MuckGeometry(category))
        } else {
            Err(Error::invalid(
                "mgt",
                format!("muck geometry type must be 1..=4, got {category}"),
            ))
        }
    }

    pub fn category(self) -> u8 {
        self.0
    }

    /// Zero-based position in the one-hot encoding.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    /// Flags `(debris, slices, blocks)` that this class stands for.
    pub fn observation(self) -> (bool, bool, bool) {
        match self.0 {
            1 => (true, false, false),
            2 => (true, true, false),
            3 => (true, false, true),
            _ => (true, true, true),
        }
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            1 => "rock debris",
            2 => "rock debris and rock slices",
            3 => "rock debris and rock block",
            _ => "rock debris, rock slices and rock block",
        }
    }
}

impl TryFrom<u8> for MuckGeometry {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        MuckGeometry::new(v)
    }
}

impl From<MuckGeometry> for u8 {
    fn from(m: MuckGeometry) -> u8 {
        m.0
    }
}

/// Maps conveyor observations to a muck geometry class.
pub fn classify_muck_geometry(debris: bool, slices: bool, blocks: bool) -> Result<MuckGeometry> {
    match (debris, slices, blocks) {
        (true, false, false) => Ok(MuckGeometry::DEBRIS),
        (true, true, false) => Ok(MuckGeometry::DEBRIS_SLICES),
        (true, false, true) => Ok(MuckGeometry::DEBRIS_BLOCKS),
        (true, true, true) => Ok(MuckGeometry::DEBRIS_SLICES_BLOCKS),
        (false, false, false) => Err(Error::invalid("muck", "no muck type observed")),
        (false, s, b) => Err(Error::UnsupportedCombination(format!(
            "slices={s}, blocks={b} without rock debris"
        ))),
    }
}

/// Rock-side inputs for one tunnel location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RockMassState {
    pub src: RockClass,
    /// Uniaxial compressive strength, MPa.
    pub ucs: f64,
    /// Rock quality designation, percent.
    pub rqd: f64,
    /// Cerchar abrasivity index.
    pub cai: f64,
    /// Quartz content, percent.
    pub q: f64,
    /// Coarseness index over the standard six-sieve stack.
    pub ci: f64,
    /// Mean grain size, mm.
    pub m: f64,
    pub mgt: MuckGeometry,
}

impl RockMassState {
    pub fn validate(&self) -> Result<()> {
        check(self.ucs.is_finite() && self.ucs > 0.0, "ucs", "must be > 0")?;
        check(
            (0.0..=100.0).contains(&self.rqd),
            "rqd",
            "must lie in [0, 100]",
        )?;
        check(self.cai.is_finite() && self.cai > 0.0, "cai", "must be > 0")?;
        check((0.0..=100.0).contains(&self.q), "q", "must lie in [0, 100]")?;
        let ci_max = 100.0 * STANDARD_SIEVE_COUNT as f64;
        check(
            (0.0..=ci_max).contains(&self.ci),
            "ci",
            &format!("must lie in [0, {ci_max}]"),
        )?;
        check(self.m.is_finite() && self.m > 0.0, "m", "must be > 0")?;
        Ok(())
    }

    pub fn with_mgt(mut self, mgt: MuckGeometry) -> Self {
        self.mgt = mgt;
        self
    }
}

/// The two control parameters chosen by the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineSetting {
    /// Total thrust, kN.
    pub th: f64,
    /// Cutterhead torque, kN·m.
    pub tor: f64,
}

impl MachineSetting {
    pub fn new(th: f64, tor: f64) -> Self {
        MachineSetting { th, tor }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.th.is_finite() && self.th > 0.0, "th", "must be > 0")?;
        check(self.tor.is_finite() && self.tor > 0.0, "tor", "must be > 0")
    }
}

/// One training or evaluation row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingRecord {
    /// Tunnel mileage in metres; only used for ordering.
    pub chainage: Option<f64>,
    pub rock: RockMassState,
    pub machine: MachineSetting,
    /// Penetration rate, mm/min.
    pub pr: Option<f64>,
    /// Cutter life, m³/mm.
    pub ef: Option<f64>,
}

impl TunnelingRecord {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.chainage {
            check(c.is_finite(), "chainage_m", "must be finite")?;
        }
        self.rock.validate()?;
        self.machine.validate()?;
        if self.pr.is_none() && self.ef.is_none() {
            return Err(Error::invalid("pr/ef", "at least one target must be present"));
        }
        if let Some(pr) = self.pr {
            check(pr.is_finite() && pr > 0.0, "pr", "must be > 0")?;
        }
        if let Some(ef) = self.ef {
            check(ef.is_finite() && ef > 0.0, "ef", "must be > 0")?;
        }
        Ok(())
    }
}

pub(crate) fn check(ok: bool, field: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, message))
    }
}
