use std::io;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::decision::CostSurface;
use crate::error::{Error, Result};
use crate::model::{ModelBundle, SCHEMA_VERSION};

/// Compact JSON whose floats are always written as 17 significant digits
/// in exponent form. Non-finite floats become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`CanonicalFormatter`]. Key order follows struct
/// declaration order.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::Malformed(e.to_string()))
}

fn parse<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn save_model(bundle: &ModelBundle) -> Result<String> {
    bundle.validate()?;
    to_canonical_json(bundle)
}

/// Parses and validates a bundle. The schema version is checked before
/// the rest of the document is interpreted.
pub fn load_model(bytes: &[u8]) -> Result<ModelBundle> {
    let value: serde_json::Value = parse(bytes)?;
    match value.get("schema_version").and_then(|v| v.as_str()) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(Error::UnsupportedVersion {
                found: other.to_string(),
                expected: SCHEMA_VERSION.into(),
            })
        }
        None => return Err(Error::Malformed("missing schema_version".into())),
    }
    let bundle: ModelBundle =
        serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;
    bundle.validate()?;
    Ok(bundle)
}

pub fn save_surface(surface: &CostSurface) -> Result<String> {
    surface.validate()?;
    to_canonical_json(surface)
}

pub fn load_surface(bytes: &[u8]) -> Result<CostSurface> {
    let surface: CostSurface = parse(bytes)?;
    surface.validate()?;
    Ok(surface)
}
