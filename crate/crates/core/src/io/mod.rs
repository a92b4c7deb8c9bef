//! File formats: records and sieve CSV, canonical JSON for models and
//! surfaces.

mod csv;
mod json;

pub use self::csv::{emit_records_csv, parse_records_csv, parse_sieve_csv, RECORDS_HEADER, SIEVE_HEADER};
pub use self::json::{load_model, load_surface, save_model, save_surface, to_canonical_json, CanonicalFormatter};
