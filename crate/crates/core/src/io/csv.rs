use std::collections::BTreeMap;

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::domain::{MachineSetting, MuckGeometry, RockClass, RockMassState, SieveAnalysis, SieveBin, TunnelingRecord};
use crate::error::{Error, Result};

pub const RECORDS_HEADER: [&str; 13] = [
    "chainage_m",
    "src",
    "ucs_mpa",
    "rqd_pct",
    "cai",
    "q_pct",
    "ci",
    "m_mm",
    "mgt",
    "th_kn",
    "tor_knm",
    "pr_mm_min",
    "ef_m3_mm",
];

pub const SIEVE_HEADER: [&str; 3] = ["sample_id", "sieve_mm", "retained_g"];

/// CSV column holding a domain field, for error messages.
fn column_for(field: &str) -> &str {
    match field {
        "ucs" => "ucs_mpa",
        "rqd" => "rqd_pct",
        "q" => "q_pct",
        "m" => "m_mm",
        "th" => "th_kn",
        "tor" => "tor_knm",
        "pr" => "pr_mm_min",
        "ef" => "ef_m3_mm",
        "pr/ef" => "pr_mm_min,ef_m3_mm",
        other => other,
    }
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn csv_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Csv {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

fn check_header(rec: Option<std::result::Result<StringRecord, csv::Error>>, expected: &[&str]) -> Result<()> {
    let header = match rec {
        None => return Err(csv_err(1, "", "missing header row")),
        Some(r) => r.map_err(|e| csv_err(1, "", e.to_string()))?,
    };
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(csv_err(
            1,
            "",
            format!("header must be `{}`, got `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

struct Row<'a> {
    rec: &'a StringRecord,
    line: usize,
    header: &'a [&'a str],
}

impl Row<'_> {
    fn cell(&self, i: usize) -> &str {
        self.rec.get(i).unwrap_or("")
    }

    fn opt_f64(&self, i: usize) -> Result<Option<f64>> {
        let s = self.cell(i);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| csv_err(self.line, self.header[i], format!("`{s}` is not a number")))
    }

    fn f64(&self, i: usize) -> Result<f64> {
        self.opt_f64(i)?
            .ok_or_else(|| csv_err(self.line, self.header[i], "value is required"))
    }

    fn u8(&self, i: usize) -> Result<u8> {
        let s = self.cell(i);
        s.parse::<u8>()
            .map_err(|_| csv_err(self.line, self.header[i], format!("`{s}` is not a small integer")))
    }
}

/// Parses the records CSV. Row numbers in errors are file line numbers
/// (the header is line 1).
pub fn parse_records_csv(bytes: &[u8]) -> Result<Vec<TunnelingRecord>> {
    let mut rdr = reader(bytes);
    let mut it = rdr.records();
    check_header(it.next(), &RECORDS_HEADER)?;

    let mut out = Vec::new();
    for (k, rec) in it.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| csv_err(line, "", e.to_string()))?;
        if rec.len() != RECORDS_HEADER.len() {
            return Err(csv_err(
                line,
                "",
                format!("expected {} fields, got {}", RECORDS_HEADER.len(), rec.len()),
            ));
        }
        let row = Row {
            rec: &rec,
            line,
            header: &RECORDS_HEADER,
        };
        let src = RockClass::new(row.u8(1)?).map_err(|e| csv_err(line, "src", e.to_string()))?;
        let mgt = MuckGeometry::new(row.u8(8)?).map_err(|e| csv_err(line, "mgt", e.to_string()))?;
        let record = TunnelingRecord {
            chainage: row.opt_f64(0)?,
            rock: RockMassState {
                src,
                ucs: row.f64(2)?,
                rqd: row.f64(3)?,
                cai: row.f64(4)?,
                q: row.f64(5)?,
                ci: row.f64(6)?,
                m: row.f64(7)?,
                mgt,
            },
            machine: MachineSetting::new(row.f64(9)?, row.f64(10)?),
            pr: row.opt_f64(11)?,
            ef: row.opt_f64(12)?,
        };
        record.validate().map_err(|e| match e {
            Error::InvalidInput { field, message } => csv_err(line, column_for(&field), message),
            other => csv_err(line, "", other.to_string()),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records with shortest round-trip float formatting, so parsing
/// the output reproduces every field exactly.
pub fn emit_records_csv(records: &[TunnelingRecord]) -> Result<String> {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(RECORDS_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            fmt_opt(r.chainage),
            r.rock.src.ordinal().to_string(),
            r.rock.ucs.to_string(),
            r.rock.rqd.to_string(),
            r.rock.cai.to_string(),
            r.rock.q.to_string(),
            r.rock.ci.to_string(),
            r.rock.m.to_string(),
            r.rock.mgt.category().to_string(),
            r.machine.th.to_string(),
            r.machine.tor.to_string(),
            fmt_opt(r.pr),
            fmt_opt(r.ef),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Parses sieve-test rows into one analysis per sample, in order of first
/// appearance. Row order within a sample does not matter; `sieve_mm = 0`
/// is the pan.
pub fn parse_sieve_csv(bytes: &[u8]) -> Result<Vec<SieveAnalysis>> {
    let mut rdr = reader(bytes);
    let mut it = rdr.records();
    check_header(it.next(), &SIEVE_HEADER)?;

    let mut order: Vec<String> = Vec::new();
    // opening bits -> (mass, line); BTreeMap keeps bins sorted
    let mut samples: BTreeMap<String, (BTreeMap<u64, (f64, f64)>, Option<f64>, usize)> = BTreeMap::new();
    for (k, rec) in it.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| csv_err(line, "", e.to_string()))?;
        if rec.len() != SIEVE_HEADER.len() {
            return Err(csv_err(line, "", format!("expected 3 fields, got {}", rec.len())));
        }
        let row = Row {
            rec: &rec,
            line,
            header: &SIEVE_HEADER,
        };
        let id = row.cell(0).to_string();
        if id.is_empty() {
            return Err(csv_err(line, "sample_id", "value is required"));
        }
        let sieve = row.f64(1)?;
        let mass = row.f64(2)?;
        if sieve < 0.0 {
            return Err(csv_err(line, "sieve_mm", "must be >= 0"));
        }
        if mass < 0.0 {
            return Err(csv_err(line, "retained_g", "must be >= 0"));
        }
        let entry = samples.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            (BTreeMap::new(), None, line)
        });
        if sieve == 0.0 {
            if entry.1.replace(mass).is_some() {
                return Err(csv_err(line, "sieve_mm", format!("duplicate pan in sample `{id}`")));
            }
        } else if entry.0.insert(sieve.to_bits(), (sieve, mass)).is_some() {
            return Err(csv_err(
                line,
                "sieve_mm",
                format!("duplicate {sieve} mm sieve in sample `{id}`"),
            ));
        }
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let (bins, pan, line) = samples.remove(&id).expect("sample recorded");
        // positive f64 bit patterns sort like the values; reverse for coarsest first
        let analysis = SieveAnalysis {
            sample_id: id,
            bins: bins
                .values()
                .rev()
                .map(|&(opening_mm, retained_g)| SieveBin {
                    opening_mm,
                    retained_g,
                })
                .collect(),
            pan_mass: pan.unwrap_or(0.0),
        };
        analysis.validate().map_err(|e| match e {
            Error::InvalidInput { field, message } => csv_err(
                line,
                &field,
                format!("sample `{}`: {message}", analysis.sample_id),
            ),
            other => other,
        })?;
        out.push(analysis);
    }
    Ok(out)
}
