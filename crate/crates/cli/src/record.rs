//! The capacity-record file format: one JSON object per line, preceded by
//! a header line that pins the format version and the bitmask indexing
//! contract. Values serialize with full round-trip precision.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use capgen_core::{ClassTag, SetFunction};

use crate::exit::CliError;

pub const FORMAT_NAME: &str = "capgen/capacity-records";
pub const FORMAT_VERSION: u32 = 1;
pub const INDEXING_NOTE: &str =
    "values[m] is the measure of the subset with bitmask m; bit b (LSB = 0) encodes element b+1";

/// First line of every record file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub indexing: String,
}

impl Header {
    pub fn current() -> Header {
        Header {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            indexing: INDEXING_NOTE.to_string(),
        }
    }
}

/// Generation parameters a record carries for replay and verification.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RecordParams {
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub interaction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_class: Option<String>,
    pub strict: bool,
    pub walk_steps: usize,
    pub eta_fraction: f64,
}

/// One generated capacity with enough context to verify and replay it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CapacityRecord {
    pub index: u64,
    pub n: usize,
    pub values: Vec<f64>,
    pub tags: Vec<String>,
    pub params: RecordParams,
    pub seed: u64,
    pub generator_version: String,
}

impl CapacityRecord {
    pub fn measure(&self) -> Result<SetFunction, CliError> {
        SetFunction::from_values(self.n, self.values.clone())
            .map_err(|e| CliError::parse(format!("record {}: {e}", self.index)))
    }

    pub fn parsed_tags(&self) -> Result<Vec<ClassTag>, CliError> {
        self.tags
            .iter()
            .map(|t| {
                t.parse::<ClassTag>()
                    .map_err(|e| CliError::parse(format!("record {}: {e}", self.index)))
            })
            .collect()
    }
}

pub fn write_header(out: &mut impl Write) -> Result<(), CliError> {
    let line = serde_json::to_string(&Header::current()).map_err(CliError::json)?;
    writeln!(out, "{line}").map_err(CliError::io)
}

pub fn write_record(out: &mut impl Write, record: &CapacityRecord) -> Result<(), CliError> {
    let line = serde_json::to_string(record).map_err(CliError::json)?;
    writeln!(out, "{line}").map_err(CliError::io)
}

/// Reads a record stream, tolerating a missing header but validating a
/// present one.
pub fn read_records(input: &mut impl BufRead) -> Result<Vec<CapacityRecord>, CliError> {
    let mut records = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(CliError::io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 0 && trimmed.contains("\"format\"") {
            let header: Header = serde_json::from_str(trimmed)
                .map_err(|e| CliError::parse(format!("bad header line: {e}")))?;
            if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
                return Err(CliError::parse(format!(
                    "unsupported format {} v{}",
                    header.format, header.version
                )));
            }
            continue;
        }
        let record: CapacityRecord = serde_json::from_str(trimmed)
            .map_err(|e| CliError::parse(format!("line {}: {e}", lineno + 1)))?;
        let expected = 1usize.checked_shl(record.n as u32).unwrap_or(0);
        if record.values.len() != expected {
            return Err(CliError::parse(format!(
                "line {}: {} values for n = {}",
                lineno + 1,
                record.values.len(),
                record.n
            )));
        }
        records.push(record);
    }
    Ok(records)
}

/// CSV rendering of a record batch: fixed leading columns, then one
/// column per subset in bitmask order.
pub fn write_csv(out: &mut impl Write, records: &[CapacityRecord]) -> Result<(), CliError> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let mut header = String::from("index,n,class,tags,seed");
    for m in 0..first.values.len() {
        header.push_str(&format!(",v{m}"));
    }
    writeln!(out, "{header}").map_err(CliError::io)?;
    for r in records {
        let mut line = format!("{},{},{},{},{}", r.index, r.n, r.params.class, r.tags.join(";"), r.seed);
        for v in &r.values {
            line.push(',');
            line.push_str(&format_float(*v));
        }
        writeln!(out, "{line}").map_err(CliError::io)?;
    }
    Ok(())
}

/// Shortest representation that round-trips the exact f64.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu_like(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(v: f64) -> String {
    // serde_json already emits shortest-round-trip floats; reuse it.
    serde_json::to_string(&v).unwrap_or_else(|_| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> CapacityRecord {
        CapacityRecord {
            index: 0,
            n: 2,
            values: vec![0.0, 0.3, 0.4, 1.0],
            tags: vec!["supermodular".into()],
            params: RecordParams {
                class: "supermodular".into(),
                strict: false,
                walk_steps: 5,
                eta_fraction: 0.3,
                ..RecordParams::default()
            },
            seed: 42,
            generator_version: "0.1.0".into(),
        }
    }

    #[test]
    fn jsonl_round_trip_is_lossless() {
        let mut rec = sample_record();
        rec.values = vec![0.0, 0.1 + 0.2, 0.123456789012345678, 1.0];
        let mut buf = Vec::new();
        write_header(&mut buf).unwrap();
        write_record(&mut buf, &rec).unwrap();
        let parsed = read_records(&mut buf.as_slice()).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0], rec);
        for (a, b) in parsed[0].values.iter().zip(&rec.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn missing_header_is_tolerated() {
        let mut buf = Vec::new();
        write_record(&mut buf, &sample_record()).unwrap();
        let parsed = read_records(&mut buf.as_slice()).unwrap();
        assert_eq!(parsed.len(), 1);
    }

    #[test]
    fn bad_lines_are_parse_errors() {
        let garbage = b"not json\n".to_vec();
        assert!(read_records(&mut garbage.as_slice()).is_err());
        let truncated = br#"{"index":0,"n":3,"values":[0.0,1.0]"#.to_vec();
        assert!(read_records(&mut truncated.as_slice()).is_err());
        // Wrong value count for n.
        let mut rec = sample_record();
        rec.n = 3;
        let mut buf = Vec::new();
        write_record(&mut buf, &rec).unwrap();
        assert!(read_records(&mut buf.as_slice()).is_err());
    }
}
