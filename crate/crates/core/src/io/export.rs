//! Sweep CSV: `b_m,w_m_m,speed_rpm,torque_Nm,status`, LF line endings,
//! floats with 17 significant digits so every value reads back bit-exactly.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::search::{SweepEntry, SweepResult};
use crate::units::Rpm;

pub const CSV_HEADER: [&str; 5] = ["b_m", "w_m_m", "speed_rpm", "torque_Nm", "status"];

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(context: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(context, source),
        other => Error::Parse {
            path: context.to_string(),
            line,
            column: 1,
            message: format!("{other:?}"),
        },
    }
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let context = "sweep CSV";
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| csv_error(context, e))?;
    for e in &result.entries {
        let torque = e.torque.map(format_float).unwrap_or_default();
        writer
            .write_record([
                format_float(e.b),
                format_float(e.w_m),
                format_float(e.speed.value()),
                torque,
                e.status.clone(),
            ])
            .map_err(|e| csv_error(context, e))?;
    }
    writer.flush().map_err(|e| Error::io(context, e))
}

pub fn sweep_csv_string(result: &SweepResult) -> String {
    let mut buffer = Vec::new();
    write_sweep_csv(result, &mut buffer).expect("writing to memory");
    String::from_utf8(buffer).expect("ASCII output")
}

/// Reads rows written by [`write_sweep_csv`].
pub fn parse_sweep_csv<R: Read>(input: R, origin: &str) -> Result<Vec<SweepEntry>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let header = reader.headers().map_err(|e| csv_error(origin, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 1,
            column: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| Error::Parse {
                path: origin.to_string(),
                line,
                column: i + 1,
                message: format!("{}: {e}", CSV_HEADER[i]),
            })
        };
        let torque = if record[3].is_empty() {
            None
        } else {
            Some(field(3)?)
        };
        entries.push(SweepEntry {
            b: field(0)?,
            w_m: field(1)?,
            speed: Rpm(field(2)?),
            torque,
            status: record[4].to_string(),
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpeedConvention;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.03), "2.9999999999999999e-2");
        assert_eq!(format_float(1000.0), "1.0000000000000000e3");
        assert_eq!(format_float(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn failed_entries_leave_torque_empty() {
        let result = SweepResult {
            entries: vec![SweepEntry {
                b: 0.03,
                w_m: 0.11,
                speed: Rpm(1000.0),
                torque: None,
                status: "NON_CONVERGED".into(),
            }],
            model_fingerprint: String::new(),
            convention: SpeedConvention::default(),
        };
        let text = sweep_csv_string(&result);
        assert!(text.ends_with(",,NON_CONVERGED\n"));
        assert!(!text.contains('\r'));
        let back = parse_sweep_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(back, result.entries);
    }

    #[test]
    fn wrong_header_rejected() {
        let err = parse_sweep_csv("a,b,c,d,e\n".as_bytes(), "mem").unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
    }
}
