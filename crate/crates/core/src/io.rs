//! Signal text format: load and store the CSV files the CLI exchanges.
//!
//! A signal file is newline-separated rows. Lines starting with `#` are
//! comments; the special header `# sample_rate_hz=<r>` carries the rate.
//! Data rows are either a single value per line or `t,value` pairs on a
//! uniform time grid. Numbers are written with 12 significant digits.

use crate::error::{Error, Result};
use crate::signal::{positive_finite, TimeSeries};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

const RATE_HEADER: &str = "sample_rate_hz=";
/// Relative tolerance for the uniform-grid check on a `t` column.
const GRID_TOLERANCE: f64 = 1e-6;

/// Format a value with 12 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Load a signal file. `rate_override` wins over the file header, which
/// wins over a rate inferred from the `t` column.
pub fn load_signal(path: &Path, rate_override: Option<f64>) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_signal_from_reader(BufReader::new(file), rate_override)
}

/// Parse a signal from any reader; see [`load_signal`].
pub fn load_signal_from_reader<R: BufRead>(
    reader: R,
    rate_override: Option<f64>,
) -> Result<TimeSeries> {
    let mut header_rate: Option<f64> = None;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    // None until the first data row fixes the column count.
    let mut two_column: Option<bool> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: format!("unreadable line: {e}"),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rate_text) = comment.strip_prefix(RATE_HEADER) {
                let rate = parse_number(rate_text.trim(), line_no)?;
                if !positive_finite(rate) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("sample rate must be positive, got {rate}"),
                    });
                }
                header_rate = Some(rate);
            }
            continue;
        }

        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        match (fields.len(), two_column) {
            (1, None) => two_column = Some(false),
            (2, None) => two_column = Some(true),
            (1, Some(false)) | (2, Some(true)) => {}
            (1, Some(true)) | (2, Some(false)) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "mixed one-column and two-column rows".into(),
                });
            }
            (n, _) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 1 or 2 fields, found {n}"),
                });
            }
        }
        if fields.len() == 2 {
            let t = parse_number(fields[0], line_no)?;
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("time column must be strictly increasing ({prev} then {t})"),
                    });
                }
            }
            times.push(t);
            values.push(parse_number(fields[1], line_no)?);
        } else {
            values.push(parse_number(fields[0], line_no)?);
        }
    }

    if values.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }

    let inferred = if times.len() >= 2 {
        Some(inferred_rate(&times)?)
    } else {
        None
    };
    let rate = rate_override.or(header_rate).or(inferred).ok_or_else(|| Error::Parse {
        line: 0,
        message: "no sample rate: supply a header, an override, or a t column".into(),
    })?;
    if !positive_finite(rate) {
        return Err(Error::InvalidParam(format!("sample rate must be positive, got {rate}")));
    }
    let t0 = times.first().copied().unwrap_or(0.0);
    TimeSeries::with_t0(values, rate, t0)
}

fn parse_number(text: &str, line_no: usize) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| Error::Parse {
        line: line_no,
        message: format!("not a number: {text:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line: line_no,
            message: format!("non-finite value: {text:?}"),
        });
    }
    Ok(v)
}

/// Rate from the median time step; every step must agree with the median
/// within the grid tolerance.
fn inferred_rate(times: &[f64]) -> Result<f64> {
    let mut dts: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    dts.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    let median = if dts.len() % 2 == 1 {
        dts[dts.len() / 2]
    } else {
        0.5 * (dts[dts.len() / 2 - 1] + dts[dts.len() / 2])
    };
    if !positive_finite(median) {
        return Err(Error::Parse { line: 0, message: "degenerate time grid".into() });
    }
    for (i, w) in times.windows(2).enumerate() {
        let dt = w[1] - w[0];
        if (dt - median).abs() > GRID_TOLERANCE * median {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "non-uniform grid: step {} at row {} vs median {}",
                    dt,
                    i + 2,
                    median
                ),
            });
        }
    }
    Ok(1.0 / median)
}

/// Write a signal as `t,value` rows under a rate header.
pub fn write_signal<W: Write>(mut w: W, series: &TimeSeries) -> std::io::Result<()> {
    writeln!(w, "# sample_rate_hz={}", format_value(series.sample_rate()))?;
    for (k, v) in series.samples().iter().enumerate() {
        writeln!(w, "{},{}", format_value(series.time_at(k)), format_value(*v))?;
    }
    Ok(())
}

/// Write one value per row (coefficient vectors and other plain columns).
pub fn write_column<W: Write>(mut w: W, values: &[f64]) -> std::io::Result<()> {
    for v in values {
        writeln!(w, "{}", format_value(*v))?;
    }
    Ok(())
}
