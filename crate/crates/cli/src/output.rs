//! File writers for the pipeline outputs.

use anyhow::{Context, Result};
use hht_dsp::hsa::{HilbertSpectrum, MagnitudeSpectrum};
use hht_dsp::io::{format_value, write_column, write_signal};
use hht_dsp::TimeSeries;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

pub fn data_path(dir: &Path, stem: &str, format: OutputFormat) -> PathBuf {
    dir.join(format!("{stem}.{}", format.extension()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

pub fn write_series_file(path: &Path, series: &TimeSeries, format: OutputFormat) -> Result<()> {
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => {
            write_signal(&mut w, series).with_context(|| format!("writing {}", path.display()))?
        }
        OutputFormat::Jsonl => {
            for (k, v) in series.samples().iter().enumerate() {
                let row = serde_json::json!({ "t_s": series.time_at(k), "value": v });
                writeln!(w, "{row}")?;
            }
        }
    }
    Ok(w.flush()?)
}

pub fn write_spectrum_file(
    path: &Path,
    spectrum: &MagnitudeSpectrum,
    format: OutputFormat,
) -> Result<()> {
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(w, "# frequency_hz,magnitude")?;
            for (f, m) in spectrum.frequencies_hz.iter().zip(&spectrum.magnitudes) {
                writeln!(w, "{},{}", format_value(*f), format_value(*m))?;
            }
        }
        OutputFormat::Jsonl => {
            for (f, m) in spectrum.frequencies_hz.iter().zip(&spectrum.magnitudes) {
                let row = serde_json::json!({ "frequency_hz": f, "magnitude": m });
                writeln!(w, "{row}")?;
            }
        }
    }
    Ok(w.flush()?)
}

pub fn write_hilbert_spectrum_file(
    path: &Path,
    spectrum: &HilbertSpectrum,
    format: OutputFormat,
) -> Result<()> {
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(w, "# t_s,frequency_hz,amplitude,imf_index")?;
            for e in &spectrum.entries {
                writeln!(
                    w,
                    "{},{},{},{}",
                    format_value(e.time_s),
                    format_value(e.frequency_hz),
                    format_value(e.amplitude),
                    e.imf_index
                )?;
            }
        }
        OutputFormat::Jsonl => {
            for e in &spectrum.entries {
                let row = serde_json::json!({
                    "t_s": e.time_s,
                    "frequency_hz": e.frequency_hz,
                    "amplitude": e.amplitude,
                    "imf_index": e.imf_index,
                });
                writeln!(w, "{row}")?;
            }
        }
    }
    Ok(w.flush()?)
}

pub fn write_column_file(path: &Path, values: &[f64], format: OutputFormat) -> Result<()> {
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => {
            write_column(&mut w, values).with_context(|| format!("writing {}", path.display()))?
        }
        OutputFormat::Jsonl => {
            for v in values {
                let row = serde_json::json!({ "value": v });
                writeln!(w, "{row}")?;
            }
        }
    }
    Ok(w.flush()?)
}

pub fn write_jsonl(path: &Path, rows: &[serde_json::Value]) -> Result<()> {
    let mut w = create(path)?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    Ok(w.flush()?)
}
