//! Command-line pipeline: synthesize or load a signal, decompose it with
//! EMD, analyze the IMFs (DFT spectra + Hilbert spectral analysis), extract
//! ECG features, and run the Haar DWT comparison. Outputs are plot-ready
//! CSV (or JSONL) files plus machine-readable `features.jsonl` and
//! `summary.jsonl`.
//!
//! Every run writes into `--out`; on failure the stage that failed is
//! named on stderr, partial outputs stay in place, and a `FAILED` marker
//! file records the stage and message. Set `HHT_DSP_LOG` for progress
//! diagnostics on stderr.

mod output;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hht_dsp::ecg::{
    detect_r_peaks, extract_features, synthesize_ecg, Abnormality, EcgFeatureSet, EcgSynthParams,
};
use hht_dsp::emd::{decompose, Decomposition, SiftConfig, StopCriterion, StopReason};
use hht_dsp::hsa::{hilbert_spectrum, magnitude_spectrum};
use hht_dsp::io::load_signal;
use hht_dsp::{dwt, TimeSeries};
use output::{
    data_path, write_column_file, write_hilbert_spectrum_file, write_jsonl, write_series_file,
    write_spectrum_file, OutputFormat,
};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hht-dsp", version, about = "EMD/HSA/DWT signal analysis and ECG feature extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic ECG and write it as a signal file
    Synth(SynthCmd),
    /// Decompose a signal into IMFs plus a residue
    Decompose(DecomposeCmd),
    /// Decompose, then compute per-IMF spectra and the Hilbert spectrum
    Hsa(HsaCmd),
    /// Multilevel Haar wavelet transform of a signal
    Dwt(DwtCmd),
    /// Detect beats and extract ECG features
    Features(FeaturesCmd),
    /// Full run: signal -> EMD -> spectra -> HSA -> features -> DWT
    Pipeline(PipelineCmd),
}

#[derive(Args, Debug)]
struct OutOpts {
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Format for series, spectra, and coefficient files
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SynthOpts {
    /// Heart rate in beats per minute
    #[arg(long, default_value_t = 60.0)]
    hr: f64,
    /// Signal duration in seconds
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Abnormality mechanism for the generator
    #[arg(long, value_enum, default_value_t = AbnormalityArg::None)]
    abnormality: AbnormalityArg,
    /// RR jitter fraction (used by irregular-rr)
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Seed for the jitter source
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct InputOpts {
    /// Input signal file (`value` rows or `t,value` rows, optional
    /// `# sample_rate_hz=` header)
    #[arg(long, required_unless_present = "synth", conflicts_with = "synth")]
    input: Option<PathBuf>,
    /// Sample rate in hertz: override for loaded files, rate for --synth
    #[arg(long)]
    rate: Option<f64>,
    /// Synthesize the input instead of loading it
    #[arg(long)]
    synth: bool,
    #[command(flatten)]
    synth_opts: SynthOpts,
}

#[derive(Args, Debug)]
struct SiftOpts {
    /// Sifting stop criterion
    #[arg(long, value_enum, default_value_t = CriterionArg::Sd)]
    criterion: CriterionArg,
    /// Threshold for the SD criterion
    #[arg(long, default_value_t = 0.25)]
    sd_threshold: f64,
    /// Consecutive stable iterations for the S-number criterion
    #[arg(long, default_value_t = 4)]
    s_number: usize,
    /// Cap on extracted IMFs (default: floor(log2(N)))
    #[arg(long)]
    max_imfs: Option<usize>,
    /// Safety cap on sifting iterations per IMF
    #[arg(long, default_value_t = 200)]
    max_sift_iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Sd,
    Snumber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AbnormalityArg {
    None,
    DroppedBeats,
    IrregularRr,
    InvertedT,
}

impl From<AbnormalityArg> for Abnormality {
    fn from(a: AbnormalityArg) -> Self {
        match a {
            AbnormalityArg::None => Abnormality::None,
            AbnormalityArg::DroppedBeats => Abnormality::DroppedBeats,
            AbnormalityArg::IrregularRr => Abnormality::IrregularRr,
            AbnormalityArg::InvertedT => Abnormality::InvertedT,
        }
    }
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[command(flatten)]
    synth: SynthOpts,
    /// Sample rate in hertz
    #[arg(long, default_value_t = 500.0)]
    rate: f64,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args, Debug)]
struct DecomposeCmd {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    sift: SiftOpts,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args, Debug)]
struct HsaCmd {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    sift: SiftOpts,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args, Debug)]
struct DwtCmd {
    #[command(flatten)]
    input: InputOpts,
    /// Decomposition depth
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args, Debug)]
struct FeaturesCmd {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    sift: SiftOpts,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args, Debug)]
struct PipelineCmd {
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    sift: SiftOpts,
    /// Haar DWT depth for the comparison outputs
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[command(flatten)]
    out: OutOpts,
}

/// Error tagged with the pipeline stage that produced it.
struct StageError {
    stage: &'static str,
    error: anyhow::Error,
}

type StageResult<T> = Result<T, StageError>;

fn stage<T>(name: &'static str, f: impl FnOnce() -> anyhow::Result<T>) -> StageResult<T> {
    vlog(&format!("stage {name}"));
    f().map_err(|error| StageError { stage: name, error })
}

fn vlog(msg: &str) {
    if let Ok(v) = std::env::var("HHT_DSP_LOG") {
        if !v.is_empty() && v != "0" {
            eprintln!("[hht-dsp] {msg}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = out_opts(&cli.command).out.clone();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error in stage {}: {:#}", e.stage, e.error);
            let marker = out_dir.join("FAILED");
            let body = format!("stage: {}\nerror: {:#}\n", e.stage, e.error);
            if std::fs::write(&marker, body).is_err() {
                eprintln!("could not write FAILED marker in {}", out_dir.display());
            }
            ExitCode::FAILURE
        }
    }
}

fn out_opts(command: &Command) -> &OutOpts {
    match command {
        Command::Synth(c) => &c.out,
        Command::Decompose(c) => &c.out,
        Command::Hsa(c) => &c.out,
        Command::Dwt(c) => &c.out,
        Command::Features(c) => &c.out,
        Command::Pipeline(c) => &c.out,
    }
}

fn run(cli: Cli) -> StageResult<()> {
    let out = out_opts(&cli.command);
    let dir = out.out.clone();
    let format = out.format;
    stage("prepare-output", || {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))
    })?;

    match cli.command {
        Command::Synth(cmd) => {
            let signal = synth_signal(&cmd.synth, cmd.rate)?;
            stage("write-output", || {
                write_series_file(&data_path(&dir, "signal", format), &signal, format)
            })?;
            Ok(())
        }
        Command::Decompose(cmd) => {
            let signal = acquire_signal(&cmd.input)?;
            let d = decompose_signal(&signal, &cmd.sift)?;
            write_decomposition(&dir, format, &d)?;
            let summary = base_summary(&signal, Some(&d), config_echo(&cmd.input, Some(&cmd.sift), None));
            stage("write-output", || write_jsonl(&dir.join("summary.jsonl"), &[summary]))?;
            Ok(())
        }
        Command::Hsa(cmd) => {
            let signal = acquire_signal(&cmd.input)?;
            let d = decompose_signal(&signal, &cmd.sift)?;
            write_decomposition(&dir, format, &d)?;
            let dropped = write_spectra(&dir, format, &d)?;
            let mut summary =
                base_summary(&signal, Some(&d), config_echo(&cmd.input, Some(&cmd.sift), None));
            summary["dropped_negative_frequencies"] = json!(dropped);
            stage("write-output", || write_jsonl(&dir.join("summary.jsonl"), &[summary]))?;
            Ok(())
        }
        Command::Dwt(cmd) => {
            let signal = acquire_signal(&cmd.input)?;
            let levels = cmd.levels;
            let wavelet = run_dwt(&dir, format, &signal, levels)?;
            let mut summary =
                base_summary(&signal, None, config_echo(&cmd.input, None, Some(levels)));
            summary["dwt_levels"] = json!(wavelet.levels());
            summary["dwt_depth_clamped"] = json!(wavelet.depth_clamped());
            stage("write-output", || write_jsonl(&dir.join("summary.jsonl"), &[summary]))?;
            Ok(())
        }
        Command::Features(cmd) => {
            let signal = acquire_signal(&cmd.input)?;
            let d = decompose_signal(&signal, &cmd.sift)?;
            let features = run_features(&dir, &signal, &d)?;
            let mut summary =
                base_summary(&signal, Some(&d), config_echo(&cmd.input, Some(&cmd.sift), None));
            summary["beats_detected"] = json!(features.beats.len());
            summary["rhythm_flag"] = json!(features.rhythm_flag.as_str());
            stage("write-output", || write_jsonl(&dir.join("summary.jsonl"), &[summary]))?;
            Ok(())
        }
        Command::Pipeline(cmd) => {
            let signal = acquire_signal(&cmd.input)?;
            stage("write-output", || {
                write_series_file(&data_path(&dir, "signal", format), &signal, format)
            })?;
            let d = decompose_signal(&signal, &cmd.sift)?;
            write_decomposition(&dir, format, &d)?;
            let dropped = write_spectra(&dir, format, &d)?;
            let features = run_features(&dir, &signal, &d)?;
            let wavelet = run_dwt(&dir, format, &signal, cmd.levels)?;

            let mut summary = base_summary(
                &signal,
                Some(&d),
                config_echo(&cmd.input, Some(&cmd.sift), Some(cmd.levels)),
            );
            summary["dropped_negative_frequencies"] = json!(dropped);
            summary["beats_detected"] = json!(features.beats.len());
            summary["rhythm_flag"] = json!(features.rhythm_flag.as_str());
            summary["dwt_levels"] = json!(wavelet.levels());
            summary["dwt_depth_clamped"] = json!(wavelet.depth_clamped());
            stage("write-output", || write_jsonl(&dir.join("summary.jsonl"), &[summary]))?;
            Ok(())
        }
    }
}

fn synth_params(opts: &SynthOpts, rate: f64) -> EcgSynthParams {
    EcgSynthParams {
        heart_rate_bpm: opts.hr,
        duration_s: opts.duration,
        sample_rate_hz: rate,
        rr_jitter_fraction: opts.jitter,
        abnormality: opts.abnormality.into(),
        seed: opts.seed,
        ..Default::default()
    }
}

fn synth_signal(opts: &SynthOpts, rate: f64) -> StageResult<TimeSeries> {
    stage("synth", || {
        let params = synth_params(opts, rate);
        for warning in params.validate()? {
            eprintln!("warning: {warning}");
        }
        let ecg = synthesize_ecg(&params)?;
        vlog(&format!(
            "synthesized {} samples, {} beats",
            ecg.signal.len(),
            ecg.r_schedule_s.len()
        ));
        Ok(ecg.signal)
    })
}

fn acquire_signal(input: &InputOpts) -> StageResult<TimeSeries> {
    if input.synth {
        synth_signal(&input.synth_opts, input.rate.unwrap_or(500.0))
    } else {
        stage("load", || {
            let path = input.input.as_ref().ok_or_else(|| anyhow!("no input path"))?;
            let signal = load_signal(path, input.rate)?;
            vlog(&format!(
                "loaded {} samples at {} Hz",
                signal.len(),
                signal.sample_rate()
            ));
            Ok(signal)
        })
    }
}

fn sift_config(opts: &SiftOpts) -> SiftConfig {
    SiftConfig {
        sd_threshold: opts.sd_threshold,
        s_number: opts.s_number,
        criterion: match opts.criterion {
            CriterionArg::Sd => StopCriterion::Sd,
            CriterionArg::Snumber => StopCriterion::SNumber,
        },
        max_sift_iterations: opts.max_sift_iterations,
        max_imfs: opts.max_imfs,
    }
}

fn decompose_signal(signal: &TimeSeries, sift: &SiftOpts) -> StageResult<Decomposition> {
    stage("decompose", || {
        let d = decompose(signal, &sift_config(sift))?;
        vlog(&format!(
            "decomposed into {} IMFs ({:?})",
            d.imfs().len(),
            d.stop_reason()
        ));
        Ok(d)
    })
}

fn write_decomposition(dir: &Path, format: OutputFormat, d: &Decomposition) -> StageResult<()> {
    stage("write-output", || {
        for imf in d.imfs() {
            let path = data_path(dir, &format!("imf_{}", imf.index()), format);
            write_series_file(&path, imf.series(), format)?;
        }
        write_series_file(&data_path(dir, "residue", format), d.residue(), format)
    })
}

/// Per-IMF DFT magnitude spectra plus the Hilbert spectrum; returns the
/// dropped negative-frequency count.
fn write_spectra(dir: &Path, format: OutputFormat, d: &Decomposition) -> StageResult<usize> {
    let spectra = stage("spectra", || {
        d.imfs()
            .iter()
            .map(|imf| magnitude_spectrum(imf.series()).map(|s| (imf.index(), s)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Into::into)
    })?;
    stage("write-output", || {
        for (index, spectrum) in &spectra {
            let path = data_path(dir, &format!("spectrum_imf_{index}"), format);
            write_spectrum_file(&path, spectrum, format)?;
        }
        Ok(())
    })?;

    let spectrum = stage("hilbert-spectrum", || {
        let s = hilbert_spectrum(d)?;
        vlog(&format!(
            "hilbert spectrum: {} entries, {} negative dropped",
            s.entries.len(),
            s.dropped_negative
        ));
        Ok(s)
    })?;
    let dropped = spectrum.dropped_negative;
    stage("write-output", || {
        write_hilbert_spectrum_file(
            &data_path(dir, "hilbert_spectrum", format),
            &spectrum,
            format,
        )
    })?;
    Ok(dropped)
}

fn run_features(dir: &Path, signal: &TimeSeries, d: &Decomposition) -> StageResult<EcgFeatureSet> {
    let features = stage("features", || {
        let peaks = detect_r_peaks(signal, d)?;
        let features = extract_features(signal, &peaks)?;
        vlog(&format!("{} beats, rhythm {}", features.beats.len(), features.rhythm_flag.as_str()));
        Ok(features)
    })?;
    stage("write-output", || {
        let mut rows: Vec<serde_json::Value> = features
            .beats
            .iter()
            .map(|b| {
                json!({
                    "r_index": b.r_index,
                    "r_amplitude_mv": b.r_amplitude_mv,
                    "qrs_duration_s": b.qrs_duration_s,
                    "pre_gradient_mv_per_s": b.pre_gradient_mv_per_s,
                    "post_gradient_mv_per_s": b.post_gradient_mv_per_s,
                })
            })
            .collect();
        let rr = &features.rr_intervals_s;
        let rr_mean = if rr.is_empty() {
            None
        } else {
            Some(rr.iter().sum::<f64>() / rr.len() as f64)
        };
        rows.push(json!({
            "summary": true,
            "beat_count": features.beats.len(),
            "rr_mean_s": rr_mean,
            "rr_cv": features.rr_coefficient_of_variation(),
            "mean_heart_rate_bpm": features.mean_heart_rate_bpm,
            "rhythm_flag": features.rhythm_flag.as_str(),
        }));
        write_jsonl(&dir.join("features.jsonl"), &rows)
    })?;
    Ok(features)
}

fn run_dwt(
    dir: &Path,
    format: OutputFormat,
    signal: &TimeSeries,
    levels: usize,
) -> StageResult<dwt::WaveletDecomposition> {
    let wavelet = stage("dwt", || {
        let w = dwt::dwt_multilevel(signal, levels)?;
        if w.depth_clamped() {
            eprintln!(
                "warning: requested {levels} DWT levels, signal of {} samples allows {}",
                signal.len(),
                w.levels()
            );
        }
        Ok(w)
    })?;
    stage("write-output", || {
        for m in 1..=wavelet.levels() {
            let path = data_path(dir, &format!("dwt_level_{m}"), format);
            write_column_file(&path, wavelet.detail(m).expect("level in range"), format)?;
        }
        write_column_file(
            &data_path(dir, "dwt_approx", format),
            wavelet.approximation(),
            format,
        )
    })?;
    Ok(wavelet)
}

fn config_echo(input: &InputOpts, sift: Option<&SiftOpts>, levels: Option<usize>) -> serde_json::Value {
    let mut config = json!({
        "input": input.input.as_ref().map(|p| p.display().to_string()),
        "rate": input.rate,
        "synth": input.synth,
    });
    if input.synth {
        config["hr"] = json!(input.synth_opts.hr);
        config["duration_s"] = json!(input.synth_opts.duration);
        config["abnormality"] = json!(format!("{:?}", input.synth_opts.abnormality));
        config["jitter"] = json!(input.synth_opts.jitter);
        config["seed"] = json!(input.synth_opts.seed);
    }
    if let Some(s) = sift {
        config["criterion"] = json!(format!("{:?}", s.criterion));
        config["sd_threshold"] = json!(s.sd_threshold);
        config["s_number"] = json!(s.s_number);
        config["max_imfs"] = json!(s.max_imfs);
        config["max_sift_iterations"] = json!(s.max_sift_iterations);
    }
    if let Some(l) = levels {
        config["levels"] = json!(l);
    }
    config
}

fn base_summary(
    signal: &TimeSeries,
    d: Option<&Decomposition>,
    config: serde_json::Value,
) -> serde_json::Value {
    let mut summary = json!({
        "config": config,
        "n_samples": signal.len(),
        "sample_rate_hz": signal.sample_rate(),
    });
    if let Some(d) = d {
        let err = d.reconstruction_error();
        let max = signal.max_abs();
        summary["imf_count"] = json!(d.imfs().len());
        summary["stop_reason"] = json!(match d.stop_reason() {
            StopReason::ResidueNotSiftable => "residue_not_siftable",
            StopReason::MaxImfsReached => "max_imfs_reached",
        });
        summary["sift_iterations"] = json!(d
            .imfs()
            .iter()
            .map(|imf| imf.sift_iterations_used())
            .collect::<Vec<_>>());
        summary["imf_balanced"] = json!(d
            .imfs()
            .iter()
            .map(|imf| imf.is_balanced().unwrap_or(false))
            .collect::<Vec<_>>());
        summary["reconstruction_error"] = json!(err);
        summary["reconstruction_error_relative"] = json!(if max > 0.0 { err / max } else { 0.0 });
    }
    summary
}
