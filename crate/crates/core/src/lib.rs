//! Hilbert-Huang transform and Haar wavelet analysis for ECG-style signals.
//!
//! The pipeline: decompose a uniformly sampled signal into intrinsic mode
//! functions by sifting ([`emd`]), analyze each mode's instantaneous
//! amplitude and frequency through the analytic signal ([`hsa`]), and
//! compare against a multilevel Haar wavelet decomposition ([`dwt`]).
//! The [`ecg`] module generates synthetic normal/abnormal ECG signals with
//! exact ground truth and extracts per-beat clinical features from the
//! decomposition; [`io`] reads and writes the CSV signal format used by
//! the command-line tool.

pub mod dwt;
pub mod ecg;
pub mod emd;
pub mod envelope;
pub mod error;
pub mod hsa;
pub mod io;
pub mod signal;
pub mod spline;

pub use error::{Error, Result};
pub use signal::TimeSeries;
