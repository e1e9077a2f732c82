//! Hilbert spectral analysis: analytic signal, instantaneous amplitude,
//! phase and frequency per IMF, the sparse time-frequency spectrum, the
//! adaptive resynthesis, and one-sided DFT magnitude spectra.

use crate::emd::Decomposition;
use crate::error::{Error, Result};
use crate::signal::TimeSeries;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Fraction of samples trimmed from each end for quantitative statistics;
/// spline end swings and DFT periodicity dominate out there.
const BOUNDARY_TRIM: f64 = 0.05;

/// Amplitude below this fraction of the peak makes the phase angle
/// meaningless at that sample.
const DEGENERATE_AMPLITUDE_FRACTION: f64 = 1e-12;

fn fft_forward(samples: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> =
        samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Sample range excluding the outer 5% at each end.
pub fn interior_range(n: usize) -> std::ops::Range<usize> {
    let trim = (BOUNDARY_TRIM * n as f64).round() as usize;
    trim..n.saturating_sub(trim)
}

/// Discrete Hilbert transform via the frequency-domain single-sideband
/// construction: zero the negative-frequency bins, double the positive
/// ones (DC and Nyquist keep unit weight), invert, take the imaginary part.
pub fn hilbert_transform(x: &TimeSeries) -> Result<TimeSeries> {
    let n = x.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let mut buf = fft_forward(x.samples());

    let half = n / 2;
    if n.is_multiple_of(2) {
        for v in &mut buf[1..half] {
            *v *= 2.0;
        }
        for v in &mut buf[half + 1..] {
            *v = Complex::new(0.0, 0.0);
        }
    } else {
        for v in &mut buf[1..=half] {
            *v *= 2.0;
        }
        for v in &mut buf[half + 1..] {
            *v = Complex::new(0.0, 0.0);
        }
    }

    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    x.with_samples(buf.iter().map(|c| c.im * scale).collect())
}

/// Analytic signal of a series: the series itself, its Hilbert transform,
/// and the derived instantaneous amplitude, unwrapped phase, and frequency.
#[derive(Debug, Clone)]
pub struct AnalyticSignal {
    real_part: TimeSeries,
    imag_part: TimeSeries,
    amplitude: TimeSeries,
    phase_unwrapped: TimeSeries,
    inst_frequency: TimeSeries,
    /// Indices where amplitude vanished and the phase was interpolated.
    degenerate: Vec<usize>,
}

impl AnalyticSignal {
    pub fn real_part(&self) -> &TimeSeries {
        &self.real_part
    }

    pub fn imag_part(&self) -> &TimeSeries {
        &self.imag_part
    }

    /// Instantaneous amplitude, `sqrt(re^2 + im^2)`.
    pub fn amplitude(&self) -> &TimeSeries {
        &self.amplitude
    }

    /// Four-quadrant phase after unwrapping; consecutive differences stay
    /// inside `(-pi, pi]`.
    pub fn phase_unwrapped(&self) -> &TimeSeries {
        &self.phase_unwrapped
    }

    /// Instantaneous angular frequency in rad/s: central difference of the
    /// unwrapped phase, one-sided at the endpoints.
    pub fn instantaneous_frequency(&self) -> &TimeSeries {
        &self.inst_frequency
    }

    /// Samples whose amplitude fell below the degeneracy threshold.
    pub fn degenerate_samples(&self) -> &[usize] {
        &self.degenerate
    }
}

/// Build the analytic signal of `x`.
pub fn analytic_signal(x: &TimeSeries) -> Result<AnalyticSignal> {
    let imag = hilbert_transform(x)?;
    let n = x.len();
    let re = x.samples();
    let im = imag.samples();

    let amplitude: Vec<f64> = re.iter().zip(im).map(|(r, i)| r.hypot(*i)).collect();
    let max_a = amplitude.iter().fold(0.0f64, |m, &v| m.max(v));
    let threshold = DEGENERATE_AMPLITUDE_FRACTION * max_a;
    let degenerate_mask: Vec<bool> = amplitude.iter().map(|&a| a <= threshold).collect();
    let degenerate: Vec<usize> = degenerate_mask
        .iter()
        .enumerate()
        .filter(|(_, &d)| d)
        .map(|(k, _)| k)
        .collect();

    // Unwrap across the non-degenerate anchors only, then bridge the
    // degenerate runs linearly; atan2 is meaningless near the origin.
    let anchors: Vec<usize> = (0..n).filter(|&k| !degenerate_mask[k]).collect();
    let mut phase = vec![0.0; n];
    if !anchors.is_empty() {
        let mut prev_raw = im[anchors[0]].atan2(re[anchors[0]]);
        let mut prev_unwrapped = prev_raw;
        phase[anchors[0]] = prev_unwrapped;
        for &k in &anchors[1..] {
            let raw = im[k].atan2(re[k]);
            let mut delta = raw - prev_raw;
            while delta > PI {
                delta -= 2.0 * PI;
            }
            while delta <= -PI {
                delta += 2.0 * PI;
            }
            // Accumulation rounding must not push the stored step outside
            // (-pi, pi]; nudge by ulps when it does.
            let mut next = prev_unwrapped + delta;
            while next - prev_unwrapped > PI {
                next = next.next_down();
            }
            while next - prev_unwrapped <= -PI {
                next = next.next_up();
            }
            prev_unwrapped = next;
            prev_raw = raw;
            phase[k] = prev_unwrapped;
        }
        // Fill before the first and after the last anchor.
        for k in 0..anchors[0] {
            phase[k] = phase[anchors[0]];
        }
        for k in anchors[anchors.len() - 1] + 1..n {
            phase[k] = phase[anchors[anchors.len() - 1]];
        }
        // Linear interpolation across interior degenerate runs.
        for pair in anchors.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b > a + 1 {
                let span = (b - a) as f64;
                for k in a + 1..b {
                    let w = (k - a) as f64 / span;
                    phase[k] = phase[a] * (1.0 - w) + phase[b] * w;
                }
            }
        }
    }

    let inst = phase_derivative(&phase, x.sample_rate());

    Ok(AnalyticSignal {
        real_part: x.clone(),
        imag_part: imag,
        amplitude: x.with_samples(amplitude)?,
        phase_unwrapped: x.with_samples(phase)?,
        inst_frequency: x.with_samples(inst)?,
        degenerate,
    })
}

/// Central differences scaled by the sample rate; one-sided at the ends.
fn phase_derivative(phase: &[f64], sample_rate: f64) -> Vec<f64> {
    let n = phase.len();
    let mut out = vec![0.0; n];
    out[0] = (phase[1] - phase[0]) * sample_rate;
    out[n - 1] = (phase[n - 1] - phase[n - 2]) * sample_rate;
    for k in 1..n - 1 {
        out[k] = (phase[k + 1] - phase[k - 1]) * sample_rate * 0.5;
    }
    out
}

/// Amplitude-squared-weighted mean frequency in hertz, taken over the
/// interior samples (outer 5% at each end excluded).
pub fn weighted_mean_frequency(sig: &AnalyticSignal) -> Result<f64> {
    let a = sig.amplitude.samples();
    let w = sig.inst_frequency.samples();
    let range = interior_range(a.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for k in range {
        let weight = a[k] * a[k];
        num += weight * w[k] / (2.0 * PI);
        den += weight;
    }
    if den == 0.0 {
        return Err(Error::AllZeroAmplitude);
    }
    Ok(num / den)
}

/// What to do with numerically negative instantaneous frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeFrequencyPolicy {
    /// Drop negative-frequency entries and count them.
    #[default]
    Drop,
    /// Keep them as-is.
    Retain,
}

/// One point of the sparse time-frequency-amplitude distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub time_s: f64,
    pub frequency_hz: f64,
    pub amplitude: f64,
    /// 1-based extraction order of the IMF this entry belongs to.
    pub imf_index: usize,
}

/// Sparse Hilbert spectrum over all IMFs of a decomposition. Entries cover
/// the strict interior samples (endpoints use one-sided phase derivatives
/// and are excluded).
#[derive(Debug, Clone)]
pub struct HilbertSpectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Suggested binning granularity for plotting, the DFT resolution
    /// `sample_rate / n`.
    pub freq_bin_width_hz: f64,
    pub time_step_s: f64,
    /// Negative-frequency entries removed under the Drop policy.
    pub dropped_negative: usize,
}

/// Hilbert spectrum with the default negative-frequency policy (drop).
pub fn hilbert_spectrum(d: &Decomposition) -> Result<HilbertSpectrum> {
    hilbert_spectrum_with(d, NegativeFrequencyPolicy::Drop)
}

pub fn hilbert_spectrum_with(
    d: &Decomposition,
    policy: NegativeFrequencyPolicy,
) -> Result<HilbertSpectrum> {
    let source = d.source();
    let n = source.len();
    let mut entries = Vec::new();
    let mut dropped = 0usize;

    for imf in d.imfs() {
        let sig = analytic_signal(imf.series())?;
        let amp = sig.amplitude.samples();
        let freq = sig.inst_frequency.samples();
        for k in 1..n - 1 {
            let f_hz = freq[k] / (2.0 * PI);
            if f_hz < 0.0 && policy == NegativeFrequencyPolicy::Drop {
                dropped += 1;
                continue;
            }
            entries.push(SpectrumEntry {
                time_s: source.time_at(k),
                frequency_hz: f_hz,
                amplitude: amp[k],
                imf_index: imf.index(),
            });
        }
    }

    Ok(HilbertSpectrum {
        entries,
        freq_bin_width_hz: source.sample_rate() / n as f64,
        time_step_s: source.dt(),
        dropped_negative: dropped,
    })
}

/// Adaptive resynthesis: the real part of `sum_i A_i exp(i theta_i)` with
/// the unwrapped phase standing in for the frequency integral. Equals the
/// source minus the residue up to rounding.
pub fn hht_resynthesize(d: &Decomposition) -> Result<TimeSeries> {
    let source = d.source();
    let mut sum = vec![0.0; source.len()];
    for imf in d.imfs() {
        let sig = analytic_signal(imf.series())?;
        let amp = sig.amplitude.samples();
        let phase = sig.phase_unwrapped.samples();
        for (k, acc) in sum.iter_mut().enumerate() {
            *acc += amp[k] * phase[k].cos();
        }
    }
    source.with_samples(sum)
}

/// One-sided DFT magnitude spectrum, bins 0..=Nyquist.
#[derive(Debug, Clone)]
pub struct MagnitudeSpectrum {
    pub frequencies_hz: Vec<f64>,
    pub magnitudes: Vec<f64>,
    input_len: usize,
}

impl MagnitudeSpectrum {
    /// Index of the largest-magnitude bin.
    pub fn peak_bin(&self) -> usize {
        self.magnitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite magnitudes"))
            .map(|(k, _)| k)
            .unwrap_or(0)
    }

    /// Signal energy implied by the spectrum (Parseval), matching
    /// `sum x(k)^2` of the input.
    pub fn parseval_energy(&self) -> f64 {
        let n = self.input_len;
        let m = &self.magnitudes;
        let mut acc = m[0] * m[0];
        let nyquist_unpaired = n.is_multiple_of(2);
        let last = m.len() - 1;
        for (k, v) in m.iter().enumerate().skip(1) {
            if nyquist_unpaired && k == last {
                acc += v * v;
            } else {
                acc += 2.0 * v * v;
            }
        }
        acc / n as f64
    }

    /// Amplitude-weighted mean frequency of the spectrum (spectral
    /// centroid) in hertz.
    pub fn centroid_hz(&self) -> f64 {
        let num: f64 = self
            .frequencies_hz
            .iter()
            .zip(&self.magnitudes)
            .map(|(f, m)| f * m * m)
            .sum();
        let den: f64 = self.magnitudes.iter().map(|m| m * m).sum();
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Compute the one-sided DFT magnitude spectrum of a series.
pub fn magnitude_spectrum(x: &TimeSeries) -> Result<MagnitudeSpectrum> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let buf = fft_forward(x.samples());
    let bins = n / 2 + 1;
    let rate = x.sample_rate();
    Ok(MagnitudeSpectrum {
        frequencies_hz: (0..bins).map(|k| k as f64 * rate / n as f64).collect(),
        magnitudes: buf[..bins].iter().map(|c| c.norm()).collect(),
        input_len: n,
    })
}
