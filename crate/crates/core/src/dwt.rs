//! Multilevel Haar discrete wavelet transform with exact inversion.
//!
//! The orthonormal Haar pair is used, so energy is conserved level by
//! level. Odd-length inputs are padded by repeating the last sample; each
//! level records whether it padded so the inverse can trim exactly, and the
//! padded samples' energy is tracked so Parseval can be stated against the
//! original signal.

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One analysis step: pair up samples into averages and differences,
/// scaled by 1/sqrt(2). Odd input is padded by repeating the last sample.
pub fn haar_step(x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: x.len() });
    }
    let half = x.len().div_ceil(2);
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for j in 0..half {
        let a = x[2 * j];
        let b = if 2 * j + 1 < x.len() { x[2 * j + 1] } else { a };
        approx.push((a + b) * INV_SQRT2);
        detail.push((a - b) * INV_SQRT2);
    }
    Ok((approx, detail))
}

/// Exact inverse of [`haar_step`] for even-length originals; callers that
/// padded must trim the last sample themselves.
pub fn haar_inverse_step(approx: &[f64], detail: &[f64]) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::MalformedDecomposition(format!(
            "approx has {} coefficients, detail has {}",
            approx.len(),
            detail.len()
        )));
    }
    let mut out = Vec::with_capacity(approx.len() * 2);
    for (a, d) in approx.iter().zip(detail) {
        out.push((a + d) * INV_SQRT2);
        out.push((a - d) * INV_SQRT2);
    }
    Ok(out)
}

/// Multilevel Haar decomposition. `details[m-1]` holds the level-m detail
/// coefficients; level 1 is the finest.
#[derive(Debug, Clone)]
pub struct WaveletDecomposition {
    levels: usize,
    details: Vec<Vec<f64>>,
    approximation: Vec<f64>,
    original_length: usize,
    /// Whether level m padded its input (index m-1).
    padded: Vec<bool>,
    /// Energy contributed by padding samples across all levels.
    padding_energy: f64,
    sample_rate: f64,
    t0: f64,
    /// True when the requested depth exceeded what the length allows and
    /// was clamped.
    depth_clamped: bool,
}

impl WaveletDecomposition {
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Detail coefficients for level `m` (1-based).
    pub fn detail(&self, m: usize) -> Option<&[f64]> {
        self.details.get(m - 1).map(|v| v.as_slice())
    }

    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    pub fn approximation(&self) -> &[f64] {
        &self.approximation
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn depth_clamped(&self) -> bool {
        self.depth_clamped
    }

    /// Sum of squares over every stored coefficient.
    pub fn coefficient_energy(&self) -> f64 {
        let details: f64 = self
            .details
            .iter()
            .flat_map(|level| level.iter())
            .map(|v| v * v)
            .sum();
        details + self.approximation.iter().map(|v| v * v).sum::<f64>()
    }

    /// Energy attributable to repeat-last padding; subtracting it from
    /// [`Self::coefficient_energy`] recovers the original signal energy.
    pub fn padding_energy(&self) -> f64 {
        self.padding_energy
    }
}

/// Decompose `x` into `levels` Haar levels.
///
/// Depth is clamped when a level's input would drop below 2 coefficients;
/// [`WaveletDecomposition::depth_clamped`] reports that this happened.
pub fn dwt_multilevel(x: &TimeSeries, levels: usize) -> Result<WaveletDecomposition> {
    if levels < 1 {
        return Err(Error::InvalidParam("levels must be >= 1".into()));
    }
    let mut current = x.samples().to_vec();
    let mut details = Vec::new();
    let mut padded = Vec::new();
    let mut padding_energy = 0.0;
    let mut clamped = false;

    for _ in 0..levels {
        if current.len() < 2 {
            clamped = true;
            break;
        }
        let is_odd = current.len() % 2 == 1;
        if is_odd {
            let last = *current.last().expect("non-empty");
            padding_energy += last * last;
        }
        let (approx, detail) = haar_step(&current)?;
        details.push(detail);
        padded.push(is_odd);
        current = approx;
    }

    Ok(WaveletDecomposition {
        levels: details.len(),
        details,
        approximation: current,
        original_length: x.len(),
        padded,
        padding_energy,
        sample_rate: x.sample_rate(),
        t0: x.t0(),
        depth_clamped: clamped,
    })
}

/// Invert a multilevel decomposition back to the original series, trimming
/// the per-level padding.
pub fn idwt_multilevel(d: &WaveletDecomposition) -> Result<TimeSeries> {
    let mut current = d.approximation.clone();
    for m in (0..d.levels).rev() {
        if current.len() != d.details[m].len() {
            return Err(Error::MalformedDecomposition(format!(
                "level {} expects {} approx coefficients, found {}",
                m + 1,
                d.details[m].len(),
                current.len()
            )));
        }
        current = haar_inverse_step(&current, &d.details[m])?;
        if d.padded[m] {
            current.pop();
        }
    }
    if current.len() != d.original_length {
        return Err(Error::MalformedDecomposition(format!(
            "reconstructed {} samples, expected {}",
            current.len(),
            d.original_length
        )));
    }
    TimeSeries::with_t0(current, d.sample_rate, d.t0)
}
