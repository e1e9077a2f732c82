//! Empirical mode decomposition: the sifting process that splits a signal
//! into intrinsic mode functions (IMFs) plus a final residue.
//!
//! Each sift subtracts the mean of the upper and lower envelopes from the
//! current iterate. Sifting repeats until a stopping criterion fires, the
//! iterate is kept as an IMF, and the process restarts on what remains.
//! Summing all IMFs and the residue reproduces the input exactly up to
//! rounding, because every step is a plain subtraction.

use crate::envelope::{build_envelopes, local_mean};
use crate::error::{Error, Result};
use crate::signal::{count_zero_crossings, find_extrema, positive_finite, TimeSeries};

/// Which test ends the sifting loop for one IMF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCriterion {
    /// Cauchy-style test: stop when the normalized squared difference
    /// between successive iterates drops below `sd_threshold`.
    Sd,
    /// Stop after `s_number` consecutive iterations whose extrema and
    /// zero-crossing counts are unchanged and differ by at most one.
    SNumber,
}

/// Sifting configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftConfig {
    pub sd_threshold: f64,
    pub s_number: usize,
    pub criterion: StopCriterion,
    pub max_sift_iterations: usize,
    /// Cap on extracted IMFs; `None` resolves to floor(log2(N)) for an
    /// N-sample input, the dyadic bound on distinguishable scales.
    pub max_imfs: Option<usize>,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.25,
            s_number: 4,
            criterion: StopCriterion::Sd,
            max_sift_iterations: 200,
            max_imfs: None,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if !positive_finite(self.sd_threshold) {
            return Err(Error::InvalidParam(format!(
                "sd_threshold must be > 0, got {}",
                self.sd_threshold
            )));
        }
        if self.s_number < 1 {
            return Err(Error::InvalidParam("s_number must be >= 1".into()));
        }
        if self.max_sift_iterations < 1 {
            return Err(Error::InvalidParam("max_sift_iterations must be >= 1".into()));
        }
        if self.max_imfs == Some(0) {
            return Err(Error::InvalidParam("max_imfs must be >= 1".into()));
        }
        Ok(())
    }

    /// The IMF cap for an input of `n` samples.
    pub fn effective_max_imfs(&self, n: usize) -> usize {
        self.max_imfs.unwrap_or_else(|| (n.max(2)).ilog2() as usize)
    }
}

/// One intrinsic mode function.
#[derive(Debug, Clone)]
pub struct Imf {
    series: TimeSeries,
    index: usize,
    sift_iterations_used: usize,
}

impl Imf {
    pub fn new(series: TimeSeries, index: usize, sift_iterations_used: usize) -> Self {
        Self { series, index, sift_iterations_used }
    }

    pub fn series(&self) -> &TimeSeries {
        &self.series
    }

    /// Extraction order, 1-based; 1 is the finest scale.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn sift_iterations_used(&self) -> usize {
        self.sift_iterations_used
    }

    /// Absolute difference between extrema count and zero-crossing count.
    pub fn count_delta(&self) -> Result<usize> {
        let extrema = find_extrema(&self.series)?.total();
        let crossings = count_zero_crossings(&self.series)?;
        Ok(extrema.abs_diff(crossings))
    }

    /// IMF condition 1: extrema and zero crossings differ by at most one.
    pub fn is_balanced(&self) -> Result<bool> {
        Ok(self.count_delta()? <= 1)
    }
}

/// Why the decomposition stopped producing IMFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The residue has too few extrema to build both envelopes.
    ResidueNotSiftable,
    /// The configured IMF cap fired first.
    MaxImfsReached,
}

/// Complete decomposition: ordered IMFs (finest first), the final residue,
/// and the source they came from.
#[derive(Debug, Clone)]
pub struct Decomposition {
    imfs: Vec<Imf>,
    residue: TimeSeries,
    source: TimeSeries,
    stop_reason: StopReason,
}

impl Decomposition {
    /// Assemble a decomposition from parts. All series must share a grid.
    pub fn from_parts(
        imfs: Vec<Imf>,
        residue: TimeSeries,
        source: TimeSeries,
        stop_reason: StopReason,
    ) -> Result<Self> {
        for imf in &imfs {
            if !imf.series.same_grid(&residue) {
                return Err(Error::GridMismatch);
            }
        }
        if !residue.same_grid(&source) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { imfs, residue, source, stop_reason })
    }

    pub fn imfs(&self) -> &[Imf] {
        &self.imfs
    }

    pub fn residue(&self) -> &TimeSeries {
        &self.residue
    }

    pub fn source(&self) -> &TimeSeries {
        &self.source
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    /// Pointwise sum of all IMFs and the residue.
    pub fn reconstruct(&self) -> TimeSeries {
        let mut sum = self.residue.samples().to_vec();
        for imf in &self.imfs {
            for (acc, v) in sum.iter_mut().zip(imf.series.samples()) {
                *acc += v;
            }
        }
        // The sum lives on the shared grid, so this cannot fail.
        self.residue.with_samples(sum).expect("shared grid")
    }

    /// max_k |source(k) - reconstruct(k)|.
    pub fn reconstruction_error(&self) -> f64 {
        self.reconstruct()
            .samples()
            .iter()
            .zip(self.source.samples())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// One sifting pass: subtract the envelope mean from `h`.
pub fn sift_once(h: &TimeSeries) -> Result<TimeSeries> {
    let extrema = find_extrema(h)?;
    let envelopes = build_envelopes(h, &extrema)?;
    let mean = local_mean(&envelopes)?;
    let sifted: Vec<f64> = h
        .samples()
        .iter()
        .zip(mean.samples())
        .map(|(v, m)| v - m)
        .collect();
    h.with_samples(sifted)
}

/// IMF condition 1: extrema and zero-crossing counts differ by at most one.
/// Condition 2 (zero envelope mean) is enforced by the stopping criteria.
pub fn is_imf(h: &TimeSeries) -> Result<bool> {
    let extrema = find_extrema(h)?.total();
    let crossings = count_zero_crossings(h)?;
    Ok(extrema.abs_diff(crossings) <= 1)
}

/// Normalized squared difference between successive sift iterates,
/// `sum |prev - curr|^2 / sum prev^2`. Terms are scaled by the peak of
/// `prev` so the ratio survives subnormal-amplitude iterates.
pub fn sd_value(prev: &TimeSeries, curr: &TimeSeries) -> Result<f64> {
    if prev.len() != curr.len() {
        return Err(Error::GridMismatch);
    }
    let scale = prev.max_abs();
    if scale == 0.0 {
        return Err(Error::SdUndefined);
    }
    let mut num = 0.0;
    let mut denom = 0.0;
    for (p, c) in prev.samples().iter().zip(curr.samples()) {
        let d = (p - c) / scale;
        let r = p / scale;
        num += d * d;
        denom += r * r;
    }
    Ok(num / denom)
}

/// Extract one IMF from `x` by repeated sifting, returning the IMF and the
/// remainder `x - imf`.
///
/// A monotone (envelope-unconstructible) input reports
/// [`Error::MonotoneResidue`]. If the iterate loses its extrema mid-loop it
/// is kept as the IMF only when it already satisfies condition 1; otherwise
/// the input is declared residue.
pub fn extract_imf(x: &TimeSeries, config: &SiftConfig) -> Result<(Imf, TimeSeries)> {
    extract_imf_indexed(x, config, 1)
}

fn extract_imf_indexed(x: &TimeSeries, config: &SiftConfig, index: usize) -> Result<(Imf, TimeSeries)> {
    config.validate()?;
    let mut h = x.clone();
    let mut iterations = 0usize;
    let mut stable = 0usize;
    let mut prev_counts: Option<(usize, usize)> = None;

    while iterations < config.max_sift_iterations {
        let next = match sift_once(&h) {
            Ok(next) => next,
            Err(Error::MonotoneResidue) | Err(Error::TooShort { .. }) if iterations > 0 => {
                // The iterate degenerated. Keep it if it already passes the
                // IMF test; otherwise nothing siftable remains in x.
                if is_imf(&h).unwrap_or(false) {
                    break;
                }
                return Err(Error::MonotoneResidue);
            }
            Err(e) => return Err(e),
        };
        iterations += 1;

        match config.criterion {
            StopCriterion::Sd => {
                let sd = sd_value(&h, &next)?;
                h = next;
                if sd < config.sd_threshold {
                    break;
                }
            }
            StopCriterion::SNumber => {
                h = next;
                let extrema = find_extrema(&h)?.total();
                let crossings = count_zero_crossings(&h)?;
                let balanced = extrema.abs_diff(crossings) <= 1;
                let counts = (extrema, crossings);
                if balanced && prev_counts == Some(counts) {
                    stable += 1;
                } else if balanced {
                    stable = 1;
                } else {
                    stable = 0;
                }
                prev_counts = Some(counts);
                if stable >= config.s_number {
                    break;
                }
            }
        }
    }

    let remainder: Vec<f64> = x
        .samples()
        .iter()
        .zip(h.samples())
        .map(|(v, c)| v - c)
        .collect();
    let remainder = x.with_samples(remainder)?;
    Ok((Imf::new(h, index, iterations), remainder))
}

/// Decompose `x` into IMFs plus a residue.
///
/// Extraction repeats on successive remainders until the remainder can no
/// longer host both envelopes or the IMF cap fires; the returned
/// [`StopReason`] records which.
pub fn decompose(x: &TimeSeries, config: &SiftConfig) -> Result<Decomposition> {
    if x.len() < 4 {
        return Err(Error::TooShort { needed: 4, got: x.len() });
    }
    config.validate()?;
    let cap = config.effective_max_imfs(x.len());

    let mut imfs = Vec::new();
    let mut residue = x.clone();
    let stop_reason = loop {
        if imfs.len() >= cap {
            break StopReason::MaxImfsReached;
        }
        match extract_imf_indexed(&residue, config, imfs.len() + 1) {
            Ok((imf, rest)) => {
                residue = rest;
                imfs.push(imf);
            }
            Err(Error::MonotoneResidue) | Err(Error::TooShort { .. }) => {
                break StopReason::ResidueNotSiftable;
            }
            Err(e) => return Err(e),
        }
    };

    Ok(Decomposition { imfs, residue, source: x.clone(), stop_reason })
}
