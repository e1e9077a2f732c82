//! Upper/lower envelope construction and the local mean used by sifting.
//!
//! The envelopes are natural cubic splines through the maxima and minima.
//! Because the series endpoints are never extrema, the two extrema nearest
//! each end are mirrored across the endpoint first; this gives the spline
//! support beyond both boundaries and tames end swings.

use crate::error::{Error, Result};
use crate::signal::{ExtremaSet, TimeSeries};
use crate::spline::fit_cubic_spline;

/// Upper and lower envelopes sampled on the source grid.
#[derive(Debug, Clone)]
pub struct EnvelopePair {
    pub upper: TimeSeries,
    pub lower: TimeSeries,
}

impl EnvelopePair {
    /// Sample indices where the lower envelope exceeds the upper by more
    /// than `tol`. Spline overshoot can invert the envelopes locally; it is
    /// reported here, never clipped.
    pub fn overshoot_indices(&self, tol: f64) -> Vec<usize> {
        self.upper
            .samples()
            .iter()
            .zip(self.lower.samples())
            .enumerate()
            .filter(|(_, (u, l))| **l > **u + tol)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Mirror the two extrema nearest each end across the series endpoints,
/// then return the full knot list (index coordinate, value).
fn extend_by_mirroring(extrema: &[(usize, f64)], last_index: usize) -> Vec<(f64, f64)> {
    debug_assert!(extrema.len() >= 2);
    let (i1, v1) = extrema[0];
    let (i2, v2) = extrema[1];
    let m = extrema.len();
    let (jm, wm) = extrema[m - 1];
    let (jp, wp) = extrema[m - 2];

    let end = last_index as f64;
    let mut knots = Vec::with_capacity(m + 4);
    knots.push((-(i2 as f64), v2));
    knots.push((-(i1 as f64), v1));
    knots.extend(extrema.iter().map(|&(i, v)| (i as f64, v)));
    knots.push((2.0 * end - jm as f64, wm));
    knots.push((2.0 * end - jp as f64, wp));
    knots
}

/// Build the upper and lower envelopes of `series` through the given
/// extrema, sampled on the source grid.
///
/// Fewer than two maxima or two minima means both envelopes cannot be
/// constructed; that is reported as [`Error::MonotoneResidue`] so the
/// caller can stop sifting.
pub fn build_envelopes(series: &TimeSeries, extrema: &ExtremaSet) -> Result<EnvelopePair> {
    if extrema.maxima.len() < 2 || extrema.minima.len() < 2 {
        return Err(Error::MonotoneResidue);
    }
    let last = series.len() - 1;
    let upper_spline = fit_cubic_spline(&extend_by_mirroring(&extrema.maxima, last))?;
    let lower_spline = fit_cubic_spline(&extend_by_mirroring(&extrema.minima, last))?;

    let upper: Vec<f64> = (0..series.len()).map(|k| upper_spline.evaluate(k as f64)).collect();
    let lower: Vec<f64> = (0..series.len()).map(|k| lower_spline.evaluate(k as f64)).collect();

    Ok(EnvelopePair {
        upper: series.with_samples(upper)?,
        lower: series.with_samples(lower)?,
    })
}

/// Pointwise mean of the two envelopes (the sifting subtrahend).
pub fn local_mean(envelopes: &EnvelopePair) -> Result<TimeSeries> {
    if !envelopes.upper.same_grid(&envelopes.lower) {
        return Err(Error::GridMismatch);
    }
    let mean: Vec<f64> = envelopes
        .upper
        .samples()
        .iter()
        .zip(envelopes.lower.samples())
        .map(|(u, l)| 0.5 * (u + l))
        .collect();
    envelopes.upper.with_samples(mean)
}
