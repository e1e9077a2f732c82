//! Core time-series type plus extrema and zero-crossing detection.
//!
//! A [`TimeSeries`] is a uniformly sampled real signal; sample `k` sits at
//! time `t0 + k / sample_rate`. All types here are immutable after
//! construction and every operation is a pure function.

use crate::error::{Error, Result};

/// True for finite, strictly positive values; false for NaN.
pub(crate) fn positive_finite(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate: f64,
    t0: f64,
}

impl TimeSeries {
    /// Build a series starting at t = 0.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::with_t0(samples, sample_rate, 0.0)
    }

    /// Build a series with an explicit start time.
    pub fn with_t0(samples: Vec<f64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TooShort { needed: 1, got: 0 });
        }
        if !positive_finite(sample_rate) {
            return Err(Error::InvalidParam(format!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParam(format!("t0 must be finite, got {t0}")));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "sample {k} is not finite"
            )));
        }
        Ok(Self { samples, sample_rate, t0 })
    }

    /// New series on the same grid as `self`. The sample count must match.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::GridMismatch);
        }
        Self::with_t0(samples, self.sample_rate, self.t0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Time of sample `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.sample_rate
    }

    /// Time spacing between consecutive samples.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// True when `other` lives on the same grid (length, rate, start time).
    pub fn same_grid(&self, other: &TimeSeries) -> bool {
        self.samples.len() == other.samples.len()
            && self.sample_rate == other.sample_rate
            && self.t0 == other.t0
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Root mean square of the samples.
    pub fn rms(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Interior extrema of a series: strict maxima and minima with plateau ties
/// resolved to the first index of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaSet {
    pub maxima: Vec<(usize, f64)>,
    pub minima: Vec<(usize, f64)>,
}

impl ExtremaSet {
    pub fn total(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Find all strict interior extrema of the series.
///
/// A run of equal samples flanked by strictly lower (resp. higher) neighbors
/// counts as one maximum (resp. minimum), reported at the run's first index.
/// Endpoints are never extrema; boundary behavior is handled by mirror
/// extension in envelope construction instead.
pub fn find_extrema(series: &TimeSeries) -> Result<ExtremaSet> {
    let x = series.samples();
    if x.len() < 3 {
        return Err(Error::TooShort { needed: 3, got: x.len() });
    }

    let mut maxima = Vec::new();
    let mut minima = Vec::new();

    let n = x.len();
    let mut i = 1;
    while i < n - 1 {
        // Extend over a plateau starting at i.
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        // The run [i, j] is an interior extremum only if both flanks exist.
        if j < n - 1 {
            let left = x[i - 1];
            let right = x[j + 1];
            if left < x[i] && right < x[i] {
                maxima.push((i, x[i]));
            } else if left > x[i] && right > x[i] {
                minima.push((i, x[i]));
            }
        }
        i = j + 1;
    }

    Ok(ExtremaSet { maxima, minima })
}

/// Count sign changes between consecutive samples.
///
/// A maximal run of exact zeros counts as a single crossing iff the flanking
/// nonzero samples have opposite signs.
pub fn count_zero_crossings(series: &TimeSeries) -> Result<usize> {
    let x = series.samples();
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: x.len() });
    }

    let mut crossings = 0;
    let mut last_sign = 0i8;
    for &v in x {
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                crossings += 1;
            }
            last_sign = sign;
        }
    }
    Ok(crossings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn series(samples: &[f64]) -> TimeSeries {
        TimeSeries::new(samples.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn rejects_empty_and_bad_rate() {
        assert!(matches!(
            TimeSeries::new(vec![], 1.0),
            Err(Error::TooShort { .. })
        ));
        assert!(TimeSeries::new(vec![1.0], 0.0).is_err());
        assert!(TimeSeries::new(vec![1.0], -3.0).is_err());
        assert!(TimeSeries::new(vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn uniform_grid_times() {
        let s = TimeSeries::with_t0(vec![0.0; 5], 100.0, 2.0).unwrap();
        assert_eq!(s.time_at(0), 2.0);
        assert_eq!(s.time_at(3), 2.0 + 3.0 / 100.0);
    }

    #[test]
    fn symmetric_peak() {
        let e = find_extrema(&series(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(e.maxima, vec![(1, 1.0)]);
        assert!(e.minima.is_empty());
    }

    #[test]
    fn monotone_has_no_interior_extrema() {
        let e = find_extrema(&series(&[1.0, 2.0, 3.0])).unwrap();
        assert!(e.maxima.is_empty());
        assert!(e.minima.is_empty());
    }

    #[test]
    fn plateau_reports_first_index() {
        let e = find_extrema(&series(&[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(e.maxima, vec![(1, 1.0)]);
        assert!(e.minima.is_empty());
    }

    #[test]
    fn plateau_touching_boundary_is_not_an_extremum() {
        let e = find_extrema(&series(&[1.0, 1.0, 0.0, 1.0])).unwrap();
        assert!(e.maxima.is_empty());
        assert_eq!(e.minima, vec![(2, 0.0)]);
    }

    #[test]
    fn too_short_for_extrema() {
        assert!(matches!(
            find_extrema(&series(&[0.0, 1.0])),
            Err(Error::TooShort { needed: 3, .. })
        ));
    }

    #[test]
    fn zero_crossing_counts() {
        assert_eq!(count_zero_crossings(&series(&[1.0, -1.0, 1.0])).unwrap(), 2);
        assert_eq!(count_zero_crossings(&series(&[1.0, 1.0, 2.0])).unwrap(), 0);
        assert_eq!(count_zero_crossings(&series(&[1.0, 0.0, -1.0])).unwrap(), 1);
        // Touching zero without changing sign is not a crossing.
        assert_eq!(count_zero_crossings(&series(&[1.0, 0.0, 1.0])).unwrap(), 0);
        // A run of zeros still counts once.
        assert_eq!(
            count_zero_crossings(&series(&[-1.0, 0.0, 0.0, 2.0])).unwrap(),
            1
        );
        assert!(count_zero_crossings(&series(&[1.0])).is_err());
    }

    #[test]
    fn negation_swaps_extrema_lists() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(3..200);
            let samples: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let s = series(&samples);
            let neg = series(&samples.iter().map(|v| -v).collect::<Vec<_>>());
            let e = find_extrema(&s).unwrap();
            let en = find_extrema(&neg).unwrap();
            let flip = |list: &[(usize, f64)]| -> Vec<(usize, f64)> {
                list.iter().map(|&(i, v)| (i, -v)).collect()
            };
            assert_eq!(e.maxima, flip(&en.minima));
            assert_eq!(e.minima, flip(&en.maxima));
        }
    }

    #[test]
    fn maxima_and_minima_interleave() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(5..300);
            let mut v = 0.0;
            let samples: Vec<f64> = (0..n)
                .map(|_| {
                    v += rng.random_range(-1.0..1.0);
                    v
                })
                .collect();
            let e = find_extrema(&series(&samples)).unwrap();
            let mut tagged: Vec<(usize, bool)> = e
                .maxima
                .iter()
                .map(|&(i, _)| (i, true))
                .chain(e.minima.iter().map(|&(i, _)| (i, false)))
                .collect();
            tagged.sort();
            for pair in tagged.windows(2) {
                assert_ne!(pair[0].1, pair[1].1, "consecutive extrema of equal kind");
            }
        }
    }
}
