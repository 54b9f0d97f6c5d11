use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::CubicSpline;
use crate::stats::descriptive::{mad, median, MAD_SCALE};

/// Interbeat intervals with the beat times they were measured between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IbiSeries {
    intervals: Vec<f64>,
    beat_times: Vec<f64>,
    corrected: Vec<bool>,
}

impl IbiSeries {
    /// Intervals in ms between successive beat times in seconds.
    pub fn from_beat_times(beat_times: Vec<f64>) -> Result<Self> {
        if beat_times.len() < 2 {
            return Err(Error::TooShort {
                what: "beats",
                needed: 2,
                got: beat_times.len(),
            });
        }
        if beat_times.iter().any(|t| !t.is_finite()) || beat_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("beat times must be finite and strictly increasing".into()));
        }
        let intervals = beat_times.windows(2).map(|w| (w[1] - w[0]) * 1000.0).collect::<Vec<_>>();
        Ok(Self {
            corrected: vec![false; intervals.len()],
            intervals,
            beat_times,
        })
    }

    /// Beat times accumulated from `start` (s) and positive intervals (ms).
    pub fn from_intervals(start: f64, intervals: Vec<f64>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::TooShort {
                what: "intervals",
                needed: 1,
                got: 0,
            });
        }
        if intervals.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput("intervals must be finite and positive".into()));
        }
        let beat_times = accumulate(start, &intervals);
        Ok(Self {
            corrected: vec![false; intervals.len()],
            intervals,
            beat_times,
        })
    }

    /// Intervals in milliseconds.
    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    /// Beat times in seconds; one more than the number of intervals.
    pub fn beat_times(&self) -> &[f64] {
        &self.beat_times
    }

    pub fn corrected_mask(&self) -> &[bool] {
        &self.corrected
    }

    pub fn corrected_count(&self) -> usize {
        self.corrected.iter().filter(|&&c| c).count()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Seconds spanned by the intervals.
    pub fn duration(&self) -> f64 {
        self.beat_times[self.beat_times.len() - 1] - self.beat_times[0]
    }
}

fn accumulate(start: f64, intervals: &[f64]) -> Vec<f64> {
    let mut times = Vec::with_capacity(intervals.len() + 1);
    times.push(start);
    let mut t = start;
    for iv in intervals {
        t += iv / 1000.0;
        times.push(t);
    }
    times
}

pub fn ibi_from_peaks(beat_times: &[f64]) -> Result<IbiSeries> {
    IbiSeries::from_beat_times(beat_times.to_vec())
}

/// Settings of the ectopic-interval screen.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactConfig {
    /// Moving window length in intervals, centred on the tested interval.
    pub window: usize,
    pub mads: f64,
    /// Deviations below this many ms are never flagged, however small the
    /// local MAD.
    pub min_deviation_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Fraction of flagged intervals above which the trial is rejected.
    pub max_flagged_fraction: f64,
}

impl Default for ArtifactConfig {
    fn default() -> Self {
        Self {
            window: 21,
            mads: 3.0,
            min_deviation_ms: 20.0,
            min_ms: 300.0,
            max_ms: 2000.0,
            max_flagged_fraction: 0.2,
        }
    }
}

/// Indices of intervals that fail the physiological bounds or the local
/// median ± scaled-MAD screen.
pub fn flag_artifacts(intervals: &[f64], cfg: &ArtifactConfig) -> Vec<bool> {
    let n = intervals.len();
    let half = cfg.window / 2;
    (0..n)
        .map(|i| {
            let x = intervals[i];
            if x < cfg.min_ms || x > cfg.max_ms {
                return true;
            }
            let local = &intervals[i.saturating_sub(half)..(i + half + 1).min(n)];
            let med = median(local);
            let tol = (cfg.mads * MAD_SCALE * mad(local, med)).max(cfg.min_deviation_ms);
            (x - med).abs() > tol
        })
        .collect()
}

/// Replace ectopic intervals by cubic-spline interpolation through the
/// valid intervals (placed at their closing beat times), then rebuild the
/// beat times from the corrected intervals.
pub fn correct_artifacts(ibi: &IbiSeries) -> Result<IbiSeries> {
    correct_artifacts_with(ibi, &ArtifactConfig::default())
}

pub fn correct_artifacts_with(ibi: &IbiSeries, cfg: &ArtifactConfig) -> Result<IbiSeries> {
    let n = ibi.len();
    if n < 5 {
        return Err(Error::TooShort {
            what: "intervals for artifact correction",
            needed: 5,
            got: n,
        });
    }
    let flags = flag_artifacts(&ibi.intervals, cfg);
    let flagged = flags.iter().filter(|&&f| f).count();
    if flagged as f64 > cfg.max_flagged_fraction * n as f64 {
        return Err(Error::TooManyArtifacts { flagged, total: n });
    }
    if flagged == 0 {
        return Ok(ibi.clone());
    }
    let (knots, values): (Vec<f64>, Vec<f64>) = (0..n)
        .filter(|&i| !flags[i])
        .map(|i| (ibi.beat_times[i + 1], ibi.intervals[i]))
        .unzip();
    let spline = CubicSpline::natural(&knots, &values)?;
    let (first_valid, last_valid) = (knots[0], knots[knots.len() - 1]);
    let intervals: Vec<f64> = (0..n)
        .map(|i| {
            if !flags[i] {
                return ibi.intervals[i];
            }
            let t = ibi.beat_times[i + 1];
            let v = if t < first_valid {
                values[0]
            } else if t > last_valid {
                values[values.len() - 1]
            } else {
                spline.eval(t)
            };
            v.clamp(cfg.min_ms, cfg.max_ms)
        })
        .collect();
    let corrected = ibi
        .corrected
        .iter()
        .zip(&flags)
        .map(|(a, b)| *a || *b)
        .collect();
    Ok(IbiSeries {
        beat_times: accumulate(ibi.beat_times[0], &intervals),
        intervals,
        corrected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differencing() {
        let s = ibi_from_peaks(&[0.0, 0.8, 1.6]).unwrap();
        assert!((s.intervals()[0] - 800.0).abs() < 1e-9 && (s.intervals()[1] - 800.0).abs() < 1e-9);
        let s = ibi_from_peaks(&[0.0, 0.8, 1.65]).unwrap();
        assert!((s.intervals()[1] - 850.0).abs() < 1e-9);
        assert!(ibi_from_peaks(&[0.3]).is_err());
        assert!(ibi_from_peaks(&[0.3, 0.2]).is_err());
    }

    #[test]
    fn clean_series_untouched() {
        let s = IbiSeries::from_intervals(0.0, vec![800.0; 50]).unwrap();
        let c = correct_artifacts(&s).unwrap();
        assert_eq!(c, s);
        assert_eq!(c.corrected_count(), 0);
    }

    #[test]
    fn single_long_interval_is_repaired() {
        let mut iv = vec![800.0; 300];
        iv[150] = 2400.0;
        let s = IbiSeries::from_intervals(1.0, iv).unwrap();
        let c = correct_artifacts(&s).unwrap();
        assert_eq!(c.corrected_count(), 1);
        assert!(c.corrected_mask()[150]);
        assert!((c.intervals()[150] - 800.0).abs() <= 10.0);
        for (i, (a, b)) in c.intervals().iter().zip(s.intervals()).enumerate() {
            if i != 150 {
                assert_eq!(a, b);
            }
        }
        for (i, w) in c.beat_times().windows(2).enumerate() {
            assert!(((w[1] - w[0]) * 1000.0 - c.intervals()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn heavy_contamination_rejects_trial() {
        let iv: Vec<f64> = (0..100).map(|i| if i % 10 < 3 { 2400.0 } else { 800.0 }).collect();
        let s = IbiSeries::from_intervals(0.0, iv).unwrap();
        assert!(matches!(correct_artifacts(&s), Err(Error::TooManyArtifacts { flagged: 30, total: 100 })));
    }

    #[test]
    fn too_few_intervals() {
        let s = IbiSeries::from_intervals(0.0, vec![800.0; 4]).unwrap();
        assert!(correct_artifacts(&s).is_err());
    }
}
