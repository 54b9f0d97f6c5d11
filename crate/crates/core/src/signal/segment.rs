use super::series::{MultiChannelRecording, TimeSeries, TrialSpec};
use crate::error::{Error, Result};

/// One fixed-length window cut from a trial.
#[derive(Debug, Clone)]
pub struct Segment {
    pub trial: TrialSpec,
    pub window_index: usize,
    pub recording: MultiChannelRecording,
}

/// Sample ranges `(start, len)` of the non-overlapping windows of `trial`
/// on a grid with the given rate, start time and length.
pub fn window_ranges(
    rate: f64,
    t0: f64,
    len: usize,
    trial: &TrialSpec,
    window: f64,
) -> Result<Vec<(usize, usize)>> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidInput(format!("window must be positive, got {window}")));
    }
    // Tolerate sub-sample rounding in trial times.
    let slack = 1e-9 + 0.5 / rate;
    if window > trial.duration + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "window {window} s exceeds duration {} s of trial {}",
            trial.duration, trial.trial_id
        )));
    }
    let rec_end = t0 + len as f64 / rate;
    if trial.start < t0 - slack || trial.end() > rec_end + slack {
        return Err(Error::OutOfBounds(format!(
            "trial {} [{}, {}] s lies outside recording [{t0}, {rec_end}] s",
            trial.trial_id,
            trial.start,
            trial.end()
        )));
    }
    let count = ((trial.duration + 1e-9) / window).floor() as usize;
    let win_len = (window * rate).round() as usize;
    (0..count)
        .map(|w| {
            let start = ((trial.start - t0 + w as f64 * window) * rate).round().max(0.0) as usize;
            if start + win_len > len {
                return Err(Error::OutOfBounds(format!(
                    "window {w} of trial {} runs past the end of the recording",
                    trial.trial_id
                )));
            }
            Ok((start, win_len))
        })
        .collect()
}

/// Cut every trial into `floor(duration / window)` non-overlapping windows.
pub fn segment(
    rec: &MultiChannelRecording,
    trials: &[TrialSpec],
    window: f64,
) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    for trial in trials {
        let ranges = window_ranges(rec.rate(), rec.t0(), rec.len(), trial, window)?;
        for (window_index, (start, len)) in ranges.into_iter().enumerate() {
            let channels = rec
                .channels()
                .iter()
                .map(|c| c.slice(start, len))
                .collect::<Result<Vec<_>>>()?;
            out.push(Segment {
                trial: trial.clone(),
                window_index,
                recording: MultiChannelRecording::from_parts_unchecked(
                    channels,
                    rec.subject().clone(),
                    rec.modality(),
                ),
            });
        }
    }
    Ok(out)
}

/// Single-series counterpart of [`segment`].
pub fn segment_series(ts: &TimeSeries, trial: &TrialSpec, window: f64) -> Result<Vec<TimeSeries>> {
    window_ranges(ts.rate(), ts.t0(), ts.len(), trial, window)?
        .into_iter()
        .map(|(s, l)| ts.slice(s, l))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{Label, Modality, Sex, SubjectMeta, Unit};

    fn rec(secs: f64, rate: f64) -> MultiChannelRecording {
        let n = (secs * rate) as usize;
        let ch = |l: &str| TimeSeries::new(vec![0.0; n], rate, Unit::Microvolt, l).unwrap();
        let meta = SubjectMeta::new("S01", Sex::Female, None).unwrap();
        MultiChannelRecording::new(vec![ch("Fz"), ch("Cz")], meta, Modality::Eeg).unwrap()
    }

    #[test]
    fn floor_contract() {
        let t = TrialSpec::new("t01", 10.0, 60.0, Label::Positive).unwrap();
        let segs = segment(&rec(100.0, 64.0), &[t], 28.0).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|s| s.recording.len() == 28 * 64));
        assert_eq!(segs[1].window_index, 1);
        assert_eq!(segs[1].recording.t0(), 38.0);
    }

    #[test]
    fn window_equal_to_duration() {
        let t = TrialSpec::new("t01", 5.0, 28.0, Label::Negative).unwrap();
        let segs = segment(&rec(40.0, 50.0), &[t], 28.0).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].recording.len(), 1400);
    }

    #[test]
    fn fourteen_clips_give_at_least_fourteen_windows() {
        let durations = [43.0, 78.0, 50.0, 61.0, 44.0, 70.0, 55.0, 47.0, 66.0, 73.0, 52.0, 58.0, 45.0, 77.0];
        let mut start = 30.0;
        let trials: Vec<TrialSpec> = durations
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
                let t = TrialSpec::new(format!("t{i:02}"), start, d, label).unwrap();
                start += d + 30.0;
                t
            })
            .collect();
        let segs = segment(&rec(start, 16.0), &trials, 28.0).unwrap();
        assert!(segs.len() >= 14);
    }

    #[test]
    fn errors() {
        let r = rec(30.0, 10.0);
        let outside = TrialSpec::new("t", 20.0, 20.0, Label::Positive).unwrap();
        assert!(matches!(segment(&r, &[outside], 5.0), Err(Error::OutOfBounds(_))));
        let short = TrialSpec::new("t", 0.0, 10.0, Label::Positive).unwrap();
        assert!(matches!(segment(&r, &[short], 11.0), Err(Error::InvalidInput(_))));
    }
}
