use crate::error::{Error, Result};
use crate::signal::{resample, window_ranges, MultiChannelRecording, TimeSeries, TrialSpec};

/// One analysis window on the shared grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignedWindow {
    /// Index into [`AlignedSubject::trials`].
    pub trial: usize,
    pub window_index: usize,
    pub start: usize,
    pub len: usize,
}

/// All modalities resampled to the EEG rate and cut to one common grid.
#[derive(Debug, Clone)]
pub struct AlignedSubject {
    pub eeg: MultiChannelRecording,
    pub ecg: TimeSeries,
    pub temp: TimeSeries,
    pub trials: Vec<TrialSpec>,
    pub windows: Vec<AlignedWindow>,
}

impl AlignedSubject {
    pub fn rate(&self) -> f64 {
        self.eeg.rate()
    }

    pub fn t0(&self) -> f64 {
        self.eeg.t0()
    }

    /// Start and end time in seconds of a window.
    pub fn span(&self, w: &AlignedWindow) -> (f64, f64) {
        let a = self.t0() + w.start as f64 / self.rate();
        (a, a + w.len as f64 / self.rate())
    }
}

fn covers(name: &str, t0: f64, duration: f64, rate: f64, trial: &TrialSpec) -> Result<()> {
    let slack = 1e-9 + 0.5 / rate;
    if trial.start < t0 - slack || trial.end() > t0 + duration + slack {
        return Err(Error::OutOfBounds(format!(
            "trial {} [{}, {}] s is not covered by the {name} recording [{t0}, {}] s",
            trial.trial_id,
            trial.start,
            trial.end(),
            t0 + duration
        )));
    }
    Ok(())
}

fn cut(ts: &TimeSeries, t_start: f64, rate: f64, n: usize) -> Result<TimeSeries> {
    let offset = ((t_start - ts.t0()) * rate).round().max(0.0) as usize;
    let s = ts.slice(offset, n.min(ts.len().saturating_sub(offset)))?;
    if s.len() != n {
        return Err(Error::OutOfBounds(format!("{} is shorter than the shared grid", ts.label())));
    }
    TimeSeries::with_start(s.into_samples(), rate, t_start, ts.unit(), ts.label())
}

/// Resample ECG and temperature to the EEG rate, trim every modality to
/// their common time span and lay out `floor(duration / window)` windows
/// per trial with identical sample counts across modalities.
pub fn align_modalities(
    eeg: &MultiChannelRecording,
    ecg: &TimeSeries,
    temp: &TimeSeries,
    trials: &[TrialSpec],
    window: f64,
) -> Result<AlignedSubject> {
    for t in trials {
        covers("EEG", eeg.t0(), eeg.duration(), eeg.rate(), t)?;
        covers("ECG", ecg.t0(), ecg.duration(), ecg.rate(), t)?;
        covers("temperature", temp.t0(), temp.duration(), temp.rate(), t)?;
    }
    let rate = eeg.rate();
    let ecg_r = resample(ecg, rate)?;
    let temp_r = resample(temp, rate)?;

    let start = eeg.t0().max(ecg_r.t0()).max(temp_r.t0());
    let end = [
        eeg.t0() + eeg.duration(),
        ecg_r.t0() + ecg_r.duration(),
        temp_r.t0() + temp_r.duration(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let i0 = ((start - eeg.t0()) * rate - 1e-9).ceil().max(0.0) as usize;
    let i1 = (((end - eeg.t0()) * rate + 1e-9).floor() as usize).min(eeg.len());
    if i1 <= i0 {
        return Err(Error::OutOfBounds("modalities do not overlap in time".into()));
    }
    let n = i1 - i0;
    let t_start = eeg.t0() + i0 as f64 / rate;
    let eeg_a = eeg.map_channels(|c| {
        let s = c.slice(i0, n)?;
        TimeSeries::with_start(s.into_samples(), rate, t_start, c.unit(), c.label())
    })?;
    let ecg_a = cut(&ecg_r, t_start, rate, n)?;
    let temp_a = cut(&temp_r, t_start, rate, n)?;

    let mut windows = Vec::new();
    for (k, t) in trials.iter().enumerate() {
        let ranges = window_ranges(rate, t_start, n, t, window)?;
        windows.extend(ranges.into_iter().enumerate().map(|(w, (s, len))| AlignedWindow {
            trial: k,
            window_index: w,
            start: s,
            len,
        }));
    }
    Ok(AlignedSubject { eeg: eeg_a, ecg: ecg_a, temp: temp_a, trials: trials.to_vec(), windows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{Label, Modality, Sex, SubjectMeta, Unit};

    fn flat(rate: f64, secs: f64, unit: Unit, label: &str) -> TimeSeries {
        TimeSeries::new(vec![1.0; (rate * secs) as usize], rate, unit, label).unwrap()
    }

    fn eeg(rate: f64, secs: f64) -> MultiChannelRecording {
        MultiChannelRecording::new(
            vec![flat(rate, secs, Unit::Microvolt, "Cz")],
            SubjectMeta::new("S", Sex::Male, None).unwrap(),
            Modality::Eeg,
        )
        .unwrap()
    }

    #[test]
    fn counts_match_at_eeg_rate() {
        let trial = TrialSpec::new("t1", 1.0, 28.0, Label::Positive).unwrap();
        let a = align_modalities(
            &eeg(1000.0, 30.0),
            &flat(256.0, 30.0, Unit::Millivolt, "ecg_mv"),
            &flat(1.0, 30.0, Unit::Celsius, "temp_c"),
            &[trial],
            28.0,
        )
        .unwrap();
        assert_eq!(a.windows.len(), 1);
        let w = a.windows[0];
        assert_eq!(w.len, 28_000);
        assert_eq!(a.ecg.len(), a.eeg.len());
        assert_eq!(a.temp.len(), a.eeg.len());
        assert!(a.ecg.samples().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn uncovered_trial() {
        let trial = TrialSpec::new("t1", 20.0, 12.0, Label::Positive).unwrap();
        let r = align_modalities(
            &eeg(128.0, 40.0),
            &flat(100.0, 40.0, Unit::Millivolt, "ecg_mv"),
            &flat(1.0, 25.0, Unit::Celsius, "temp_c"),
            &[trial],
            4.0,
        );
        match r {
            Err(Error::OutOfBounds(m)) => assert!(m.contains("temperature")),
            other => panic!("{other:?}"),
        }
    }
}
