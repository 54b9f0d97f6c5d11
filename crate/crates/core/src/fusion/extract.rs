use serde::{Deserialize, Serialize};

use super::align::{align_modalities, AlignedSubject};
use super::HrvBlock;
use crate::config::ExperimentConfig;
use crate::ecg::{correct_artifacts, detect_rpeaks, hrv_features, ibi_from_peaks, nn50, HrvFeatures, IbiSeries};
use crate::eeg::{preprocess, region_powers, EegFeatureVector, HemispherePowers, RegionPowers};
use crate::error::{Error, Result, ResultExt};
use crate::io::SubjectRecord;
use crate::signal::{mad_outlier_replace, Label, MultiChannelRecording, Sex, TimeSeries, TrialSpec};
use crate::stats::descriptive::mean;
use crate::temperature::{temp_trial_feature, TempTrialFeature};

/// Features of one aligned window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFeatures {
    pub trial_id: String,
    pub label: Label,
    pub window_index: usize,
    pub eeg: EegFeatureVector,
    pub powers: RegionPowers,
    pub temp_mean: f64,
    pub nn50: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial_id: String,
    pub label: Label,
    /// Region powers averaged over the trial's windows.
    pub hemispheres: HemispherePowers,
    pub temperature: TempTrialFeature,
    /// Present when the full HRV block is requested.
    pub hrv: Option<HrvFeatures>,
}

/// HRV of one subject in one condition, over the intervals of all its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionHrv {
    pub label: Label,
    pub features: HrvFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectFeatures {
    pub id: String,
    pub sex: Sex,
    pub windows: Vec<WindowFeatures>,
    pub trials: Vec<TrialSummary>,
    pub conditions: Vec<ConditionHrv>,
}

/// Detected beat times and their artifact-corrected intervals. Interval `i`
/// spans `detected[i]..detected[i + 1]`.
struct Beats {
    detected: Vec<f64>,
    corrected: IbiSeries,
}

impl Beats {
    fn from_ecg(ecg: &TimeSeries) -> Result<Self> {
        let detected = detect_rpeaks(ecg)?;
        let corrected = correct_artifacts(&ibi_from_peaks(&detected)?)?;
        Ok(Beats { detected, corrected })
    }

    /// Corrected intervals whose both beats lie in `[a, b)`.
    fn intervals_in(&self, a: f64, b: f64) -> Vec<f64> {
        let t = &self.detected;
        self.corrected
            .intervals()
            .iter()
            .enumerate()
            .filter(|(i, _)| t[*i] >= a && t[i + 1] < b)
            .map(|(_, v)| *v)
            .collect()
    }
}

fn centred(trial: &TrialSpec, len: f64) -> (f64, f64) {
    let mid = trial.start + trial.duration / 2.0;
    (mid - len / 2.0, mid + len / 2.0)
}

/// The nineteen HRV variables over the trial, widened symmetrically in 1 s
/// steps while the spectral estimate lacks data and beats remain.
fn trial_hrv_from(beats: &Beats, trial: &TrialSpec, context_s: f64) -> Result<HrvFeatures> {
    let what = || format!("HRV of trial {}", trial.trial_id);
    let (first, last) = (beats.detected[0], beats.detected[beats.detected.len() - 1]);
    let mut len = trial.duration.max(context_s);
    loop {
        let (a, b) = centred(trial, len);
        let exhausted = a <= first && b > last;
        let result = IbiSeries::from_intervals(a, beats.intervals_in(a, b)).and_then(|ibi| hrv_features(&ibi));
        match result {
            Err(Error::TooShort { .. }) if !exhausted => len += 1.0,
            other => return other.context(what),
        }
    }
}

/// The nineteen HRV variables of one trial. Beats are detected on the whole
/// recording; when the trial is shorter than `context_s` the span is widened
/// symmetrically around it so the spectral bands are resolvable.
pub fn trial_hrv(ecg: &TimeSeries, trial: &TrialSpec, context_s: f64) -> Result<HrvFeatures> {
    trial_hrv_from(&Beats::from_ecg(ecg)?, trial, context_s)
}

fn window_recording(rec: &MultiChannelRecording, start: usize, len: usize) -> Result<MultiChannelRecording> {
    let channels = rec
        .channels()
        .iter()
        .map(|c| c.slice(start, len))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiChannelRecording::from_parts_unchecked(channels, rec.subject().clone(), rec.modality()))
}

fn window_features(a: &AlignedSubject, eeg: &MultiChannelRecording, beats: &Beats, cfg: &ExperimentConfig) -> Result<Vec<WindowFeatures>> {
    a.windows
        .iter()
        .map(|w| {
            let trial = &a.trials[w.trial];
            let what = || format!("trial {} window {}", trial.trial_id, w.window_index);
            let powers = region_powers(&window_recording(eeg, w.start, w.len)?, &cfg.montage).context(what)?;
            let temp = mad_outlier_replace(&a.temp.samples()[w.start..w.start + w.len]).context(what)?;
            let (t0, t1) = a.span(w);
            Ok(WindowFeatures {
                trial_id: trial.trial_id.clone(),
                label: trial.label,
                window_index: w.window_index,
                eeg: EegFeatureVector::from_powers(&powers),
                powers,
                temp_mean: mean(&temp.values),
                nn50: nn50(&beats.intervals_in(t0, t1)),
            })
        })
        .collect()
}

/// Align the subject's modalities and extract every per-window and
/// per-trial quantity the experiment needs.
pub fn extract_subject(rec: &SubjectRecord, cfg: &ExperimentConfig) -> Result<SubjectFeatures> {
    let id = rec.meta.id.clone();
    let missing = rec.missing();
    let (Some(eeg), Some(ecg), Some(temp)) = (&rec.eeg, &rec.ecg, &rec.temp) else {
        return Err(Error::Infeasible(format!("subject {id} is missing {missing:?}")));
    };
    let inner = || -> Result<SubjectFeatures> {
        let aligned = align_modalities(eeg, ecg, temp, &rec.trials, cfg.window_s)?;
        let eeg_pre = preprocess(&aligned.eeg)?;
        let beats = Beats::from_ecg(&aligned.ecg).context(|| "R-peak detection".into())?;
        let windows = window_features(&aligned, &eeg_pre, &beats, cfg)?;

        let mut trials = Vec::with_capacity(rec.trials.len());
        for t in &rec.trials {
            let powers: Vec<RegionPowers> = windows
                .iter()
                .filter(|w| w.trial_id == t.trial_id)
                .map(|w| w.powers.clone())
                .collect();
            let mean_powers = RegionPowers::mean(&powers).ok_or_else(|| {
                Error::TooShort { what: "windows in trial", needed: 1, got: 0 }.context(format!("trial {}", t.trial_id))
            })?;
            let hrv = match cfg.hrv_block {
                HrvBlock::Full => Some(trial_hrv_from(&beats, t, cfg.hrv_context_s)?),
                HrvBlock::Nn50 => None,
            };
            trials.push(TrialSummary {
                trial_id: t.trial_id.clone(),
                label: t.label,
                hemispheres: HemispherePowers::from_powers(&mean_powers),
                temperature: temp_trial_feature(temp, t).context(|| format!("temperature of trial {}", t.trial_id))?,
                hrv,
            });
        }

        let mut conditions = Vec::new();
        for label in [Label::Positive, Label::Negative] {
            let iv: Vec<f64> = rec
                .trials
                .iter()
                .filter(|t| t.label == label)
                .flat_map(|t| beats.intervals_in(t.start, t.end()))
                .collect();
            if iv.is_empty() {
                continue;
            }
            let what = || format!("{label} HRV");
            let ibi = IbiSeries::from_intervals(0.0, iv).context(what)?;
            conditions.push(ConditionHrv { label, features: hrv_features(&ibi).context(what)? });
        }
        Ok(SubjectFeatures { id: id.clone(), sex: rec.meta.sex, windows, trials, conditions })
    };
    inner().context(|| format!("subject {id}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beats(detected: Vec<f64>) -> Beats {
        let corrected = ibi_from_peaks(&detected).unwrap();
        Beats { detected, corrected }
    }

    #[test]
    fn intervals_need_both_beats_inside() {
        let b = beats(vec![0.0, 0.8, 1.6, 2.5, 3.2]);
        assert_eq!(b.intervals_in(0.5, 2.6).len(), 2);
        assert_eq!(b.intervals_in(0.0, 0.8).len(), 0);
        assert_eq!(b.intervals_in(0.0, 10.0).len(), 4);
    }

    #[test]
    fn context_widens_to_cover() {
        let b = beats((0..200).map(|i| i as f64 * 0.8).collect());
        let t = TrialSpec::new("t", 60.0, 28.0, Label::Positive).unwrap();
        let h = trial_hrv_from(&b, &t, 40.0).unwrap();
        assert!(h.mean_rr > 799.0 && h.mean_rr < 801.0);
        assert!((t.start + t.duration / 2.0 - centred(&t, 40.0).0 - 20.0).abs() < 1e-12);
    }
}
