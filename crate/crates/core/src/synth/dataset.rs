use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ecg::render_ecg;
use super::eeg::{band_noise, BandPower};
use super::rr::integrate_beats;
use crate::eeg::{Band, EegFeatureVector, Montage, Region};
use crate::error::{Error, Result};
use crate::io::{atomic_dir, atomic_write, write_subject, SubjectRecord};
use crate::rng;
use crate::signal::{
    Label, Modality, MultiChannelRecording, Sex, SubjectMeta, TimeSeries, TrialSpec, Unit,
};
use crate::stats::descriptive::{mean, sample_sd};

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const PRESETS: [&str; 4] = ["paper-shape", "small", "null", "paper-means"];

/// Background EEG spectrum in µV²: slow activity below Alpha, then the four
/// named bands.
const BACKGROUND: [(f64, f64, f64); 6] = [
    (1.0, 4.0, 20.0),
    (4.0, 8.0, 10.0),
    (8.0, 13.0, 8.0),
    (13.0, 20.0, 4.0),
    (20.0, 30.0, 3.0),
    (30.0, 45.0, 1.5),
];
const SUBJECT_SPREAD: f64 = 0.25;
const TRIAL_COMMON_SPREAD: f64 = 0.15;
const TRIAL_CHANNEL_SPREAD: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempLevels {
    pub positive: MeanSd,
    pub negative: MeanSd,
    pub baseline: MeanSd,
}

impl TempLevels {
    fn of(&self, label: Label) -> MeanSd {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
            Label::Baseline => self.baseline,
        }
    }
}

/// Class-conditional effects injected by the generator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Effects {
    /// Relative power increase of every model-feature region/band under
    /// Positive trials.
    pub eeg_gain: f64,
    /// Relative prefrontal Alpha increase, left side under Positive and
    /// right side under Negative trials.
    pub pf_alpha_asymmetry: f64,
    /// Relative increase of the respiratory RR modulation under Positive
    /// trials.
    pub hf_gain: f64,
    /// Added to the temperature of Negative trials, by sex.
    pub temp_shift_female_c: f64,
    pub temp_shift_male_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub subjects: usize,
    pub females: usize,
    pub trials_per_class: usize,
    pub trial_s: f64,
    pub gap_s: f64,
    pub baseline_s: f64,
    pub eeg_rate: f64,
    pub ecg_rate: f64,
    pub temp_rate: f64,
    pub ecg_snr_db: f64,
    pub temp: TempLevels,
    pub effects: Effects,
    /// 1-based subject numbers recorded without temperature / ECG.
    pub missing_temp: Vec<usize>,
    pub missing_ecg: Vec<usize>,
    /// EEG channels beyond those of the region map.
    pub extra_channels: Vec<String>,
}

impl DatasetSpec {
    pub fn preset(name: &str) -> Result<Self> {
        let temp = TempLevels {
            positive: MeanSd { mean: 28.767, sd: 1.515 },
            negative: MeanSd { mean: 28.847, sd: 1.486 },
            baseline: MeanSd { mean: 27.087, sd: 1.552 },
        };
        let shape = DatasetSpec {
            subjects: 24,
            females: 8,
            trials_per_class: 7,
            trial_s: 28.0,
            gap_s: 4.0,
            baseline_s: 30.0,
            eeg_rate: 128.0,
            ecg_rate: 100.0,
            temp_rate: 1.0,
            ecg_snr_db: 20.0,
            temp,
            effects: Effects {
                eeg_gain: 0.7,
                pf_alpha_asymmetry: 0.4,
                hf_gain: 0.3,
                temp_shift_female_c: 1.0,
                temp_shift_male_c: 0.0,
            },
            missing_temp: vec![1, 15],
            missing_ecg: vec![1, 9, 17, 19, 22],
            extra_channels: vec!["F3".into(), "F4".into(), "Pz".into(), "Oz".into()],
        };
        let small = DatasetSpec {
            subjects: 6,
            females: 2,
            trial_s: 12.0,
            gap_s: 2.0,
            effects: Effects { eeg_gain: 0.8, ..shape.effects },
            missing_temp: vec![],
            missing_ecg: vec![],
            ..shape.clone()
        };
        match name {
            "paper-shape" => Ok(shape),
            "small" => Ok(small),
            "null" => {
                let level = MeanSd { mean: 28.8, sd: 1.5 };
                Ok(DatasetSpec {
                    effects: Effects::default(),
                    temp: TempLevels { positive: level, negative: level, ..temp },
                    missing_temp: vec![],
                    missing_ecg: vec![],
                    ..shape.clone()
                })
            }
            "paper-means" => Ok(DatasetSpec {
                effects: Effects::default(),
                missing_temp: vec![],
                missing_ecg: vec![],
                ..shape
            }),
            other => Err(Error::InvalidInput(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.subjects >= 1
            && self.females <= self.subjects
            && self.trials_per_class >= 1
            && self.trial_s > 0.0
            && self.gap_s >= 0.0
            && self.baseline_s >= 0.0
            && self.eeg_rate > 90.0
            && self.ecg_rate > 0.0
            && self.temp_rate > 0.0
            && self.effects.eeg_gain > -1.0
            && self.effects.pf_alpha_asymmetry > -1.0
            && self.effects.hf_gain > -1.0;
        if !ok {
            return Err(Error::InvalidInput("inconsistent dataset spec".into()));
        }
        Ok(())
    }

    /// Session length in seconds.
    pub fn session_s(&self) -> f64 {
        self.baseline_s + (2 * self.trials_per_class) as f64 * (self.trial_s + self.gap_s) + self.gap_s
    }

    /// EEG channel labels in file order.
    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Montage::default().electrodes().iter().map(|s| s.to_string()).collect();
        out.extend(self.extra_channels.iter().cloned());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTruth {
    pub trial_id: String,
    pub label: Label,
    pub temp_level_c: f64,
    pub hf_amp_ms: f64,
    /// Power multiplier on the model-feature regions and bands.
    pub eeg_model_gain: f64,
    pub pf_alpha_left_gain: f64,
    pub pf_alpha_right_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectTruth {
    pub id: String,
    pub sex: Sex,
    pub missing: Vec<Modality>,
    pub beat_times: Vec<f64>,
    pub trials: Vec<TrialTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub spec: DatasetSpec,
    pub subjects: Vec<SubjectTruth>,
}

fn subject_id(i: usize) -> String {
    format!("S{:02}", i + 1)
}

/// Per-subject temperature offsets in units of the condition sd,
/// standardized to zero mean and unit sample sd across subjects.
fn temp_offsets(spec: &DatasetSpec, seed: u64) -> Vec<f64> {
    let mut rng = rng::named(seed, "temp-offsets");
    let z: Vec<f64> = (0..spec.subjects).map(|_| rng.sample(StandardNormal)).collect();
    if z.len() < 2 {
        return vec![0.0; z.len()];
    }
    let (m, s) = (mean(&z), sample_sd(&z));
    z.iter().map(|v| (v - m) / s).collect()
}

fn female_mask(spec: &DatasetSpec, seed: u64) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..spec.subjects).collect();
    idx.shuffle(&mut rng::named(seed, "sexes"));
    let mut mask = vec![false; spec.subjects];
    for &i in &idx[..spec.females] {
        mask[i] = true;
    }
    mask
}

fn lognormal<R: Rng>(rng: &mut R, spread: f64) -> f64 {
    (spread * rng.sample::<f64, _>(StandardNormal)).exp()
}

/// Generate subject `index` (0-based) entirely in memory.
pub fn gen_subject(spec: &DatasetSpec, seed: u64, index: usize) -> Result<(SubjectRecord, SubjectTruth)> {
    spec.validate()?;
    if index >= spec.subjects {
        return Err(Error::InvalidInput(format!("subject index {index} out of range")));
    }
    let sseed = rng::derive(seed, index as u64);
    let id = subject_id(index);
    let sex = if female_mask(spec, seed)[index] { Sex::Female } else { Sex::Male };
    let age = 20.0 + rng::named(sseed, "age").random_range(0..16) as f64;
    let meta = SubjectMeta::new(id.clone(), sex, Some(age))?;

    // session layout
    let mut labels: Vec<Label> = [Label::Positive, Label::Negative]
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, spec.trials_per_class))
        .collect();
    // one stimulus order for the whole dataset, so a trial id names a video
    labels.shuffle(&mut rng::named(seed, "order"));
    let mut trials = vec![];
    if spec.baseline_s > 0.0 {
        trials.push(TrialSpec::new("b00", 0.0, spec.baseline_s, Label::Baseline)?);
    }
    for (k, &l) in labels.iter().enumerate() {
        let start = spec.baseline_s + spec.gap_s + k as f64 * (spec.trial_s + spec.gap_s);
        trials.push(TrialSpec::new(format!("t{:02}", k + 1), start, spec.trial_s, l)?);
    }
    let total = spec.session_s();
    let label_at = |t: f64| -> Option<&TrialSpec> { trials.iter().find(|tr| t >= tr.start && t < tr.end()) };

    let fx = spec.effects;
    let mut jitter = rng::named(sseed, "trial-jitter");
    let z_temp = temp_offsets(spec, seed)[index];
    let trial_noise = Normal::new(0.0, 0.1).expect("valid sd");
    let hf_base = 20.0;
    let truths: Vec<TrialTruth> = trials
        .iter()
        .map(|t| {
            let lv = spec.temp.of(t.label);
            let shift = match (t.label, sex) {
                (Label::Negative, Sex::Female) => fx.temp_shift_female_c,
                (Label::Negative, Sex::Male) => fx.temp_shift_male_c,
                _ => 0.0,
            };
            let pos = t.label == Label::Positive;
            let neg = t.label == Label::Negative;
            TrialTruth {
                trial_id: t.trial_id.clone(),
                label: t.label,
                temp_level_c: lv.mean + z_temp * lv.sd + shift + trial_noise.sample(&mut jitter),
                hf_amp_ms: hf_base * if pos { 1.0 + fx.hf_gain } else { 1.0 },
                eeg_model_gain: if pos { 1.0 + fx.eeg_gain } else { 1.0 },
                pf_alpha_left_gain: if pos { 1.0 + fx.pf_alpha_asymmetry } else { 1.0 },
                pf_alpha_right_gain: if neg { 1.0 + fx.pf_alpha_asymmetry } else { 1.0 },
            }
        })
        .collect();
    let truth_at = |t: f64| label_at(t).map(|tr| &truths[trials.iter().position(|x| x.trial_id == tr.trial_id).unwrap()]);

    // heart
    let mut rr_rng = rng::named(sseed, "rr");
    let base_ms = rr_rng.random_range(750.0..950.0);
    let hf_hz = rr_rng.random_range(0.2..0.3);
    let phase: f64 = rr_rng.random_range(0.0..2.0 * PI);
    let first = rr_rng.random_range(0.1..0.6);
    let rr_noise = Normal::new(0.0, 10.0).expect("valid sd");
    let beats = integrate_beats(first, total - 0.5, &mut rr_rng, |t, r| {
        let hf = truth_at(t).map_or(hf_base, |x| x.hf_amp_ms);
        base_ms + 20.0 * (2.0 * PI * 0.1 * t + phase).sin() + hf * (2.0 * PI * hf_hz * t).sin() + rr_noise.sample(r)
    })?;
    let n_ecg = (total * spec.ecg_rate).round() as usize;
    let ecg_x = render_ecg(&beats, spec.ecg_rate, n_ecg, spec.ecg_snr_db, &mut rng::named(sseed, "ecg"))?;

    // temperature
    let mut temp_rng = rng::named(sseed, "temp");
    let drift_phase: f64 = temp_rng.random_range(0.0..2.0 * PI);
    let white = Normal::new(0.0, 0.02).expect("valid sd");
    let n_temp = (total * spec.temp_rate).round() as usize;
    let level_at = |t: f64| -> f64 {
        if let Some(x) = truth_at(t) {
            return x.temp_level_c;
        }
        // ramp across gaps between neighbouring blocks
        let prev = trials.iter().zip(&truths).filter(|(tr, _)| tr.end() <= t).last();
        let next = trials.iter().zip(&truths).find(|(tr, _)| tr.start > t);
        match (prev, next) {
            (Some((a, la)), Some((b, lb))) => {
                let w = (t - a.end()) / (b.start - a.end());
                la.temp_level_c + w * (lb.temp_level_c - la.temp_level_c)
            }
            (Some((_, l)), None) | (None, Some((_, l))) => l.temp_level_c,
            (None, None) => spec.temp.baseline.mean,
        }
    };
    let mut temp_x: Vec<f64> = (0..n_temp)
        .map(|i| {
            let t = i as f64 / spec.temp_rate;
            level_at(t) + 0.05 * (2.0 * PI * t / 60.0 + drift_phase).sin() + white.sample(&mut temp_rng)
        })
        .collect();
    for t in &trials {
        if temp_rng.random::<f64>() < 0.25 {
            let a = (t.start * spec.temp_rate).ceil() as usize;
            let b = ((t.end() * spec.temp_rate).floor() as usize).min(n_temp);
            if b > a {
                let i = temp_rng.random_range(a..b);
                temp_x[i] += temp_rng.random_range(3.0..6.0);
            }
        }
    }

    // brain
    let montage = Montage::default();
    let channels = spec.channels();
    let region_of = |ch: &str| -> Vec<Region> {
        montage
            .regions()
            .iter()
            .filter(|r| r.electrodes.iter().any(|e| e == ch))
            .map(|r| r.region)
            .collect()
    };
    let band_of = |lo: f64| Band::ALL.into_iter().find(|&b| montage.band(b).lo == lo);
    let mut eeg_rng = rng::named(sseed, "eeg-levels");
    let subj_gain: Vec<Vec<f64>> = channels
        .iter()
        .map(|_| BACKGROUND.iter().map(|_| lognormal(&mut eeg_rng, SUBJECT_SPREAD)).collect())
        .collect();
    // sample boundaries of consecutive blocks covering the session
    let n_eeg = (total * spec.eeg_rate).round() as usize;
    let mut cuts: Vec<(usize, Option<usize>)> = Vec::new();
    let mut pos = 0usize;
    for (k, t) in trials.iter().enumerate() {
        let a = ((t.start * spec.eeg_rate).round() as usize).min(n_eeg);
        let b = ((t.end() * spec.eeg_rate).round() as usize).min(n_eeg);
        if a > pos {
            cuts.push((a - pos, None));
        }
        cuts.push((b - a, Some(k)));
        pos = b;
    }
    if n_eeg > pos {
        cuts.push((n_eeg - pos, None));
    }
    let block_gain: Vec<Vec<f64>> = cuts
        .iter()
        .map(|_| BACKGROUND.iter().map(|_| lognormal(&mut eeg_rng, TRIAL_COMMON_SPREAD)).collect())
        .collect();
    let eeg_channels = channels
        .par_iter()
        .enumerate()
        .map(|(c, label)| {
            let mut rng = rng::named(sseed, &format!("eeg/{label}"));
            let regions = region_of(label);
            let mut x = Vec::with_capacity(n_eeg);
            for (bi, &(len, trial)) in cuts.iter().enumerate() {
                let comps: Vec<BandPower> = BACKGROUND
                    .iter()
                    .enumerate()
                    .map(|(j, &(lo, hi, p))| {
                        let mut g = subj_gain[c][j] * block_gain[bi][j];
                        if let Some(k) = trial {
                            g *= lognormal(&mut rng, TRIAL_CHANNEL_SPREAD);
                            let tt = &truths[k];
                            if let Some(band) = band_of(lo) {
                                let model = EegFeatureVector::FEATURES
                                    .iter()
                                    .any(|(r, b)| *b == band && regions.contains(r));
                                if model {
                                    g *= tt.eeg_model_gain;
                                }
                                if band == Band::Alpha && regions.contains(&Region::PfLeft) {
                                    g *= tt.pf_alpha_left_gain;
                                }
                                if band == Band::Alpha && regions.contains(&Region::PfRight) {
                                    g *= tt.pf_alpha_right_gain;
                                }
                            }
                        }
                        BandPower { lo, hi, power: p * g }
                    })
                    .collect();
                x.extend(band_noise(len, spec.eeg_rate, &comps, &mut rng));
            }
            TimeSeries::new(x, spec.eeg_rate, Unit::Microvolt, label.clone())
        })
        .collect::<Result<Vec<_>>>()?;

    let number = index + 1;
    let ecg = (!spec.missing_ecg.contains(&number))
        .then(|| TimeSeries::new(ecg_x, spec.ecg_rate, Unit::Millivolt, crate::io::ECG_COLUMN))
        .transpose()?;
    let temp = (!spec.missing_temp.contains(&number))
        .then(|| TimeSeries::new(temp_x, spec.temp_rate, Unit::Celsius, crate::io::TEMP_COLUMN))
        .transpose()?;
    let record = SubjectRecord {
        eeg: Some(MultiChannelRecording::new(eeg_channels, meta.clone(), Modality::Eeg)?),
        ecg,
        temp,
        trials,
        meta,
    };
    let truth = SubjectTruth {
        id,
        sex,
        missing: record.missing(),
        beat_times: beats,
        trials: truths,
    };
    Ok((record, truth))
}

/// Write a full dataset plus `ground_truth.json` under `out`, which must not
/// exist or be empty. Nothing is left behind on failure.
pub fn gen_dataset(spec: &DatasetSpec, seed: u64, out: &Path) -> Result<GroundTruth> {
    spec.validate()?;
    atomic_dir(out, |dir| {
        let subjects = (0..spec.subjects)
            .into_par_iter()
            .map(|i| {
                let (rec, truth) = gen_subject(spec, seed, i)?;
                write_subject(&dir.join(&rec.meta.id), &rec)?;
                Ok(truth)
            })
            .collect::<Result<Vec<_>>>()?;
        let gt = GroundTruth { seed, spec: spec.clone(), subjects };
        atomic_write(&dir.join(GROUND_TRUTH_FILE), serde_json::to_string_pretty(&gt)?.as_bytes())?;
        Ok(gt)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for p in PRESETS {
            DatasetSpec::preset(p).unwrap().validate().unwrap();
        }
        assert!(DatasetSpec::preset("nope").is_err());
    }

    #[test]
    fn offsets_are_standardized() {
        let spec = DatasetSpec::preset("paper-means").unwrap();
        let z = temp_offsets(&spec, 5);
        assert!(mean(&z).abs() < 1e-12);
        assert!((sample_sd(&z) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subject_layout() {
        let spec = DatasetSpec { subjects: 2, females: 1, trial_s: 6.0, trials_per_class: 2, ..DatasetSpec::preset("small").unwrap() };
        let (rec, truth) = gen_subject(&spec, 9, 1).unwrap();
        assert_eq!(rec.trials.len(), 5);
        assert_eq!(rec.trials.iter().filter(|t| t.label == Label::Positive).count(), 2);
        let eeg = rec.eeg.as_ref().unwrap();
        assert_eq!(eeg.channels().len(), 25);
        assert!((eeg.duration() - spec.session_s()).abs() < 1e-9);
        assert!(truth.beat_times.windows(2).all(|w| w[1] > w[0]));
        let (again, _) = gen_subject(&spec, 9, 1).unwrap();
        assert_eq!(rec, again);
    }
}
