use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Microvolt,
    Millivolt,
    Celsius,
    Millisecond,
    Dimensionless,
}

/// A uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    rate: f64,
    t0: f64,
    unit: Unit,
    label: String,
}

impl TimeSeries {
    /// Build a series, rejecting non-positive rates and non-finite samples.
    pub fn new(samples: Vec<f64>, rate: f64, unit: Unit, label: impl Into<String>) -> Result<Self> {
        Self::with_start(samples, rate, 0.0, unit, label)
    }

    pub fn with_start(
        samples: Vec<f64>,
        rate: f64,
        t0: f64,
        unit: Unit,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidInput(format!("sampling rate must be positive, got {rate}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidInput("start time must be finite".into()));
        }
        let label = label.into();
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample {i} of series '{label}' is not finite"
            )));
        }
        Ok(Self {
            samples,
            rate,
            t0,
            unit,
            label,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds, `len / rate`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.t0 + index as f64 / self.rate
    }

    /// Same metadata, new samples. Samples produced by the crate's own
    /// arithmetic are trusted to be finite.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        Self {
            samples,
            rate: self.rate,
            t0: self.t0,
            unit: self.unit,
            label: self.label.clone(),
        }
    }

    pub(crate) fn with_rate(&self, samples: Vec<f64>, rate: f64) -> Self {
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        Self {
            samples,
            rate,
            t0: self.t0,
            unit: self.unit,
            label: self.label.clone(),
        }
    }

    /// Contiguous slice `[start, start + len)` as a new series.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        let end = start
            .checked_add(len)
            .filter(|&e| e <= self.samples.len())
            .ok_or_else(|| {
                Error::OutOfBounds(format!(
                    "slice {start}..{} of '{}' exceeds {} samples",
                    start.saturating_add(len),
                    self.label,
                    self.samples.len()
                ))
            })?;
        Ok(Self {
            samples: self.samples[start..end].to_vec(),
            rate: self.rate,
            t0: self.time_of(start),
            unit: self.unit,
            label: self.label.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::Female => "female",
            Sex::Male => "male",
        })
    }
}

impl FromStr for Sex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Sex::Female),
            "male" | "m" => Ok(Sex::Male),
            other => Err(Error::InvalidInput(format!("unknown sex '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectMeta {
    pub id: String,
    pub sex: Sex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<f64>,
}

impl SubjectMeta {
    pub fn new(id: impl Into<String>, sex: Sex, age: Option<f64>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::InvalidInput("subject id must be nonempty".into()));
        }
        Ok(Self { id, sex, age })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Modality {
    Eeg,
    Ecg,
    Temp,
}

/// Channels sharing one sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelRecording {
    channels: Vec<TimeSeries>,
    subject: SubjectMeta,
    modality: Modality,
}

impl MultiChannelRecording {
    pub fn new(channels: Vec<TimeSeries>, subject: SubjectMeta, modality: Modality) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(Error::InvalidInput("recording has no channels".into()));
        };
        let (rate, len) = (first.rate(), first.len());
        let mut seen = HashSet::new();
        for ch in &channels {
            if ch.rate() != rate || ch.len() != len {
                return Err(Error::InvalidInput(format!(
                    "channel '{}' has rate {} Hz / {} samples, expected {rate} Hz / {len}",
                    ch.label(),
                    ch.rate(),
                    ch.len()
                )));
            }
            if !seen.insert(ch.label()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate channel label '{}'",
                    ch.label()
                )));
            }
        }
        Ok(Self {
            channels,
            subject,
            modality,
        })
    }

    pub fn channels(&self) -> &[TimeSeries] {
        &self.channels
    }

    pub fn subject(&self) -> &SubjectMeta {
        &self.subject
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn rate(&self) -> f64 {
        self.channels[0].rate()
    }

    pub fn t0(&self) -> f64 {
        self.channels[0].t0()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.channels[0].duration()
    }

    pub fn channel(&self, label: &str) -> Option<&TimeSeries> {
        self.channels.iter().find(|c| c.label() == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.label())
    }

    /// Apply `f` to every channel, keeping subject and modality.
    pub fn map_channels<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&TimeSeries) -> Result<TimeSeries>,
    {
        let channels = self.channels.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(channels, self.subject.clone(), self.modality)
    }

    pub(crate) fn from_parts_unchecked(
        channels: Vec<TimeSeries>,
        subject: SubjectMeta,
        modality: Modality,
    ) -> Self {
        Self {
            channels,
            subject,
            modality,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
    Baseline,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "Positive",
            Label::Negative => "Negative",
            Label::Baseline => "Baseline",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(Label::Positive),
            "negative" | "neg" => Ok(Label::Negative),
            "baseline" | "base" => Ok(Label::Baseline),
            other => Err(Error::InvalidInput(format!("unknown trial label '{other}'"))),
        }
    }
}

/// One stimulus presentation (or baseline block) on the session clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub trial_id: String,
    pub start: f64,
    pub duration: f64,
    pub label: Label,
}

impl TrialSpec {
    pub fn new(trial_id: impl Into<String>, start: f64, duration: f64, label: Label) -> Result<Self> {
        if !(start.is_finite() && start >= 0.0) {
            return Err(Error::InvalidInput(format!("trial start must be >= 0, got {start}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidInput(format!(
                "trial duration must be > 0, got {duration}"
            )));
        }
        Ok(Self {
            trial_id: trial_id.into(),
            start,
            duration,
            label,
        })
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SubjectMeta {
        SubjectMeta::new("S01", Sex::Female, None).unwrap()
    }

    #[test]
    fn rejects_bad_rate_and_nan() {
        assert!(TimeSeries::new(vec![1.0], 0.0, Unit::Microvolt, "x").is_err());
        assert!(TimeSeries::new(vec![1.0], -2.0, Unit::Microvolt, "x").is_err());
        assert!(TimeSeries::new(vec![f64::NAN], 2.0, Unit::Microvolt, "x").is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY], 2.0, Unit::Microvolt, "x").is_err());
    }

    #[test]
    fn duration_is_len_over_rate() {
        let ts = TimeSeries::new(vec![0.0; 500], 250.0, Unit::Microvolt, "Cz").unwrap();
        assert_eq!(ts.duration(), 2.0);
    }

    #[test]
    fn recording_requires_matching_channels() {
        let a = TimeSeries::new(vec![0.0; 10], 10.0, Unit::Microvolt, "a").unwrap();
        let b = TimeSeries::new(vec![0.0; 11], 10.0, Unit::Microvolt, "b").unwrap();
        let a2 = a.clone();
        assert!(MultiChannelRecording::new(vec![a.clone(), b], meta(), Modality::Eeg).is_err());
        assert!(MultiChannelRecording::new(vec![a, a2], meta(), Modality::Eeg).is_err());
    }

    #[test]
    fn subject_id_nonempty() {
        assert!(SubjectMeta::new("  ", Sex::Male, None).is_err());
    }

    #[test]
    fn trial_spec_bounds() {
        assert!(TrialSpec::new("t", -1.0, 5.0, Label::Positive).is_err());
        assert!(TrialSpec::new("t", 0.0, 0.0, Label::Positive).is_err());
        assert_eq!(TrialSpec::new("t", 2.0, 5.0, Label::Negative).unwrap().end(), 7.0);
    }

    #[test]
    fn slice_carries_start_time() {
        let ts = TimeSeries::new((0..10).map(f64::from).collect(), 2.0, Unit::Celsius, "t").unwrap();
        let s = ts.slice(4, 3).unwrap();
        assert_eq!(s.samples(), &[4.0, 5.0, 6.0]);
        assert_eq!(s.t0(), 2.0);
        assert!(ts.slice(8, 3).is_err());
    }
}
