//! Multimodal alignment, the fused feature matrix and the experiment grid.

mod align;
mod experiment;
mod extract;
mod matrix;
pub mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Sex;

pub use align::{align_modalities, AlignedSubject, AlignedWindow};
pub use experiment::{
    extract_dataset, extract_records, population_members, population_report, run_experiment,
    run_experiment_on, run_grid, Cell, ConditionSummary, Exclusion, HrvVariableStats,
    PopulationReport, ReportBundle, SelectionSummary, TemperatureStats, TrialTemperature, TOOL,
};
pub use extract::{extract_subject, trial_hrv, ConditionHrv, SubjectFeatures, TrialSummary, WindowFeatures};
pub use matrix::{build_feature_matrix, feature_names, NN50_FEATURE, TEMP_FEATURE};

/// Which modalities feed a classification matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ModalitySet {
    Eeg,
    TempEcg,
    EegTemp,
    EegEcg,
    All,
}

impl ModalitySet {
    pub const ALL: [ModalitySet; 5] = [
        ModalitySet::Eeg,
        ModalitySet::TempEcg,
        ModalitySet::EegTemp,
        ModalitySet::EegEcg,
        ModalitySet::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModalitySet::Eeg => "EEG",
            ModalitySet::TempEcg => "T+ECG",
            ModalitySet::EegTemp => "EEG+T",
            ModalitySet::EegEcg => "EEG+ECG",
            ModalitySet::All => "ALL",
        }
    }

    pub fn eeg(self) -> bool {
        !matches!(self, ModalitySet::TempEcg)
    }

    pub fn temp(self) -> bool {
        matches!(self, ModalitySet::TempEcg | ModalitySet::EegTemp | ModalitySet::All)
    }

    pub fn ecg(self) -> bool {
        matches!(self, ModalitySet::TempEcg | ModalitySet::EegEcg | ModalitySet::All)
    }
}

impl fmt::Display for ModalitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModalitySet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let up = match up.as_str() {
            "ECG+T" => "T+ECG",
            "T+EEG" => "EEG+T",
            "ECG+EEG" => "EEG+ECG",
            other => other,
        };
        ModalitySet::ALL
            .into_iter()
            .find(|m| m.name() == up)
            .ok_or_else(|| Error::InvalidInput(format!("unknown modality set `{s}`")))
    }
}

impl From<ModalitySet> for String {
    fn from(m: ModalitySet) -> String {
        m.name().to_string()
    }
}

impl TryFrom<String> for ModalitySet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Subjects a grid cell is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Population {
    All,
    Female,
    Male,
}

impl Population {
    pub fn admits(self, sex: Sex) -> bool {
        match self {
            Population::All => true,
            Population::Female => sex == Sex::Female,
            Population::Male => sex == Sex::Male,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Population::All => "all",
            Population::Female => "female",
            Population::Male => "male",
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Population {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Population::All),
            "female" => Ok(Population::Female),
            "male" => Ok(Population::Male),
            _ => Err(Error::InvalidInput(format!("unknown population `{s}`"))),
        }
    }
}

/// ECG columns of the fused matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HrvBlock {
    /// NN50 per window.
    #[default]
    Nn50,
    /// All nineteen variables per trial, repeated on the trial's windows.
    Full,
}

impl FromStr for HrvBlock {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nn50" => Ok(HrvBlock::Nn50),
            "full" => Ok(HrvBlock::Full),
            _ => Err(Error::InvalidInput(format!("unknown hrv_block `{s}` (nn50 or full)"))),
        }
    }
}

impl fmt::Display for HrvBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HrvBlock::Nn50 => "nn50",
            HrvBlock::Full => "full",
        })
    }
}
