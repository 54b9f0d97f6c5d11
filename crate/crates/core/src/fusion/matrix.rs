use std::collections::HashMap;

use super::extract::SubjectFeatures;
use super::{HrvBlock, ModalitySet};
use crate::ecg::HrvFeatures;
use crate::eeg::EegFeatureVector;
use crate::error::{Error, Result};
use crate::ml::FeatureMatrix;
use crate::signal::Label;

pub const TEMP_FEATURE: &str = "temp_mean";
pub const NN50_FEATURE: &str = "NN50";

/// Column names of a modality subset, EEG first, then temperature, then ECG.
pub fn feature_names(set: ModalitySet, block: HrvBlock) -> Vec<String> {
    let mut names = Vec::new();
    if set.eeg() {
        names.extend(EegFeatureVector::names());
    }
    if set.temp() {
        names.push(TEMP_FEATURE.to_string());
    }
    if set.ecg() {
        match block {
            HrvBlock::Nn50 => names.push(NN50_FEATURE.to_string()),
            HrvBlock::Full => names.extend(HrvFeatures::NAMES.iter().map(|s| s.to_string())),
        }
    }
    names
}

/// One row per non-baseline window.
pub fn build_feature_matrix(subjects: &[SubjectFeatures], set: ModalitySet, block: HrvBlock) -> Result<FeatureMatrix> {
    let mut m = FeatureMatrix::new(feature_names(set, block))?;
    for s in subjects {
        let trial_hrv: HashMap<&str, Option<&HrvFeatures>> =
            s.trials.iter().map(|t| (t.trial_id.as_str(), t.hrv.as_ref())).collect();
        for w in s.windows.iter().filter(|w| w.label != Label::Baseline) {
            let mut row = Vec::with_capacity(m.d());
            if set.eeg() {
                row.extend_from_slice(&w.eeg.values);
            }
            if set.temp() {
                row.push(w.temp_mean);
            }
            if set.ecg() {
                match block {
                    HrvBlock::Nn50 => row.push(w.nn50 as f64),
                    HrvBlock::Full => {
                        let h = trial_hrv.get(w.trial_id.as_str()).copied().flatten().ok_or_else(|| {
                            Error::InvalidInput(format!(
                                "subject {} trial {} has no HRV block; extract with hrv_block = full",
                                s.id, w.trial_id
                            ))
                        })?;
                        row.extend_from_slice(&h.values());
                    }
                }
            }
            m.push(row, w.label, &s.id, s.sex, &w.trial_id)
                .map_err(|e| e.context(format!("subject {} trial {} window {}", s.id, w.trial_id, w.window_index)))?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_counts() {
        let d = |s| feature_names(s, HrvBlock::Nn50).len();
        assert_eq!(d(ModalitySet::All), 22);
        assert_eq!(d(ModalitySet::TempEcg), 2);
        assert_eq!(d(ModalitySet::Eeg), 20);
        assert_eq!(d(ModalitySet::EegTemp), 21);
        assert_eq!(d(ModalitySet::EegEcg), 21);
        assert_eq!(feature_names(ModalitySet::All, HrvBlock::Full).len(), 40);
        assert_eq!(feature_names(ModalitySet::Eeg, HrvBlock::Nn50), EegFeatureVector::names());
        assert_eq!(feature_names(ModalitySet::TempEcg, HrvBlock::Nn50), vec!["temp_mean", "NN50"]);
    }
}
