//! Deterministic synthetic recordings with known ground truth.

mod dataset;
mod ecg;
mod eeg;
mod rr;

pub use dataset::{
    gen_dataset, gen_subject, DatasetSpec, Effects, GroundTruth, MeanSd, SubjectTruth, TempLevels,
    TrialTruth, GROUND_TRUTH_FILE, PRESETS,
};
pub use ecg::{gen_ecg, SyntheticEcg, LEAD_IN_S};
pub use eeg::{band_noise, gen_eeg, BandPower};
pub use rr::{gen_rr, RrParams};
