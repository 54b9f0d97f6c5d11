//! ECG to R peaks to interbeat intervals to HRV variables.

mod hrv;
mod ibi;
mod rpeak;

pub use hrv::{
    frequency_domain, hrv_features, hrv_frequency_domain, hrv_frequency_domain_at, hrv_time_domain, nn50, poincare,
    poincare_of, time_domain, FrequencyDomain, HrvFeatures, Poincare, TimeDomain, HF_BAND,
    LF_BAND, MIN_SPECTRAL_SECONDS, NN50_MS, POWER_FLOOR, TACHOGRAM_HZ, VLF_BAND,
};
pub use ibi::{
    correct_artifacts, correct_artifacts_with, flag_artifacts, ibi_from_peaks, ArtifactConfig,
    IbiSeries,
};
pub use rpeak::{detect_rpeaks, detect_rpeaks_with, DetectorConfig, MIN_DURATION_S, MIN_RATE_HZ};
