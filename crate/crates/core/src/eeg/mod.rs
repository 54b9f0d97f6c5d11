//! EEG band powers, the frequency-location feature vector and hemispheric
//! asymmetry.

mod asymmetry;
mod features;
mod montage;

pub use asymmetry::{
    asymmetry_index, asymmetry_report, significance, AsymmetryPair, AsymmetryStats,
    HemispherePowers, Lobe, PairStats, PAIRS,
};
pub use features::{
    band_power, extract_model_features, preprocess, region_power, region_powers, EegFeatureVector,
    RegionPowers, PREPROCESS_BAND, WELCH_OVERLAP, WELCH_SEGMENT_S,
};
pub use montage::{
    is_ten_ten, Band, BandDef, Montage, Region, RegionDef, MAX_BAND_HZ, TEN_TEN_LABELS,
};
