//! Signal representation and preprocessing shared by every modality.

pub mod filter;
mod reference;
mod resample;
mod robust;
mod segment;
mod series;

pub use filter::{bandpass, highpass, lowpass};
pub use reference::car_rereference;
pub use resample::resample;
pub use robust::{mad_outlier_replace, zscore, OutlierReplacement, ZScored, OUTLIER_MADS};
pub use segment::{segment, segment_series, window_ranges, Segment};
pub use series::{
    Label, Modality, MultiChannelRecording, Sex, SubjectMeta, TimeSeries, TrialSpec, Unit,
};
