//! Skin-temperature trial feature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{mad_outlier_replace, segment_series, Label, TimeSeries, TrialSpec, Unit};
use crate::stats::descriptive::mean;

/// Plausible skin temperature range in °C.
pub const SANITY_BOUNDS_C: (f64, f64) = (15.0, 45.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TempTrialFeature {
    pub trial_id: String,
    pub label: Label,
    pub mean_temp: f64,
    pub n_outliers_replaced: usize,
}

/// Mean of the trial segment after scaled-MAD outlier replacement.
pub fn temp_trial_feature(ts: &TimeSeries, trial: &TrialSpec) -> Result<TempTrialFeature> {
    if ts.unit() != Unit::Celsius {
        return Err(Error::InvalidInput(format!(
            "temperature series {} must be in celsius, found {:?}",
            ts.label(),
            ts.unit()
        )));
    }
    let mut segs = segment_series(ts, trial, trial.duration)?;
    let seg = segs.pop().ok_or_else(|| Error::TooShort {
        what: "temperature trial samples",
        needed: 1,
        got: 0,
    })?;
    if seg.is_empty() {
        return Err(Error::TooShort { what: "temperature trial samples", needed: 1, got: 0 });
    }
    let cleaned = mad_outlier_replace(seg.samples())?;
    let m = mean(&cleaned.values);
    let (lo, hi) = SANITY_BOUNDS_C;
    if !(lo..=hi).contains(&m) {
        return Err(Error::OutOfBounds(format!(
            "mean temperature {m:.3} °C of trial {} outside [{lo}, {hi}]",
            trial.trial_id
        )));
    }
    Ok(TempTrialFeature {
        trial_id: trial.trial_id.clone(),
        label: trial.label,
        mean_temp: m,
        n_outliers_replaced: cleaned.replaced(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v, 1.0, Unit::Celsius, "temp_c").unwrap()
    }

    fn trial() -> TrialSpec {
        TrialSpec::new("t01", 0.0, 28.0, Label::Positive).unwrap()
    }

    #[test]
    fn constant_segment() {
        let f = temp_trial_feature(&series(vec![28.8; 28]), &trial()).unwrap();
        assert!((f.mean_temp - 28.8).abs() < 1e-12);
        assert_eq!(f.n_outliers_replaced, 0);
    }

    #[test]
    fn single_spike() {
        let mut v = vec![28.8; 28];
        v[13] = 45.0;
        let f = temp_trial_feature(&series(v), &trial()).unwrap();
        assert!((f.mean_temp - 28.8).abs() < 0.01);
        assert_eq!(f.n_outliers_replaced, 1);
    }

    #[test]
    fn rejects_wrong_unit_and_bounds() {
        let ts = TimeSeries::new(vec![28.0; 28], 1.0, Unit::Millivolt, "x").unwrap();
        assert!(temp_trial_feature(&ts, &trial()).is_err());
        assert!(matches!(
            temp_trial_feature(&series(vec![50.0; 28]), &trial()),
            Err(Error::OutOfBounds(_))
        ));
        let late = TrialSpec::new("t", 10.0, 28.0, Label::Negative).unwrap();
        assert!(temp_trial_feature(&series(vec![28.0; 28]), &late).is_err());
    }

    proptest! {
        #[test]
        fn shift_and_range(v in prop::collection::vec(25.0f64..35.0, 28), c in -5.0f64..5.0) {
            let a = temp_trial_feature(&series(v.clone()), &trial()).unwrap();
            let b = temp_trial_feature(&series(v.iter().map(|x| x + c).collect()), &trial()).unwrap();
            prop_assert!((b.mean_temp - a.mean_temp - c).abs() < 1e-9);
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a.mean_temp >= lo - 1e-12 && a.mean_temp <= hi + 1e-12);
        }
    }
}
