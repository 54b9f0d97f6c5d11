use crate::error::{Error, Result};
use crate::stats::descriptive::{mad, mean, median, sample_sd, MAD_SCALE};

/// Result of [`zscore`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZScored {
    pub values: Vec<f64>,
    /// Set when the input had zero standard deviation; `values` is then all zeros.
    pub zero_variance: bool,
}

/// Standardise to mean 0 and sample standard deviation 1.
pub fn zscore(v: &[f64]) -> Result<ZScored> {
    if v.len() < 2 {
        return Err(Error::TooShort {
            what: "z-score input",
            needed: 2,
            got: v.len(),
        });
    }
    let m = mean(v);
    let sd = sample_sd(v);
    if sd == 0.0 || !sd.is_finite() {
        return Ok(ZScored {
            values: vec![0.0; v.len()],
            zero_variance: true,
        });
    }
    Ok(ZScored {
        values: v.iter().map(|x| (x - m) / sd).collect(),
        zero_variance: false,
    })
}

/// Result of [`mad_outlier_replace`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReplacement {
    pub values: Vec<f64>,
    /// `true` where the input sample was replaced.
    pub mask: Vec<bool>,
    /// Set when the MAD of the input is zero. The threshold then collapses to
    /// the median itself, so only values different from it are replaced.
    pub degenerate: bool,
}

impl OutlierReplacement {
    pub fn replaced(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Outlier threshold in scaled MADs.
pub const OUTLIER_MADS: f64 = 3.0;

/// Replace samples further than three scaled MADs from the median with the
/// mean of the remaining samples.
pub fn mad_outlier_replace(v: &[f64]) -> Result<OutlierReplacement> {
    if v.len() < 3 {
        return Err(Error::TooShort {
            what: "outlier replacement input",
            needed: 3,
            got: v.len(),
        });
    }
    let med = median(v);
    let raw_mad = mad(v, med);
    let threshold = OUTLIER_MADS * MAD_SCALE * raw_mad;
    let mask: Vec<bool> = v.iter().map(|x| (x - med).abs() > threshold).collect();
    let kept: Vec<f64> = v
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| !m)
        .map(|(&x, _)| x)
        .collect();
    // At least half the samples lie within one MAD of the median, so `kept`
    // is never empty.
    let fill = mean(&kept);
    let values = v
        .iter()
        .zip(&mask)
        .map(|(&x, &m)| if m { fill } else { x })
        .collect();
    Ok(OutlierReplacement {
        values,
        mask,
        degenerate: raw_mad == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zscore_hand_case() {
        let z = zscore(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(z.values, vec![-1.0, 0.0, 1.0]);
        assert!(!z.zero_variance);
    }

    #[test]
    fn zscore_constant_is_flagged() {
        let z = zscore(&[5.0; 4]).unwrap();
        assert_eq!(z.values, vec![0.0; 4]);
        assert!(z.zero_variance);
        assert!(zscore(&[1.0]).is_err());
    }

    #[test]
    fn mad_hand_case() {
        let r = mad_outlier_replace(&[10.0, 12.0, 11.0, 10.0, 11.0, 12.0, 50.0]).unwrap();
        assert_eq!(r.values, vec![10.0, 12.0, 11.0, 10.0, 11.0, 12.0, 11.0]);
        assert_eq!(r.mask, vec![false, false, false, false, false, false, true]);
        assert!(!r.degenerate);
    }

    #[test]
    fn mad_no_outliers() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = mad_outlier_replace(&v).unwrap();
        assert_eq!(r.values, v.to_vec());
        assert_eq!(r.replaced(), 0);
    }

    #[test]
    fn mad_constant_is_degenerate() {
        let r = mad_outlier_replace(&[7.5; 6]).unwrap();
        assert_eq!(r.values, vec![7.5; 6]);
        assert_eq!(r.replaced(), 0);
        assert!(r.degenerate);
        assert!(mad_outlier_replace(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn mad_zero_with_spike_replaces_spike() {
        let mut v = vec![28.8; 28];
        v[9] = 45.0;
        let r = mad_outlier_replace(&v).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.replaced(), 1);
        assert!(r.values.iter().all(|v| (v - 28.8).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn zscore_affine_invariance(
            v in prop::collection::vec(-1e3f64..1e3, 2..50),
            a in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0],
            b in -1e3f64..1e3,
        ) {
            let base = zscore(&v).unwrap();
            prop_assume!(!base.zero_variance && sample_sd(&v) > 1e-6);
            let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            let z = zscore(&moved).unwrap();
            for (p, q) in z.values.iter().zip(&base.values) {
                prop_assert!((p - a.signum() * q).abs() < 1e-8);
            }
            prop_assert!(mean(&base.values).abs() < 1e-12);
            prop_assert!((sample_sd(&base.values) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn mad_replacement_is_stable(v in prop::collection::vec(-100f64..100.0, 3..60)) {
            let r = mad_outlier_replace(&v).unwrap();
            let med = median(&v);
            let thr = OUTLIER_MADS * MAD_SCALE * mad(&v, med);
            for ((x, y), m) in v.iter().zip(&r.values).zip(&r.mask) {
                if !m {
                    prop_assert_eq!(x, y);
                }
                prop_assert!((y - med).abs() <= thr + 1e-9);
            }
        }
    }
}
