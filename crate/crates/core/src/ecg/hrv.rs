//! Time-domain, frequency-domain and Poincaré HRV measures.

use serde::{Deserialize, Serialize};

use super::ibi::IbiSeries;
use crate::error::{Error, Result};
use crate::spectrum::{periodogram, Detrend};
use crate::spline::CubicSpline;
use crate::stats::descriptive::{mean, median, pop_var, sample_sd};

/// Powers at or below this (ms²) are treated as zero when forming ratios.
pub const POWER_FLOOR: f64 = 1e-10;

pub const VLF_BAND: (f64, f64) = (0.003, 0.04);
pub const LF_BAND: (f64, f64) = (0.04, 0.15);
pub const HF_BAND: (f64, f64) = (0.15, 0.4);

/// Evenly resampled tachogram rate used by [`hrv_frequency_domain`].
pub const TACHOGRAM_HZ: f64 = 4.0;
/// Shortest tachogram that resolves one LF period.
pub const MIN_SPECTRAL_SECONDS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDomain {
    pub mean_rr: f64,
    pub median_rr: f64,
    pub sdnn: f64,
    pub rmssd: f64,
    pub nn50: usize,
    pub pnn50: f64,
}

/// Threshold of NN50, strict inequality.
pub const NN50_MS: f64 = 50.0;

/// Count of successive differences strictly greater than 50 ms.
pub fn nn50(intervals: &[f64]) -> usize {
    intervals
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > NN50_MS)
        .count()
}

pub fn hrv_time_domain(ibi: &IbiSeries) -> Result<TimeDomain> {
    time_domain(ibi.intervals())
}

/// Time-domain measures of raw intervals (ms). pNN50 is relative to the
/// number of successive pairs.
pub fn time_domain(intervals: &[f64]) -> Result<TimeDomain> {
    let n = intervals.len();
    if n < 2 {
        return Err(Error::TooShort {
            what: "intervals for time-domain HRV",
            needed: 2,
            got: n,
        });
    }
    let msd = intervals
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2))
        .sum::<f64>()
        / (n - 1) as f64;
    let count = nn50(intervals);
    Ok(TimeDomain {
        mean_rr: mean(intervals),
        median_rr: median(intervals),
        sdnn: sample_sd(intervals),
        rmssd: msd.sqrt(),
        nn50: count,
        pnn50: 100.0 * count as f64 / (n - 1) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDomain {
    pub vlf_abs: f64,
    pub lf_abs: f64,
    pub hf_abs: f64,
    /// VLF + LF + HF.
    pub total_power: f64,
    pub vlf_pct: f64,
    pub lf_pct: f64,
    pub hf_pct: f64,
    /// `None` when LF + HF is zero.
    pub lf_nu: Option<f64>,
    pub hf_nu: Option<f64>,
    /// `None` when HF is zero.
    pub lf_hf: Option<f64>,
}

pub fn hrv_frequency_domain(ibi: &IbiSeries) -> Result<FrequencyDomain> {
    hrv_frequency_domain_at(ibi, TACHOGRAM_HZ)
}

/// Spectral measures from a tachogram resampled at `rate` Hz.
///
/// Intervals are placed at their closing beat times, interpolated with a
/// natural cubic spline onto an even grid, linearly detrended and
/// Hann-windowed before a single periodogram.
pub fn hrv_frequency_domain_at(ibi: &IbiSeries, rate: f64) -> Result<FrequencyDomain> {
    if ibi.len() < 4 {
        return Err(Error::TooShort {
            what: "intervals for spectral HRV",
            needed: 4,
            got: ibi.len(),
        });
    }
    frequency_domain(&ibi.beat_times()[1..], ibi.intervals(), rate)
}

/// Spectral measures of interval values sampled at the given times (s).
pub fn frequency_domain(knots: &[f64], values: &[f64], rate: f64) -> Result<FrequencyDomain> {
    if !(rate > 2.0 * HF_BAND.1) {
        return Err(Error::InvalidInput(format!(
            "tachogram rate {rate} Hz cannot resolve the HF band"
        )));
    }
    if knots.len() != values.len() || knots.len() < 4 {
        return Err(Error::InvalidInput("tachogram needs at least 4 matching times and values".into()));
    }
    let span = knots[knots.len() - 1] - knots[0];
    if span < MIN_SPECTRAL_SECONDS {
        return Err(Error::TooShort {
            what: "tachogram seconds for spectral HRV",
            needed: MIN_SPECTRAL_SECONDS as usize,
            got: span.max(0.0) as usize,
        });
    }
    let spline = CubicSpline::natural(knots, values)?;
    let count = (span * rate).floor() as usize + 1;
    let tachogram = spline.eval_sorted((0..count).map(|j| knots[0] + j as f64 / rate));
    let psd = periodogram(&tachogram, rate, Detrend::Linear);

    let vlf = psd.band_power(VLF_BAND.0, VLF_BAND.1);
    let lf = psd.band_power(LF_BAND.0, LF_BAND.1);
    let hf = psd.band_power(HF_BAND.0, HF_BAND.1);
    let total = vlf + lf + hf;
    let pct = |p: f64| if total > POWER_FLOOR { 100.0 * p / total } else { 0.0 };
    let (lf_nu, hf_nu) = if lf + hf > POWER_FLOOR {
        (Some(100.0 * lf / (lf + hf)), Some(100.0 * hf / (lf + hf)))
    } else {
        (None, None)
    };
    Ok(FrequencyDomain {
        vlf_abs: vlf,
        lf_abs: lf,
        hf_abs: hf,
        total_power: total,
        vlf_pct: pct(vlf),
        lf_pct: pct(lf),
        hf_pct: pct(hf),
        lf_nu,
        hf_nu,
        lf_hf: (hf > POWER_FLOOR).then(|| lf / hf),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Poincare {
    pub sd1: f64,
    pub sd2: f64,
    /// `None` when SD2 is zero.
    pub sd1_sd2: Option<f64>,
}

pub fn poincare(ibi: &IbiSeries) -> Result<Poincare> {
    poincare_of(ibi.intervals())
}

/// SD1/SD2 of the lag-1 return map using population variances.
pub fn poincare_of(intervals: &[f64]) -> Result<Poincare> {
    let n = intervals.len();
    if n < 3 {
        return Err(Error::TooShort {
            what: "intervals for the Poincaré plot",
            needed: 3,
            got: n,
        });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let minor: Vec<f64> = intervals.windows(2).map(|w| (w[1] - w[0]) * r).collect();
    let major: Vec<f64> = intervals.windows(2).map(|w| (w[1] + w[0]) * r).collect();
    let sd1 = pop_var(&minor).sqrt();
    let sd2 = pop_var(&major).sqrt();
    Ok(Poincare {
        sd1,
        sd2,
        sd1_sd2: (sd2 > 0.0).then(|| sd1 / sd2),
    })
}

/// The nineteen HRV variables of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrvFeatures {
    pub mean_rr: f64,
    pub median_rr: f64,
    pub sdnn: f64,
    pub rmssd: f64,
    pub nn50: usize,
    pub pnn50: f64,
    pub vlf_abs: f64,
    pub lf_abs: f64,
    pub hf_abs: f64,
    pub total_power: f64,
    pub vlf_pct: f64,
    pub lf_pct: f64,
    pub hf_pct: f64,
    pub lf_nu: Option<f64>,
    pub hf_nu: Option<f64>,
    pub lf_hf: Option<f64>,
    pub sd1: f64,
    pub sd2: f64,
    pub sd1_sd2: Option<f64>,
}

impl HrvFeatures {
    pub const NAMES: [&'static str; 19] = [
        "mean_rr",
        "median_rr",
        "sdnn",
        "rmssd",
        "nn50",
        "pnn50",
        "vlf_abs",
        "lf_abs",
        "hf_abs",
        "total_power",
        "vlf_pct",
        "lf_pct",
        "hf_pct",
        "lf_nu",
        "hf_nu",
        "lf_hf",
        "sd1",
        "sd2",
        "sd1_sd2",
    ];

    /// Values in [`Self::NAMES`] order; undefined ratios become 0.
    pub fn values(&self) -> [f64; 19] {
        let o = |v: Option<f64>| v.unwrap_or(0.0);
        [
            self.mean_rr,
            self.median_rr,
            self.sdnn,
            self.rmssd,
            self.nn50 as f64,
            self.pnn50,
            self.vlf_abs,
            self.lf_abs,
            self.hf_abs,
            self.total_power,
            self.vlf_pct,
            self.lf_pct,
            self.hf_pct,
            o(self.lf_nu),
            o(self.hf_nu),
            o(self.lf_hf),
            self.sd1,
            self.sd2,
            o(self.sd1_sd2),
        ]
    }
}

pub fn hrv_features(ibi: &IbiSeries) -> Result<HrvFeatures> {
    let t = hrv_time_domain(ibi)?;
    let f = hrv_frequency_domain(ibi)?;
    let p = poincare(ibi)?;
    Ok(HrvFeatures {
        mean_rr: t.mean_rr,
        median_rr: t.median_rr,
        sdnn: t.sdnn,
        rmssd: t.rmssd,
        nn50: t.nn50,
        pnn50: t.pnn50,
        vlf_abs: f.vlf_abs,
        lf_abs: f.lf_abs,
        hf_abs: f.hf_abs,
        total_power: f.total_power,
        vlf_pct: f.vlf_pct,
        lf_pct: f.lf_pct,
        hf_pct: f.hf_pct,
        lf_nu: f.lf_nu,
        hf_nu: f.hf_nu,
        lf_hf: f.lf_hf,
        sd1: p.sd1,
        sd2: p.sd2,
        sd1_sd2: p.sd1_sd2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn modulated(lf_amp: f64, hf_amp: f64, secs: f64) -> IbiSeries {
        let mut t = 0.0;
        let mut iv = Vec::new();
        while t < secs {
            let rr = 800.0
                + lf_amp * (2.0 * PI * 0.10 * t).sin()
                + hf_amp * (2.0 * PI * 0.25 * t).sin();
            iv.push(rr);
            t += rr / 1000.0;
        }
        IbiSeries::from_intervals(0.0, iv).unwrap()
    }

    #[test]
    fn hand_evaluated_time_domain() {
        let t = time_domain(&[800.0, 850.0, 790.0, 905.0, 800.0]).unwrap();
        assert_eq!(t.mean_rr, 829.0);
        assert_eq!(t.median_rr, 800.0);
        assert!((t.sdnn - 48.528).abs() < 1e-3);
        assert!((t.rmssd - 87.107).abs() < 1e-3);
        assert_eq!(t.nn50, 3);
        assert_eq!(t.pnn50, 75.0);
    }

    #[test]
    fn fifty_ms_is_not_counted() {
        let t = time_domain(&[800.0, 850.0, 800.0, 850.0]).unwrap();
        assert!((t.rmssd - 50.0).abs() < 1e-12);
        assert_eq!(t.nn50, 0);
    }

    #[test]
    fn constant_series_has_no_variability() {
        let t = time_domain(&[800.0; 10]).unwrap();
        assert_eq!((t.sdnn, t.rmssd, t.nn50, t.pnn50), (0.0, 0.0, 0, 0.0));
        let p = poincare_of(&[800.0; 10]).unwrap();
        assert_eq!((p.sd1, p.sd2, p.sd1_sd2), (0.0, 0.0, None));
        let f = hrv_frequency_domain(&IbiSeries::from_intervals(0.0, vec![800.0; 120]).unwrap()).unwrap();
        assert!(f.vlf_abs <= 1e-6 && f.lf_abs <= 1e-6 && f.hf_abs <= 1e-6);
        assert_eq!(f.lf_hf, None);
    }

    #[test]
    fn equal_tones_balance() {
        let f = hrv_frequency_domain(&modulated(20.0, 20.0, 300.0)).unwrap();
        let ratio = f.lf_hf.unwrap();
        assert!((0.8..=1.25).contains(&ratio), "lf/hf {ratio}");
        assert!((f.lf_nu.unwrap() - 50.0).abs() <= 5.0);
        assert!((f.lf_nu.unwrap() + f.hf_nu.unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn single_hf_tone_dominates() {
        let f = hrv_frequency_domain(&modulated(0.0, 30.0, 300.0)).unwrap();
        assert!(f.hf_pct > 80.0, "hf% {}", f.hf_pct);
        assert!(f.vlf_pct + f.lf_pct + f.hf_pct <= 100.0 + 1e-9);
    }

    #[test]
    fn short_tachogram_rejected() {
        let s = IbiSeries::from_intervals(0.0, vec![800.0; 30]).unwrap();
        assert!(matches!(hrv_frequency_domain(&s), Err(Error::TooShort { .. })));
    }

    #[test]
    fn alternating_series_sd1_equals_rmssd_over_root2() {
        let iv: Vec<f64> = (0..101).map(|i| if i % 2 == 0 { 800.0 } else { 900.0 }).collect();
        let p = poincare_of(&iv).unwrap();
        let t = time_domain(&iv).unwrap();
        let expected = t.rmssd / 2f64.sqrt();
        assert!((p.sd1 - expected).abs() / expected < 1e-9);
    }

    #[test]
    fn spectral_invariances() {
        let base = modulated(25.0, 15.0, 240.0);
        let f4 = hrv_frequency_domain_at(&base, 4.0).unwrap();
        for rate in [2.0, 8.0] {
            let f = hrv_frequency_domain_at(&base, rate).unwrap();
            assert!((f.total_power - f4.total_power).abs() / f4.total_power < 0.02);
        }
        let shifted: Vec<f64> = base.intervals().iter().map(|x| x + 137.0).collect();
        let fs = frequency_domain(&base.beat_times()[1..], &shifted, 4.0).unwrap();
        assert!((fs.total_power - f4.total_power).abs() / f4.total_power < 1e-9);
        assert!((fs.lf_hf.unwrap() - f4.lf_hf.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn feature_names_round_trip() {
        let f = hrv_features(&modulated(20.0, 20.0, 120.0)).unwrap();
        let json = serde_json::to_value(f).unwrap();
        for name in HrvFeatures::NAMES {
            assert!(json.get(name).is_some(), "{name}");
        }
        assert_eq!(json.as_object().unwrap().len(), 19);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn time_domain_ranges_and_shift(iv in prop::collection::vec(300.0f64..2000.0, 2..300), c in -200.0f64..200.0) {
            let t = time_domain(&iv).unwrap();
            prop_assert!(t.nn50 < iv.len());
            prop_assert!((0.0..=100.0).contains(&t.pnn50));
            prop_assert!(t.sdnn >= 0.0 && t.rmssd >= 0.0);
            let shifted: Vec<f64> = iv.iter().map(|v| v + c).collect();
            let s = time_domain(&shifted).unwrap();
            prop_assert!((s.mean_rr - t.mean_rr - c).abs() < 1e-9);
            prop_assert!((s.sdnn - t.sdnn).abs() < 1e-8 * (1.0 + t.sdnn));
            prop_assert_eq!(s.nn50, t.nn50);
        }

        #[test]
        fn poincare_identity(iv in prop::collection::vec(300.0f64..2000.0, 3..300)) {
            let p = poincare_of(&iv).unwrap();
            let v = |s: &[f64]| {
                let m = s.iter().sum::<f64>() / s.len() as f64;
                s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / s.len() as f64
            };
            let want = v(&iv[..iv.len() - 1]) + v(&iv[1..]);
            prop_assert!((p.sd1 * p.sd1 + p.sd2 * p.sd2 - want).abs() <= 1e-9 * want.max(1e-300));
        }
    }
}
