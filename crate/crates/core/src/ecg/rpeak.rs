//! R-peak detection on a single ECG lead.
//!
//! High-pass at 10 Hz, square, smooth with a 150 ms moving average and
//! threshold the resulting energy envelope. Each supra-threshold run yields
//! one candidate located at the maximum of the filtered signal, refined with
//! a parabolic fit; candidates closer than the refractory period keep the
//! larger one.

use crate::error::{Error, Result};
use crate::signal::{highpass, TimeSeries};
use crate::stats::descriptive::{mad, median, MAD_SCALE};

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub highpass_hz: f64,
    pub envelope_s: f64,
    /// Threshold height above the envelope median, in scaled MADs.
    pub threshold_mads: f64,
    /// Lower bound on the threshold as a fraction of the envelope's 99th
    /// percentile; keeps the threshold meaningful on noise-free input where
    /// the MAD of the envelope collapses towards zero.
    pub relative_floor: f64,
    pub refractory_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            highpass_hz: 10.0,
            envelope_s: 0.150,
            threshold_mads: 8.0,
            relative_floor: 0.1,
            refractory_s: 0.250,
        }
    }
}

pub const MIN_RATE_HZ: f64 = 100.0;
pub const MIN_DURATION_S: f64 = 5.0;

/// Beat times in seconds on the series' clock.
pub fn detect_rpeaks(ecg: &TimeSeries) -> Result<Vec<f64>> {
    detect_rpeaks_with(ecg, &DetectorConfig::default())
}

pub fn detect_rpeaks_with(ecg: &TimeSeries, cfg: &DetectorConfig) -> Result<Vec<f64>> {
    let rate = ecg.rate();
    if rate < MIN_RATE_HZ {
        return Err(Error::InvalidInput(format!(
            "R-peak detection needs at least {MIN_RATE_HZ} Hz, got {rate} Hz"
        )));
    }
    if ecg.duration() < MIN_DURATION_S {
        return Err(Error::TooShort {
            what: "ECG seconds for R-peak detection",
            needed: MIN_DURATION_S as usize,
            got: ecg.duration() as usize,
        });
    }
    let filtered = highpass(ecg, cfg.highpass_hz)?;
    let x = filtered.samples();
    let env = moving_average(&x.iter().map(|v| v * v).collect::<Vec<_>>(), {
        ((cfg.envelope_s * rate).round() as usize).max(1)
    });

    let med = median(&env);
    let mut sorted = env.clone();
    sorted.sort_by(f64::total_cmp);
    let p99 = sorted[((sorted.len() - 1) as f64 * 0.99).round() as usize];
    let threshold =
        (med + cfg.threshold_mads * MAD_SCALE * mad(&env, med)).max(cfg.relative_floor * p99);
    if !(p99 > threshold) && !(env.iter().any(|&e| e > threshold)) {
        return Err(Error::NoPeaks);
    }

    let refractory = (cfg.refractory_s * rate).round() as usize;
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    let mut i = 0;
    while i < env.len() {
        if env[i] <= threshold {
            i += 1;
            continue;
        }
        let start = i;
        while i < env.len() && env[i] > threshold {
            i += 1;
        }
        let (idx, amp) = (start..i)
            .map(|k| (k, x[k]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty run");
        if idx == 0 || idx + 1 == x.len() || amp <= 0.0 {
            // peak not bracketed inside the record
            continue;
        }
        match peaks.last_mut() {
            Some(last) if idx - last.0 < refractory => {
                if amp > last.1 {
                    *last = (idx, amp);
                }
            }
            _ => peaks.push((idx, amp)),
        }
    }
    if peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    Ok(peaks
        .into_iter()
        .map(|(k, _)| {
            let (a, b, c) = (x[k - 1], x[k], x[k + 1]);
            let denom = a - 2.0 * b + c;
            let offset = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            ecg.time_of(k) + offset.clamp(-0.5, 0.5) / rate
        })
        .collect())
}

/// Centred moving average with the window truncated at the edges.
fn moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    let half = width / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + width - half).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Unit;

    #[test]
    fn constant_signal_has_no_peaks() {
        let ts = TimeSeries::new(vec![0.4; 256 * 10], 256.0, Unit::Millivolt, "ecg").unwrap();
        assert!(matches!(detect_rpeaks(&ts), Err(Error::NoPeaks)));
    }

    #[test]
    fn preconditions() {
        let slow = TimeSeries::new(vec![0.0; 500], 50.0, Unit::Millivolt, "ecg").unwrap();
        assert!(detect_rpeaks(&slow).is_err());
        let short = TimeSeries::new(vec![0.0; 256], 256.0, Unit::Millivolt, "ecg").unwrap();
        assert!(detect_rpeaks(&short).is_err());
    }

    #[test]
    fn moving_average_of_constant() {
        assert!(moving_average(&[2.0; 9], 4).iter().all(|&v| (v - 2.0).abs() < 1e-15));
    }
}
