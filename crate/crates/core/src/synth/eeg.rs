use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::signal::{Modality, MultiChannelRecording, SubjectMeta, TimeSeries, Unit};

/// Target mean-square power of one band-limited component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPower {
    pub lo: f64,
    pub hi: f64,
    pub power: f64,
}

/// White noise shaped in the frequency domain so that each component's
/// bins `[lo, hi)` carry exactly its target power; other bins are zeroed.
pub fn band_noise<R: Rng>(n: usize, fs: f64, comps: &[BandPower], rng: &mut R) -> Vec<f64> {
    if n == 0 || comps.iter().all(|c| c.power <= 0.0) {
        return vec![0.0; n];
    }
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let owner: Vec<Option<usize>> = (0..=half)
        .map(|k| {
            let f = k as f64 * fs / n as f64;
            if k == 0 {
                return None;
            }
            comps.iter().position(|c| f >= c.lo && f < c.hi)
        })
        .collect();
    let mut current = vec![0.0; comps.len()];
    for (k, o) in owner.iter().enumerate() {
        if let Some(c) = o {
            let both = if 2 * k == n { 1.0 } else { 2.0 };
            current[*c] += both * buf[k].norm_sqr();
        }
    }
    let n2 = (n * n) as f64;
    let gains: Vec<f64> = comps
        .iter()
        .zip(&current)
        .map(|(c, &cur)| if cur > 0.0 && c.power > 0.0 { (c.power * n2 / cur).sqrt() } else { 0.0 })
        .collect();
    for k in 0..=half {
        let g = owner[k].map_or(0.0, |c| gains[c]);
        buf[k] *= g;
        if k > 0 && k < n - k {
            buf[n - k] = buf[k].conj();
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// One channel per map entry, each the sum of its band-limited components.
pub fn gen_eeg(
    spec: &BTreeMap<String, Vec<BandPower>>,
    fs: f64,
    duration: f64,
    subject: SubjectMeta,
    seed: u64,
) -> Result<MultiChannelRecording> {
    if !(fs > 0.0 && duration > 0.0) {
        return Err(Error::InvalidInput("rate and duration must be positive".into()));
    }
    let n = (duration * fs).round() as usize;
    let channels = spec
        .iter()
        .map(|(label, comps)| {
            let mut rng = rng::named(seed, label);
            TimeSeries::new(band_noise(n, fs, comps, &mut rng), fs, Unit::Microvolt, label.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    MultiChannelRecording::new(channels, subject, Modality::Eeg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Sex;

    #[test]
    fn exact_component_power() {
        let mut rng = rng::stream(1, 0);
        let x = band_noise(1000, 100.0, &[BandPower { lo: 8.0, hi: 13.0, power: 4.0 }], &mut rng);
        let ms = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((ms - 4.0).abs() < 1e-9);
    }

    #[test]
    fn zero_spec() {
        let mut spec = BTreeMap::new();
        spec.insert("Fz".to_string(), vec![BandPower { lo: 8.0, hi: 13.0, power: 0.0 }]);
        let rec = gen_eeg(&spec, 128.0, 4.0, SubjectMeta::new("s", Sex::Male, None).unwrap(), 1).unwrap();
        assert!(rec.channel("Fz").unwrap().samples().iter().all(|&v| v == 0.0));
    }
}
