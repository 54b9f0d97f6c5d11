use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ecg::IbiSeries;
use crate::error::{Error, Result};
use crate::rng;

/// Sinusoidally modulated RR process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrParams {
    pub base_ms: f64,
    pub lf_amp_ms: f64,
    pub lf_hz: f64,
    pub hf_amp_ms: f64,
    pub hf_hz: f64,
    pub noise_ms: f64,
    pub duration_s: f64,
}

/// Beat times from `start` while they stay at or below `end`, stepping by
/// `rr_ms(t)` evaluated at the current beat.
pub(crate) fn integrate_beats<R: Rng>(
    start: f64,
    end: f64,
    rng: &mut R,
    mut rr_ms: impl FnMut(f64, &mut R) -> f64,
) -> Result<Vec<f64>> {
    let mut t = start;
    let mut beats = vec![t];
    loop {
        let rr = rr_ms(t, rng);
        if !(rr.is_finite() && rr > 0.0) {
            return Err(Error::InvalidInput(format!(
                "RR model produced a non-positive interval ({rr} ms) at t = {t:.3} s"
            )));
        }
        t += rr / 1000.0;
        if t > end {
            break;
        }
        beats.push(t);
    }
    Ok(beats)
}

/// `RR(t) = base + lf·sin(2π·lf_hz·t) + hf·sin(2π·hf_hz·t) + N(0, noise)`
/// sampled at successive beats starting from t = 0.
pub fn gen_rr(p: &RrParams, seed: u64) -> Result<IbiSeries> {
    if p.base_ms < 300.0 {
        return Err(Error::InvalidInput(format!("base interval must be >= 300 ms, got {}", p.base_ms)));
    }
    if p.lf_amp_ms < 0.0 || p.hf_amp_ms < 0.0 || p.noise_ms < 0.0 {
        return Err(Error::InvalidInput("amplitudes and noise must be >= 0".into()));
    }
    if !(p.duration_s > 0.0) {
        return Err(Error::InvalidInput("duration must be positive".into()));
    }
    let noise = Normal::new(0.0, p.noise_ms).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = rng::named(seed, "rr");
    let beats = integrate_beats(0.0, p.duration_s, &mut rng, |t, r| {
        let e = if p.noise_ms > 0.0 { noise.sample(r) } else { 0.0 };
        p.base_ms
            + p.lf_amp_ms * (2.0 * PI * p.lf_hz * t).sin()
            + p.hf_amp_ms * (2.0 * PI * p.hf_hz * t).sin()
            + e
    })?;
    IbiSeries::from_beat_times(beats)
}
