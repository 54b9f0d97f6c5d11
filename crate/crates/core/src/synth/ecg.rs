use rand_distr::{Distribution, Normal};

use crate::ecg::IbiSeries;
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::{TimeSeries, Unit};

/// Gaussian waves of one heartbeat: (amplitude mV, offset s, width s).
const WAVES: [(f64, f64, f64); 5] = [
    (0.12, -0.17, 0.025),
    (-0.12, -0.03, 0.010),
    (1.0, 0.0, 0.012),
    (-0.25, 0.03, 0.010),
    (0.30, 0.25, 0.045),
];
/// Samples further than this from a beat get no contribution from it.
const REACH_S: f64 = 0.5;
/// Silence before the first beat so every complex lies inside the record.
pub const LEAD_IN_S: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEcg {
    pub series: TimeSeries,
    /// R-wave apex times in seconds.
    pub beat_times: Vec<f64>,
}

/// Pulse train of `n` samples at `fs` with white noise at `snr_db`
/// (infinite for a clean signal).
pub(crate) fn render_ecg<R: rand::Rng>(
    beat_times: &[f64],
    fs: f64,
    n: usize,
    snr_db: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; n];
    for &b in beat_times {
        let lo = (((b - REACH_S) * fs).floor().max(0.0)) as usize;
        let hi = (((b + REACH_S) * fs).ceil() as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(hi).skip(lo) {
            let dt = i as f64 / fs - b;
            *v += WAVES
                .iter()
                .map(|&(a, mu, s)| a * (-0.5 * ((dt - mu) / s).powi(2)).exp())
                .sum::<f64>();
        }
    }
    if snr_db.is_finite() {
        let power = x.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64;
        let sd = (power / 10f64.powf(snr_db / 10.0)).sqrt();
        let noise = Normal::new(0.0, sd).map_err(|e| Error::Numerical(e.to_string()))?;
        for v in &mut x {
            *v += noise.sample(rng);
        }
    }
    Ok(x)
}

/// ECG whose R waves sit at the beat times of `ibi` shifted by
/// [`LEAD_IN_S`], lasting until one second after the last beat. The shifted
/// times are returned as ground truth.
pub fn gen_ecg(ibi: &IbiSeries, fs: f64, snr_db: f64, seed: u64) -> Result<SyntheticEcg> {
    if ibi.is_empty() {
        return Err(Error::TooShort { what: "beats", needed: 2, got: 0 });
    }
    if !(fs > 0.0) {
        return Err(Error::InvalidInput(format!("sampling rate must be positive, got {fs}")));
    }
    let beats: Vec<f64> = ibi.beat_times().iter().map(|t| t + LEAD_IN_S).collect();
    let n = ((beats[beats.len() - 1] + 1.0) * fs).ceil() as usize;
    let mut rng = rng::named(seed, "ecg-noise");
    let x = render_ecg(&beats, fs, n, snr_db, &mut rng)?;
    Ok(SyntheticEcg {
        series: TimeSeries::new(x, fs, Unit::Millivolt, "ecg_mv")?,
        beat_times: beats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peaks_at_beats() {
        let ibi = IbiSeries::from_beat_times(vec![1.0, 2.0, 3.0]).unwrap();
        let e = gen_ecg(&ibi, 250.0, f64::INFINITY, 0).unwrap();
        let x = e.series.samples();
        let imax = (0..x.len()).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
        assert!([500, 750, 1000].contains(&imax));
        assert!((x[750] - 1.0).abs() < 0.01);
        assert_eq!(e.beat_times, [2.0, 3.0, 4.0]);
    }
}
