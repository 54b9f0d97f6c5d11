//! One-sided power spectral density estimates and band integration.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

/// How each segment is detrended before windowing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detrend {
    None,
    Mean,
    Linear,
}

/// One-sided power spectral density on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    /// Bin spacing in Hz.
    pub resolution: f64,
    /// Density per bin, in signal units² per Hz. Bin `k` sits at `k · resolution`.
    pub density: Vec<f64>,
}

impl Psd {
    pub fn freq(&self, k: usize) -> f64 {
        k as f64 * self.resolution
    }

    pub fn max_freq(&self) -> f64 {
        self.freq(self.density.len().saturating_sub(1))
    }

    /// Integral over `[lo, hi)` of the piecewise-linear interpolant through
    /// the bins (trapezoidal rule with exact clipping at the band edges).
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let df = self.resolution;
        let lo = lo.max(0.0);
        let hi = hi.min(self.max_freq());
        if hi <= lo || self.density.len() < 2 {
            return 0.0;
        }
        let first = (lo / df).floor() as usize;
        let last = ((hi / df).ceil() as usize).min(self.density.len() - 1);
        let mut total = 0.0;
        for k in first..last {
            let (f0, f1) = (self.freq(k), self.freq(k + 1));
            let (a, b) = (f0.max(lo), f1.min(hi));
            if b <= a {
                continue;
            }
            let (p0, p1) = (self.density[k], self.density[k + 1]);
            let at = |f: f64| p0 + (p1 - p0) * (f - f0) / df;
            total += 0.5 * (at(a) + at(b)) * (b - a);
        }
        total.max(0.0)
    }

    /// Integral over the whole grid.
    pub fn total_power(&self) -> f64 {
        self.band_power(0.0, self.max_freq())
    }
}

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

fn detrended(x: &[f64], detrend: Detrend) -> Vec<f64> {
    let n = x.len() as f64;
    match detrend {
        Detrend::None => x.to_vec(),
        Detrend::Mean => {
            let m = x.iter().sum::<f64>() / n;
            x.iter().map(|v| v - m).collect()
        }
        Detrend::Linear => {
            let tm = (n - 1.0) / 2.0;
            let ym = x.iter().sum::<f64>() / n;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, v) in x.iter().enumerate() {
                let dt = i as f64 - tm;
                sxy += dt * (v - ym);
                sxx += dt * dt;
            }
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            x.iter()
                .enumerate()
                .map(|(i, v)| v - ym - slope * (i as f64 - tm))
                .collect()
        }
    }
}

struct Estimator {
    planner: FftPlanner<f64>,
}

impl Estimator {
    fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    /// Windowed one-sided density of one segment.
    fn segment(&mut self, x: &[f64], rate: f64, window: &[f64], detrend: Detrend) -> Vec<f64> {
        let n = x.len();
        let fft = self.planner.plan_fft_forward(n);
        let mut buf: Vec<Complex<f64>> = detrended(x, detrend)
            .iter()
            .zip(window)
            .map(|(v, w)| Complex::new(v * w, 0.0))
            .collect();
        fft.process(&mut buf);
        let scale = 1.0 / (rate * window.iter().map(|w| w * w).sum::<f64>());
        let bins = n / 2 + 1;
        (0..bins)
            .map(|k| {
                let p = buf[k].norm_sqr() * scale;
                let nyquist = n % 2 == 0 && k == n / 2;
                if k == 0 || nyquist {
                    p
                } else {
                    2.0 * p
                }
            })
            .collect()
    }
}

/// Single-segment Hann periodogram.
pub fn periodogram(x: &[f64], rate: f64, detrend: Detrend) -> Psd {
    let n = x.len();
    let density = if n == 0 {
        Vec::new()
    } else {
        Estimator::new().segment(x, rate, &hann(n), detrend)
    };
    Psd {
        resolution: rate / n.max(1) as f64,
        density,
    }
}

/// Welch average of Hann-windowed, mean-detrended segments of `seg_len`
/// samples with the given overlap fraction. Inputs shorter than one segment
/// fall back to a single segment spanning the whole input.
pub fn welch(x: &[f64], rate: f64, seg_len: usize, overlap: f64) -> Psd {
    let n = x.len();
    if n == 0 || seg_len == 0 {
        return Psd {
            resolution: rate,
            density: Vec::new(),
        };
    }
    let seg_len = seg_len.min(n);
    let step = ((seg_len as f64 * (1.0 - overlap)).round() as usize).max(1);
    let count = (n - seg_len) / step + 1;
    let window = hann(seg_len);
    let mut est = Estimator::new();
    let mut acc = vec![0.0; seg_len / 2 + 1];
    for s in 0..count {
        let seg = &x[s * step..s * step + seg_len];
        for (a, p) in acc.iter_mut().zip(est.segment(seg, rate, &window, Detrend::Mean)) {
            *a += p;
        }
    }
    for a in &mut acc {
        *a /= count as f64;
    }
    Psd {
        resolution: rate / seg_len as f64,
        density: acc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_for_white_sequence() {
        // A periodogram with no window loss: a sinusoid on an exact bin.
        let rate = 64.0;
        let x: Vec<f64> = (0..640)
            .map(|i| 3.0 * (2.0 * PI * 4.0 * i as f64 / rate).sin())
            .collect();
        let psd = periodogram(&x, rate, Detrend::None);
        // mean square of a sine of amplitude 3 is 4.5
        assert!((psd.total_power() - 4.5).abs() < 0.05, "{}", psd.total_power());
        assert!((psd.band_power(3.0, 5.0) - 4.5).abs() < 0.05);
    }

    #[test]
    fn band_integration_is_additive() {
        let psd = Psd {
            resolution: 0.5,
            density: (0..40).map(|k| 1.0 + (k as f64 * 0.3).sin().abs()).collect(),
        };
        let whole = psd.band_power(1.3, 12.7);
        let split = psd.band_power(1.3, 5.1) + psd.band_power(5.1, 12.7);
        assert!((whole - split).abs() < 1e-12);
    }

    #[test]
    fn linear_detrend_removes_ramp() {
        let x: Vec<f64> = (0..100).map(|i| 2.0 + 0.5 * i as f64).collect();
        assert!(detrended(&x, Detrend::Linear).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn welch_segments() {
        let rate = 100.0;
        let x: Vec<f64> = (0..1000)
            .map(|i| (2.0 * PI * 10.0 * i as f64 / rate).sin())
            .collect();
        let psd = welch(&x, rate, 200, 0.5);
        assert_eq!(psd.density.len(), 101);
        assert_eq!(psd.resolution, 0.5);
        assert!((psd.band_power(8.0, 12.0) - 0.5).abs() < 0.02);
    }
}
