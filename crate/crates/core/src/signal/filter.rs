//! Zero-phase Butterworth filtering.
//!
//! Filters are designed as cascades of second-order sections via the
//! bilinear transform (with cutoff prewarping) and applied forward then
//! backward, so the effective magnitude response is |H|² and the phase is
//! zero. Edges are handled with odd-symmetric extension and steady-state
//! section initialisation.

use std::f64::consts::PI;

use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Order of every filter built by [`lowpass`] and [`highpass`].
pub const ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Lowpass,
    Highpass,
}

/// One second-order section, normalised so `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[1] + self.a[2])
    }

    /// Transposed direct form II, state primed for a constant input `level`.
    fn run(&self, x: &mut [f64], level: f64) {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        let y_ss = level * self.dc_gain();
        let mut z1 = y_ss - b0 * level;
        let mut z2 = b2 * level - a2 * y_ss;
        for v in x.iter_mut() {
            let xin = *v;
            let y = b0 * xin + z1;
            z1 = b1 * xin - a1 * y + z2;
            z2 = b2 * xin - a2 * y;
            *v = y;
        }
    }

    /// Complex response at normalised angular frequency `w` (rad/sample).
    fn response(&self, w: f64) -> (f64, f64) {
        // H = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
        let (c1, s1) = (w.cos(), -w.sin());
        let (c2, s2) = ((2.0 * w).cos(), -(2.0 * w).sin());
        let nr = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let ni = self.b[1] * s1 + self.b[2] * s2;
        let dr = 1.0 + self.a[1] * c1 + self.a[2] * c2;
        let di = self.a[1] * s1 + self.a[2] * s2;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }
}

/// A Butterworth design as a cascade of biquads.
#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth {
    sections: Vec<Biquad>,
    cutoff: f64,
    rate: f64,
}

impl Butterworth {
    /// Design an even-order Butterworth filter.
    pub fn design(response: Response, order: usize, cutoff: f64, rate: f64) -> Result<Self> {
        if order == 0 || order % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "filter order must be even and positive, got {order}"
            )));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidInput(format!("sampling rate must be positive, got {rate}")));
        }
        let nyquist = rate / 2.0;
        if !(cutoff.is_finite() && cutoff > 0.0 && cutoff < nyquist) {
            return Err(Error::InvalidInput(format!(
                "cutoff {cutoff} Hz must lie in (0, {nyquist}) Hz"
            )));
        }
        let w0 = 2.0 * PI * cutoff / rate;
        let (sin_w, cos_w) = w0.sin_cos();
        let sections = (0..order / 2)
            .map(|k| {
                let theta = (2 * k + 1) as f64 * PI / (2 * order) as f64;
                let q = 1.0 / (2.0 * theta.cos());
                let alpha = sin_w / (2.0 * q);
                let a0 = 1.0 + alpha;
                let b = match response {
                    Response::Lowpass => {
                        let h = (1.0 - cos_w) / 2.0;
                        [h, 1.0 - cos_w, h]
                    }
                    Response::Highpass => {
                        let h = (1.0 + cos_w) / 2.0;
                        [h, -(1.0 + cos_w), h]
                    }
                };
                Biquad {
                    b: [b[0] / a0, b[1] / a0, b[2] / a0],
                    a: [1.0, -2.0 * cos_w / a0, (1.0 - alpha) / a0],
                }
            })
            .collect();
        Ok(Self {
            sections,
            cutoff,
            rate,
        })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Single-pass magnitude response at `freq` Hz.
    pub fn magnitude(&self, freq: f64) -> f64 {
        let w = 2.0 * PI * freq / self.rate;
        self.sections
            .iter()
            .map(|s| {
                let (re, im) = s.response(w);
                (re * re + im * im).sqrt()
            })
            .product()
    }

    fn run_forward(&self, x: &mut [f64]) {
        let Some(&first) = x.first() else { return };
        let mut level = first;
        for s in &self.sections {
            s.run(x, level);
            level *= s.dc_gain();
        }
    }

    fn pad_len(&self, n: usize) -> usize {
        let settle = (3.0 * self.rate / self.cutoff).ceil() as usize;
        settle.max(3 * (2 * self.sections.len() + 1)).min(n.saturating_sub(1))
    }

    /// Forward-backward application.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let pad = self.pad_len(n);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        self.run_forward(&mut ext);
        ext.reverse();
        self.run_forward(&mut ext);
        ext.reverse();
        ext.drain(..pad);
        ext.truncate(n);
        ext
    }
}

fn apply(ts: &TimeSeries, response: Response, cutoff: f64) -> Result<TimeSeries> {
    if ts.is_empty() {
        return Err(Error::InvalidInput(format!("series '{}' is empty", ts.label())));
    }
    let filter = Butterworth::design(response, ORDER, cutoff, ts.rate())?;
    Ok(ts.with_samples(filter.filtfilt(ts.samples())))
}

/// Zero-phase 4th-order Butterworth high-pass.
pub fn highpass(ts: &TimeSeries, cutoff: f64) -> Result<TimeSeries> {
    apply(ts, Response::Highpass, cutoff)
}

/// Zero-phase 4th-order Butterworth low-pass.
pub fn lowpass(ts: &TimeSeries, cutoff: f64) -> Result<TimeSeries> {
    apply(ts, Response::Lowpass, cutoff)
}

/// High-pass at `lo` followed by low-pass at `hi`.
pub fn bandpass(ts: &TimeSeries, lo: f64, hi: f64) -> Result<TimeSeries> {
    if lo >= hi {
        return Err(Error::InvalidInput(format!("band edges {lo}..{hi} Hz are not increasing")));
    }
    lowpass(&highpass(ts, lo)?, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Unit;

    fn sine(freq: f64, rate: f64, secs: f64, offset: f64) -> TimeSeries {
        let n = (rate * secs) as usize;
        let x = (0..n)
            .map(|i| offset + (2.0 * PI * freq * i as f64 / rate).sin())
            .collect();
        TimeSeries::new(x, rate, Unit::Microvolt, "x").unwrap()
    }

    // Amplitude estimate from RMS over the central half, away from edges.
    fn centre_amplitude(x: &[f64]) -> f64 {
        let n = x.len();
        let mid = &x[n / 4..3 * n / 4];
        let mean = mid.iter().sum::<f64>() / mid.len() as f64;
        let ms = mid.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / mid.len() as f64;
        (2.0 * ms).sqrt()
    }

    #[test]
    fn highpass_rejects_dc() {
        let x = TimeSeries::new(vec![5.0; 4000], 256.0, Unit::Microvolt, "dc").unwrap();
        let y = highpass(&x, 0.5).unwrap();
        let trim = &y.samples()[256..y.len() - 256];
        let mean = trim.iter().sum::<f64>() / trim.len() as f64;
        assert!(mean.abs() < 1e-3, "mean {mean}");
    }

    #[test]
    fn lowpass_passes_2hz() {
        let y = lowpass(&sine(2.0, 256.0, 10.0, 0.0), 45.0).unwrap();
        let amp = centre_amplitude(y.samples());
        assert!((amp - 1.0).abs() < 0.05, "amplitude {amp}");
    }

    #[test]
    fn lowpass_attenuates_40hz_by_20db() {
        let y = lowpass(&sine(40.0, 256.0, 10.0, 0.0), 10.0).unwrap();
        let amp = centre_amplitude(y.samples());
        assert!(20.0 * amp.log10() <= -20.0, "amplitude {amp}");
    }

    #[test]
    fn octave_stopband_and_flat_passband() {
        for (resp, cutoff) in [(Response::Lowpass, 20.0), (Response::Highpass, 20.0)] {
            let f = Butterworth::design(resp, ORDER, cutoff, 256.0).unwrap();
            let (stop, pass) = match resp {
                Response::Lowpass => (2.0 * cutoff, [1.0, 5.0, 10.0]),
                Response::Highpass => (cutoff / 2.0, [45.0, 60.0, 100.0]),
            };
            // forward-backward squares the single-pass magnitude
            let stop_db = 20.0 * f.magnitude(stop).powi(2).log10();
            assert!(stop_db <= -20.0, "{resp:?} stopband {stop_db} dB");
            for p in pass {
                let db = 20.0 * f.magnitude(p).powi(2).log10();
                assert!(db.abs() <= 1.0, "{resp:?} passband {p} Hz at {db} dB");
            }
        }
    }

    #[test]
    fn cutoff_at_or_above_nyquist_is_rejected() {
        let x = sine(2.0, 100.0, 2.0, 0.0);
        assert!(lowpass(&x, 50.0).is_err());
        assert!(highpass(&x, 70.0).is_err());
        assert!(highpass(&x, 0.0).is_err());
    }

    #[test]
    fn zero_phase_keeps_peak_position() {
        let rate = 256.0;
        let mut x = vec![0.0; 2048];
        for (i, v) in x.iter_mut().enumerate() {
            let t = (i as f64 - 1000.0) / rate;
            *v = (-(t / 0.01).powi(2)).exp();
        }
        let ts = TimeSeries::new(x, rate, Unit::Millivolt, "ecg").unwrap();
        let y = highpass(&ts, 10.0).unwrap();
        let peak = y
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(peak, 1000);
    }
}
