use super::filter::lowpass;
use super::series::TimeSeries;
use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Anti-alias cutoff as a fraction of the lower of the two rates.
pub const ANTI_ALIAS_FRACTION: f64 = 0.45;

/// Cubic-spline resampling onto a uniform grid at `target_rate`.
///
/// Output length is `round(len · target_rate / rate)` and the output grid
/// starts at the input's `t0`. When downsampling, the input is first
/// low-passed at `0.45 · target_rate`.
pub fn resample(ts: &TimeSeries, target_rate: f64) -> Result<TimeSeries> {
    if !(target_rate.is_finite() && target_rate > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target rate must be positive, got {target_rate}"
        )));
    }
    if ts.is_empty() {
        return Err(Error::InvalidInput(format!("series '{}' is empty", ts.label())));
    }
    let rate = ts.rate();
    if target_rate == rate {
        return Ok(ts.clone());
    }
    let out_len = (ts.len() as f64 * target_rate / rate).round() as usize;
    if out_len == 0 {
        return Err(Error::InvalidInput(format!(
            "resampling {} samples from {rate} Hz to {target_rate} Hz leaves nothing",
            ts.len()
        )));
    }
    if ts.len() == 1 {
        return Ok(ts.with_rate(vec![ts.samples()[0]; out_len], target_rate));
    }

    let source = if target_rate < rate && ts.len() > 1 {
        lowpass(ts, ANTI_ALIAS_FRACTION * target_rate)?
    } else {
        ts.clone()
    };
    let knots: Vec<f64> = (0..source.len()).map(|i| i as f64 / rate).collect();
    let spline = CubicSpline::natural(&knots, source.samples())?;
    let samples = spline.eval_sorted((0..out_len).map(|j| j as f64 / target_rate));
    Ok(ts.with_rate(samples, target_rate))
}
