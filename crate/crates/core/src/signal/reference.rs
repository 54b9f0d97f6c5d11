use super::series::MultiChannelRecording;
use crate::error::{Error, Result};

/// Common average reference: subtract the cross-channel mean at every sample.
pub fn car_rereference(rec: &MultiChannelRecording) -> Result<MultiChannelRecording> {
    let n_ch = rec.channels().len();
    if n_ch < 2 {
        return Err(Error::InvalidInput(format!(
            "common average reference needs at least 2 channels, got {n_ch}"
        )));
    }
    let len = rec.len();
    let mut avg = vec![0.0; len];
    for ch in rec.channels() {
        for (a, x) in avg.iter_mut().zip(ch.samples()) {
            *a += x;
        }
    }
    for a in &mut avg {
        *a /= n_ch as f64;
    }
    let channels = rec
        .channels()
        .iter()
        .map(|ch| {
            let s = ch.samples().iter().zip(&avg).map(|(x, a)| x - a).collect();
            ch.with_samples(s)
        })
        .collect();
    Ok(MultiChannelRecording::from_parts_unchecked(
        channels,
        rec.subject().clone(),
        rec.modality(),
    ))
}
