use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::montage::{Band, BandDef, Montage, Region, RegionDef};
use crate::error::{Error, Result};
use crate::signal::{bandpass, car_rereference, MultiChannelRecording, TimeSeries};
use crate::spectrum::{welch, Psd};

/// Welch segment length in seconds.
pub const WELCH_SEGMENT_S: f64 = 2.0;
pub const WELCH_OVERLAP: f64 = 0.5;
/// Passband applied before re-referencing.
pub const PREPROCESS_BAND: (f64, f64) = (0.5, 45.0);

fn psd(ts: &TimeSeries) -> Psd {
    let seg = (WELCH_SEGMENT_S * ts.rate()).round() as usize;
    welch(ts.samples(), ts.rate(), seg, WELCH_OVERLAP)
}

fn check_band(ts: &TimeSeries, band: &BandDef) -> Result<()> {
    let nyquist = ts.rate() / 2.0;
    if band.hi > nyquist {
        return Err(Error::InvalidInput(format!(
            "band {} [{}, {}) Hz exceeds the Nyquist frequency {nyquist} Hz of {}",
            band.band,
            band.lo,
            band.hi,
            ts.label()
        )));
    }
    let needed = 2.0 / band.lo;
    if ts.duration() + 1e-9 < needed {
        return Err(Error::TooShort {
            what: "EEG window (samples)",
            needed: (needed * ts.rate()).ceil() as usize,
            got: ts.len(),
        });
    }
    Ok(())
}

/// Power of `ts` in `band`: the Welch PSD integrated over `[lo, hi)`.
pub fn band_power(ts: &TimeSeries, band: &BandDef) -> Result<f64> {
    check_band(ts, band)?;
    Ok(psd(ts).band_power(band.lo, band.hi))
}

/// Mean band power over the electrodes of `region`.
pub fn region_power(rec: &MultiChannelRecording, region: &RegionDef, band: &BandDef) -> Result<f64> {
    let mut total = 0.0;
    for e in &region.electrodes {
        let ts = rec
            .channel(e)
            .ok_or_else(|| Error::MissingElectrode(format!("{e} (region {})", region.region)))?;
        total += band_power(ts, band)?;
    }
    Ok(total / region.electrodes.len() as f64)
}

/// 0.5-45 Hz zero-phase bandpass on every channel followed by common
/// average re-referencing.
pub fn preprocess(rec: &MultiChannelRecording) -> Result<MultiChannelRecording> {
    let filtered = rec.map_channels(|c| bandpass(c, PREPROCESS_BAND.0, PREPROCESS_BAND.1))?;
    car_rereference(&filtered)
}

/// Band power of every region in every band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPowers {
    // [region][band], enum order
    values: [[f64; 4]; 11],
}

impl RegionPowers {
    pub fn get(&self, region: Region, band: Band) -> f64 {
        self.values[region as usize][band as usize]
    }

    /// Element-wise mean of several windows.
    pub fn mean(items: &[RegionPowers]) -> Option<RegionPowers> {
        if items.is_empty() {
            return None;
        }
        let mut values = [[0.0; 4]; 11];
        for it in items {
            for (row, src) in values.iter_mut().zip(&it.values) {
                for (v, s) in row.iter_mut().zip(src) {
                    *v += s;
                }
            }
        }
        let n = items.len() as f64;
        values.iter_mut().flatten().for_each(|v| *v /= n);
        Some(RegionPowers { values })
    }
}

/// Compute all region powers of an already preprocessed recording, with one
/// PSD per referenced electrode.
pub fn region_powers(rec: &MultiChannelRecording, montage: &Montage) -> Result<RegionPowers> {
    let mut spectra: HashMap<&str, Psd> = HashMap::new();
    for e in montage.electrodes() {
        let ts = rec.channel(e).ok_or_else(|| Error::MissingElectrode(e.to_string()))?;
        for b in montage.bands() {
            check_band(ts, b)?;
        }
        spectra.insert(e, psd(ts));
    }
    let mut values = [[0.0; 4]; 11];
    for def in montage.regions() {
        for b in montage.bands() {
            let sum: f64 = def
                .electrodes
                .iter()
                .map(|e| spectra[e.as_str()].band_power(b.lo, b.hi))
                .sum();
            values[def.region as usize][b.band as usize] = sum / def.electrodes.len() as f64;
        }
    }
    Ok(RegionPowers { values })
}

/// The twenty frequency-location features fed to the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EegFeatureVector {
    pub values: [f64; 20],
}

impl EegFeatureVector {
    pub const FEATURES: [(Region, Band); 20] = [
        (Region::PfLeft, Band::Alpha),
        (Region::PfLeft, Band::Beta1),
        (Region::PfLeft, Band::Beta2),
        (Region::PfLeft, Band::Gamma),
        (Region::PfRight, Band::Alpha),
        (Region::PfRight, Band::Beta1),
        (Region::PfRight, Band::Beta2),
        (Region::PfRight, Band::Gamma),
        (Region::FMid, Band::Beta1),
        (Region::FMid, Band::Gamma),
        (Region::CMid, Band::Alpha),
        (Region::CMid, Band::Beta1),
        (Region::PoMid, Band::Beta1),
        (Region::PoMid, Band::Beta2),
        (Region::CLeft, Band::Gamma),
        (Region::CRight, Band::Gamma),
        (Region::PRight, Band::Gamma),
        (Region::ORight, Band::Beta1),
        (Region::ORight, Band::Beta2),
        (Region::ORight, Band::Gamma),
    ];

    pub fn names() -> Vec<String> {
        Self::FEATURES
            .iter()
            .map(|(r, b)| format!("{r}_{b}"))
            .collect()
    }

    pub fn from_powers(p: &RegionPowers) -> Self {
        let mut values = [0.0; 20];
        for (v, &(r, b)) in values.iter_mut().zip(&Self::FEATURES) {
            *v = p.get(r, b);
        }
        EegFeatureVector { values }
    }
}

/// Feature vector of one preprocessed window.
pub fn extract_model_features(rec: &MultiChannelRecording, montage: &Montage) -> Result<EegFeatureVector> {
    Ok(EegFeatureVector::from_powers(&region_powers(rec, montage)?))
}
