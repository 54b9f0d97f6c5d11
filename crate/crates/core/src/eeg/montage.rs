use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper edge allowed for any band: the preprocessing lowpass.
pub const MAX_BAND_HZ: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    Alpha,
    Beta1,
    Beta2,
    Gamma,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::Alpha, Band::Beta1, Band::Beta2, Band::Gamma];

    pub fn name(self) -> &'static str {
        match self {
            Band::Alpha => "Alpha",
            Band::Beta1 => "Beta1",
            Band::Beta2 => "Beta2",
            Band::Gamma => "Gamma",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Band {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Band::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown band `{s}`")))
    }
}

/// Frequency range `[lo, hi)` of a named band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDef {
    pub band: Band,
    pub lo: f64,
    pub hi: f64,
}

impl BandDef {
    pub fn new(band: Band, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi <= MAX_BAND_HZ) {
            return Err(Error::InvalidInput(format!(
                "band {band} must satisfy 0 < lo < hi <= {MAX_BAND_HZ}, got [{lo}, {hi})"
            )));
        }
        Ok(BandDef { band, lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    PfLeft,
    PfRight,
    FMid,
    CLeft,
    CRight,
    CMid,
    PLeft,
    PRight,
    PoMid,
    OLeft,
    ORight,
}

impl Region {
    pub const ALL: [Region; 11] = [
        Region::PfLeft,
        Region::PfRight,
        Region::FMid,
        Region::CLeft,
        Region::CRight,
        Region::CMid,
        Region::PLeft,
        Region::PRight,
        Region::PoMid,
        Region::OLeft,
        Region::ORight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::PfLeft => "PF_left",
            Region::PfRight => "PF_right",
            Region::FMid => "F_mid",
            Region::CLeft => "C_left",
            Region::CRight => "C_right",
            Region::CMid => "C_mid",
            Region::PLeft => "P_left",
            Region::PRight => "P_right",
            Region::PoMid => "PO_mid",
            Region::OLeft => "O_left",
            Region::ORight => "O_right",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown region `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDef {
    pub region: Region,
    pub electrodes: Vec<String>,
}

/// Electrode labels of the extended 10/10 system, plus the legacy
/// temporal names T3-T6.
pub const TEN_TEN_LABELS: &[&str] = &[
    "Nz", "Fp1", "Fpz", "Fp2", "AF9", "AF7", "AF5", "AF3", "AF1", "AFz", "AF2", "AF4", "AF6",
    "AF8", "AF10", "F9", "F7", "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8", "F10", "FT9", "FT7",
    "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8", "FT10", "T9", "T7", "C5", "C3", "C1",
    "Cz", "C2", "C4", "C6", "T8", "T10", "TP9", "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4",
    "CP6", "TP8", "TP10", "P9", "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8", "P10",
    "PO9", "PO7", "PO5", "PO3", "PO1", "POz", "PO2", "PO4", "PO6", "PO8", "PO10", "O1", "Oz",
    "O2", "O9", "O10", "I1", "Iz", "I2", "T3", "T4", "T5", "T6",
];

pub fn is_ten_ten(label: &str) -> bool {
    TEN_TEN_LABELS.iter().any(|l| l.eq_ignore_ascii_case(label))
}

/// Band edges and region electrode sets used for feature extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Montage {
    bands: Vec<BandDef>,
    regions: Vec<RegionDef>,
}

impl Default for Montage {
    fn default() -> Self {
        let b = |band, lo, hi| BandDef { band, lo, hi };
        let r = |region, es: &[&str]| RegionDef {
            region,
            electrodes: es.iter().map(|s| s.to_string()).collect(),
        };
        Montage {
            bands: vec![
                b(Band::Alpha, 8.0, 13.0),
                b(Band::Beta1, 13.0, 20.0),
                b(Band::Beta2, 20.0, 30.0),
                b(Band::Gamma, 30.0, 45.0),
            ],
            regions: vec![
                r(Region::PfLeft, &["Fp1", "AF3", "AF7"]),
                r(Region::PfRight, &["Fp2", "AF4", "AF8"]),
                r(Region::FMid, &["Fz"]),
                r(Region::CLeft, &["C3", "C5"]),
                r(Region::CRight, &["C4", "C6"]),
                r(Region::CMid, &["Cz"]),
                r(Region::PLeft, &["P3", "P5"]),
                r(Region::PRight, &["P4", "P6"]),
                r(Region::PoMid, &["POz"]),
                r(Region::OLeft, &["O1", "PO7"]),
                r(Region::ORight, &["O2", "PO8"]),
            ],
        }
    }
}

impl Montage {
    /// Build a montage; every band and region must be defined exactly once.
    pub fn new(mut bands: Vec<BandDef>, mut regions: Vec<RegionDef>) -> Result<Self> {
        bands.sort_by_key(|b| b.band);
        regions.sort_by_key(|r| r.region);
        if bands.iter().map(|b| b.band).collect::<Vec<_>>() != Band::ALL {
            return Err(Error::InvalidInput("each of the four bands must be defined once".into()));
        }
        for b in &bands {
            BandDef::new(b.band, b.lo, b.hi)?;
        }
        if regions.iter().map(|r| r.region).collect::<Vec<_>>() != Region::ALL {
            return Err(Error::InvalidInput("each of the eleven regions must be defined once".into()));
        }
        for r in &regions {
            if r.electrodes.is_empty() {
                return Err(Error::InvalidInput(format!("region {} has no electrodes", r.region)));
            }
            if let Some(bad) = r.electrodes.iter().find(|e| !is_ten_ten(e)) {
                return Err(Error::InvalidInput(format!(
                    "region {}: `{bad}` is not a 10/10 electrode label",
                    r.region
                )));
            }
        }
        let montage = Montage { bands, regions };
        for (left, right) in [
            (Region::PfLeft, Region::PfRight),
            (Region::CLeft, Region::CRight),
            (Region::PLeft, Region::PRight),
            (Region::OLeft, Region::ORight),
        ] {
            let l: BTreeSet<_> = montage.region(left).electrodes.iter().collect();
            if let Some(e) = montage.region(right).electrodes.iter().find(|e| l.contains(e)) {
                return Err(Error::InvalidInput(format!(
                    "electrode {e} appears in both {left} and {right}"
                )));
            }
        }
        Ok(montage)
    }

    pub fn bands(&self) -> &[BandDef] {
        &self.bands
    }

    pub fn regions(&self) -> &[RegionDef] {
        &self.regions
    }

    pub fn band(&self, band: Band) -> &BandDef {
        // Construction guarantees one entry per band in enum order.
        &self.bands[band as usize]
    }

    pub fn region(&self, region: Region) -> &RegionDef {
        &self.regions[region as usize]
    }

    /// Every electrode referenced by some region, sorted and deduplicated.
    pub fn electrodes(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .regions
            .iter()
            .flat_map(|r| r.electrodes.iter().map(String::as_str))
            .collect();
        set.into_iter().collect()
    }

    pub fn with_band(mut self, def: BandDef) -> Result<Self> {
        let def = BandDef::new(def.band, def.lo, def.hi)?;
        self.bands[def.band as usize] = def;
        Ok(self)
    }

    pub fn with_region(self, def: RegionDef) -> Result<Self> {
        let mut regions = self.regions;
        let slot = def.region as usize;
        regions[slot] = def;
        Montage::new(self.bands, regions)
    }
}
