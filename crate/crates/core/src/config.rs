//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Every key is optional.
//!
//! | key | default |
//! |---|---|
//! | `bands` | `Alpha:8-13, Beta1:13-20, Beta2:20-30, Gamma:30-45` |
//! | `region.<name>` | see [`Montage::default`] |
//! | `window_s` | `4` |
//! | `folds` | `5` |
//! | `k` | `5` |
//! | `sa.enabled`, `sa.t0`, `sa.alpha`, `sa.iterations` | `false`, `0.1`, `0.95`, `200` |
//! | `modalities` | `EEG, T+ECG, EEG+T, EEG+ECG, ALL` |
//! | `classifiers` | `KNN, QDA` |
//! | `scheme` | `SD, SI` |
//! | `population` | `all` |
//! | `seed` | `0` |
//! | `hrv_block` | `nn50` |
//! | `hrv_context_s` | `40` |

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::eeg::{Band, BandDef, Montage, Region, RegionDef};
use crate::error::{Error, Result};
use crate::fusion::{HrvBlock, ModalitySet, Population};
use crate::ml::{Classifier, CvScheme, SaConfig, DEFAULT_FOLDS, DEFAULT_K};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub montage: Montage,
    pub window_s: f64,
    pub folds: usize,
    pub k: usize,
    pub sa_enabled: bool,
    pub sa: SaConfig,
    pub modalities: Vec<ModalitySet>,
    /// `KNN` entries take their neighbour count from `k`.
    pub classifiers: Vec<Classifier>,
    pub schemes: Vec<CvScheme>,
    pub populations: Vec<Population>,
    pub seed: u64,
    pub hrv_block: HrvBlock,
    /// Minimum span in seconds, centred on the trial, for the spectral HRV
    /// variables.
    pub hrv_context_s: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            montage: Montage::default(),
            window_s: 4.0,
            folds: DEFAULT_FOLDS,
            k: DEFAULT_K,
            sa_enabled: false,
            sa: SaConfig::default(),
            modalities: ModalitySet::ALL.to_vec(),
            classifiers: vec![Classifier::Knn { k: DEFAULT_K }, Classifier::Qda],
            schemes: vec![
                CvScheme::SubjectDependent { folds: DEFAULT_FOLDS },
                CvScheme::SubjectIndependent,
            ],
            populations: vec![Population::All],
            seed: 0,
            hrv_block: HrvBlock::Nn50,
            hrv_context_s: 40.0,
        }
    }
}

fn list<T: FromStr<Err = Error>>(v: &str) -> Result<Vec<T>> {
    let items = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(T::from_str)
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::InvalidInput("empty list".into()));
    }
    Ok(items)
}

fn num<T: FromStr>(v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidInput(format!("`{v}` is not a valid number")))
}

fn parse_bands(v: &str) -> Result<Vec<BandDef>> {
    v.split(',')
        .map(|item| {
            let (name, range) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("band `{item}` is not name:lo-hi")))?;
            let (lo, hi) = range
                .split_once('-')
                .ok_or_else(|| Error::InvalidInput(format!("band `{item}` is not name:lo-hi")))?;
            BandDef::new(name.trim().parse::<Band>()?, num(lo.trim())?, num(hi.trim())?)
        })
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = HashSet::new();
        let mut bands = None;
        let mut regions: Vec<RegionDef> = Vec::new();
        let mut schemes: Option<Vec<String>> = None;
        let mut classifiers: Option<Vec<String>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = Some(i as u64 + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::schema(path, line_no, m);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let wrap = |e: Error| err(format!("{key}: {}", e.root()));
            match key {
                "bands" => bands = Some(parse_bands(value).map_err(wrap)?),
                "window_s" => cfg.window_s = num(value).map_err(wrap)?,
                "folds" => cfg.folds = num(value).map_err(wrap)?,
                "k" => cfg.k = num(value).map_err(wrap)?,
                "sa.enabled" => {
                    cfg.sa_enabled = value
                        .parse()
                        .map_err(|_| err(format!("sa.enabled: `{value}` is not true or false")))?
                }
                "sa.t0" => cfg.sa.t0 = num(value).map_err(wrap)?,
                "sa.alpha" => cfg.sa.alpha = num(value).map_err(wrap)?,
                "sa.iterations" => cfg.sa.iterations = num(value).map_err(wrap)?,
                "modalities" => cfg.modalities = list(value).map_err(wrap)?,
                "classifiers" => {
                    classifiers = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                }
                "scheme" => schemes = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
                "population" => cfg.populations = list(value).map_err(wrap)?,
                "seed" => cfg.seed = num(value).map_err(wrap)?,
                "hrv_block" => cfg.hrv_block = value.parse().map_err(wrap)?,
                "hrv_context_s" => cfg.hrv_context_s = num(value).map_err(wrap)?,
                _ => {
                    let Some(name) = key.strip_prefix("region.") else {
                        return Err(err(format!("unknown key `{key}`")));
                    };
                    let region: Region = name.parse().map_err(wrap)?;
                    let electrodes: Vec<String> = value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                    regions.push(RegionDef { region, electrodes });
                }
            }
        }
        let whole = |m: String| Error::schema(path, None, m);
        if let Some(b) = bands {
            cfg.montage = Montage::new(b, cfg.montage.regions().to_vec()).map_err(|e| whole(e.to_string()))?;
        }
        for r in regions {
            cfg.montage = cfg.montage.with_region(r).map_err(|e| whole(e.to_string()))?;
        }
        if let Some(c) = classifiers {
            cfg.classifiers = c
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| {
                    if s.eq_ignore_ascii_case("KNN") {
                        Ok(Classifier::Knn { k: cfg.k })
                    } else {
                        s.parse()
                    }
                })
                .collect::<Result<_>>()
                .map_err(|e| whole(format!("classifiers: {}", e.root())))?;
        } else {
            cfg.classifiers = vec![Classifier::Knn { k: cfg.k }, Classifier::Qda];
        }
        let folds = cfg.folds;
        let with_folds = |s: CvScheme| match s {
            CvScheme::SubjectDependent { .. } => CvScheme::SubjectDependent { folds },
            other => other,
        };
        cfg.schemes = match schemes {
            Some(s) => s
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map(with_folds))
                .collect::<Result<_>>()
                .map_err(|e| whole(format!("scheme: {}", e.root())))?,
            None => cfg.schemes.iter().copied().map(with_folds).collect(),
        };
        cfg.validate().map_err(|e| whole(e.root().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::schema(path, None, format!("cannot read config: {e}")))?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if !(self.window_s.is_finite() && self.window_s > 0.0) {
            return bad("window_s must be positive");
        }
        if self.folds < 2 {
            return bad("folds must be at least 2");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(self.sa.t0 > 0.0 && self.sa.alpha > 0.0 && self.sa.alpha <= 1.0) {
            return bad("sa.t0 must be positive and sa.alpha in (0, 1]");
        }
        if !(self.hrv_context_s.is_finite() && self.hrv_context_s >= 0.0) {
            return bad("hrv_context_s must be non-negative");
        }
        if self.modalities.is_empty() || self.classifiers.is_empty() || self.schemes.is_empty() || self.populations.is_empty() {
            return bad("modalities, classifiers, scheme and population must be non-empty");
        }
        Ok(())
    }

    /// Every effective setting as strings, in key order.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let bands = self
            .montage
            .bands()
            .iter()
            .map(|b| format!("{}:{}-{}", b.band, b.lo, b.hi))
            .collect::<Vec<_>>()
            .join(", ");
        m.insert("bands".into(), bands);
        for r in self.montage.regions() {
            m.insert(format!("region.{}", r.region), r.electrodes.join(", "));
        }
        m.insert("window_s".into(), self.window_s.to_string());
        m.insert("folds".into(), self.folds.to_string());
        m.insert("k".into(), self.k.to_string());
        m.insert("sa.enabled".into(), self.sa_enabled.to_string());
        m.insert("sa.t0".into(), self.sa.t0.to_string());
        m.insert("sa.alpha".into(), self.sa.alpha.to_string());
        m.insert("sa.iterations".into(), self.sa.iterations.to_string());
        m.insert("modalities".into(), join(&self.modalities));
        m.insert("classifiers".into(), join(&self.classifiers));
        m.insert("scheme".into(), join(&self.schemes));
        m.insert("population".into(), join(&self.populations));
        m.insert("seed".into(), self.seed.to_string());
        m.insert("hrv_block".into(), self.hrv_block.to_string());
        m.insert("hrv_context_s".into(), self.hrv_context_s.to_string());
        m
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(text, Path::new("exp.cfg"))
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(parse("# nothing\n\n").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn text_round_trip() {
        let cfg = parse(
            "modalities = EEG, T+ECG, ALL\nclassifiers = KNN, QDA\nk = 3\nscheme = SD\nfolds = 4\n\
             population = all, female\nsa.enabled = true\nregion.F_mid = Fz, FCz\nbands = Alpha:8-12, Beta1:12-20, Beta2:20-30, Gamma:30-45\n",
        )
        .unwrap();
        assert_eq!(cfg.classifiers, vec![Classifier::Knn { k: 3 }, Classifier::Qda]);
        assert_eq!(cfg.schemes, vec![CvScheme::SubjectDependent { folds: 4 }]);
        assert_eq!(cfg.montage.region(Region::FMid).electrodes, vec!["Fz", "FCz"]);
        assert_eq!(cfg.montage.band(Band::Alpha).hi, 12.0);
        assert_eq!(parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(parse(&ExperimentConfig::default().to_text()).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn schema_errors_carry_line() {
        match parse("seed = 1\nwindow = 4\n") {
            Err(Error::Schema { line: Some(2), message, .. }) => assert!(message.contains("window")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("seed = 1\nseed = 2"), Err(Error::Schema { line: Some(2), .. })));
        assert!(matches!(parse("k = many"), Err(Error::Schema { line: Some(1), .. })));
        assert!(matches!(parse("scheme = XY"), Err(Error::Schema { .. })));
        assert!(matches!(parse("folds = 1"), Err(Error::Schema { .. })));
    }
}
