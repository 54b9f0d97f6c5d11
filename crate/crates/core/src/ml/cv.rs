use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::Classifier;
use super::matrix::{FeatureMatrix, Standardizer};
use super::metrics::f1_score;
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::Label;
use crate::stats::descriptive::{mean, sample_sd};

pub const DEFAULT_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CvScheme {
    /// Per-subject stratified k-fold, grouped by trial.
    SubjectDependent { folds: usize },
    /// Leave one subject out.
    SubjectIndependent,
}

impl CvScheme {
    pub fn short(&self) -> &'static str {
        match self {
            CvScheme::SubjectDependent { .. } => "SD",
            CvScheme::SubjectIndependent => "SI",
        }
    }
}

impl fmt::Display for CvScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for CvScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SD" => Ok(CvScheme::SubjectDependent { folds: DEFAULT_FOLDS }),
            "SI" => Ok(CvScheme::SubjectIndependent),
            _ => Err(Error::InvalidInput(format!("unknown scheme `{s}` (expected SD or SI)"))),
        }
    }
}

/// Row indices of one train/test split. `unit` is the subject the fold
/// reports to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub unit: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// All splits of `m` under `scheme`, in a deterministic order.
pub fn make_folds(m: &FeatureMatrix, scheme: CvScheme, seed: u64) -> Result<Vec<Fold>> {
    let subjects = m.subject_ids();
    match scheme {
        CvScheme::SubjectIndependent => {
            if subjects.len() < 2 {
                return Err(Error::Infeasible(format!(
                    "leave-one-subject-out needs at least 2 subjects, found {}",
                    subjects.len()
                )));
            }
            Ok(subjects
                .into_iter()
                .map(|s| {
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        (0..m.n()).partition(|&i| m.subjects()[i] == s);
                    Fold { unit: s, train, test }
                })
                .collect())
        }
        CvScheme::SubjectDependent { folds } => {
            if folds < 2 {
                return Err(Error::InvalidInput(format!("folds must be at least 2, got {folds}")));
            }
            let mut out = Vec::new();
            for s in subjects {
                let rows: Vec<usize> = (0..m.n()).filter(|&i| m.subjects()[i] == s).collect();
                // trial ids in first-appearance order, with the label of their first row
                let mut trials: Vec<(&str, Label)> = Vec::new();
                for &i in &rows {
                    let t = m.trials()[i].as_str();
                    if !trials.iter().any(|(x, _)| *x == t) {
                        trials.push((t, m.labels()[i]));
                    }
                }
                let mut order: Vec<&str> = Vec::new();
                let mut rng = rng::named(seed, &format!("sd-folds/{s}"));
                for label in [Label::Positive, Label::Negative] {
                    let mut ids: Vec<&str> =
                        trials.iter().filter(|t| t.1 == label).map(|t| t.0).collect();
                    if ids.len() < folds {
                        return Err(Error::Infeasible(format!(
                            "subject {s} has {} {label} trials, fewer than {folds} folds",
                            ids.len()
                        )));
                    }
                    ids.sort_unstable();
                    ids.shuffle(&mut rng);
                    order.extend(ids);
                }
                for f in 0..folds {
                    let held: Vec<&str> =
                        order.iter().enumerate().filter(|(i, _)| i % folds == f).map(|(_, t)| *t).collect();
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        rows.iter().partition(|&&i| held.contains(&m.trials()[i].as_str()));
                    out.push(Fold { unit: s.clone(), train, test });
                }
            }
            Ok(out)
        }
    }
}

/// F1 on the test rows of one fold, z-scoring with training statistics.
pub fn evaluate_fold(m: &FeatureMatrix, fold: &Fold, classifier: Classifier) -> Result<f64> {
    let train_rows: Vec<&[f64]> = fold.train.iter().map(|&i| m.rows()[i].as_slice()).collect();
    let z = Standardizer::fit(&train_rows);
    let x: Vec<Vec<f64>> = train_rows.iter().map(|r| z.transform(r)).collect();
    let y: Vec<Label> = fold.train.iter().map(|&i| m.labels()[i]).collect();
    let model = classifier.fit(x, y)?;
    let truth: Vec<Label> = fold.test.iter().map(|&i| m.labels()[i]).collect();
    let pred: Vec<Label> = fold
        .test
        .iter()
        .map(|&i| model.predict(&z.transform(&m.rows()[i])))
        .collect();
    f1_score(&truth, &pred)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: Classifier,
    pub scheme: CvScheme,
    pub seed: u64,
    pub n_rows: usize,
    pub mask: Vec<bool>,
    pub selected_features: Vec<String>,
    pub per_unit_f1: BTreeMap<String, f64>,
    pub mean_f1: f64,
    /// Sample standard deviation over units.
    pub sd_f1: f64,
}

/// Cross-validated F1 of `classifier` on all columns of `m`.
pub fn cross_validate(
    m: &FeatureMatrix,
    scheme: CvScheme,
    classifier: Classifier,
    seed: u64,
) -> Result<EvalReport> {
    if m.d() == 0 {
        return Err(Error::InvalidInput("feature matrix has no columns".into()));
    }
    let folds = make_folds(m, scheme, seed)?;
    let scores: Vec<f64> = folds
        .par_iter()
        .map(|f| evaluate_fold(m, f, classifier))
        .collect::<Result<_>>()?;
    let mut per_unit: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (f, s) in folds.iter().zip(scores) {
        per_unit.entry(f.unit.clone()).or_default().push(s);
    }
    let per_unit_f1: BTreeMap<String, f64> =
        per_unit.into_iter().map(|(u, v)| (u, mean(&v))).collect();
    let units: Vec<f64> = per_unit_f1.values().copied().collect();
    Ok(EvalReport {
        classifier,
        scheme,
        seed,
        n_rows: m.n(),
        mask: vec![true; m.d()],
        selected_features: m.names().to_vec(),
        mean_f1: mean(&units),
        sd_f1: if units.len() > 1 { sample_sd(&units) } else { 0.0 },
        per_unit_f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Sex;

    fn grid(subjects: usize, trials_per_class: usize, rows_per_trial: usize) -> FeatureMatrix {
        let mut m = FeatureMatrix::new(vec!["x".into()]).unwrap();
        for s in 0..subjects {
            for t in 0..2 * trials_per_class {
                let label = if t % 2 == 0 { Label::Positive } else { Label::Negative };
                for w in 0..rows_per_trial {
                    let v = if label == Label::Positive { 1.0 } else { -1.0 } + 0.01 * w as f64;
                    m.push(vec![v], label, &format!("S{s}"), Sex::Male, &format!("t{t:02}")).unwrap();
                }
            }
        }
        m
    }

    #[test]
    fn loso_units() {
        let m = grid(3, 3, 2);
        let folds = make_folds(&m, CvScheme::SubjectIndependent, 1).unwrap();
        assert_eq!(folds.len(), 3);
        for f in &folds {
            assert!(f.train.iter().all(|&i| m.subjects()[i] != f.unit));
            assert!(f.test.iter().all(|&i| m.subjects()[i] == f.unit));
        }
        let r = cross_validate(&m, CvScheme::SubjectIndependent, Classifier::default(), 1).unwrap();
        assert_eq!(r.per_unit_f1.len(), 3);
        assert_eq!(r.mean_f1, 1.0);
    }

    #[test]
    fn sd_folds_group_trials() {
        let m = grid(2, 7, 3);
        let folds = make_folds(&m, CvScheme::SubjectDependent { folds: 5 }, 9).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            for &i in &f.test {
                assert!(f.train.iter().all(|&j| m.trials()[j] != m.trials()[i] || m.subjects()[j] != m.subjects()[i]));
                assert_eq!(m.subjects()[i], f.unit);
            }
            let pos = f.test.iter().filter(|&&i| m.labels()[i] == Label::Positive).count();
            assert!(pos > 0 && pos < f.test.len());
        }
    }

    #[test]
    fn infeasible_stratification() {
        let m = grid(1, 3, 1);
        assert!(matches!(
            make_folds(&m, CvScheme::SubjectDependent { folds: 5 }, 0),
            Err(Error::Infeasible(_))
        ));
        assert!(make_folds(&m, CvScheme::SubjectIndependent, 0).is_err());
    }

    #[test]
    fn report_consistency() {
        let m = grid(4, 5, 2);
        let r = cross_validate(&m, CvScheme::SubjectDependent { folds: 5 }, Classifier::Qda, 3).unwrap();
        let v: Vec<f64> = r.per_unit_f1.values().copied().collect();
        assert!((r.mean_f1 - mean(&v)).abs() < 1e-12);
        assert!(v.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn scheme_names() {
        assert_eq!("sd".parse::<CvScheme>().unwrap(), CvScheme::SubjectDependent { folds: 5 });
        assert_eq!(CvScheme::SubjectIndependent.to_string(), "SI");
    }
}
