use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Label, Sex};
use crate::stats::descriptive::{mean, sample_sd};

/// Rows of named features with the bookkeeping needed for grouped
/// cross-validation. Labels are restricted to Positive and Negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
    subjects: Vec<String>,
    sexes: Vec<Sex>,
    trials: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate feature name `{dup}`")));
        }
        Ok(FeatureMatrix {
            names,
            rows: Vec::new(),
            labels: Vec::new(),
            subjects: Vec::new(),
            sexes: Vec::new(),
            trials: Vec::new(),
        })
    }

    pub fn push(
        &mut self,
        row: Vec<f64>,
        label: Label,
        subject: &str,
        sex: Sex,
        trial: &str,
    ) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} values, matrix has {} features",
                row.len(),
                self.names.len()
            )));
        }
        if label == Label::Baseline {
            return Err(Error::InvalidInput(format!(
                "baseline row from trial {trial} cannot enter a classification matrix"
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "feature {} of subject {subject}, trial {trial} is not finite",
                self.names[j]
            )));
        }
        self.rows.push(row);
        self.labels.push(label);
        self.subjects.push(subject.to_string());
        self.sexes.push(sex);
        self.trials.push(trial.to_string());
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn sexes(&self) -> &[Sex] {
        &self.sexes
    }

    pub fn trials(&self) -> &[String] {
        &self.trials
    }

    /// Distinct subject ids in sorted order.
    pub fn subject_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.subjects.clone();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Same rows with the labels replaced.
    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.n() || labels.contains(&Label::Baseline) {
            return Err(Error::InvalidInput("replacement labels must be Positive/Negative, one per row".into()));
        }
        Ok(FeatureMatrix { labels, ..self.clone() })
    }

    /// Keep the columns whose mask bit is set.
    pub fn select_columns(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.d() {
            return Err(Error::InvalidInput(format!(
                "mask has {} bits for {} features",
                mask.len(),
                self.d()
            )));
        }
        let pick = |v: &[f64]| -> Vec<f64> {
            v.iter().zip(mask).filter(|(_, &m)| m).map(|(x, _)| *x).collect()
        };
        Ok(FeatureMatrix {
            names: self.names.iter().zip(mask).filter(|(_, &m)| m).map(|(n, _)| n.clone()).collect(),
            rows: self.rows.iter().map(|r| pick(r)).collect(),
            ..self.clone()
        })
    }

    /// Keep the named columns, in the given order.
    pub fn select_named(&self, names: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::InvalidInput(format!("no feature named `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(FeatureMatrix {
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            ..self.clone()
        })
    }

    /// Keep rows for which `keep(index)` holds.
    pub fn filter_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.n()).filter(|&i| keep(i)).collect();
        FeatureMatrix {
            names: self.names.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            subjects: idx.iter().map(|&i| self.subjects[i].clone()).collect(),
            sexes: idx.iter().map(|&i| self.sexes[i]).collect(),
            trials: idx.iter().map(|&i| self.trials[i].clone()).collect(),
        }
    }

    /// Columns that are constant over all rows.
    pub fn zero_variance(&self) -> Vec<bool> {
        (0..self.d())
            .map(|j| self.rows.iter().all(|r| r[j] == self.rows[0][j]))
            .collect()
    }

    /// Row count per (subject, label).
    pub fn class_counts(&self) -> BTreeMap<(String, Label), usize> {
        let mut m = BTreeMap::new();
        for (s, l) in self.subjects.iter().zip(&self.labels) {
            *m.entry((s.clone(), *l)).or_insert(0) += 1;
        }
        m
    }
}

/// Column-wise z-scoring with statistics from a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    /// Constant columns get unit scale, so they map to zero.
    pub fn fit(rows: &[&[f64]]) -> Self {
        let d = rows.first().map_or(0, |r| r.len());
        let mut means = Vec::with_capacity(d);
        let mut scales = Vec::with_capacity(d);
        let mut col = Vec::with_capacity(rows.len());
        for j in 0..d {
            col.clear();
            col.extend(rows.iter().map(|r| r[j]));
            let m = mean(&col);
            let sd = if col.len() > 1 { sample_sd(&col) } else { 0.0 };
            means.push(m);
            scales.push(if sd > 0.0 && sd.is_finite() { sd } else { 1.0 });
        }
        Standardizer { means, scales }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FeatureMatrix {
        let mut m = FeatureMatrix::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        m.push(vec![1.0, 2.0, 5.0], Label::Positive, "S1", Sex::Male, "t1").unwrap();
        m.push(vec![3.0, 2.0, 7.0], Label::Negative, "S2", Sex::Female, "t2").unwrap();
        m
    }

    #[test]
    fn validation() {
        assert!(FeatureMatrix::new(vec!["a".into(), "a".into()]).is_err());
        let mut m = small();
        assert!(m.push(vec![1.0], Label::Positive, "S", Sex::Male, "t").is_err());
        assert!(m.push(vec![1.0, 2.0, 3.0], Label::Baseline, "S", Sex::Male, "t").is_err());
        assert!(m.push(vec![1.0, f64::NAN, 3.0], Label::Positive, "S", Sex::Male, "t").is_err());
    }

    #[test]
    fn column_selection() {
        let m = small();
        let s = m.select_columns(&[true, false, true]).unwrap();
        assert_eq!(s.names(), ["a", "c"]);
        assert_eq!(s.rows()[1], [3.0, 7.0]);
        let t = m.select_named(&["c", "a"]).unwrap();
        assert_eq!(t.rows()[0], [5.0, 1.0]);
        assert_eq!(m.zero_variance(), [false, true, false]);
    }

    #[test]
    fn standardizer_constant_column() {
        let rows: Vec<&[f64]> = vec![&[1.0, 4.0], &[3.0, 4.0]];
        let s = Standardizer::fit(&rows);
        let z = s.transform(&[3.0, 4.0]);
        assert!((z[0] - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(z[1], 0.0);
    }
}
