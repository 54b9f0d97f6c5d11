use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::Label;

/// Ridge multipliers tried in turn, relative to `trace(Σ)/d`.
pub const RIDGE_STEPS: [f64; 5] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
/// Smallest accepted ratio between squared Cholesky pivots.
const MIN_PIVOT_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
struct ClassModel {
    label: Label,
    mean: DVector<f64>,
    // lower Cholesky factor of the (possibly regularized) covariance
    chol: DMatrix<f64>,
    log_det: f64,
    log_prior: f64,
    ridge: f64,
}

/// Gaussian class models with class-specific covariance.
#[derive(Debug, Clone)]
pub struct QdaModel {
    classes: Vec<ClassModel>,
}

fn try_cholesky(cov: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let l = cov.clone().cholesky()?.l();
    let diag: Vec<f64> = l.diagonal().iter().map(|v| v * v).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0 && min / max > MIN_PIVOT_RATIO) {
        return None;
    }
    let log_det = diag.iter().map(|v| v.ln()).sum();
    Some((l, log_det))
}

fn fit_class(label: Label, rows: &[&[f64]], n_total: usize) -> Result<ClassModel> {
    let n = rows.len();
    let d = rows[0].len();
    let mut mean = DVector::zeros(d);
    for r in rows {
        mean += DVector::from_column_slice(r);
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(d, d);
    if n > 1 {
        for r in rows {
            let c = DVector::from_column_slice(r) - &mean;
            cov += &c * c.transpose();
        }
        cov /= (n - 1) as f64;
    }
    let trace = cov.trace();
    let scale = if trace > 0.0 { trace / d as f64 } else { 1.0 };
    let plain = if n >= d + 2 { Some(0.0) } else { None };
    for ridge in plain.into_iter().chain(RIDGE_STEPS) {
        let mut reg = cov.clone();
        for i in 0..d {
            reg[(i, i)] += ridge * scale;
        }
        if let Some((chol, log_det)) = try_cholesky(&reg) {
            return Ok(ClassModel {
                label,
                mean,
                chol,
                log_det,
                log_prior: (n as f64 / n_total as f64).ln(),
                ridge,
            });
        }
    }
    Err(Error::SingularCovariance(format!(
        "covariance of class {label} ({n} rows, {d} features) stays singular after ridge {}",
        RIDGE_STEPS[RIDGE_STEPS.len() - 1]
    )))
}

pub fn qda_fit(rows: &[Vec<f64>], labels: &[Label]) -> Result<QdaModel> {
    if rows.len() != labels.len() || rows.is_empty() {
        return Err(Error::InvalidInput("QDA needs one label per row and at least one row".into()));
    }
    let mut classes = Vec::new();
    for label in [Label::Positive, Label::Negative] {
        let members: Vec<&[f64]> = rows
            .iter()
            .zip(labels)
            .filter(|(_, l)| **l == label)
            .map(|(r, _)| r.as_slice())
            .collect();
        if !members.is_empty() {
            classes.push(fit_class(label, &members, rows.len())?);
        }
    }
    Ok(QdaModel { classes })
}

impl QdaModel {
    /// `(label, log prior − ½ log|Σ| − ½ Mahalanobis²)` per fitted class.
    pub fn discriminants(&self, x: &[f64]) -> Vec<(Label, f64)> {
        self.classes
            .iter()
            .map(|c| {
                let diff = DVector::from_column_slice(x) - &c.mean;
                let y = c
                    .chol
                    .solve_lower_triangular(&diff)
                    .expect("Cholesky factor has a positive diagonal");
                (c.label, c.log_prior - 0.5 * c.log_det - 0.5 * y.norm_squared())
            })
            .collect()
    }

    /// Largest discriminant; exact ties go to the class listed first
    /// (Positive).
    pub fn predict(&self, x: &[f64]) -> Label {
        let mut best = (self.classes[0].label, f64::NEG_INFINITY);
        for (l, s) in self.discriminants(x) {
            if s > best.1 {
                best = (l, s);
            }
        }
        best.0
    }

    /// Ridge multiplier that was needed per class.
    pub fn ridges(&self) -> Vec<(Label, f64)> {
        self.classes.iter().map(|c| (c.label, c.ridge)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    #[test]
    fn equal_variance_boundary_at_zero() {
        let rows: Vec<Vec<f64>> = [-3.0, -1.0, 1.0, 3.0].iter().map(|&v| vec![v]).collect();
        let m = qda_fit(&rows, &[P, P, N, N]).unwrap();
        assert_eq!(m.predict(&[-0.5]), P);
        assert_eq!(m.predict(&[0.5]), N);
        let d = m.discriminants(&[0.0]);
        assert!((d[0].1 - d[1].1).abs() < 1e-12);
    }

    #[test]
    fn identical_classes_follow_prior() {
        // both classes: mean 0, sample variance 4/3
        let a = (4.0f64 / 3.0).sqrt();
        let rows: Vec<Vec<f64>> =
            [-1.0, 1.0, -1.0, 1.0, -a, 0.0, a].iter().map(|&v| vec![v]).collect();
        let m = qda_fit(&rows, &[N, N, N, N, P, P, P]).unwrap();
        for q in [0.3, -7.0, 2.0] {
            assert_eq!(m.predict(&[q]), N);
        }
    }

    #[test]
    fn regularization_engages_for_few_rows() {
        let rows = vec![vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![5.0, 5.0, 4.0], vec![6.0, 5.0, 5.0]];
        let m = qda_fit(&rows, &[P, P, N, N]).unwrap();
        assert!(m.ridges().iter().all(|(_, r)| *r > 0.0));
        assert_eq!(m.predict(&[0.5, 0.5, 0.5]), P);
    }

    #[test]
    fn single_class_training() {
        let m = qda_fit(&[vec![1.0], vec![2.0]], &[N, N]).unwrap();
        assert_eq!(m.predict(&[100.0]), N);
    }
}
