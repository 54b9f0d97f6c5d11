use crate::error::{Error, Result};
use crate::signal::Label;

pub const DEFAULT_K: usize = 5;

/// Training rows kept verbatim; prediction is a k-nearest majority vote.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    k: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

pub fn knn_fit(rows: Vec<Vec<f64>>, labels: Vec<Label>, k: usize) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if rows.len() != labels.len() {
        return Err(Error::InvalidInput("one label per training row required".into()));
    }
    if k > rows.len() {
        return Err(Error::Infeasible(format!(
            "k = {k} exceeds the {} training rows",
            rows.len()
        )));
    }
    Ok(KnnModel { k, rows, labels })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnModel {
    /// Indices of the k nearest rows, nearest first; equal distances go to
    /// the lower row index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (sq_dist(r, x), i))
            .collect();
        let key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, key);
            d.truncate(self.k);
        }
        d.sort_by(key);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Majority label among the neighbours; a tied vote goes to the label
    /// of the single nearest neighbour.
    pub fn predict(&self, x: &[f64]) -> Label {
        let nn = self.neighbours(x);
        let pos = nn.iter().filter(|&&i| self.labels[i] == Label::Positive).count();
        let neg = nn.len() - pos;
        match pos.cmp(&neg) {
            std::cmp::Ordering::Greater => Label::Positive,
            std::cmp::Ordering::Less => Label::Negative,
            std::cmp::Ordering::Equal => self.labels[nn[0]],
        }
    }
}
