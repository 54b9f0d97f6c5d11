use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::knn::{knn_fit, KnnModel, DEFAULT_K};
use super::qda::{qda_fit, QdaModel};
use crate::error::{Error, Result};
use crate::signal::Label;

/// Classifier choice. Written as `KNN5` (any k) or `QDA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Classifier {
    Knn { k: usize },
    Qda,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::Knn { k: DEFAULT_K }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classifier::Knn { k } => write!(f, "KNN{k}"),
            Classifier::Qda => f.write_str("QDA"),
        }
    }
}

impl FromStr for Classifier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        if up == "QDA" {
            return Ok(Classifier::Qda);
        }
        if let Some(rest) = up.strip_prefix("KNN") {
            if rest.is_empty() {
                return Ok(Classifier::default());
            }
            if let Ok(k) = rest.parse::<usize>() {
                if k > 0 {
                    return Ok(Classifier::Knn { k });
                }
            }
        }
        Err(Error::InvalidInput(format!("unknown classifier `{s}` (expected KNN<k> or QDA)")))
    }
}

impl From<Classifier> for String {
    fn from(c: Classifier) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Classifier {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A fitted model of either kind.
#[derive(Debug, Clone)]
pub enum Model {
    Knn(KnnModel),
    Qda(QdaModel),
}

impl Classifier {
    pub fn fit(&self, rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Model> {
        match *self {
            Classifier::Knn { k } => knn_fit(rows, labels, k).map(Model::Knn),
            Classifier::Qda => qda_fit(&rows, &labels).map(Model::Qda),
        }
    }
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> Label {
        match self {
            Model::Knn(m) => m.predict(x),
            Model::Qda(m) => m.predict(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in [Classifier::Knn { k: 5 }, Classifier::Knn { k: 3 }, Classifier::Qda] {
            assert_eq!(c.to_string().parse::<Classifier>().unwrap(), c);
        }
        assert_eq!("knn".parse::<Classifier>().unwrap(), Classifier::default());
        assert!("svm".parse::<Classifier>().is_err());
        assert!("KNN0".parse::<Classifier>().is_err());
        assert_eq!(serde_json::to_string(&Classifier::Qda).unwrap(), "\"QDA\"");
    }
}
