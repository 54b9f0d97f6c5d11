//! Classifiers, scoring, cross-validation and wrapper feature selection.

mod classifier;
mod cv;
mod knn;
mod matrix;
mod metrics;
mod qda;
mod select;

pub use classifier::{Classifier, Model};
pub use cv::{cross_validate, evaluate_fold, make_folds, CvScheme, EvalReport, Fold, DEFAULT_FOLDS};
pub use knn::{knn_fit, KnnModel, DEFAULT_K};
pub use matrix::{FeatureMatrix, Standardizer};
pub use metrics::f1_score;
pub use qda::{qda_fit, QdaModel, RIDGE_STEPS};
pub use select::{sa_select, SaConfig, Selection};
