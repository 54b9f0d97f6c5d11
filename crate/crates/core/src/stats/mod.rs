//! Nonparametric tests.

pub mod descriptive;
mod ks;
mod mann_whitney;

use serde::{Deserialize, Serialize};

pub use ks::{kolmogorov_sf, ks_normal_test, ks_statistic};
pub use mann_whitney::{mann_whitney, u_distribution, MannWhitney, EXACT_MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    NormalApprox,
    Asymptotic,
}

/// A test outcome as it appears in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p: f64,
    pub n1: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    pub method: TestMethod,
}
