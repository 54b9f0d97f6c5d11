use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{TestMethod, TestResult};
use crate::error::{Error, Result};

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// `min(u_x, n1·n2 − u_x)`.
    pub u: f64,
    /// Pairs with `x > y`, ties counting one half.
    pub u_x: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub n1: usize,
    pub n2: usize,
    pub method: TestMethod,
}

impl From<MannWhitney> for TestResult {
    fn from(m: MannWhitney) -> Self {
        TestResult {
            statistic: m.u,
            p: m.p,
            n1: m.n1,
            n2: Some(m.n2),
            method: m.method,
        }
    }
}

/// Midranks of the pooled sample plus the tie-group sizes.
fn midranks(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = x.iter().chain(y).copied().zip(0..).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for item in &pooled[i..j] {
            ranks[item.1] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Number of rank arrangements giving each value of U, for sample sizes
/// `m` and `n` (index = U).
pub fn u_distribution(m: usize, n: usize) -> Vec<f64> {
    // counts[j][u] for the current m, j = 0..=n
    let max_u = m * n;
    let mut prev: Vec<Vec<f64>> = (0..=n)
        .map(|_| {
            let mut v = vec![0.0; max_u + 1];
            v[0] = 1.0;
            v
        })
        .collect();
    for i in 1..=m {
        let mut cur = vec![vec![0.0; max_u + 1]; n + 1];
        cur[0][0] = 1.0;
        for j in 1..=n {
            for u in 0..=i * j {
                // largest element belongs to x (contributes j) or to y
                let from_x = if u >= j { prev[j][u - j] } else { 0.0 };
                cur[j][u] = from_x + cur[j - 1][u];
            }
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

/// Two-sided Mann-Whitney U test.
///
/// Exact when the combined size is at most [`EXACT_MAX_N`] and there are no
/// ties; otherwise the normal approximation with tie-corrected variance and
/// a continuity correction.
pub fn mann_whitney(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidInput("Mann-Whitney test needs two nonempty samples".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("Mann-Whitney samples must be finite".into()));
    }
    let (n1, n2) = (x.len(), y.len());
    let (ranks, ties) = midranks(x, y);
    let r1: f64 = ranks[..n1].iter().sum();
    let u_x = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let prod = (n1 * n2) as f64;
    let u = u_x.min(prod - u_x);

    if n1 + n2 <= EXACT_MAX_N && ties.is_empty() {
        let dist = u_distribution(n1, n2);
        let total: f64 = dist.iter().sum();
        let k = u.round() as usize;
        let tail: f64 = dist[..=k].iter().sum();
        return Ok(MannWhitney {
            u,
            u_x,
            p: (2.0 * tail / total).min(1.0),
            n1,
            n2,
            method: TestMethod::Exact,
        });
    }

    let n = (n1 + n2) as f64;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = prod / 12.0 * ((n + 1.0) - tie_term);
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u_x - prod / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::standard();
        (2.0 * normal.sf(z)).min(1.0)
    };
    Ok(MannWhitney {
        u,
        u_x,
        p,
        n1,
        n2,
        method: TestMethod::NormalApprox,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_exact_case() {
        let r = mann_whitney(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, TestMethod::Exact);
        assert!((r.p - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = mann_whitney(&x, &x).unwrap();
        assert_eq!(r.u, 12.5);
        assert_eq!(r.method, TestMethod::NormalApprox);
        assert!(r.p > 0.9);
    }

    #[test]
    fn distribution_sums_to_binomial() {
        let d = u_distribution(4, 6);
        assert_eq!(d.iter().sum::<f64>(), 210.0);
        assert_eq!(d.len(), 25);
        // symmetric around m·n/2
        for u in 0..d.len() {
            assert_eq!(d[u], d[d.len() - 1 - u]);
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(mann_whitney(&[], &[1.0]).is_err());
    }

    #[test]
    fn all_tied_gives_p_one() {
        let r = mann_whitney(&[2.0; 12], &[2.0; 15]).unwrap();
        assert_eq!(r.p, 1.0);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn swap_and_monotone_invariance(
            x in prop::collection::vec(-50.0f64..50.0, 1..30),
            y in prop::collection::vec(-50.0f64..50.0, 1..30),
        ) {
            let a = mann_whitney(&x, &y).unwrap();
            let b = mann_whitney(&y, &x).unwrap();
            prop_assert!(a.p > 0.0 && a.p <= 1.0);
            prop_assert_eq!(a.u, b.u);
            prop_assert!((a.p - b.p).abs() < 1e-12);
            prop_assert_eq!(a.u_x + b.u_x, (x.len() * y.len()) as f64);
            let ex: Vec<f64> = x.iter().map(|v| (v / 10.0).exp()).collect();
            let ey: Vec<f64> = y.iter().map(|v| (v / 10.0).exp()).collect();
            let c = mann_whitney(&ex, &ey).unwrap();
            prop_assert_eq!(a.u, c.u);
            prop_assert!((a.p - c.p).abs() < 1e-12);
        }
    }
}
