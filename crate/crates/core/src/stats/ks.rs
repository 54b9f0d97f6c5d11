use statrs::distribution::{ContinuousCDF, Normal};

use super::{TestMethod, TestResult};
use crate::error::{Error, Result};

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges fast for small arguments.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=8)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (-j * j * c).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Largest distance between the empirical CDF of `x` and `cdf`.
pub fn ks_statistic(x: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// One-sample Kolmogorov-Smirnov test against the standard normal.
///
/// Inputs are expected to be z-scored already. The p-value uses the
/// asymptotic Kolmogorov distribution at `sqrt(n) · D`.
pub fn ks_normal_test(x: &[f64]) -> Result<TestResult> {
    if x.len() < 3 {
        return Err(Error::TooShort {
            what: "KS sample",
            needed: 3,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("KS sample must be finite".into()));
    }
    let normal = Normal::standard();
    let d = ks_statistic(x, |v| normal.cdf(v));
    Ok(TestResult {
        statistic: d,
        p: kolmogorov_sf((x.len() as f64).sqrt() * d),
        n1: x.len(),
        n2: None,
        method: TestMethod::Asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_branches_agree() {
        // both series are valid everywhere; compare near the switch point
        for lambda in [0.9, 1.0, 1.1, 1.18, 1.25] {
            let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
            let small: f64 = 1.0
                - (2.0 * std::f64::consts::PI).sqrt() / lambda
                    * (1..=50)
                        .map(|k| {
                            let j = (2 * k - 1) as f64;
                            (-j * j * c).exp()
                        })
                        .sum::<f64>();
            let large: f64 = 2.0
                * (1..=200)
                    .map(|k| {
                        let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                        s * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
                    })
                    .sum::<f64>();
            assert!((small - large).abs() < 1e-12);
            assert!((kolmogorov_sf(lambda) - large).abs() < 1e-12);
        }
        // familiar critical value
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn three_points_at_zero() {
        let r = ks_normal_test(&[-1e-9, 0.0, 1e-9]).unwrap();
        // F_emp jumps from 0 to 1 within 2e-9 of the origin where Φ = 1/2
        assert!((r.statistic - 0.5).abs() < 1e-8);
    }

    #[test]
    fn quantile_sample_fits() {
        let normal = Normal::standard();
        let n = 100;
        let x: Vec<f64> = (1..=n)
            .map(|i| normal.inverse_cdf((i as f64 - 0.5) / n as f64))
            .collect();
        let r = ks_normal_test(&x).unwrap();
        assert!(r.statistic <= 0.01);
        assert!(r.p > 0.9);
    }

    #[test]
    fn too_short() {
        assert!(ks_normal_test(&[0.1, 0.2]).is_err());
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn statistic_bounded_and_order_free(mut x in prop::collection::vec(-4.0f64..4.0, 3..100)) {
            let cdf = |v: f64| 1.0 / (1.0 + (-1.7 * v).exp());
            let d = ks_statistic(&x, cdf);
            prop_assert!(d > 0.0 && d <= 1.0);
            x.reverse();
            prop_assert_eq!(d, ks_statistic(&x, cdf));
            // never below the largest single-step gap
            prop_assert!(d >= 0.5 / x.len() as f64);
        }
    }
}
