use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::classifier::Classifier;
use super::cv::{cross_validate, CvScheme, EvalReport};
use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Annealing schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub t0: f64,
    pub alpha: f64,
    pub iterations: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig { t0: 0.1, alpha: 0.95, iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub mask: Vec<bool>,
    pub names: Vec<String>,
    /// Mean CV F1 of the returned mask.
    pub objective: f64,
    /// Mean CV F1 with every feature.
    pub baseline: f64,
    /// Distinct masks evaluated.
    pub evaluations: usize,
    pub report: EvalReport,
}

struct Objective<'a> {
    m: &'a FeatureMatrix,
    classifier: Classifier,
    scheme: CvScheme,
    seed: u64,
    cache: HashMap<Vec<bool>, EvalReport>,
}

impl Objective<'_> {
    fn eval(&mut self, mask: &[bool]) -> Result<f64> {
        if let Some(r) = self.cache.get(mask) {
            return Ok(r.mean_f1);
        }
        let sub = self.m.select_columns(mask)?;
        let mut r = cross_validate(&sub, self.scheme, self.classifier, self.seed)?;
        r.mask = mask.to_vec();
        let f = r.mean_f1;
        self.cache.insert(mask.to_vec(), r);
        Ok(f)
    }
}

/// Simulated-annealing wrapper search over feature masks, maximising mean
/// cross-validated F1. Starts from the all-features mask and returns the
/// best mask seen.
pub fn sa_select(
    m: &FeatureMatrix,
    classifier: Classifier,
    scheme: CvScheme,
    sa: &SaConfig,
    seed: u64,
) -> Result<Selection> {
    let d = m.d();
    if d < 2 {
        return Err(Error::InvalidInput(format!("feature selection needs at least 2 features, got {d}")));
    }
    if !(sa.t0 > 0.0 && sa.alpha > 0.0 && sa.alpha <= 1.0) {
        return Err(Error::InvalidInput("annealing needs t0 > 0 and 0 < alpha <= 1".into()));
    }
    let mut obj = Objective { m, classifier, scheme, seed, cache: HashMap::new() };
    let mut rng = rng::named(seed, "sa");
    let mut current = vec![true; d];
    let baseline = obj.eval(&current)?;
    let mut cur_f = baseline;
    let mut best = (current.clone(), baseline);
    let mut temp = sa.t0;
    for _ in 0..sa.iterations {
        let set = current.iter().filter(|&&b| b).count();
        let mut j = rng.random_range(0..if set == 1 { d - 1 } else { d });
        if set == 1 {
            // skip the only set bit so the mask never empties
            let only = current.iter().position(|&b| b).expect("one bit set");
            if j >= only {
                j += 1;
            }
        }
        let mut cand = current.clone();
        cand[j] = !cand[j];
        let f = obj.eval(&cand)?;
        let accept = f >= cur_f || rng.random::<f64>() < (-(cur_f - f) / temp).exp();
        if accept {
            current = cand;
            cur_f = f;
            if f > best.1 {
                best = (current.clone(), f);
            }
        }
        temp *= sa.alpha;
    }
    let (mask, objective) = best;
    let report = obj.cache[&mask].clone();
    Ok(Selection {
        names: m.names().iter().zip(&mask).filter(|(_, &b)| b).map(|(n, _)| n.clone()).collect(),
        mask,
        objective,
        baseline,
        evaluations: obj.cache.len(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{Label, Sex};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn noisy(seed: u64) -> FeatureMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = FeatureMatrix::new(vec!["signal".into(), "noise".into()]).unwrap();
        for s in 0..4 {
            for t in 0..10 {
                let label = if t % 2 == 0 { Label::Positive } else { Label::Negative };
                let shift = if label == Label::Positive { 2.0 } else { -2.0 };
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                m.push(vec![shift + 0.5 * a, b], label, &format!("S{s}"), Sex::Female, &format!("t{t}"))
                    .unwrap();
            }
        }
        m
    }

    #[test]
    fn zero_iterations_returns_baseline() {
        let m = noisy(1);
        let sa = SaConfig { iterations: 0, ..SaConfig::default() };
        let s = sa_select(&m, Classifier::default(), CvScheme::SubjectIndependent, &sa, 5).unwrap();
        assert_eq!(s.mask, [true, true]);
        let r = cross_validate(&m, CvScheme::SubjectIndependent, Classifier::default(), 5).unwrap();
        assert_eq!(s.objective, r.mean_f1);
        assert_eq!(s.baseline, r.mean_f1);
    }

    #[test]
    fn keeps_the_informative_feature() {
        let m = noisy(2);
        let sa = SaConfig { iterations: 30, ..SaConfig::default() };
        let s = sa_select(&m, Classifier::Qda, CvScheme::SubjectIndependent, &sa, 11).unwrap();
        assert!(s.mask[0]);
        assert!(s.objective >= s.baseline);
        assert!(s.evaluations <= 3);
    }

    #[test]
    fn deterministic() {
        let m = noisy(3);
        let sa = SaConfig { iterations: 20, ..SaConfig::default() };
        let a = sa_select(&m, Classifier::default(), CvScheme::SubjectDependent { folds: 5 }, &sa, 4).unwrap();
        let b = sa_select(&m, Classifier::default(), CvScheme::SubjectDependent { folds: 5 }, &sa, 4).unwrap();
        assert_eq!(a, b);
    }
}
