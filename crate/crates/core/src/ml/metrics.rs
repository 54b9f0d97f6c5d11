use crate::error::{Error, Result};
use crate::signal::Label;

/// F1 score of the Positive class; 0 when there are no true positives.
pub fn f1_score(truth: &[Label], predicted: &[Label]) -> Result<f64> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (t, p) in truth.iter().zip(predicted) {
        match (*t == Label::Positive, *p == Label::Positive) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fneg += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    #[test]
    fn examples() {
        assert_eq!(f1_score(&[P, N, P], &[P, N, P]).unwrap(), 1.0);
        assert!((f1_score(&[P, N, P], &[P, P, N]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f1_score(&[P, N, P], &[N, N, N]).unwrap(), 0.0);
        assert!(f1_score(&[P], &[]).is_err());
    }

    use proptest::prelude::*;

    fn label(b: bool) -> Label {
        if b { P } else { N }
    }

    proptest! {
        #[test]
        fn bounded_and_perfect(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..100)) {
            let truth: Vec<Label> = pairs.iter().map(|p| label(p.0)).collect();
            let pred: Vec<Label> = pairs.iter().map(|p| label(p.1)).collect();
            let f = f1_score(&truth, &pred).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            let perfect = f1_score(&truth, &truth).unwrap();
            prop_assert_eq!(perfect, if truth.contains(&P) { 1.0 } else { 0.0 });
        }
    }
}
