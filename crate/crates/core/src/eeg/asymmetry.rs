use std::fmt;

use serde::{Deserialize, Serialize};

use super::features::RegionPowers;
use super::montage::{Band, Region};
use crate::error::{Error, Result};
use crate::signal::Label;
use crate::stats::{descriptive::mean, mann_whitney, TestResult};

/// `(right − left) / (right + left)`; `None` when both powers are zero.
pub fn asymmetry_index(right: f64, left: f64) -> Option<f64> {
    let sum = right + left;
    (sum > 0.0).then(|| ((right - left) / sum).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lobe {
    Pf,
    C,
    P,
    O,
}

impl Lobe {
    pub fn name(self) -> &'static str {
        match self {
            Lobe::Pf => "PF",
            Lobe::C => "C",
            Lobe::P => "P",
            Lobe::O => "O",
        }
    }

    pub fn sides(self) -> (Region, Region) {
        match self {
            Lobe::Pf => (Region::PfLeft, Region::PfRight),
            Lobe::C => (Region::CLeft, Region::CRight),
            Lobe::P => (Region::PLeft, Region::PRight),
            Lobe::O => (Region::OLeft, Region::ORight),
        }
    }
}

/// One homologous left/right comparison in one band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymmetryPair {
    pub lobe: Lobe,
    pub band: Band,
}

impl fmt::Display for AsymmetryPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.lobe.name(), self.band)
    }
}

pub const PAIRS: [AsymmetryPair; 9] = {
    const fn p(lobe: Lobe, band: Band) -> AsymmetryPair {
        AsymmetryPair { lobe, band }
    }
    [
        p(Lobe::Pf, Band::Alpha),
        p(Lobe::Pf, Band::Beta1),
        p(Lobe::Pf, Band::Beta2),
        p(Lobe::Pf, Band::Gamma),
        p(Lobe::C, Band::Gamma),
        p(Lobe::P, Band::Gamma),
        p(Lobe::O, Band::Beta1),
        p(Lobe::O, Band::Beta2),
        p(Lobe::O, Band::Gamma),
    ]
};

/// Left and right powers of the nine pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HemispherePowers {
    pub left: [f64; 9],
    pub right: [f64; 9],
}

impl HemispherePowers {
    pub fn from_powers(p: &RegionPowers) -> Self {
        let mut left = [0.0; 9];
        let mut right = [0.0; 9];
        for (i, pair) in PAIRS.iter().enumerate() {
            let (l, r) = pair.lobe.sides();
            left[i] = p.get(l, pair.band);
            right[i] = p.get(r, pair.band);
        }
        HemispherePowers { left, right }
    }

    pub fn indices(&self) -> [Option<f64>; 9] {
        std::array::from_fn(|i| asymmetry_index(self.right[i], self.left[i]))
    }
}

/// Significance mark used on bar annotations.
pub fn significance(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub pair: String,
    pub mean_ai_positive: f64,
    pub mean_ai_negative: f64,
    /// AI, positive vs negative rows.
    pub between: TestResult,
    /// Raw left vs right powers within the positive rows.
    pub within_positive: TestResult,
    pub within_negative: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryStats {
    pub pairs: Vec<PairStats>,
}

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_p(v: f64) -> String {
    format!("{v:.6e}")
}

impl AsymmetryStats {
    pub fn pair(&self, name: &str) -> Option<&PairStats> {
        self.pairs.iter().find(|p| p.pair == name)
    }

    pub const CSV_HEADER: &'static str = "pair,mean_ai_positive,mean_ai_negative,\
p_positive_vs_negative,sig_positive_vs_negative,p_left_vs_right_positive,sig_left_vs_right_positive,\
p_left_vs_right_negative,sig_left_vs_right_negative,n_positive,n_negative";

    /// Table shaped for AI bar charts with significance marks.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.pairs {
            let row = [
                p.pair.clone(),
                fmt_f(p.mean_ai_positive),
                fmt_f(p.mean_ai_negative),
                fmt_p(p.between.p),
                significance(p.between.p).into(),
                fmt_p(p.within_positive.p),
                significance(p.within_positive.p).into(),
                fmt_p(p.within_negative.p),
                significance(p.within_negative.p).into(),
                p.within_positive.n1.to_string(),
                p.within_negative.n1.to_string(),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Per-pair condition means and Mann-Whitney comparisons. Baseline rows are
/// ignored; rows with an undefined index are skipped for that pair only.
pub fn asymmetry_report(rows: &[(HemispherePowers, Label)]) -> Result<AsymmetryStats> {
    let count = |l: Label| rows.iter().filter(|r| r.1 == l).count();
    let (np, nn) = (count(Label::Positive), count(Label::Negative));
    if np < 2 || nn < 2 {
        return Err(Error::TooShort {
            what: "asymmetry rows per condition",
            needed: 2,
            got: np.min(nn),
        });
    }
    let mut pairs = Vec::with_capacity(PAIRS.len());
    for (i, pair) in PAIRS.iter().enumerate() {
        let ai = |l: Label| -> Vec<f64> {
            rows.iter()
                .filter(|r| r.1 == l)
                .filter_map(|r| asymmetry_index(r.0.right[i], r.0.left[i]))
                .collect()
        };
        let sides = |l: Label| -> (Vec<f64>, Vec<f64>) {
            rows.iter().filter(|r| r.1 == l).map(|r| (r.0.left[i], r.0.right[i])).unzip()
        };
        let (ai_p, ai_n) = (ai(Label::Positive), ai(Label::Negative));
        if ai_p.is_empty() || ai_n.is_empty() {
            return Err(Error::Infeasible(format!(
                "asymmetry index of {pair} undefined in every row of one condition"
            )));
        }
        let (lp, rp) = sides(Label::Positive);
        let (ln, rn) = sides(Label::Negative);
        pairs.push(PairStats {
            pair: pair.to_string(),
            mean_ai_positive: mean(&ai_p),
            mean_ai_negative: mean(&ai_n),
            between: mann_whitney(&ai_p, &ai_n)?.into(),
            within_positive: mann_whitney(&lp, &rp)?.into(),
            within_negative: mann_whitney(&ln, &rn)?.into(),
        });
    }
    Ok(AsymmetryStats { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(asymmetry_index(3.0, 3.0), Some(0.0));
        assert_eq!(asymmetry_index(2.0, 0.0), Some(1.0));
        assert_eq!(asymmetry_index(1.0, 3.0), Some(-0.5));
        assert_eq!(asymmetry_index(0.0, 0.0), None);
    }

    #[test]
    fn pair_names() {
        let names: Vec<String> = PAIRS.iter().map(|p| p.to_string()).collect();
        assert_eq!(names[0], "PF_Alpha");
        assert_eq!(names[5], "P_Gamma");
        assert_eq!(names[8], "O_Gamma");
    }

    fn row(left: f64, right: f64) -> HemispherePowers {
        HemispherePowers { left: [left; 9], right: [right; 9] }
    }

    #[test]
    fn identical_conditions_have_equal_means() {
        let rows: Vec<_> = [1.0, 2.0, 3.0]
            .iter()
            .flat_map(|&v| [(row(v, v + 1.0), Label::Positive), (row(v, v + 1.0), Label::Negative)])
            .collect();
        let s = asymmetry_report(&rows).unwrap();
        for p in &s.pairs {
            assert_eq!(p.mean_ai_positive, p.mean_ai_negative);
        }
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.starts_with("pair,"));
    }

    #[test]
    fn too_few_rows() {
        let rows = [(row(1.0, 2.0), Label::Positive), (row(1.0, 2.0), Label::Negative)];
        assert!(asymmetry_report(&rows).is_err());
    }

    #[test]
    fn marks() {
        assert_eq!(significance(0.2), "");
        assert_eq!(significance(0.04), "*");
        assert_eq!(significance(0.004), "**");
        assert_eq!(significance(0.0004), "***");
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn index_bounded_antisymmetric_scale_free(r in 1e-9f64..1e9, l in 1e-9f64..1e9, c in 1e-3f64..1e3) {
            let ai = asymmetry_index(r, l).unwrap();
            prop_assert!((-1.0..=1.0).contains(&ai));
            prop_assert_eq!(asymmetry_index(l, r).unwrap(), -ai);
            prop_assert!((asymmetry_index(c * r, c * l).unwrap() - ai).abs() <= 1e-12);
        }
    }
}
