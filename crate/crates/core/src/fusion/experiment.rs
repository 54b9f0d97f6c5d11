use std::collections::BTreeMap;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extract::{extract_subject, SubjectFeatures};
use super::matrix::build_feature_matrix;
use super::{ModalitySet, Population};
use crate::config::ExperimentConfig;
use crate::ecg::HrvFeatures;
use crate::eeg::{asymmetry_report, AsymmetryStats};
use crate::error::{Error, Result};
use crate::io::{read_subject, subject_dirs, SubjectRecord};
use crate::ml::{cross_validate, sa_select, Classifier, CvScheme, EvalReport};
use crate::signal::{zscore, Label, Modality};
use crate::stats::descriptive::{mean, sample_sd};
use crate::stats::{ks_normal_test, mann_whitney, TestResult};

pub const TOOL: &str = "valence";

/// A subject left out of the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub subject: String,
    pub missing: Vec<Modality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    /// KS of the z-scored trial means against the standard normal.
    pub normality: Option<TestResult>,
}

/// Trial-level mean temperature compared across conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureStats {
    pub conditions: BTreeMap<Label, ConditionSummary>,
    pub positive_vs_negative: TestResult,
    pub positive_vs_baseline: Option<TestResult>,
    pub negative_vs_baseline: Option<TestResult>,
}

/// One HRV variable, positive vs negative, one value per subject and
/// condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HrvVariableStats {
    pub variable: String,
    pub mean_positive: f64,
    pub mean_negative: f64,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationReport {
    pub population: Population,
    pub subjects: Vec<String>,
    pub asymmetry: Option<AsymmetryStats>,
    pub temperature: Option<TemperatureStats>,
    pub hrv: Vec<HrvVariableStats>,
    /// Tables that could not be computed, with the reason.
    pub notes: Vec<String>,
}

/// Mean temperature of one stimulus across subjects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTemperature {
    pub trial_id: String,
    pub label: Label,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub mask: Vec<bool>,
    pub features: Vec<String>,
    pub objective: f64,
    pub baseline: f64,
    pub evaluations: usize,
}

/// One point of the experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub modalities: ModalitySet,
    pub classifier: Classifier,
    pub scheme: CvScheme,
    pub population: Population,
    pub report: EvalReport,
    pub selection: Option<SelectionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub tool: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub subjects: Vec<String>,
    pub exclusions: Vec<Exclusion>,
    pub populations: Vec<PopulationReport>,
    pub per_trial_temperature: Vec<TrialTemperature>,
    pub cells: Vec<Cell>,
}

impl ReportBundle {
    pub fn cell(&self, m: ModalitySet, c: Classifier, s: CvScheme, p: Population) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|x| x.modalities == m && x.classifier == c && x.scheme == s && x.population == p)
    }
}

enum Outcome {
    Kept(Box<SubjectFeatures>),
    Excluded(Exclusion),
}

fn process(rec: &SubjectRecord, cfg: &ExperimentConfig) -> Result<Outcome> {
    let missing = rec.missing();
    if !missing.is_empty() {
        warn!("excluding subject {}: missing {:?}", rec.meta.id, missing);
        return Ok(Outcome::Excluded(Exclusion { subject: rec.meta.id.clone(), missing }));
    }
    Ok(Outcome::Kept(Box::new(extract_subject(rec, cfg)?)))
}

/// Read, align and extract every subject under `data`. Subjects missing a
/// modality are returned as exclusions; both lists are sorted by id.
pub fn extract_dataset(cfg: &ExperimentConfig, data: &Path) -> Result<(Vec<SubjectFeatures>, Vec<Exclusion>)> {
    let dirs = subject_dirs(data)?;
    if dirs.is_empty() {
        return Err(Error::Infeasible(format!("no subject directories under {}", data.display())));
    }
    let outcomes = dirs
        .par_iter()
        .map(|d| process(&read_subject(d)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(split(outcomes))
}

/// [`extract_dataset`] on subjects already in memory.
pub fn extract_records(cfg: &ExperimentConfig, records: &[SubjectRecord]) -> Result<(Vec<SubjectFeatures>, Vec<Exclusion>)> {
    let outcomes = records.par_iter().map(|r| process(r, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(split(outcomes))
}

fn split(outcomes: Vec<Outcome>) -> (Vec<SubjectFeatures>, Vec<Exclusion>) {
    let mut subjects = Vec::new();
    let mut exclusions = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Kept(s) => subjects.push(*s),
            Outcome::Excluded(e) => exclusions.push(e),
        }
    }
    subjects.sort_by(|a, b| a.id.cmp(&b.id));
    exclusions.sort_by(|a, b| a.subject.cmp(&b.subject));
    (subjects, exclusions)
}

/// Read, align and extract every subject under `data`, then run the grid.
pub fn run_experiment(cfg: &ExperimentConfig, data: &Path) -> Result<ReportBundle> {
    cfg.validate()?;
    let (subjects, exclusions) = extract_dataset(cfg, data)?;
    run_grid(cfg, subjects, exclusions)
}

/// [`run_experiment`] on subjects already in memory.
pub fn run_experiment_on(cfg: &ExperimentConfig, records: &[SubjectRecord]) -> Result<ReportBundle> {
    cfg.validate()?;
    let (subjects, exclusions) = extract_records(cfg, records)?;
    run_grid(cfg, subjects, exclusions)
}

/// Members of a population, or an error when there are none.
pub fn population_members(subjects: &[SubjectFeatures], p: Population) -> Result<Vec<SubjectFeatures>> {
    let members: Vec<SubjectFeatures> = subjects.iter().filter(|s| p.admits(s.sex)).cloned().collect();
    if members.is_empty() {
        return Err(Error::Infeasible(format!("population `{p}` has no subjects")));
    }
    Ok(members)
}

/// Statistics tables and the classification grid over extracted subjects.
pub fn run_grid(cfg: &ExperimentConfig, subjects: Vec<SubjectFeatures>, exclusions: Vec<Exclusion>) -> Result<ReportBundle> {
    info!("{} subjects kept, {} excluded", subjects.len(), exclusions.len());

    let mut by_population = Vec::new();
    for &p in &cfg.populations {
        by_population.push((p, population_members(&subjects, p)?));
    }
    let populations = by_population.iter().map(|(p, m)| population_report(*p, m)).collect();

    let mut grid = Vec::new();
    for (pi, (p, _)) in by_population.iter().enumerate() {
        for &m in &cfg.modalities {
            for &c in &cfg.classifiers {
                for &s in &cfg.schemes {
                    grid.push((pi, *p, m, c, s));
                }
            }
        }
    }
    let cells = grid
        .par_iter()
        .map(|&(pi, p, m, c, s)| {
            let what = || format!("cell {m} / {c} / {s} / {p}");
            let matrix = build_feature_matrix(&by_population[pi].1, m, cfg.hrv_block).map_err(|e| e.context(what()))?;
            let report = cross_validate(&matrix, s, c, cfg.seed).map_err(|e| e.context(what()))?;
            let selection = if cfg.sa_enabled && matrix.d() >= 2 {
                let sel = sa_select(&matrix, c, s, &cfg.sa, cfg.seed).map_err(|e| e.context(what()))?;
                Some(SelectionSummary {
                    mask: sel.mask,
                    features: sel.names,
                    objective: sel.objective,
                    baseline: sel.baseline,
                    evaluations: sel.evaluations,
                })
            } else {
                None
            };
            Ok(Cell { modalities: m, classifier: c, scheme: s, population: p, report, selection })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ReportBundle {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.to_map(),
        seed: cfg.seed,
        subjects: subjects.iter().map(|s| s.id.clone()).collect(),
        exclusions,
        populations,
        per_trial_temperature: per_trial_temperature(&subjects),
        cells,
    })
}

pub fn population_report(population: Population, members: &[SubjectFeatures]) -> PopulationReport {
    let mut notes = Vec::new();
    let rows: Vec<_> = members
        .iter()
        .flat_map(|s| s.trials.iter())
        .filter(|t| t.label != Label::Baseline)
        .map(|t| (t.hemispheres.clone(), t.label))
        .collect();
    let asymmetry = asymmetry_report(&rows)
        .map_err(|e| notes.push(format!("asymmetry: {e}")))
        .ok();
    let temperature = temperature_stats(members)
        .map_err(|e| notes.push(format!("temperature: {e}")))
        .ok();
    let hrv = hrv_stats(members).unwrap_or_else(|e| {
        notes.push(format!("hrv: {e}"));
        Vec::new()
    });
    PopulationReport {
        population,
        subjects: members.iter().map(|s| s.id.clone()).collect(),
        asymmetry,
        temperature,
        hrv,
        notes,
    }
}

fn temperature_stats(members: &[SubjectFeatures]) -> Result<TemperatureStats> {
    let values = |l: Label| -> Vec<f64> {
        members
            .iter()
            .flat_map(|s| s.trials.iter())
            .filter(|t| t.label == l)
            .map(|t| t.temperature.mean_temp)
            .collect()
    };
    let (pos, neg, base) = (values(Label::Positive), values(Label::Negative), values(Label::Baseline));
    let mut conditions = BTreeMap::new();
    for (l, v) in [(Label::Positive, &pos), (Label::Negative, &neg), (Label::Baseline, &base)] {
        if v.is_empty() {
            continue;
        }
        let normality = zscore(v).ok().and_then(|z| ks_normal_test(&z.values).ok());
        conditions.insert(
            l,
            ConditionSummary {
                n: v.len(),
                mean: mean(v),
                sd: if v.len() > 1 { sample_sd(v) } else { 0.0 },
                normality,
            },
        );
    }
    let versus = |a: &[f64], b: &[f64]| mann_whitney(a, b).ok().map(TestResult::from);
    Ok(TemperatureStats {
        conditions,
        positive_vs_negative: mann_whitney(&pos, &neg)?.into(),
        positive_vs_baseline: versus(&pos, &base),
        negative_vs_baseline: versus(&neg, &base),
    })
}

fn hrv_stats(members: &[SubjectFeatures]) -> Result<Vec<HrvVariableStats>> {
    let values = |l: Label| -> Vec<[f64; 19]> {
        members
            .iter()
            .flat_map(|s| s.conditions.iter())
            .filter(|c| c.label == l)
            .map(|c| c.features.values())
            .collect()
    };
    let (pos, neg) = (values(Label::Positive), values(Label::Negative));
    HrvFeatures::NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let a: Vec<f64> = pos.iter().map(|r| r[j]).collect();
            let b: Vec<f64> = neg.iter().map(|r| r[j]).collect();
            Ok(HrvVariableStats {
                variable: name.to_string(),
                mean_positive: mean(&a),
                mean_negative: mean(&b),
                test: mann_whitney(&a, &b)?.into(),
            })
        })
        .collect()
}

fn per_trial_temperature(subjects: &[SubjectFeatures]) -> Vec<TrialTemperature> {
    let mut groups: BTreeMap<(String, Label), Vec<f64>> = BTreeMap::new();
    for t in subjects.iter().flat_map(|s| s.trials.iter()) {
        groups.entry((t.trial_id.clone(), t.label)).or_default().push(t.temperature.mean_temp);
    }
    groups
        .into_iter()
        .map(|((trial_id, label), v)| TrialTemperature {
            trial_id,
            label,
            n: v.len(),
            mean: mean(&v),
            sd: if v.len() > 1 { sample_sd(&v) } else { 0.0 },
        })
        .collect()
}
