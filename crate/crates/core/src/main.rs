use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use valence::config::ExperimentConfig;
use valence::ecg::HrvFeatures;
use valence::eeg::{asymmetry_report, EegFeatureVector};
use valence::error::{Error, Result};
use valence::fusion::report::{self, REPORT_FILE};
use valence::fusion::{
    build_feature_matrix, extract_dataset, extract_subject, population_members, run_experiment,
    trial_hrv, ModalitySet, Population, ReportBundle,
};
use valence::io::{atomic_write, read_subject, subject_dirs, validate_dataset};
use valence::ml::{sa_select, Classifier, CvScheme};
use valence::signal::Label;
use valence::synth::{gen_dataset, DatasetSpec};
use valence::temperature::temp_trial_feature;

#[derive(Parser)]
#[command(name = "valence", version, about = "Multimodal EEG, HRV and skin-temperature valence pipeline")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with a ground-truth sidecar.
    Synth {
        #[arg(long, default_value = "paper-shape")]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Override the number of subjects.
        #[arg(long)]
        subjects: Option<usize>,
    },
    /// Check a dataset directory and list its subjects.
    IngestValidate {
        #[arg(long)]
        data: PathBuf,
        /// Exit with code 2 when there are warnings.
        #[arg(long)]
        strict: bool,
    },
    /// The nineteen HRV variables of one or every trial of a subject.
    Hrv {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        trial: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-window EEG frequency-location features of one subject.
    EegFeatures {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-trial mean skin temperature of every subject with a temperature file.
    TempFeatures {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        subject: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymmetry-index table with significance marks.
    Asymmetry {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        population: Population,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated-annealing feature selection on one fused matrix.
    Select {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "ALL")]
        modalities: ModalitySet,
        #[arg(long, default_value = "KNN5")]
        classifier: Classifier,
        #[arg(long, default_value = "SI")]
        scheme: String,
        #[arg(long, default_value = "all")]
        population: Population,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment grid and write a report bundle.
    Classify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bundle directory; the report JSON goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG charts (and refresh the CSV tables) of a bundle.
    Report {
        #[arg(long)]
        bundle: PathBuf,
        /// Directory for the charts; defaults to the bundle directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

/// Write to stdout; a closed pipe is not an error.
fn print_out(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => atomic_write(p, text.as_bytes()),
        None => print_out(text),
    }
}

fn subject_dir(data: &Path, id: &str) -> Result<PathBuf> {
    let dir = data.join(id);
    if !dir.is_dir() {
        return Err(Error::InvalidInput(format!("subject {id} not found under {}", data.display())));
    }
    Ok(dir)
}

fn csv_row(values: impl IntoIterator<Item = String>) -> String {
    let mut s = values.into_iter().collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

fn hrv_cmd(data: &Path, subject: &str, trial: Option<&str>, cfg: &ExperimentConfig) -> Result<String> {
    let rec = read_subject(&subject_dir(data, subject)?)?;
    let ecg = rec
        .ecg
        .as_ref()
        .ok_or_else(|| Error::Infeasible(format!("subject {subject} has no ECG recording")))?;
    let trials: Vec<_> = match trial {
        Some(t) => vec![rec
            .trials
            .iter()
            .find(|x| x.trial_id == t)
            .ok_or_else(|| Error::InvalidInput(format!("trial {t} not found for subject {subject}")))?],
        None => rec.trials.iter().collect(),
    };
    let mut out = csv_row(
        ["subject", "trial_id", "label"]
            .into_iter()
            .chain(HrvFeatures::NAMES)
            .map(String::from),
    );
    for t in trials {
        let h = trial_hrv(ecg, t, cfg.hrv_context_s)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut row = vec![subject.to_string(), t.trial_id.clone(), t.label.to_string()];
        row.extend([h.mean_rr, h.median_rr, h.sdnn, h.rmssd].map(|v| format!("{v:.6}")));
        row.push(h.nn50.to_string());
        row.extend(
            [h.pnn50, h.vlf_abs, h.lf_abs, h.hf_abs, h.total_power, h.vlf_pct, h.lf_pct, h.hf_pct]
                .map(|v| format!("{v:.6}")),
        );
        row.extend([opt(h.lf_nu), opt(h.hf_nu), opt(h.lf_hf)]);
        row.extend([format!("{:.6}", h.sd1), format!("{:.6}", h.sd2), opt(h.sd1_sd2)]);
        out.push_str(&csv_row(row));
    }
    Ok(out)
}

fn eeg_cmd(data: &Path, subject: &str, cfg: &ExperimentConfig) -> Result<String> {
    let rec = read_subject(&subject_dir(data, subject)?)?;
    let f = extract_subject(&rec, cfg)?;
    let mut out = csv_row(
        ["subject", "trial_id", "label", "window"]
            .into_iter()
            .map(String::from)
            .chain(EegFeatureVector::names()),
    );
    for w in &f.windows {
        let mut row = vec![subject.to_string(), w.trial_id.clone(), w.label.to_string(), w.window_index.to_string()];
        row.extend(w.eeg.values.iter().map(|v| format!("{v:.6e}")));
        out.push_str(&csv_row(row));
    }
    Ok(out)
}

fn temp_cmd(data: &Path, subject: Option<&str>) -> Result<String> {
    let dirs = match subject {
        Some(s) => vec![subject_dir(data, s)?],
        None => subject_dirs(data)?,
    };
    let mut out = String::from("subject,trial_id,label,mean_temp,n_outliers_replaced\n");
    for d in dirs {
        let rec = read_subject(&d)?;
        let Some(temp) = &rec.temp else {
            if subject.is_some() {
                return Err(Error::Infeasible(format!("subject {} has no temperature recording", rec.meta.id)));
            }
            continue;
        };
        for t in &rec.trials {
            let f = temp_trial_feature(temp, t)?;
            let _ = writeln!(out, "{},{},{},{:.4},{}", rec.meta.id, f.trial_id, f.label, f.mean_temp, f.n_outliers_replaced);
        }
    }
    Ok(out)
}

fn asymmetry_cmd(data: &Path, cfg: &ExperimentConfig, population: Population) -> Result<String> {
    let (subjects, _) = extract_dataset(cfg, data)?;
    let members = population_members(&subjects, population)?;
    let rows: Vec<_> = members
        .iter()
        .flat_map(|s| s.trials.iter())
        .filter(|t| t.label != Label::Baseline)
        .map(|t| (t.hemispheres.clone(), t.label))
        .collect();
    Ok(asymmetry_report(&rows)?.to_csv())
}

fn select_cmd(
    data: &Path,
    cfg: &ExperimentConfig,
    set: ModalitySet,
    classifier: Classifier,
    scheme: &str,
    population: Population,
) -> Result<String> {
    let scheme = match scheme.parse::<CvScheme>()? {
        CvScheme::SubjectDependent { .. } => CvScheme::SubjectDependent { folds: cfg.folds },
        s => s,
    };
    let (subjects, _) = extract_dataset(cfg, data)?;
    let members = population_members(&subjects, population)?;
    let m = build_feature_matrix(&members, set, cfg.hrv_block)?;
    let sel = sa_select(&m, classifier, scheme, &cfg.sa, cfg.seed)?;
    let body = json!({
        "modalities": set,
        "classifier": classifier,
        "scheme": scheme,
        "population": population,
        "seed": cfg.seed,
        "config": cfg.to_map(),
        "selection": sel,
    });
    Ok(serde_json::to_string_pretty(&body)? + "\n")
}

fn report_cmd(bundle_dir: &Path, out: Option<&Path>) -> Result<String> {
    let path = bundle_dir.join(REPORT_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::schema(&path, None, e.to_string()))?;
    let bundle: ReportBundle = serde_json::from_str(&text)
        .map_err(|e| Error::schema(&path, Some(e.line() as u64), e.to_string()))?;
    let dir = out.unwrap_or(bundle_dir);
    let mut written = Vec::new();
    for (name, body) in report::tables(&bundle) {
        atomic_write(&dir.join(&name), body.as_bytes())?;
        written.push(name);
    }
    written.extend(report::write_charts(dir, &bundle)?);
    Ok(serde_json::to_string_pretty(&json!({ "written": written }))? + "\n")
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("cannot size thread pool: {e}")))?;
    }
    match cli.command {
        Command::Synth { preset, seed, out, subjects } => {
            let mut spec = DatasetSpec::preset(&preset)?;
            if let Some(n) = subjects {
                spec.subjects = n;
                spec.females = spec.females.min(n);
            }
            let truth = gen_dataset(&spec, seed, &out)?;
            let summary = json!({
                "out": out,
                "preset": preset,
                "seed": seed,
                "subjects": truth.subjects.iter().map(|s| &s.id).collect::<Vec<_>>(),
            });
            print_out(&(serde_json::to_string_pretty(&summary)? + "\n"))?;
        }
        Command::IngestValidate { data, strict } => {
            let r = validate_dataset(&data)?;
            print_out(&(serde_json::to_string_pretty(&r)? + "\n"))?;
            if strict && !r.warnings.is_empty() {
                return Err(Error::schema(&data, None, format!("{} validation warnings", r.warnings.len())));
            }
        }
        Command::Hrv { data, subject, trial, config, out } => {
            let cfg = load_config(config.as_deref())?;
            emit(out.as_deref(), &hrv_cmd(&data, &subject, trial.as_deref(), &cfg)?)?;
        }
        Command::EegFeatures { data, subject, config, out } => {
            let cfg = load_config(config.as_deref())?;
            emit(out.as_deref(), &eeg_cmd(&data, &subject, &cfg)?)?;
        }
        Command::TempFeatures { data, subject, out } => {
            emit(out.as_deref(), &temp_cmd(&data, subject.as_deref())?)?;
        }
        Command::Asymmetry { data, config, population, out } => {
            let cfg = load_config(config.as_deref())?;
            emit(out.as_deref(), &asymmetry_cmd(&data, &cfg, population)?)?;
        }
        Command::Select { data, config, modalities, classifier, scheme, population, out } => {
            let cfg = load_config(config.as_deref())?;
            emit(out.as_deref(), &select_cmd(&data, &cfg, modalities, classifier, &scheme, population)?)?;
        }
        Command::Classify { data, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let bundle = run_experiment(&cfg, &data)?;
            match out {
                Some(dir) => report::write_bundle(&dir, &bundle)?,
                None => print_out(&report::to_json(&bundle)?)?,
            }
        }
        Command::Report { bundle, out } => {
            print_out(&report_cmd(&bundle, out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let mut body = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
            if let Error::Schema { path, line, .. } = e.root() {
                body["path"] = json!(path);
                body["line"] = json!(line);
            }
            eprintln!("{body}");
            ExitCode::from(code as u8)
        }
    }
}
