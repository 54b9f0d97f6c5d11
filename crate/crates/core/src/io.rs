//! On-disk dataset layout: one directory per subject holding `eeg.csv`,
//! `ecg.csv`, `temp.csv`, `trials.csv` and `meta.json`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{
    Label, Modality, MultiChannelRecording, Sex, SubjectMeta, TimeSeries, TrialSpec, Unit,
};

pub const EEG_FILE: &str = "eeg.csv";
pub const ECG_FILE: &str = "ecg.csv";
pub const TEMP_FILE: &str = "temp.csv";
pub const TRIALS_FILE: &str = "trials.csv";
pub const META_FILE: &str = "meta.json";

pub const ECG_COLUMN: &str = "ecg_mv";
pub const TEMP_COLUMN: &str = "temp_c";
const TRIALS_HEADER: [&str; 4] = ["trial_id", "start_s", "duration_s", "label"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eeg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MetaFile {
    id: String,
    sex: Sex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    age: Option<f64>,
    rates: Rates,
}

/// Everything recorded for one subject. Any modality may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecord {
    pub meta: SubjectMeta,
    pub eeg: Option<MultiChannelRecording>,
    pub ecg: Option<TimeSeries>,
    pub temp: Option<TimeSeries>,
    pub trials: Vec<TrialSpec>,
}

impl SubjectRecord {
    /// Modalities without data.
    pub fn missing(&self) -> Vec<Modality> {
        let mut out = Vec::new();
        if self.eeg.is_none() {
            out.push(Modality::Eeg);
        }
        if self.ecg.is_none() {
            out.push(Modality::Ecg);
        }
        if self.temp.is_none() {
            out.push(Modality::Temp);
        }
        out
    }

    fn rates(&self) -> Rates {
        Rates {
            eeg: self.eeg.as_ref().map(|r| r.rate()),
            ecg: self.ecg.as_ref().map(|r| r.rate()),
            temp: self.temp.as_ref().map(|r| r.rate()),
        }
    }
}

/// Write `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Build a directory tree under a temporary sibling of `out` and rename it
/// into place once `fill` succeeds. `out` must not exist or be empty.
pub fn atomic_dir<T>(out: &Path, fill: impl FnOnce(&Path) -> Result<T>) -> Result<T> {
    if out.exists() {
        let empty = out.is_dir() && fs::read_dir(out)?.next().is_none();
        if !empty {
            return Err(Error::InvalidInput(format!(
                "output directory {} already exists and is not empty",
                out.display()
            )));
        }
    }
    let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let tmp = tempfile::Builder::new().prefix(".partial-").tempdir_in(parent)?;
    let value = fill(tmp.path())?;
    if out.exists() {
        fs::remove_dir(out)?;
    }
    let kept = tmp.keep();
    fs::rename(&kept, out)?;
    Ok(value)
}

fn series_csv(t0: f64, rate: f64, header: &[&str], columns: &[&[f64]], decimals: usize) -> String {
    let n = columns.first().map_or(0, |c| c.len());
    let mut s = String::with_capacity(n * (columns.len() * 10 + 12));
    s.push_str("t_s");
    for h in header {
        s.push(',');
        s.push_str(h);
    }
    s.push('\n');
    for i in 0..n {
        let _ = write!(s, "{}", t0 + i as f64 / rate);
        for c in columns {
            let _ = write!(s, ",{:.*}", decimals, c[i]);
        }
        s.push('\n');
    }
    s
}

/// Write a subject directory.
pub fn write_subject(dir: &Path, rec: &SubjectRecord) -> Result<()> {
    fs::create_dir_all(dir)?;
    let meta = MetaFile {
        id: rec.meta.id.clone(),
        sex: rec.meta.sex,
        age: rec.meta.age,
        rates: rec.rates(),
    };
    atomic_write(&dir.join(META_FILE), serde_json::to_string_pretty(&meta)?.as_bytes())?;

    let mut trials = String::from("trial_id,start_s,duration_s,label\n");
    for t in &rec.trials {
        let _ = writeln!(trials, "{},{},{},{}", t.trial_id, t.start, t.duration, t.label);
    }
    atomic_write(&dir.join(TRIALS_FILE), trials.as_bytes())?;

    if let Some(eeg) = &rec.eeg {
        let labels: Vec<&str> = eeg.labels().collect();
        let cols: Vec<&[f64]> = eeg.channels().iter().map(|c| c.samples()).collect();
        let csv = series_csv(eeg.t0(), eeg.rate(), &labels, &cols, 4);
        atomic_write(&dir.join(EEG_FILE), csv.as_bytes())?;
    }
    if let Some(ecg) = &rec.ecg {
        let csv = series_csv(ecg.t0(), ecg.rate(), &[ECG_COLUMN], &[ecg.samples()], 5);
        atomic_write(&dir.join(ECG_FILE), csv.as_bytes())?;
    }
    if let Some(temp) = &rec.temp {
        let csv = series_csv(temp.t0(), temp.rate(), &[TEMP_COLUMN], &[temp.samples()], 4);
        atomic_write(&dir.join(TEMP_FILE), csv.as_bytes())?;
    }
    Ok(())
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::schema(path, None, e.to_string()))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    Error::schema(path, line, e.to_string())
}

fn parse_f64(path: &Path, line: u64, column: &str, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::schema(
            path,
            Some(line),
            format!("column {column}: `{field}` is not a finite number"),
        )),
    }
}

/// Columns of a uniformly sampled CSV: `(t0, columns, names)`. The time
/// column must follow `t0 + i / rate`.
fn read_series(path: &Path, rate: f64, expected: Option<&[&str]>) -> Result<(f64, Vec<Vec<f64>>, Vec<String>)> {
    let mut rdr = reader(path)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("t_s") {
        return Err(Error::schema(path, Some(1), "first column must be `t_s`"));
    }
    let names: Vec<String> = header[1..].to_vec();
    if names.is_empty() {
        return Err(Error::schema(path, Some(1), "no signal columns"));
    }
    if let Some(exp) = expected {
        if names != exp {
            return Err(Error::schema(
                path,
                Some(1),
                format!("expected header t_s,{}", exp.join(",")),
            ));
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
        return Err(Error::schema(path, Some(1), format!("duplicate column `{dup}`")));
    }
    let mut cols = vec![Vec::new(); names.len()];
    let mut t0 = 0.0;
    let mut record = csv::StringRecord::new();
    let mut i = 0usize;
    while rdr.read_record(&mut record).map_err(|e| csv_err(path, e))? {
        let line = record.position().map_or(i as u64 + 2, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::schema(
                path,
                Some(line),
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let t = parse_f64(path, line, "t_s", &record[0])?;
        if i == 0 {
            t0 = t;
        } else {
            let want = t0 + i as f64 / rate;
            if (t - want).abs() > 1e-6 * want.abs().max(1.0) + 1e-3 / rate {
                return Err(Error::schema(
                    path,
                    Some(line),
                    format!("t_s = {t} does not match rate {rate} Hz (expected {want})"),
                ));
            }
        }
        for (j, field) in record.iter().skip(1).enumerate() {
            cols[j].push(parse_f64(path, line, &names[j], field)?);
        }
        i += 1;
    }
    if i == 0 {
        return Err(Error::schema(path, None, "no data rows"));
    }
    Ok((t0, cols, names))
}

fn read_trials(path: &Path) -> Result<Vec<TrialSpec>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != TRIALS_HEADER {
        return Err(Error::schema(path, Some(1), format!("expected header {}", TRIALS_HEADER.join(","))));
    }
    let mut out: Vec<TrialSpec> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(i as u64 + 2, |p| p.line());
        let start = parse_f64(path, line, "start_s", &rec[1])?;
        let duration = parse_f64(path, line, "duration_s", &rec[2])?;
        let label: Label = rec[3].parse().map_err(|e: Error| Error::schema(path, Some(line), e.to_string()))?;
        let t = TrialSpec::new(&rec[0], start, duration, label)
            .map_err(|e| Error::schema(path, Some(line), e.to_string()))?;
        if t.trial_id.is_empty() || out.iter().any(|o| o.trial_id == t.trial_id) {
            return Err(Error::schema(path, Some(line), format!("trial id `{}` empty or repeated", t.trial_id)));
        }
        out.push(t);
    }
    Ok(out)
}

fn read_meta(path: &Path) -> Result<MetaFile> {
    let text = fs::read_to_string(path)?;
    let meta: MetaFile = serde_json::from_str(&text).map_err(|e| {
        Error::schema(path, Some(e.line() as u64), e.to_string())
    })?;
    if meta.id.trim().is_empty() {
        return Err(Error::schema(path, None, "subject id must be nonempty"));
    }
    Ok(meta)
}

fn need_rate(path: &Path, rate: Option<f64>, what: &str) -> Result<f64> {
    match rate {
        Some(r) if r.is_finite() && r > 0.0 => Ok(r),
        _ => Err(Error::schema(path, None, format!("meta.json lacks a positive rates.{what}"))),
    }
}

/// Load one subject directory. Missing signal files are allowed and show
/// up as `None`; malformed files are schema errors.
pub fn read_subject(dir: &Path) -> Result<SubjectRecord> {
    let meta_path = dir.join(META_FILE);
    let meta = read_meta(&meta_path)?;
    let subject = SubjectMeta::new(meta.id.clone(), meta.sex, meta.age)?;
    let trials = read_trials(&dir.join(TRIALS_FILE))?;

    let eeg_path = dir.join(EEG_FILE);
    let eeg = if eeg_path.exists() {
        let rate = need_rate(&meta_path, meta.rates.eeg, "eeg")?;
        let (t0, cols, names) = read_series(&eeg_path, rate, None)?;
        let channels = cols
            .into_iter()
            .zip(names)
            .map(|(c, n)| TimeSeries::with_start(c, rate, t0, Unit::Microvolt, n))
            .collect::<Result<Vec<_>>>()?;
        Some(
            MultiChannelRecording::new(channels, subject.clone(), Modality::Eeg)
                .map_err(|e| Error::schema(&eeg_path, None, e.to_string()))?,
        )
    } else {
        None
    };
    let single = |file: &str, column: &str, rate: Option<f64>, what: &str, unit: Unit| -> Result<Option<TimeSeries>> {
        let path = dir.join(file);
        if !path.exists() {
            return Ok(None);
        }
        let rate = need_rate(&meta_path, rate, what)?;
        let (t0, mut cols, _) = read_series(&path, rate, Some(&[column]))?;
        Ok(Some(TimeSeries::with_start(cols.remove(0), rate, t0, unit, column)?))
    };
    let ecg = single(ECG_FILE, ECG_COLUMN, meta.rates.ecg, "ecg", Unit::Millivolt)?;
    let temp = single(TEMP_FILE, TEMP_COLUMN, meta.rates.temp, "temp", Unit::Celsius)?;
    Ok(SubjectRecord { meta: subject, eeg, ecg, temp, trials })
}

/// Subject directories of a dataset (those holding `meta.json`), sorted.
pub fn subject_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::schema(root, None, "dataset directory does not exist"));
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.join(META_FILE).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::schema(root, None, "no subject directories with meta.json"));
    }
    Ok(dirs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub id: String,
    pub sex: Sex,
    pub trials: usize,
    pub channels: usize,
    pub missing: Vec<Modality>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subjects: Vec<SubjectSummary>,
    pub warnings: Vec<String>,
}

/// Parse every subject and check trial coverage. Schema violations are
/// errors; a trial that a present modality does not cover is a warning.
pub fn validate_dataset(root: &Path) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let mut ids = std::collections::HashSet::new();
    for dir in subject_dirs(root)? {
        let rec = read_subject(&dir)?;
        if !ids.insert(rec.meta.id.clone()) {
            return Err(Error::schema(dir.join(META_FILE), None, format!("subject id {} repeated", rec.meta.id)));
        }
        let spans: Vec<(&str, f64, f64)> = [
            rec.eeg.as_ref().map(|r| ("eeg", r.t0(), r.t0() + r.duration())),
            rec.ecg.as_ref().map(|r| ("ecg", r.t0(), r.t0() + r.duration())),
            rec.temp.as_ref().map(|r| ("temp", r.t0(), r.t0() + r.duration())),
        ]
        .into_iter()
        .flatten()
        .collect();
        for t in &rec.trials {
            for (name, a, b) in &spans {
                if t.start < a - 1e-9 || t.end() > b + 1e-9 {
                    report.warnings.push(format!(
                        "subject {}: trial {} [{}, {}] s not covered by {name} [{a}, {b}] s",
                        rec.meta.id,
                        t.trial_id,
                        t.start,
                        t.end()
                    ));
                }
            }
        }
        if !rec.trials.iter().any(|t| t.label == Label::Positive)
            || !rec.trials.iter().any(|t| t.label == Label::Negative)
        {
            report.warnings.push(format!("subject {} lacks positive or negative trials", rec.meta.id));
        }
        report.subjects.push(SubjectSummary {
            id: rec.meta.id.clone(),
            sex: rec.meta.sex,
            trials: rec.trials.len(),
            channels: rec.eeg.as_ref().map_or(0, |e| e.channels().len()),
            missing: rec.missing(),
        });
    }
    Ok(report)
}
