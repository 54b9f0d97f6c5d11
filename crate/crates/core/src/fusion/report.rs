//! CSV tables and self-contained SVG bar charts of a [`ReportBundle`].

use std::fmt::Write as _;
use std::path::Path;

use super::experiment::ReportBundle;
use crate::eeg::{significance, AsymmetryStats};
use crate::error::Result;
use crate::io::{atomic_dir, atomic_write};
use crate::signal::Label;

pub const REPORT_FILE: &str = "report.json";

/// Pretty JSON with a trailing newline.
pub fn to_json(bundle: &ReportBundle) -> Result<String> {
    let mut s = serde_json::to_string_pretty(bundle)?;
    s.push('\n');
    Ok(s)
}

pub fn f1_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from(
        "population,modalities,classifier,scheme,n_rows,n_features,mean_f1,sd_f1,selected_f1,n_selected\n",
    );
    for c in &bundle.cells {
        let (sel_f1, n_sel) = match &c.selection {
            Some(s) => (format!("{:.6}", s.objective), s.features.len().to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{},{}",
            c.population,
            c.modalities,
            c.classifier,
            c.scheme,
            c.report.n_rows,
            c.report.selected_features.len(),
            c.report.mean_f1,
            c.report.sd_f1,
            sel_f1,
            n_sel
        );
    }
    out
}

pub fn temperature_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("population,condition,n,mean,sd,ks_d,ks_p\n");
    for p in &bundle.populations {
        let Some(t) = &p.temperature else { continue };
        for (l, c) in &t.conditions {
            let (d, pv) = c
                .normality
                .map(|r| (format!("{:.6}", r.statistic), format!("{:.6e}", r.p)))
                .unwrap_or_default();
            let _ = writeln!(out, "{},{l},{},{:.4},{:.4},{d},{pv}", p.population, c.n, c.mean, c.sd);
        }
    }
    out.push('\n');
    out.push_str("population,comparison,u,p,sig\n");
    for p in &bundle.populations {
        let Some(t) = &p.temperature else { continue };
        let tests = [
            ("Positive-Negative", Some(t.positive_vs_negative)),
            ("Positive-Baseline", t.positive_vs_baseline),
            ("Negative-Baseline", t.negative_vs_baseline),
        ];
        for (name, r) in tests {
            if let Some(r) = r {
                let _ = writeln!(out, "{},{name},{},{:.6e},{}", p.population, r.statistic, r.p, significance(r.p));
            }
        }
    }
    out
}

pub fn hrv_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("population,variable,mean_positive,mean_negative,u,p,sig\n");
    for p in &bundle.populations {
        for h in &p.hrv {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{},{:.6e},{}",
                p.population,
                h.variable,
                h.mean_positive,
                h.mean_negative,
                h.test.statistic,
                h.test.p,
                significance(h.test.p)
            );
        }
    }
    out
}

pub fn temperature_by_trial_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("trial_id,label,n,mean,sd\n");
    for t in &bundle.per_trial_temperature {
        let _ = writeln!(out, "{},{},{},{:.4},{:.4}", t.trial_id, t.label, t.n, t.mean, t.sd);
    }
    out
}

/// Every CSV table as `(file name, contents)`.
pub fn tables(bundle: &ReportBundle) -> Vec<(String, String)> {
    let mut files = vec![
        ("f1.csv".to_string(), f1_csv(bundle)),
        ("temperature.csv".to_string(), temperature_csv(bundle)),
        ("hrv.csv".to_string(), hrv_csv(bundle)),
        ("temperature_by_trial.csv".to_string(), temperature_by_trial_csv(bundle)),
    ];
    for p in &bundle.populations {
        if let Some(a) = &p.asymmetry {
            files.push((format!("asymmetry_{}.csv", p.population), a.to_csv()));
        }
    }
    files
}

/// One bar of a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    /// Text drawn above the bar, such as significance stars.
    pub note: String,
    /// Index into the chart palette.
    pub series: usize,
}

const PALETTE: [&str; 4] = ["#4878a8", "#d0803a", "#5a9a5a", "#a0a0a0"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A vertical bar chart with a zero line. The value axis spans the data
/// range widened to include zero.
pub fn svg_bar_chart(title: &str, bars: &[Bar], legend: &[&str]) -> String {
    let (w, h) = (60.0 + 28.0 * bars.len().max(1) as f64 + 40.0, 360.0);
    let (top, bottom, left) = (40.0, 110.0, 60.0);
    let plot_h = h - top - bottom;
    let hi = bars.iter().map(|b| b.value).fold(0.0, f64::max);
    let lo = bars.iter().map(|b| b.value).fold(0.0, f64::min);
    let span = if hi - lo > 0.0 { hi - lo } else { 1.0 };
    let y = |v: f64| top + (hi - v) / span * plot_h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" font-size="13" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    for (i, tick) in [lo, 0.0, hi].iter().enumerate() {
        if i == 1 && (lo == 0.0 || hi == 0.0) {
            continue;
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{tick:.3}</text>"#, left - 4.0, y(*tick) + 3.0);
    }
    let _ = writeln!(
        s,
        r##"<line x1="{left}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="#333"/>"##,
        w - 20.0,
        y(0.0),
        y(0.0)
    );
    for (i, b) in bars.iter().enumerate() {
        let x = left + 6.0 + 28.0 * i as f64;
        let (y0, y1) = (y(b.value.max(0.0)), y(b.value.min(0.0)));
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{y0:.1}" width="20" height="{:.1}" fill="{}"><title>{} = {:.4}</title></rect>"#,
            (y1 - y0).max(0.5),
            PALETTE[b.series % PALETTE.len()],
            escape(&b.label),
            b.value
        );
        if !b.note.is_empty() {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, x + 10.0, y0 - 3.0, escape(&b.note));
        }
        let (lx, ly) = (x + 10.0, h - bottom + 8.0);
        let _ = writeln!(
            s,
            r#"<text x="{lx:.1}" y="{ly:.1}" transform="rotate(60 {lx:.1} {ly:.1})">{}</text>"#,
            escape(&b.label)
        );
    }
    for (i, name) in legend.iter().enumerate() {
        let ly = 30.0 + 12.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="8" height="8" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            w - 110.0,
            ly - 7.0,
            PALETTE[i % PALETTE.len()],
            w - 98.0,
            ly,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn asymmetry_bars(a: &AsymmetryStats) -> Vec<Bar> {
    a.pairs
        .iter()
        .flat_map(|p| {
            [
                Bar { label: format!("{} +", p.pair), value: p.mean_ai_positive, note: String::new(), series: 0 },
                Bar {
                    label: format!("{} -", p.pair),
                    value: p.mean_ai_negative,
                    note: significance(p.between.p).to_string(),
                    series: 1,
                },
            ]
        })
        .collect()
}

/// Every chart as `(file name, svg)`.
pub fn charts(bundle: &ReportBundle) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for p in &bundle.populations {
        let bars: Vec<Bar> = bundle
            .cells
            .iter()
            .filter(|c| c.population == p.population)
            .map(|c| Bar {
                label: format!("{} {} {}", c.modalities, c.classifier, c.scheme),
                value: c.report.mean_f1,
                note: String::new(),
                series: usize::from(c.scheme.short() == "SI"),
            })
            .collect();
        if !bars.is_empty() {
            out.push((
                format!("f1_{}.svg", p.population),
                svg_bar_chart(&format!("Mean F1 ({})", p.population), &bars, &["SD", "SI"]),
            ));
        }
        if let Some(a) = &p.asymmetry {
            out.push((
                format!("asymmetry_{}.svg", p.population),
                svg_bar_chart(&format!("Asymmetry index ({})", p.population), &asymmetry_bars(a), &["Positive", "Negative"]),
            ));
        }
    }
    let bars: Vec<Bar> = bundle
        .per_trial_temperature
        .iter()
        .map(|t| Bar {
            label: t.trial_id.clone(),
            value: t.mean,
            note: String::new(),
            series: match t.label {
                Label::Positive => 0,
                Label::Negative => 1,
                Label::Baseline => 3,
            },
        })
        .collect();
    if !bars.is_empty() {
        out.push((
            "temperature_by_trial.svg".into(),
            svg_bar_chart("Mean skin temperature per stimulus (C)", &bars, &["Positive", "Negative", "", "Baseline"]),
        ));
    }
    out
}

/// Write `report.json` and the CSV tables into a fresh directory, atomically.
pub fn write_bundle(out: &Path, bundle: &ReportBundle) -> Result<()> {
    let json = to_json(bundle)?;
    atomic_dir(out, |dir| {
        std::fs::write(dir.join(REPORT_FILE), &json)?;
        for (name, body) in tables(bundle) {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    })
}

/// Write the SVG charts next to an existing bundle.
pub fn write_charts(dir: &Path, bundle: &ReportBundle) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for (name, svg) in charts(bundle) {
        atomic_write(&dir.join(&name), svg.as_bytes())?;
        names.push(name);
    }
    Ok(names)
}
