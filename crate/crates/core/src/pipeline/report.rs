//! Fidelity tables and per-experiment histograms.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentResult, PipelineError};
use crate::distribution::bitstring;

/// Ideal outcomes below this probability are folded into the `rest` row.
const DISPLAY_FLOOR: f64 = 1e-12;

/// Width of a fidelity printed as `0.0000`.
const VALUE_WIDTH: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Markdown table: one column per experiment, rows `Cor.` and `Raw`.
    pub table: String,
    /// `label,seed,raw,corrected`, one line per experiment.
    pub fidelity_csv: String,
    /// `(file stem, histogram CSV)` per experiment.
    pub histograms: Vec<(String, String)>,
}

/// Histogram over the ideal support plus a `rest` row that carries whatever
/// mass each column puts elsewhere.
pub fn histogram_csv(r: &ExperimentResult) -> Result<String, PipelineError> {
    let ideal = r.ideal_distribution()?;
    let raw = r.raw_distribution()?;
    let corrected = r.corrected_distribution()?;
    let shown: BTreeSet<u64> = ideal
        .iter()
        .filter(|&(_, p)| p >= DISPLAY_FLOOR)
        .map(|(k, _)| k)
        .collect();
    let mut out = String::from("index,bitstring,ideal,raw,corrected\n");
    let mut sums = [0.0f64; 3];
    for &k in &shown {
        let row = [ideal.get(k), raw.get(k), corrected.get(k)];
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
        writeln!(
            out,
            "{k},{},{},{},{}",
            bitstring(k, r.n_qubits),
            row[0],
            row[1],
            row[2]
        )
        .unwrap();
    }
    let rest = sums.map(|s| (1.0 - s).max(0.0));
    writeln!(out, "rest,,{},{},{}", rest[0], rest[1], rest[2]).unwrap();
    Ok(out)
}

fn column_names(results: &[ExperimentResult]) -> Vec<String> {
    results
        .iter()
        .map(|r| {
            let clash = results.iter().filter(|o| o.label == r.label).count() > 1;
            if clash {
                format!("{} (seed {})", r.label, r.config.seed)
            } else {
                r.label.clone()
            }
        })
        .collect()
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

/// Fidelities are read as stored; persisted results report exactly what the run produced.
pub fn render_report(results: &[ExperimentResult]) -> Result<Report, PipelineError> {
    let names = column_names(results);
    let mut table = String::from("|      |");
    let mut rule = String::from("|------|");
    let widths: Vec<usize> = names.iter().map(|n| n.len().max(VALUE_WIDTH)).collect();
    for (name, &w) in names.iter().zip(&widths) {
        write!(table, " {name:<w$} |").unwrap();
        rule.push_str(&"-".repeat(w + 2));
        rule.push('|');
    }
    table.push('\n');
    table.push_str(&rule);
    table.push('\n');
    for (row, pick) in [
        (
            "Cor.",
            (|r: &ExperimentResult| r.fidelity.corrected) as fn(&ExperimentResult) -> f64,
        ),
        ("Raw ", |r: &ExperimentResult| r.fidelity.raw),
    ] {
        write!(table, "| {row} |").unwrap();
        for (r, &w) in results.iter().zip(&widths) {
            write!(table, " {:<w$} |", format!("{:.4}", pick(r))).unwrap();
        }
        table.push('\n');
    }

    let mut fidelity_csv = String::from("label,seed,raw,corrected\n");
    for r in results {
        writeln!(
            fidelity_csv,
            "{},{},{},{}",
            r.label, r.config.seed, r.fidelity.raw, r.fidelity.corrected
        )
        .unwrap();
    }

    let histograms = results
        .iter()
        .zip(&names)
        .map(|(r, name)| Ok((file_stem(name), histogram_csv(r)?)))
        .collect::<Result<_, PipelineError>>()?;
    Ok(Report {
        table,
        fidelity_csv,
        histograms,
    })
}

/// Write `fidelity.md`, `fidelity.csv` and `hist_<label>.csv` into `dir`.
pub fn write_report(results: &[ExperimentResult], dir: &Path) -> Result<Report, PipelineError> {
    let report = render_report(results)?;
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut files = vec![
        ("fidelity.md".to_string(), report.table.clone()),
        ("fidelity.csv".to_string(), report.fidelity_csv.clone()),
    ];
    for (stem, csv) in &report.histograms {
        files.push((format!("hist_{stem}.csv"), csv.clone()));
    }
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| PipelineError::io(&path, e))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::Family;
    use crate::pipeline::{run_experiment, CircuitSource, ExperimentConfig};

    fn result(seed: u64) -> ExperimentResult {
        run_experiment(&ExperimentConfig {
            shots: 2_000,
            n_rand: 2,
            seed,
            ..ExperimentConfig::new(CircuitSource::Catalog(Family::Ghz { n: 3 }))
        })
        .unwrap()
    }

    #[test]
    fn histogram_rest_row() {
        let r = result(1);
        let csv = histogram_csv(&r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,bitstring,ideal,raw,corrected");
        assert!(lines[1].starts_with("0,000,"));
        assert!(lines[2].starts_with("7,111,"));
        let rest: Vec<f64> = lines[3]
            .split(',')
            .skip(2)
            .map(|v| v.parse().unwrap())
            .collect();
        let corrected = r.corrected_distribution().unwrap();
        let shown = corrected.get(0) + corrected.get(7);
        assert!((rest[2] - (1.0 - shown)).abs() < 1e-12);
        assert!(rest[0].abs() < 1e-12);
    }

    #[test]
    fn table_layout() {
        let rs = vec![result(1), result(2)];
        let rep = render_report(&rs).unwrap();
        let lines: Vec<&str> = rep.table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("GHZ3 (seed 1)") && lines[0].contains("GHZ3 (seed 2)"));
        assert!(lines[2].starts_with("| Cor. |"));
        assert!(lines[3].starts_with("| Raw  |"));
        assert_eq!(rep.histograms[0].0, "GHZ3__seed_1");
        assert_eq!(rep.fidelity_csv.lines().count(), 3);
    }
}
