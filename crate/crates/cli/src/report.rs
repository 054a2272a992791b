//! `report`: summarise a results.csv.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::output::CSV_HEADER;
use crate::{EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_OK};

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub fields: Vec<String>,
}

impl Row {
    fn get(&self, column: &str) -> &str {
        let i = CSV_HEADER.iter().position(|c| *c == column).expect("known column");
        &self.fields[i]
    }

    fn num(&self, column: &str) -> Result<Option<f64>> {
        let s = self.get(column);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).with_context(|| format!("column {column}: {s:?} is not a number"))
    }
}

/// Least-squares slope of `log y` against `log x` (points with `x, y > 0`).
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-12 * n {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Debug, Default)]
struct TheoremSummary {
    rows: usize,
    min_slack: Option<f64>,
    lhs_vs_e: Vec<(f64, f64)>,
    rhs_vs_e: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Summary {
    pub text: String,
    pub violations: usize,
    pub hypothesis_failures: usize,
    pub exit_code: i32,
    /// Per theorem: fitted exponents of lhs and rhs in `E_size`.
    pub exponents: BTreeMap<String, (Option<f64>, Option<f64>)>,
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        bail!("schema mismatch: header is {:?}, expected {:?}", header.join(","), CSV_HEADER.join(","));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("row {}", i + 2))?;
        if rec.len() != CSV_HEADER.len() {
            bail!("row {}: {} fields, expected {}", i + 2, rec.len(), CSV_HEADER.len());
        }
        rows.push(Row { fields: rec.iter().map(str::to_string).collect() });
    }
    Ok(rows)
}

pub fn summarize(rows: &[Row]) -> Result<Summary> {
    let mut per: BTreeMap<String, TheoremSummary> = BTreeMap::new();
    let mut text = String::new();
    let mut violations = Vec::new();
    let mut hypothesis = 0;
    for row in rows {
        let theorem = row.get("theorem_id").to_string();
        let verdict = row.get("verdict");
        let entry = per.entry(theorem).or_default();
        entry.rows += 1;
        let slack = row.num("slack")?.context("slack is empty")?;
        if verdict != "reference" {
            entry.min_slack = Some(entry.min_slack.map_or(slack, |m: f64| m.min(slack)));
        }
        if let Some(e) = row.num("E_size")? {
            entry.lhs_vs_e.push((e, row.num("lhs")?.unwrap_or(f64::NAN)));
            entry.rhs_vs_e.push((e, row.num("rhs")?.unwrap_or(f64::NAN)));
        }
        match verdict {
            "fail" => violations.push(row.fields.join(",")),
            "hypothesis_failed" => hypothesis += 1,
            "pass" | "reference" => {}
            other => bail!("unknown verdict {other:?}"),
        }
    }
    let mut exponents = BTreeMap::new();
    writeln!(text, "{:<16} {:>6} {:>14} {:>12} {:>12}", "theorem", "rows", "min_slack", "lhs~|E|^a", "rhs~|E|^a")?;
    for (name, s) in &per {
        let lhs = log_log_slope(&s.lhs_vs_e);
        let rhs = log_log_slope(&s.rhs_vs_e);
        let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        writeln!(
            text,
            "{:<16} {:>6} {:>14} {:>12} {:>12}",
            name,
            s.rows,
            s.min_slack.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into()),
            f(lhs),
            f(rhs)
        )?;
        exponents.insert(name.clone(), (lhs, rhs));
    }
    writeln!(text, "{} violations", violations.len())?;
    for v in &violations {
        writeln!(text, "  FAIL {v}")?;
    }
    if hypothesis > 0 {
        writeln!(text, "{hypothesis} rows with hypothesis_failed")?;
    }
    Ok(Summary {
        text,
        violations: violations.len(),
        hypothesis_failures: hypothesis,
        exit_code: match (violations.len(), hypothesis) {
            (0, 0) => EXIT_OK,
            (0, _) => EXIT_HYPOTHESIS,
            _ => EXIT_FAIL,
        },
        exponents,
    })
}

pub fn report(path: &Path) -> Result<Summary> {
    summarize(&read_rows(path)?)
}
