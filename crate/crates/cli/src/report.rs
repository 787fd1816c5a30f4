//! Markdown summaries of report files.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::suites::{Entry, Report};

/// Expands directories into their `*.json` files, sorted by path.
pub fn collect_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no report files found".into()));
    }
    Ok(files)
}

pub fn load(path: &Path) -> CliResult<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input { path: path.into(), message: format!("not a report: {e}") })
}

fn fmt_number(v: &Value) -> Option<String> {
    if let Some(u) = v.as_u64() {
        return Some(u.to_string());
    }
    let x = v.as_f64()?;
    Some(if x == 0.0 { "0".into() } else { format!("{x:.3e}") })
}

/// Up to three scalar witnesses, in key order.
fn witness_summary(e: &Entry) -> String {
    let Some(map) = e.certificate.witnesses.as_object() else {
        return String::new();
    };
    map.iter()
        .filter_map(|(k, v)| match v {
            Value::Bool(b) => Some(format!("{k}={b}")),
            _ => fmt_number(v).map(|n| format!("{k}={n}")),
        })
        .take(3)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render(reports: &[Report]) -> String {
    let mut sorted: Vec<&Report> = reports.iter().collect();
    sorted.sort_by(|a, b| (a.d, a.variant.to_string(), &a.suite).cmp(&(b.d, b.variant.to_string(), &b.suite)));
    let mut out = String::from("# Verification summary\n");
    for r in sorted {
        let _ = writeln!(
            out,
            "\n## d = {} ({}, suite {}, seed {})\n\n{} entries, {} unexpected\n",
            r.d,
            r.variant,
            r.suite,
            r.seed,
            r.summary.total,
            r.summary.unexpected.len()
        );
        out.push_str("| claim | anchor | status | expected | witnesses |\n|---|---|---|---|---|\n");
        for e in &r.entries {
            let mark = if e.matches() { "" } else { " **unexpected**" };
            let _ = writeln!(
                out,
                "| {} | {} | {}/{} | {}{} | {} |",
                e.id,
                e.anchor,
                e.certificate.status,
                e.certificate.confidence,
                e.expected,
                mark,
                witness_summary(e)
            );
        }
    }
    out
}
