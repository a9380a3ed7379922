//! Plain-text tables and CSV output for experiment reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::linalg::random::Field;

use super::{ExperimentReport, PerturbationSample, TABLE2_LABELS};

/// Significant digits used when rendering tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Digits {
    /// Six significant digits.
    #[default]
    Full,
    /// Three significant digits with trailing zeros dropped.
    Compact,
}

impl Digits {
    fn significant(self) -> usize {
        match self {
            Digits::Full => 6,
            Digits::Compact => 3,
        }
    }
}

/// Fixed-point rendering of `x` with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize, trim: bool) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mut magnitude = x.abs().log10().floor() as i32;
    // rounding can carry into a new leading digit, e.g. 9.9996 -> 10.00
    if format!("{:.*e}", digits.saturating_sub(1), x.abs()).ends_with(&format!("e{}", magnitude + 1)) {
        magnitude += 1;
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if trim && s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    s
}

fn cell(x: f64, digits: Digits) -> String {
    format_sig(x, digits.significant(), digits == Digits::Compact)
}

fn header_line(report: &ExperimentReport) -> String {
    let c = &report.config;
    format!(
        "{} trials, eps = {:e}, tau = {}, seed = {}, {} draws",
        c.trials,
        c.epsilon,
        c.tau,
        c.seed,
        match c.field {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    )
}

const W: usize = 12;

/// Single experiment: one row per index with average, maximum and the
/// matching condition number.
pub fn render_report(report: &ExperimentReport, digits: Digits) -> String {
    let c = &report.config;
    let mut out = String::new();
    let scale = if c.n1 > 1 { format!("eps^(1/{})", c.n1) } else { "eps".to_string() };
    writeln!(
        out,
        "{} with {} (E, F): |lambda_i - lambda0| / {scale}, lambda0 = {}",
        c.pair,
        match c.structure {
            super::Structure::Hermitian => "Hermitian",
            super::Structure::General => "general",
        },
        c.lambda0
    )
    .unwrap();
    writeln!(out, "{}", header_line(report)).unwrap();
    writeln!(out, "{:>3}{:>W$}{:>W$}{:>W$}{:>W$}", "i", "sigma_i", "avg", "max", "kappa_i").unwrap();
    for i in 0..report.avg.len() {
        writeln!(
            out,
            "{:>3}{:>W$}{:>W$}{:>W$}{:>W$}",
            i + 1,
            cell(report.sigmas.as_slice()[i], digits),
            cell(report.avg[i], digits),
            cell(report.max[i], digits),
            cell(report.kappas.kappas[i], digits)
        )
        .unwrap();
    }
    if let Some(s) = report.splitting {
        writeln!(out, "max within-group splitting / {scale}: {}", cell(s, digits)).unwrap();
    }
    out
}

/// The three nondefective cases side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Report {
    pub cases: [ExperimentReport; 3],
}

#[derive(Serialize)]
struct LabeledCase<'a> {
    label: &'a str,
    #[serde(flatten)]
    report: &'a ExperimentReport,
}

impl Table2Report {
    pub fn to_json(&self) -> String {
        let cases: Vec<LabeledCase> = TABLE2_LABELS
            .iter()
            .zip(&self.cases)
            .map(|(label, report)| LabeledCase { label, report })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "cases": cases })).expect("report serializes")
    }
}

pub fn render_table2(table: &Table2Report, digits: Digits) -> String {
    let mut out = String::new();
    writeln!(out, "Average and maximum |lambda_i - lambda0| / eps against kappa_i").unwrap();
    writeln!(out, "{}", header_line(&table.cases[0])).unwrap();
    let group = 3 * W;
    write!(out, "{:>3}", "").unwrap();
    for label in TABLE2_LABELS {
        write!(out, "{label:>group$}").unwrap();
    }
    out.push('\n');
    write!(out, "{:>3}", "i").unwrap();
    for _ in 0..3 {
        write!(out, "{:>W$}{:>W$}{:>W$}", "avg", "max", "kappa_i").unwrap();
    }
    out.push('\n');
    for i in 0..table.cases[0].avg.len() {
        write!(out, "{:>3}", i + 1).unwrap();
        for case in &table.cases {
            write!(
                out,
                "{:>W$}{:>W$}{:>W$}",
                cell(case.avg[i], digits),
                cell(case.max[i], digits),
                cell(case.kappas.kappas[i], digits)
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn render_table3(report: &ExperimentReport, digits: Digits) -> String {
    let n1 = report.config.n1;
    let mut out = String::new();
    writeln!(out, "Average and maximum |lambda_i - lambda0| / eps^(1/{n1}) against kappa_i").unwrap();
    writeln!(out, "{}", header_line(report)).unwrap();
    writeln!(out, "{:>3}{:>W$}{:>W$}{:>W$}", "i", "avg", "max", "kappa_i").unwrap();
    for i in 0..report.avg.len() {
        writeln!(
            out,
            "{:>3}{:>W$}{:>W$}{:>W$}",
            i + 1,
            cell(report.avg[i], digits),
            cell(report.max[i], digits),
            cell(report.kappas.kappas[i], digits)
        )
        .unwrap();
    }
    if let Some(s) = report.splitting {
        writeln!(out, "max within-group splitting / eps^(1/{n1}): {}", cell(s, digits)).unwrap();
    }
    out
}

/// One row per trial: `trial,delta_1,...,delta_r[,splitting]`.
pub fn samples_to_csv(samples: &[PerturbationSample]) -> String {
    let mut out = String::new();
    let r = samples.first().map_or(0, |s| s.deltas.len());
    let split = samples.first().is_some_and(|s| s.splitting.is_some());
    out.push_str("trial");
    for i in 1..=r {
        write!(out, ",delta_{i}").unwrap();
    }
    if split {
        out.push_str(",splitting");
    }
    out.push('\n');
    for s in samples {
        write!(out, "{}", s.trial_index).unwrap();
        for d in &s.deltas {
            write!(out, ",{d:e}").unwrap();
        }
        if let Some(sp) = s.splitting {
            write!(out, ",{sp:e}").unwrap();
        }
        out.push('\n');
    }
    out
}
