//! Pass/fail records for numerical checks, with key-value and JSON output.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Outcome of one check. `norm_interior` is the asserted quantity;
/// `norm_full` is informational.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub test: String,
    #[serde(skip)]
    pub n_max: usize,
    #[serde(skip)]
    pub margin: usize,
    pub norm_interior: f64,
    pub norm_full: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvarianceReport {
    /// Passes when `norm_interior < tolerance`.
    pub fn below(test: impl Into<String>, n_max: usize, margin: usize, norm_interior: f64, norm_full: f64, tolerance: f64) -> Self {
        Self {
            test: test.into(),
            n_max,
            margin,
            norm_interior,
            norm_full,
            tolerance,
            pass: norm_interior < tolerance,
        }
    }

    pub fn write_key_value<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "[{}]", self.test)?;
        writeln!(out, "n_max = {}", self.n_max)?;
        writeln!(out, "margin = {}", self.margin)?;
        writeln!(out, "norm_interior = {:e}", self.norm_interior)?;
        writeln!(out, "norm_full = {:e}", self.norm_full)?;
        writeln!(out, "tolerance = {:e}", self.tolerance)?;
        writeln!(out, "pass = {}", self.pass)?;
        Ok(())
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: interior {:.3e} (tol {:.1e}), full {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.test,
            self.norm_interior,
            self.tolerance,
            self.norm_full
        )
    }
}

pub fn write_reports_key_value<W: Write>(mut out: W, reports: &[InvarianceReport]) -> Result<()> {
    for (i, report) in reports.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        report.write_key_value(&mut out)?;
    }
    Ok(())
}

pub fn write_reports_json<W: Write>(mut out: W, reports: &[InvarianceReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// CSV with header `test,norm_interior,norm_full,tolerance,pass`.
pub fn write_reports_csv<W: Write>(out: W, reports: &[InvarianceReport]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["test", "norm_interior", "norm_full", "tolerance", "pass"])
        .map_err(crate::oscillator::csv_error)?;
    for r in reports {
        writer
            .write_record([
                r.test.clone(),
                format!("{:e}", r.norm_interior),
                format!("{:e}", r.norm_full),
                format!("{:e}", r.tolerance),
                r.pass.to_string(),
            ])
            .map_err(crate::oscillator::csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn all_pass(reports: &[InvarianceReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
