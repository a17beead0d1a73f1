use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::ExperimentResult;

pub const REPORT_HEADER: &str = "experiment,param,value,predicted,ratio,seed";

/// The report CSV for `results`, rows in the order given.
pub fn report_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for res in results {
        for row in &res.rows {
            let _ = writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{}",
                row.experiment, row.param, row.value, row.predicted, row.ratio, res.seed
            );
        }
    }
    out
}

/// `param,value` pairs for plotting.
pub fn plot_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("param,value\n");
    for row in results.iter().flat_map(|r| &r.rows) {
        let _ = writeln!(out, "{:.12e},{:.12e}", row.param, row.value);
    }
    out
}

/// `<dir>/<stem>.plot.csv` next to `path`.
pub fn plot_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}.plot.csv"))
}

/// Writes the report and its plot-data companion; returns both paths.
pub fn emit_report(results: &[ExperimentResult], path: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::write(path, report_csv(results))?;
    let plot = plot_path(path);
    std::fs::write(&plot, plot_csv(results))?;
    Ok((path.to_path_buf(), plot))
}
