//! Report assembly and output. The JSON form carries everything; the CSV form
//! carries the main table of each command.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::stats::REPORT_QUANTILES;
use crate::sums::format_num;
use crate::verify::{Verdict, VerdictClass};

use super::config::{ExperimentConfig, Format};

/// A table: header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Quantiles of one statistic across seeds at one checkpoint or window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileRow {
    pub statistic: String,
    pub at: f64,
    /// Levels of `REPORT_QUANTILES`.
    pub values: [f64; 7],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub complete: bool,
    pub config: BTreeMap<String, String>,
    pub seeds: Vec<String>,
    pub workers: usize,
    pub table: Table,
    /// Secondary tables, JSON only.
    pub aux: BTreeMap<String, Table>,
    pub quantile_levels: [f64; 7],
    pub quantiles: Vec<QuantileRow>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    /// Excluded from the reproducible payload.
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, table: Table) -> Self {
        Self {
            command: cfg.command.name().into(),
            complete: true,
            config: cfg.echo.clone(),
            seeds: cfg.seeds.raw.clone(),
            workers: cfg.workers,
            table,
            aux: BTreeMap::new(),
            quantile_levels: REPORT_QUANTILES,
            quantiles: Vec::new(),
            verdicts: Vec::new(),
            warnings: Vec::new(),
            wall_time_ms: 0,
        }
    }

    /// Exit code implied by the verdicts: 1 when a non-qualitative verdict
    /// fails. Qualitative probes are reported but never gate.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|v| !v.pass && v.class != VerdictClass::Qualitative) {
            1
        } else {
            0
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| LabError::Io(e.to_string()))
    }

    /// JSON without wall time and worker count: identical configs (up to the
    /// worker count) give identical bytes.
    pub fn payload_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        r.workers = 0;
        r.config.remove("workers");
        r.to_json()
    }

    /// Writes to `cfg.out` (stdout when absent). An incomplete CSV report is
    /// marked by a sibling `<out>.incomplete` file; the JSON form carries the
    /// flag itself.
    pub fn write(&self, cfg: &ExperimentConfig) -> Result<()> {
        match &cfg.out {
            Some(path) => {
                let tmp = sibling(path, ".tmp");
                {
                    let f = std::fs::File::create(&tmp)?;
                    let mut w = std::io::BufWriter::new(f);
                    self.write_to(cfg.format, &mut w)?;
                    w.flush()?;
                }
                std::fs::rename(&tmp, path)?;
                let marker = sibling(path, ".incomplete");
                if self.complete {
                    if marker.exists() {
                        std::fs::remove_file(&marker)?;
                    }
                } else {
                    std::fs::write(&marker, format!("{} of {} rows written\n", self.table.rows.len(), self.command))?;
                }
                Ok(())
            }
            None => {
                let out = std::io::stdout();
                let mut lock = out.lock();
                self.write_to(cfg.format, &mut lock)
            }
        }
    }

    pub fn write_to<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Csv => self.table.write_csv(w),
            Format::Json => {
                w.write_all(self.to_json()?.as_bytes())?;
                w.write_all(b"\n")?;
                Ok(())
            }
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn fmt(x: f64) -> String {
    format_num(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::Command;

    #[test]
    fn incomplete_marker_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::defaults(Command::Schedule);
        cfg.out = Some(dir.path().join("r.csv"));
        let mut t = Table::new(&["a"]);
        t.push(vec!["1".into()]);
        let mut r = ExperimentReport::new(&cfg, t);
        r.complete = false;
        r.write(&cfg).unwrap();
        assert!(dir.path().join("r.csv.incomplete").exists());
        r.complete = true;
        r.write(&cfg).unwrap();
        assert!(!dir.path().join("r.csv.incomplete").exists());
        assert_eq!(std::fs::read_to_string(dir.path().join("r.csv")).unwrap(), "a\n1\n");
    }
}
