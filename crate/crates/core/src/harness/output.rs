//! Result files: `summary.json`, `metrics.csv`, `path_<drone>.csv` and
//! `sweep.csv`. CSV files are comma separated with a header row and LF
//! line endings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::sim::PathSample;
use super::sweep::SweepRow;
use crate::error::SimError;
use crate::metrics::MetricsReport;
use crate::semantics::SchemeId;

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, SimError> {
    let file = BufWriter::new(File::create(path)?);
    Ok(csv::WriterBuilder::new()
        .has_headers(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_summary_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), SimError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MetricsRow {
    replication: u64,
    seed: u64,
    scheme: SchemeId,
    slots: u64,
    elapsed_s: f64,
    mean_v_time_minutes: f64,
    mean_v_violation_pct: f64,
    mean_e_t: f64,
    mean_commands_per_s: f64,
    theta_rate: f64,
    estimation_error_rate: Option<f64>,
    censored_drones: usize,
}

impl From<&MetricsReport> for MetricsRow {
    fn from(r: &MetricsReport) -> Self {
        MetricsRow {
            replication: r.replication,
            seed: r.seed,
            scheme: r.scheme,
            slots: r.slots,
            elapsed_s: r.elapsed_s,
            mean_v_time_minutes: r.mean_v_time_minutes,
            mean_v_violation_pct: r.mean_v_violation_pct,
            mean_e_t: r.mean_e_t,
            mean_commands_per_s: r.mean_commands_per_s,
            theta_rate: r.theta_rate,
            estimation_error_rate: r.estimation_error_rate,
            censored_drones: r.drones.iter().filter(|d| d.v_time_censored).count(),
        }
    }
}

/// One row per replication.
pub fn write_metrics_csv(path: &Path, reports: &[MetricsReport]) -> Result<(), SimError> {
    let mut w = csv_writer(path)?;
    for r in reports {
        w.serialize(MetricsRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PathRow<'a> {
    slot: u64,
    t_seconds: f64,
    x_m: f64,
    y_m: f64,
    mode: &'a str,
    inside_flag: u8,
}

pub fn write_path_csv(path: &Path, samples: &[PathSample]) -> Result<(), SimError> {
    let mut w = csv_writer(path)?;
    for s in samples {
        w.serialize(PathRow {
            slot: s.slot,
            t_seconds: s.t_seconds,
            x_m: s.x_m,
            y_m: s.y_m,
            mode: s.mode.as_str(),
            inside_flag: u8::from(s.inside),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path_<drone>.csv` for every drone into `dir` and returns the
/// file paths in drone order.
pub fn write_paths(dir: &Path, paths: &[Vec<PathSample>]) -> Result<Vec<PathBuf>, SimError> {
    paths
        .iter()
        .enumerate()
        .map(|(drone, samples)| {
            let file = dir.join(format!("path_{drone}.csv"));
            write_path_csv(&file, samples)?;
            Ok(file)
        })
        .collect()
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), SimError> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Mode;

    #[test]
    fn path_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("path_0.csv");
        let samples = [
            PathSample {
                slot: 0,
                t_seconds: 0.1,
                x_m: 10.0,
                y_m: 10.5,
                mode: Mode::Walking,
                inside: true,
            },
            PathSample {
                slot: 10,
                t_seconds: 1.1,
                x_m: 20.25,
                y_m: 9.0,
                mode: Mode::Returning,
                inside: false,
            },
        ];
        write_path_csv(&file, &samples).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        assert_eq!(
            text,
            "slot,t_seconds,x_m,y_m,mode,inside_flag\n\
             0,0.1,10.0,10.5,walking,1\n\
             10,1.1,20.25,9.0,returning,0\n"
        );
    }

    #[test]
    fn sweep_csv_blank_for_missing_values() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("sweep.csv");
        let row = SweepRow {
            label: "bad".into(),
            scheme: SchemeId::S1,
            replications: 0,
            e_t: None,
            e_t_se: None,
            v_time_minutes: None,
            v_time_se: None,
            v_violation_pct: None,
            v_violation_se: None,
            theta_rate: None,
            estimation_error_rate: None,
            error: Some("boom".into()),
        };
        write_sweep_csv(&file, &[row]).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        let mut lines = text.lines();
        assert!(lines
            .next()
            .unwrap()
            .starts_with("label,scheme,replications,"));
        assert_eq!(lines.next().unwrap(), "bad,s1,0,,,,,,,,,boom");
        assert!(!text.contains('\r'));
    }
}
