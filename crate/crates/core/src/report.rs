//! Output files. Floats in CSV are written as `{:.16e}`; JSON uses the shortest
//! representation that round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::ledger::{check_assumption_main, ExampleRow, TopologyRecord};
use crate::paneitz::{SpectrumEntry, SpectrumSummary};
use crate::solver::{DiagnosticsRecord, RicciVerdict};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub const TRACE_HEADER: [&str; 7] = ["t", "u_min", "u_max", "grad_max", "residual_sup", "cone_margin", "newton_iters"];

pub fn write_trace_csv(path: &Path, trace: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRACE_HEADER)?;
    for d in trace {
        w.write_record([
            fmt_f64(d.t),
            fmt_f64(d.u_min),
            fmt_f64(d.u_max),
            fmt_f64(d.grad_max),
            fmt_f64(d.residual_sup),
            fmt_f64(d.cone_margin),
            d.newton_iters.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a trace written by [`write_trace_csv`].
pub fn read_trace_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("trace column {i}: {e}")))
        };
        let (u_min, u_max) = (f(1)?, f(2)?);
        out.push(DiagnosticsRecord {
            t: f(0)?,
            u_min,
            u_max,
            grad_max: f(3)?,
            harnack_gap: u_max - u_min,
            residual_sup: f(4)?,
            cone_margin: f(5)?,
            newton_iters: rec[6]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("trace column 6: {e}")))?,
        });
    }
    Ok(out)
}

/// Why a continuation run stopped short.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub t_reached: f64,
    pub t_target: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub config: RunConfig,
    pub converged: bool,
    pub final_diagnostics: Option<DiagnosticsRecord>,
    pub verdict: Option<RicciVerdict>,
    pub failure: Option<FailureReport>,
    pub steps: usize,
}

/// Pass/fail of the main curvature assumption for one record.
pub fn assumption_verdict(rec: &TopologyRecord, t0: f64) -> String {
    if !(rec.yamabe > 0.0) {
        return "hypothesis fails: R < 0".into();
    }
    match check_assumption_main(rec, t0) {
        Ok((_, true)) => "holds".into(),
        Ok((_, false)) => "fails".into(),
        Err(e) => e.to_string(),
    }
}

pub const TABLE_HEADER: [&str; 8] = ["name", "chi", "weyl_l2", "f2", "q_total", "yamabe", "verdict", "cgb_residual"];

pub fn write_table_csv(path: &Path, records: &[TopologyRecord], t0: f64) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TABLE_HEADER)?;
    for r in records {
        w.write_record([
            r.name.clone(),
            r.chi.to_string(),
            fmt_f64(r.weyl_l2),
            fmt_f64(r.f2()),
            fmt_f64(r.q_total),
            fmt_f64(r.yamabe),
            assumption_verdict(r, t0),
            fmt_f64(r.cgb_residual()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum_csv(path: &Path, entries: &[SpectrumEntry]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["lambda", "mu", "paneitz_eigenvalue"])?;
    for e in entries {
        w.write_record([fmt_f64(e.lambda), fmt_f64(e.mu), fmt_f64(e.paneitz_eigenvalue)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// "product" or "reduced".
    pub source: String,
    /// (b₁, b₂) of the product form, when the input is a product of surfaces.
    pub coefficients: Option<(f64, f64)>,
    pub summary: SpectrumSummary,
}

pub fn write_examples_csv(path: &Path, rows: &[ExampleRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["family", "base", "k_s1s3", "l_rp4", "chi", "admissible", "margin", "detail"])?;
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.base.clone(),
            r.k_s1s3.to_string(),
            r.l_rp4.to_string(),
            r.chi.to_string(),
            r.admissible.to_string(),
            fmt_f64(r.margin),
            r.detail.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub emitted_files: Vec<String>,
}
