//! JSON report documents and atomic file output.
//!
//! Reports embed the resolved config and the artifact version; identical
//! configs and seeds produce byte-identical files (serde_json field order
//! is struct order, float formatting is shortest-roundtrip).

use std::path::Path;

use serde::Serialize;

use holocurve_core::lincomplex::Curve;
use holocurve_core::odesolve::SolveReport;
use holocurve_core::verify::CheckRow;
use holocurve_core::{Error, Result};

use crate::config::JobConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct GridDoc {
    pub t0: f64,
    pub half_width: f64,
    pub nodes: usize,
}

#[derive(Serialize)]
pub struct NodeSample {
    pub t: f64,
    pub value: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deriv: Option<Vec<[f64; 2]>>,
}

pub fn curve_samples(curve: &Curve) -> Vec<NodeSample> {
    curve
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &t)| NodeSample {
            t,
            value: curve
                .value(k)
                .entries()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
            deriv: curve.derivs().map(|d| {
                d[k].entries().iter().map(|z| [z.re, z.im]).collect()
            }),
        })
        .collect()
}

pub fn grid_doc(curve: &Curve) -> GridDoc {
    GridDoc {
        t0: curve.grid().interval().t0(),
        half_width: curve.grid().interval().half_width(),
        nodes: curve.grid().len(),
    }
}

#[derive(Serialize)]
pub struct SolveDoc<'a> {
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub condition_ok: bool,
    pub b1: f64,
    pub contraction: f64,
    pub iterations: usize,
    pub residual: f64,
    pub observed_ratio: f64,
    pub grid: GridDoc,
    pub solution: Vec<NodeSample>,
    pub config: &'a JobConfig,
}

impl<'a> SolveDoc<'a> {
    pub fn new(seed: u64, report: &SolveReport, config: &'a JobConfig) -> Self {
        SolveDoc {
            version: VERSION,
            command: "solve",
            seed,
            condition_ok: report.condition_ok,
            b1: report.b1,
            contraction: report.contraction,
            iterations: report.iterations,
            residual: report.residual,
            observed_ratio: report.observed_ratio,
            grid: grid_doc(&report.solution),
            solution: curve_samples(&report.solution),
            config,
        }
    }
}

#[derive(Serialize)]
pub struct SolveSummary {
    pub condition_ok: bool,
    pub b1: f64,
    pub contraction: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Serialize)]
pub struct SensitivityDoc<'a> {
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub base: SolveSummary,
    pub cross_check_step: f64,
    pub cross_check_error: f64,
    pub cross_check_ok: bool,
    pub grid: GridDoc,
    pub derivative: Vec<NodeSample>,
    pub config: &'a JobConfig,
}

#[derive(Serialize)]
pub struct WitnessDoc<'a> {
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub target: f64,
    pub dimension: usize,
    pub index: usize,
    pub value: [f64; 2],
    pub norm_l1: f64,
    pub norm_l2: f64,
    pub config: &'a JobConfig,
}

/// Write bytes through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    std::fs::write(tmp, bytes)
        .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(tmp, path)
        .map_err(|e| Error::Parameter(format!("cannot move report into {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Parameter(format!("report serialization failed: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_csv(path: &Path, rows: &[CheckRow]) -> Result<()> {
    let mut text = String::from("case,parameter,observed,bound,pass\n");
    for r in rows {
        debug_assert!(!r.case.contains(',') && !r.parameter.contains(','));
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.case, r.parameter, r.observed, r.bound, r.pass
        ));
    }
    write_atomic(path, text.as_bytes())
}
