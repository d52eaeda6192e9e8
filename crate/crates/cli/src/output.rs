//! Report files. Every file is written to a temporary file in the target
//! directory and renamed into place.
//!
//! * `report.json`: the full [`StabilityReport`].
//! * `bounds.csv`: one row per pair and eigenvalue index.
//! * `timings.json`: wall-clock seconds per pair (kept out of the report so
//!   that identical configs give identical reports).
//! * with plot data enabled, per pair `pairNN_map{1,2}_eigfun.txt` and
//!   `pairNN_boundary.txt` (formats in [`eigfun_text`], [`boundary_text`]).

use std::io::Write;
use std::path::{Path, PathBuf};

use confspec::stability::CheckStatus;
use confspec::{Map64, Mesh64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::report::{PairOutcome, StabilityReport};

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "bounds.csv";
pub const TIMINGS_FILE: &str = "timings.json";
pub const BOUNDARY_SAMPLES: usize = 512;

pub const TABLE_HEADER: [&str; 16] = [
    "pair",
    "n",
    "lambda_1",
    "lambda_2",
    "gap",
    "lemma31_bound",
    "lemma31_discrete_bound",
    "theorem_bound",
    "measure_bound",
    "threshold",
    "theorem_pass",
    "measure_pass",
    "lemma31_pass",
    "lemma31_discrete_pass",
    "ordering_pass",
    "constants_estimated",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub pairs: Vec<(String, f64)>,
    pub total_seconds: f64,
}

/// Plot data for one pair: the mesh and the second eigenfunction of each weight.
pub struct PlotData<'a> {
    pub mesh: &'a Mesh64,
    pub maps: [&'a Map64; 2],
    pub eigfuns: [&'a [f64]; 2],
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn flag(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::EstimatedViolation => "warn",
        CheckStatus::Fail => "fail",
    }
}

pub fn report_json(report: &StabilityReport) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(report).map_err(|e| CliError::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn parse_report(bytes: &[u8]) -> Result<StabilityReport> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn table_csv(report: &StabilityReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(TABLE_HEADER).map_err(ser)?;
    for entry in &report.pairs {
        let PairOutcome::Completed(rep) = &entry.outcome else {
            continue;
        };
        for r in &rep.rows {
            w.write_record([
                entry.label.clone(),
                r.n.to_string(),
                num(r.lambda_1),
                num(r.lambda_2),
                num(r.observed_gap),
                num(r.lemma31_bound),
                num(r.lemma31_discrete_bound),
                num(r.theorem_bound),
                num(r.measure_bound),
                r.nontriviality_threshold.map_or_else(|| "inf".to_string(), num),
                flag(r.theorem_check).into(),
                flag(r.measure_check).into(),
                flag(r.lemma31_check).into(),
                flag(r.lemma31_discrete_check).into(),
                flag(r.ordering_check).into(),
                r.constants_estimated.to_string(),
            ])
            .map_err(ser)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))
}

/// `x y value` per vertex, then a `# triangles` line and one `i j k` line
/// per triangle (0-based vertex indices).
pub fn eigfun_text(mesh: &Mesh64, values: &[f64], label: &str) -> String {
    let mut s = format!("# x y value ({label}, second eigenfunction)\n");
    for (z, v) in mesh.vertices.iter().zip(values) {
        s.push_str(&format!("{:?} {:?} {:?}\n", z.re, z.im, v));
    }
    s.push_str("# triangles\n");
    for t in &mesh.triangles {
        s.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
    }
    s
}

/// `theta x1 y1 x2 y2`: both boundary images `φ(e^{iθ})` at
/// [`BOUNDARY_SAMPLES`] equally spaced angles.
pub fn boundary_text(maps: [&Map64; 2]) -> String {
    let b1 = maps[0].boundary_image(BOUNDARY_SAMPLES);
    let b2 = maps[1].boundary_image(BOUNDARY_SAMPLES);
    let mut s = format!("# theta x1 y1 x2 y2 ({} | {})\n", maps[0].label(), maps[1].label());
    for (i, (p, q)) in b1.iter().zip(&b2).enumerate() {
        let theta = std::f64::consts::TAU * i as f64 / BOUNDARY_SAMPLES as f64;
        s.push_str(&format!("{theta:?} {:?} {:?} {:?} {:?}\n", p.re, p.im, q.re, q.im));
    }
    s
}

/// Writes the report, the table, the timings and (if given) plot data.
pub fn emit_report(
    report: &StabilityReport,
    timings: &Timings,
    plots: &[Option<PlotData<'_>>],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        files.push(path);
        Ok(())
    };
    put(REPORT_FILE.into(), report_json(report)?)?;
    put(TABLE_FILE.into(), table_csv(report)?)?;
    let t = serde_json::to_vec_pretty(timings).map_err(|e| CliError::Serialize(e.to_string()))?;
    put(TIMINGS_FILE.into(), t)?;
    for (i, plot) in plots.iter().enumerate() {
        let Some(p) = plot else { continue };
        for (j, (map, f)) in p.maps.iter().zip(p.eigfuns).enumerate() {
            put(format!("pair{i:02}_map{}_eigfun.txt", j + 1), eigfun_text(p.mesh, f, map.label()).into_bytes())?;
        }
        put(format!("pair{i:02}_boundary.txt"), boundary_text(p.maps).into_bytes())?;
    }
    Ok(files)
}
