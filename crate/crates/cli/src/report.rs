//! The report written by `run`. Versioned by [`SCHEMA_VERSION`].

use confspec::fem::krylov::KrylovOptions;
use confspec::stability::{PairReport, DISCRETE_SLACK};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigEcho, ExperimentConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub provenance: Provenance,
    pub tolerances: Tolerances,
    pub pairs: Vec<PairEntry>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub mesh: String,
    pub refinement: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub mass_quadrature: String,
    pub functional_quadrature: String,
    pub quadrature_level: usize,
    pub quadrature_nodes: usize,
    pub eigensolver: String,
    pub dense_threshold: usize,
    pub shift: f64,
    pub krylov_block: usize,
    pub krylov_max_basis: usize,
    pub krylov_tol: f64,
    pub krylov_seed: u64,
    pub constant_convention: String,
}

/// Tolerances that the pass flags and reported numbers are subject to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative slack on inequalities that are exact at the discrete level.
    pub discrete_inequality_rel: f64,
    /// Absolute slack, relative to the eigenvalue scale, on the same.
    pub discrete_inequality_abs: f64,
    /// Residual tolerance of the iterative eigensolver.
    pub eigen_residual: f64,
    /// `|λ₁|` is expected below this.
    pub lambda_1_abs: f64,
    /// Constants `C(q)` are lower estimates; bounds using them may be too
    /// small, so their violations are warnings.
    pub constants: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub label: String,
    pub outcome: PairOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOutcome {
    Completed(Box<PairReport<f64>>),
    Error { kind: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pairs: usize,
    pub completed: usize,
    pub errored: usize,
    pub failures: usize,
    pub warnings: usize,
    pub passed: bool,
}

impl StabilityReport {
    pub fn new(config: &ExperimentConfig, pairs: Vec<PairEntry>) -> Self {
        let r = config.refinement;
        let level = config.quadrature_level;
        let kry = KrylovOptions::default();
        let mut summary = Summary {
            pairs: pairs.len(),
            completed: 0,
            errored: 0,
            failures: 0,
            warnings: 0,
            passed: true,
        };
        for p in &pairs {
            match &p.outcome {
                PairOutcome::Completed(rep) => {
                    summary.completed += 1;
                    summary.failures += rep.failures;
                    summary.warnings += rep.warnings;
                }
                PairOutcome::Error { .. } => summary.errored += 1,
            }
        }
        summary.passed = summary.errored == 0 && summary.failures == 0;
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            config: config.echo(),
            provenance: Provenance {
                mesh: "concentric rings, ring j has 6j vertices at radius j/R".into(),
                refinement: r,
                vertices: 3 * r * r + 3 * r + 1,
                triangles: 6 * r * r,
                mass_quadrature: "edge-midpoint 3-point rule".into(),
                functional_quadrature: "polar Gauss-Legendre (level+1 radial nodes) x 4*level angles".into(),
                quadrature_level: level,
                quadrature_nodes: (level + 1) * 4 * level,
                eigensolver: "dense Cholesky reduction up to dense_threshold unknowns, shift-invert block Krylov above"
                    .into(),
                dense_threshold: config.dense_threshold,
                shift: config.shift,
                krylov_block: kry.block,
                krylov_max_basis: kry.max_basis,
                krylov_tol: kry.tol,
                krylov_seed: kry.seed,
                constant_convention: "C(q) evaluated at q = 4*alpha/(alpha-2)".into(),
            },
            tolerances: Tolerances {
                discrete_inequality_rel: DISCRETE_SLACK,
                discrete_inequality_abs: 1e-12,
                eigen_residual: kry.tol,
                lambda_1_abs: 1e-8,
                constants: "estimated lower bounds (gradient ascent)".into(),
            },
            pairs,
            summary,
        }
    }
}
