//! Experiment configuration (TOML).
//!
//! ```toml
//! alpha = 4.0                 # > 2, default 4
//! refinement = 64             # mesh rings, >= 8, default 64
//! k = 6                       # eigenvalues per weight, >= 2, default 6
//! quadrature_level = 16       # >= 8, default 16
//! sobolev_ascent_iters = 60   # >= 1, default 60
//! output_dir = "out"          # default "spectral-lab-out"
//! emit_plot_data = false
//!
//! [solver]                    # optional
//! dense_threshold = 600
//! shift = 1.0
//!
//! [[pairs]]
//! map1 = "identity"
//! map2 = "poly:0.1:2"
//!
//! [[pairs]]
//! label = "explicit"
//! map1 = "identity"
//! map2 = { coeffs = [[0, 0], [1, 0], [0.05, 0]], moebius = [0.2, 0] }
//! ```

use std::path::{Path, PathBuf};

use confspec::fem::problem::DEFAULT_DENSE_THRESHOLD;
use confspec::stability::ExperimentParams;
use confspec::{Map64, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::mapspec::MapDef;

pub const OUTPUT_DIR_ENV: &str = "SPECTRAL_LAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "spectral-lab-out";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    pairs: Vec<RawPair>,
    alpha: Option<f64>,
    refinement: Option<i64>,
    k: Option<i64>,
    quadrature_level: Option<i64>,
    sobolev_ascent_iters: Option<i64>,
    output_dir: Option<PathBuf>,
    emit_plot_data: Option<bool>,
    solver: Option<RawSolver>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    label: Option<String>,
    map1: MapDef,
    map2: MapDef,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    dense_threshold: Option<i64>,
    shift: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MapPair {
    pub label: String,
    pub def_1: MapDef,
    pub def_2: MapDef,
    pub map_1: Map64,
    pub map_2: Map64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pairs: Vec<MapPair>,
    pub alpha: f64,
    pub refinement: usize,
    pub k: usize,
    pub quadrature_level: usize,
    pub sobolev_ascent_iters: usize,
    pub output_dir: PathBuf,
    pub emit_plot_data: bool,
    pub dense_threshold: usize,
    pub shift: f64,
}

/// The numeric part of the config, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub alpha: f64,
    pub refinement: usize,
    pub k: usize,
    pub quadrature_level: usize,
    pub sobolev_ascent_iters: usize,
    pub emit_plot_data: bool,
    pub dense_threshold: usize,
    pub shift: f64,
    pub pairs: Vec<PairEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEcho {
    pub label: String,
    pub map1: String,
    pub map2: String,
}

fn at_least(field: &str, value: Option<i64>, min: i64, default: usize) -> Result<usize> {
    match value {
        None => Ok(default),
        Some(v) if v >= min => Ok(v as usize),
        Some(v) => Err(CliError::validation(field, format!("{field} >= {min} required, got {v}"))),
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse {
        message: e.to_string().trim_end().replace('\n', " | "),
    })?;

    let alpha = raw.alpha.unwrap_or(4.0);
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(CliError::validation("alpha", format!("alpha > 2 required, got {alpha}")));
    }
    let refinement = at_least("refinement", raw.refinement, 8, 64)?;
    let k = at_least("k", raw.k, 2, 6)?;
    let quadrature_level = at_least("quadrature_level", raw.quadrature_level, 8, 16)?;
    let sobolev_ascent_iters = at_least("sobolev_ascent_iters", raw.sobolev_ascent_iters, 1, 60)?;
    let vertices = 3 * refinement * refinement + 3 * refinement + 1;
    if k >= vertices {
        return Err(CliError::validation("k", format!("k < {vertices} (mesh size) required")));
    }
    let (dense_threshold, shift) = match raw.solver {
        None => (DEFAULT_DENSE_THRESHOLD, 1.0),
        Some(s) => {
            let shift = s.shift.unwrap_or(1.0);
            if !(shift > 0.0) || !shift.is_finite() {
                return Err(CliError::validation("solver.shift", "shift > 0 required"));
            }
            (at_least("solver.dense_threshold", s.dense_threshold, 0, DEFAULT_DENSE_THRESHOLD)?, shift)
        }
    };

    let mut pairs = Vec::with_capacity(raw.pairs.len());
    for (i, p) in raw.pairs.into_iter().enumerate() {
        let map_1 = p.map1.build()?;
        let map_2 = p.map2.build()?;
        let label = p
            .label
            .unwrap_or_else(|| format!("{i}:{}|{}", map_1.label(), map_2.label()));
        pairs.push(MapPair {
            label,
            def_1: p.map1,
            def_2: p.map2,
            map_1,
            map_2,
        });
    }

    Ok(ExperimentConfig {
        pairs,
        alpha,
        refinement,
        k,
        quadrature_level,
        sobolev_ascent_iters,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        emit_plot_data: raw.emit_plot_data.unwrap_or(false),
        dense_threshold,
        shift,
    })
}

impl ExperimentConfig {
    pub fn params(&self) -> ExperimentParams {
        ExperimentParams {
            alpha: self.alpha,
            refinement: self.refinement,
            k: self.k,
            quadrature_level: self.quadrature_level,
            sobolev_ascent_iters: self.sobolev_ascent_iters,
            ..ExperimentParams::default()
        }
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            dense_threshold: self.dense_threshold,
            shift: self.shift,
            ..SolverOptions::default()
        }
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            alpha: self.alpha,
            refinement: self.refinement,
            k: self.k,
            quadrature_level: self.quadrature_level,
            sobolev_ascent_iters: self.sobolev_ascent_iters,
            emit_plot_data: self.emit_plot_data,
            dense_threshold: self.dense_threshold,
            shift: self.shift,
            pairs: self
                .pairs
                .iter()
                .map(|p| PairEcho {
                    label: p.label.clone(),
                    map1: p.def_1.describe(),
                    map2: p.def_2.describe(),
                })
                .collect(),
        }
    }

    /// Output directory with the environment override applied; an explicit
    /// command-line directory wins over both.
    pub fn resolve_output_dir(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| self.output_dir.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_applied() {
        let c = parse_config("[[pairs]]\nmap1 = \"identity\"\nmap2 = \"scale:0.5\"\n").unwrap();
        assert_eq!(c.alpha, 4.0);
        assert_eq!(c.refinement, 64);
        assert_eq!(c.k, 6);
        assert_eq!(c.quadrature_level, 16);
        assert_eq!(c.pairs.len(), 1);
        assert!(!c.emit_plot_data);
    }

    #[test]
    fn alpha_two_is_rejected() {
        match parse_config("alpha = 2.0\n") {
            Err(CliError::Validation { field, constraint }) => {
                assert_eq!(field, "alpha");
                assert!(constraint.contains("alpha > 2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_map_names_the_token() {
        let err = parse_config("[[pairs]]\nmap1 = \"identity\"\nmap2 = \"cardioid:0.5\"\n").unwrap_err();
        match err {
            CliError::Token { token, .. } => assert_eq!(token, "cardioid"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_limits() {
        for (text, field) in [
            ("refinement = 7", "refinement"),
            ("k = 1", "k"),
            ("quadrature_level = 4", "quadrature_level"),
            ("sobolev_ascent_iters = 0", "sobolev_ascent_iters"),
        ] {
            match parse_config(text) {
                Err(CliError::Validation { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_mention_the_line() {
        let err = parse_config("alpha = 4\nrefinement = = 3\n").unwrap_err();
        assert_eq!(err.kind(), "ParseError");
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_config("colour = 1\n").is_err());
    }

    #[test]
    fn explicit_map_table() {
        let c = parse_config(
            "[[pairs]]\nlabel = \"x\"\nmap1 = \"identity\"\nmap2 = { coeffs = [[0, 0], [1, 0], [0.05, 0]], moebius = [0.2, 0] }\n",
        )
        .unwrap();
        assert_eq!(c.pairs[0].map_2.poly_coeffs().len(), 3);
        assert_eq!(c.echo().pairs[0].label, "x");
    }
}
