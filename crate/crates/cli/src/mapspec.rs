//! Map definitions as they appear on the command line and in configs.
//!
//! ```text
//! identity
//! scale:<c>
//! moebius:<re>[,<im>]
//! poly:<eps>:<k>                 z + (eps/k) z^k
//! coeffs:<c0>;<c1>;...           each ci is <re>[,<im>]
//! ```

use confspec::{Complex64, Map64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A map given either by a spec string or by explicit coefficients after an
/// optional disc automorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapDef {
    Spec(String),
    Explicit {
        coeffs: Vec<[f64; 2]>,
        #[serde(default)]
        moebius: [f64; 2],
        #[serde(default)]
        label: Option<String>,
    },
}

impl MapDef {
    pub fn build(&self) -> Result<Map64> {
        match self {
            MapDef::Spec(s) => parse_map(s),
            MapDef::Explicit { coeffs, moebius, label } => {
                let poly: Vec<Complex64> = coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
                let label = label.clone().unwrap_or_else(|| self.describe());
                Map64::new(Complex64::new(moebius[0], moebius[1]), poly, label)
                    .map_err(|e| CliError::validation("map", e.to_string()))
            }
        }
    }

    /// Text form used in reports.
    pub fn describe(&self) -> String {
        match self {
            MapDef::Spec(s) => s.trim().to_string(),
            MapDef::Explicit { coeffs, moebius, .. } => {
                let cs: Vec<String> = coeffs.iter().map(|c| format!("{:?},{:?}", c[0], c[1])).collect();
                if *moebius == [0.0, 0.0] {
                    format!("coeffs:{}", cs.join(";"))
                } else {
                    format!("moebius:{:?},{:?}+coeffs:{}", moebius[0], moebius[1], cs.join(";"))
                }
            }
        }
    }
}

fn number(tok: &str) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| CliError::token(tok.trim(), "expected a number"))?;
    if !v.is_finite() {
        return Err(CliError::token(tok.trim(), "expected a finite number"));
    }
    Ok(v)
}

fn complex(tok: &str) -> Result<Complex64> {
    let mut parts = tok.split(',');
    let re = number(parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(t) => number(t)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(CliError::token(tok, "expected <re>[,<im>]"));
    }
    Ok(Complex64::new(re, im))
}

fn arity(spec: &str, args: &[&str], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(CliError::token(spec, format!("expected {n} argument(s)")));
    }
    Ok(())
}

pub fn parse_map(spec: &str) -> Result<Map64> {
    let spec = spec.trim();
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("");
    let args: Vec<&str> = parts.collect();
    let invalid = |e: confspec::Error| CliError::validation("map", format!("{spec}: {e}"));
    match name {
        "identity" => {
            arity(spec, &args, 0)?;
            Ok(Map64::identity())
        }
        "scale" => {
            arity(spec, &args, 1)?;
            Map64::scale(number(args[0])?).map_err(invalid)
        }
        "moebius" => {
            arity(spec, &args, 1)?;
            Map64::moebius(complex(args[0])?).map_err(invalid)
        }
        "poly" => {
            arity(spec, &args, 2)?;
            let eps = number(args[0])?;
            let k: usize = args[1]
                .trim()
                .parse()
                .map_err(|_| CliError::token(args[1].trim(), "expected an integer power"))?;
            Map64::poly_perturb(eps, k).map_err(invalid)
        }
        "coeffs" => {
            arity(spec, &args, 1)?;
            let coeffs = args[0].split(';').map(complex).collect::<Result<Vec<_>>>()?;
            Map64::new(Complex64::new(0.0, 0.0), coeffs, spec).map_err(invalid)
        }
        other => Err(CliError::token(other, "unknown map name (identity, scale, moebius, poly, coeffs)")),
    }
}
