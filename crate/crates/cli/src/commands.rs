use std::path::{Path, PathBuf};
use std::time::Instant;

use confspec::fem::assembly::local_stiffness;
use confspec::fem::{Discretization, WeightedProblem};
use confspec::functionals::{exponent_bridge, PairFunctionals};
use confspec::quasidisc::{
    admissible_exponent, ahlfors_constant, m_constant_formula, smirnov_dim_bound, AhlforsEstimate, MConstant,
    PolylineCurve,
};
use confspec::stability::{self, run_pair_with_solutions, PairRun};
use confspec::{Complex64, Eigen64, Map64, Mesh64, Rule64, SolverOptions};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{exit, CliError, Result};
use crate::output::{emit_report, PlotData, Timings};
use crate::report::{PairEntry, PairOutcome, StabilityReport};

pub struct RunOutcome {
    pub report: StabilityReport,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

/// Exit status of a finished report: numerical errors beat check failures;
/// estimated-constant warnings do not count.
pub fn exit_code_for(report: &StabilityReport) -> i32 {
    if report.summary.errored > 0 {
        exit::NUMERICAL
    } else if report.summary.failures > 0 {
        exit::CHECK_FAILED
    } else {
        exit::OK
    }
}

/// Runs every pair (concurrently; results keep config order) and builds the report.
pub fn run_pairs(config: &ExperimentConfig) -> (StabilityReport, Vec<Option<PairRun<f64>>>, Timings) {
    let params = config.params();
    let solver = config.solver();
    let start = Instant::now();
    let results: Vec<(PairEntry, Option<PairRun<f64>>, f64)> = config
        .pairs
        .par_iter()
        .map(|p| {
            let t = Instant::now();
            let res = run_pair_with_solutions(&p.map_1, &p.map_2, &params, &solver);
            let secs = t.elapsed().as_secs_f64();
            match res {
                Ok(run) => (
                    PairEntry {
                        label: p.label.clone(),
                        outcome: PairOutcome::Completed(Box::new(run.report.clone())),
                    },
                    Some(run),
                    secs,
                ),
                Err(e) => (
                    PairEntry {
                        label: p.label.clone(),
                        outcome: PairOutcome::Error {
                            kind: e.kind().into(),
                            message: e.to_string(),
                        },
                    },
                    None,
                    secs,
                ),
            }
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut runs = Vec::with_capacity(results.len());
    let mut times = Vec::with_capacity(results.len());
    for (entry, run, secs) in results {
        times.push((entry.label.clone(), secs));
        entries.push(entry);
        runs.push(run);
    }
    let report = StabilityReport::new(config, entries);
    let timings = Timings {
        pairs: times,
        total_seconds: start.elapsed().as_secs_f64(),
    };
    (report, runs, timings)
}

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let (report, runs, timings) = run_pairs(config);
    let plots: Vec<Option<PlotData<'_>>> = if config.emit_plot_data {
        runs.iter()
            .map(|r| {
                r.as_ref().map(|r| PlotData {
                    mesh: &r.mesh,
                    maps: [&r.report.map_1, &r.report.map_2],
                    eigfuns: [&r.solution_1.eigenvectors[1], &r.solution_2.eigenvectors[1]],
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    let files = emit_report(&report, &timings, &plots, out_dir)?;
    let exit_code = exit_code_for(&report);
    Ok(RunOutcome {
        report,
        files,
        exit_code,
    })
}

pub fn eigs(map: &Map64, refinement: usize, k: usize) -> Result<Eigen64> {
    if refinement < 1 {
        return Err(CliError::validation("refinement", "refinement >= 1 required"));
    }
    map.check_univalent(32)?;
    let disc = Discretization::unit_disc(refinement)?;
    Ok(WeightedProblem::new(&disc, map)?.solve(k, &SolverOptions::default())?)
}

pub fn functionals(map1: &Map64, map2: &Map64, alpha: f64, level: usize) -> Result<PairFunctionals<f64>> {
    if !(alpha > 2.0) {
        return Err(CliError::validation("alpha", format!("alpha > 2 required, got {alpha}")));
    }
    if level < 8 {
        return Err(CliError::validation("level", "level >= 8 required"));
    }
    Ok(PairFunctionals::compute(map1, map2, alpha, &Rule64::new(level)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    Circle,
    Ellipse,
    Koch,
}

impl Fixture {
    pub fn curve(self) -> Result<PolylineCurve<f64>> {
        Ok(match self {
            Fixture::Circle => PolylineCurve::regular_polygon(256, 1.0)?,
            Fixture::Ellipse => PolylineCurve::ellipse(2.0, 1.0, 256)?,
            Fixture::Koch => PolylineCurve::koch_snowflake(3)?,
        })
    }
}

pub struct QuasidiscOutput {
    pub lines: Vec<(String, String)>,
    pub m_constant: Option<MConstant<f64>>,
    pub ahlfors: Option<AhlforsEstimate<f64>>,
}

fn fmt_inf(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x:?}")
    }
}

/// `estimate_m_at` gives the mesh refinement used for the `C(q)` estimate.
pub fn quasidisc(
    k: Option<f64>,
    curve: Option<PolylineCurve<f64>>,
    samples: usize,
    estimate_m_at: Option<usize>,
) -> Result<QuasidiscOutput> {
    let mut lines = Vec::new();
    let mut m_constant = None;
    if let Some(k) = k {
        let e = admissible_exponent(k)?;
        lines.push(("K".into(), format!("{k:?}")));
        lines.push(("sup_p".into(), fmt_inf(e.sup_p)));
        lines.push(("chosen_p".into(), fmt_inf(e.chosen_p)));
        lines.push(("smirnov_dim_bound".into(), format!("{:?}", smirnov_dim_bound(k)?)));
        if let Some(r) = estimate_m_at {
            if k > 1.0 {
                let disc = Discretization::unit_disc(r)?;
                let p = WeightedProblem::new(&disc, &Map64::identity())?;
                let m = m_constant_formula(k, |q| Ok(p.sobolev_constant(q, 60, &SolverOptions::default())?.value))?;
                lines.push(("m_q".into(), format!("{:?}", m.q)));
                lines.push(("m_c_q_estimate".into(), format!("{:?}", m.c_q)));
                lines.push(("m_constant_estimate".into(), format!("{:?}", m.m)));
                m_constant = Some(m);
            }
        }
    }
    let mut ahlfors = None;
    if let Some(c) = curve {
        let a = ahlfors_constant(&c, samples)?;
        lines.push(("ahlfors_constant".into(), format!("{:?}", a.constant)));
        lines.push(("ahlfors_samples".into(), a.samples.to_string()));
        lines.push(("ahlfors_skipped_pairs".into(), a.skipped_pairs.to_string()));
        ahlfors = Some(a);
    }
    if lines.is_empty() {
        return Err(CliError::validation("quasidisc", "give --k and/or a curve (--curve or --fixture)"));
    }
    Ok(QuasidiscOutput {
        lines,
        m_constant,
        ahlfors,
    })
}

pub struct SelftestCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn case(name: &'static str, f: impl FnOnce() -> std::result::Result<String, String>) -> SelftestCase {
    match f() {
        Ok(detail) => SelftestCase {
            name,
            passed: true,
            detail,
        },
        Err(detail) => SelftestCase {
            name,
            passed: false,
            detail,
        },
    }
}

fn close(got: f64, want: f64, rel: f64) -> std::result::Result<String, String> {
    if (got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE) {
        Ok(format!("{got:?} ~ {want:?}"))
    } else {
        Err(format!("{got:?} vs expected {want:?} (rel tol {rel:e})"))
    }
}

fn all(results: Vec<std::result::Result<String, String>>) -> std::result::Result<String, String> {
    let mut ok = Vec::new();
    for r in results {
        ok.push(r?);
    }
    Ok(ok.join("; "))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Squares of the first zeros of `J_1'`, `J_2'` and `J_0'`: the nonzero
/// Neumann eigenvalues of the unit disc up to the sixth.
const DISC_EIGENVALUES: [f64; 5] = [
    3.389_957_398_840_687,
    3.389_957_398_840_687,
    9.328_363_213_746_91,
    9.328_363_213_746_91,
    14.681_970_642_123_893,
];

pub fn selftest() -> Vec<SelftestCase> {
    let pi = std::f64::consts::PI;
    let id = Map64::identity();
    let half = Map64::scale(0.5).expect("valid scale");
    vec![
        case("mesh_counts", || {
            let m1 = Mesh64::unit_disc(1).map_err(e)?;
            let m2 = Mesh64::unit_disc(2).map_err(e)?;
            if m1.num_vertices() == 7 && m1.triangles.len() == 6 && m2.num_vertices() == 19 {
                Ok("R=1: 7 vertices, 6 triangles; R=2: 19 vertices".into())
            } else {
                Err(format!("{} {} {}", m1.num_vertices(), m1.triangles.len(), m2.num_vertices()))
            }
        }),
        case("reference_stiffness", || {
            let p = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
            let k = local_stiffness(p, 0.5);
            let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
            let err = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (k[i][j] - want[i][j]).abs()).fold(0.0, f64::max);
            if err < 1e-15 {
                Ok("matches 1/2 [[2,-1,-1],[-1,1,0],[-1,0,1]]".into())
            } else {
                Err(format!("max deviation {err:e}"))
            }
        }),
        case("functional_closed_forms", || {
            let f = functionals(&id, &half, 4.0, 16).map_err(e)?;
            all(vec![
                close(f.d_s, 0.75 * 2f64.sqrt() * pi.powf(0.75), 1e-8),
                close(f.e_alpha, (4.0 * pi).powf(0.25), 1e-8),
                close(f.l2_gap, pi.sqrt() / 2.0, 1e-8),
                close(f.measure_variation, 0.75 * pi, 1e-8),
                close(f.area_2, pi / 4.0, 1e-12),
            ])
        }),
        case("exponent_bridge", || {
            let a = exponent_bridge(4.0).map_err(e)?;
            let b = exponent_bridge(6.0).map_err(e)?;
            all(vec![close(a.s, 4.0 / 3.0, 1e-15), close(a.q, 8.0, 1e-15), close(b.s, 1.5, 1e-15), close(b.q, 6.0, 1e-15)])
        }),
        case("disc_spectrum_r24", || {
            let sol = eigs(&id, 24, 6).map_err(e)?;
            if sol.eigenvalues[0].abs() > 1e-8 {
                return Err(format!("lambda_1 = {:e}", sol.eigenvalues[0]));
            }
            all(sol.eigenvalues[1..].iter().zip(DISC_EIGENVALUES).map(|(g, w)| close(*g, w, 0.03)).collect())
        }),
        case("exact_scaling", || {
            let a = eigs(&id, 10, 5).map_err(e)?;
            let b = eigs(&Map64::scale(0.9).map_err(e)?, 10, 5).map_err(e)?;
            all((1..5).map(|n| close(b.eigenvalues[n] * 0.81, a.eigenvalues[n], 1e-10)).collect())
        }),
        case("moebius_area", || {
            let m = Map64::moebius(Complex64::new(0.4, 0.0)).map_err(e)?;
            close(confspec::functionals::domain_area(&m, &Rule64::new(32).map_err(e)?), pi, 1e-8)
        }),
        case("bound_arithmetic", || {
            let l = stability::lemma31_bound(1.0, 4.0).map_err(e)?;
            all(vec![
                close(l.tight, 4.0 / 3.0, 1e-15),
                close(stability::nontriviality_threshold(1.0, 1.0, 1.0).map_err(e)?, 0.5, 1e-15),
            ])
        }),
        case("quasidisc_formulas", || {
            let k2 = admissible_exponent(2.0).map_err(e)?;
            let circle = ahlfors_constant(&Fixture::Circle.curve().map_err(e)?, 256).map_err(e)?;
            all(vec![
                close(k2.sup_p, 8.0 / 3.0, 1e-15),
                close(k2.chosen_p, 7.0 / 3.0, 1e-15),
                close(smirnov_dim_bound(3.0).map_err(e)?, 1.25, 0.0),
                close(circle.constant, 1.0, 1e-3),
            ])
        }),
        case("discrete_two_weight_lemma", || {
            let mesh = Mesh64::unit_disc(12).map_err(e)?;
            let rep = stability::verify_lemma_two_weights(
                &mesh,
                &id,
                &Map64::poly_perturb(0.1, 2).map_err(e)?,
                6,
                &SolverOptions::default(),
            )
            .map_err(e)?;
            Ok(format!("holds for n <= 6, B = {:?}", rep.b_discrete))
        }),
        case("sobolev_q2_equals_poincare", || {
            let disc = Discretization::unit_disc(12).map_err(e)?;
            let p = WeightedProblem::new(&disc, &id).map_err(e)?;
            let opts = SolverOptions::default();
            close(
                p.sobolev_constant(2.0, 20, &opts).map_err(e)?.value,
                p.poincare_constant(&opts).map_err(e)?,
                1e-4,
            )
        }),
    ]
}
