use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectral_lab::commands::{self, Fixture};
use spectral_lab::config::{load_config, ExperimentConfig};
use spectral_lab::error::{exit, CliError, Result};
use spectral_lab::mapspec::parse_map;

use confspec::quasidisc::PolylineCurve;

/// Neumann eigenvalues of conformal images of the disc and their stability bounds.
#[derive(Debug, Parser)]
#[command(name = "spectral-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every pair of a TOML experiment config and write the report files.
    Run {
        config: PathBuf,
        /// Overrides the environment variable and the config's `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the smallest eigenvalues for one map.
    Eigs {
        #[arg(long, default_value = "identity")]
        map: String,
        #[arg(long, default_value_t = 64)]
        refinement: usize,
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
    /// Print the pair functionals for two maps.
    Functionals {
        /// Both maps at once: `--pair identity scale:0.5`.
        #[arg(long, num_args = 2, value_names = ["MAP1", "MAP2"], conflicts_with_all = ["map1", "map2"])]
        pair: Option<Vec<String>>,
        #[arg(long, required_unless_present = "pair")]
        map1: Option<String>,
        #[arg(long, required_unless_present = "pair")]
        map2: Option<String>,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long, default_value_t = 16)]
        level: usize,
    },
    /// Quasidisc exponents for a dilatation `K` and/or an Ahlfors estimate for a curve.
    Quasidisc {
        #[arg(long)]
        k: Option<f64>,
        /// Closed polyline, one `x y` point per line.
        #[arg(long, conflicts_with = "fixture")]
        curve: Option<PathBuf>,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Also estimate the `M` constant on a mesh with this refinement.
        #[arg(long)]
        estimate_m: Option<usize>,
    },
    /// Quick built-in correctness checks.
    Selftest,
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, output_dir } => {
            let cfg: ExperimentConfig = load_config(&config)?;
            let dir = cfg.resolve_output_dir(output_dir);
            let out = commands::run(&cfg, &dir)?;
            let s = &out.report.summary;
            println!(
                "pairs={} completed={} errored={} failures={} warnings={}",
                s.pairs, s.completed, s.errored, s.failures, s.warnings
            );
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(out.exit_code)
        }
        Command::Eigs { map, refinement, k } => {
            let m = parse_map(&map)?;
            let sol = commands::eigs(&m, refinement, k)?;
            println!(
                "# weight {}, refinement {}, method {:?}, basis {}, iterations {}",
                sol.weight_label, sol.mesh_refinement, sol.method, sol.basis_size, sol.iterations
            );
            for (n, l) in sol.eigenvalues.iter().enumerate() {
                println!("{} {:?}", n + 1, l);
            }
            Ok(exit::OK)
        }
        Command::Functionals {
            pair,
            map1,
            map2,
            alpha,
            level,
        } => {
            let (m1, m2) = match pair {
                Some(p) => (p[0].clone(), p[1].clone()),
                None => (map1.unwrap_or_default(), map2.unwrap_or_default()),
            };
            let f = commands::functionals(&parse_map(&m1)?, &parse_map(&m2)?, alpha, level)?;
            for (key, v) in [
                ("alpha", f.alpha),
                ("s", f.s),
                ("p", f.p),
                ("lp_norm_1", f.lp_norm_1),
                ("lp_norm_2", f.lp_norm_2),
                ("e_alpha", f.e_alpha),
                ("d_s", f.d_s),
                ("l2_gap", f.l2_gap),
                ("measure_variation", f.measure_variation),
                ("area_1", f.area_1),
                ("area_2", f.area_2),
            ] {
                println!("{key} = {v:?}");
            }
            Ok(exit::OK)
        }
        Command::Quasidisc {
            k,
            curve,
            fixture,
            samples,
            estimate_m,
        } => {
            let curve = match (curve, fixture) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                    Some(PolylineCurve::from_text(&text)?)
                }
                (None, Some(f)) => Some(f.curve()?),
                (None, None) => None,
            };
            let out = commands::quasidisc(k, curve, samples, estimate_m)?;
            for (key, v) in out.lines {
                println!("{key} = {v}");
            }
            Ok(exit::OK)
        }
        Command::Selftest => {
            let cases = commands::selftest();
            let mut failed = 0;
            for c in &cases {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            println!("{} passed, {} failed", cases.len() - failed, failed);
            Ok(if failed == 0 { exit::OK } else { exit::CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let msg = e.kind().to_string();
            eprintln!(
                "error kind=UsageError message={}",
                serde_json::to_string(&msg).unwrap_or_default()
            );
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
