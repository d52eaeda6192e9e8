use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use spectral_lab::commands::{exit_code_for, run, run_pairs};
use spectral_lab::config::{parse_config, OUTPUT_DIR_ENV};
use spectral_lab::exit;
use spectral_lab::output::{parse_report, report_json, table_csv, REPORT_FILE, TABLE_FILE, TABLE_HEADER};
use spectral_lab::report::PairOutcome;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectral-lab"));
    c.env_remove(OUTPUT_DIR_ENV);
    c
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "refinement = 10\nk = 4\nquadrature_level = 8\nsobolev_ascent_iters = 5\n";

#[test]
fn empty_experiment_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out = dir.path().join("out");
    let o = bin().arg("run").arg(&cfg).arg("--output-dir").arg(&out).output().unwrap();
    assert_eq!(code(&o), exit::OK, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join(TABLE_FILE)).unwrap();
    assert_eq!(csv, format!("{}\n", TABLE_HEADER.join(",")));
    let json = std::fs::read(out.join(REPORT_FILE)).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["pairs"].as_array().unwrap().len(), 0);
    assert_eq!(v["schema_version"], 1);
    parse_report(&json).unwrap();
}

#[test]
fn identity_pair_has_zero_gaps() {
    let cfg = parse_config(&format!("{SMALL}[[pairs]]\nmap1 = \"identity\"\nmap2 = \"identity\"\n")).unwrap();
    let (report, _, _) = run_pairs(&cfg);
    assert_eq!(exit_code_for(&report), exit::OK);
    let csv = String::from_utf8(table_csv(&report).unwrap()).unwrap();
    let gap_col = TABLE_HEADER.iter().position(|h| *h == "gap").unwrap();
    let rows: Vec<_> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row.split(',').nth(gap_col).unwrap(), "0.0", "{row}");
    }
}

#[test]
fn report_round_trips_bit_exactly() {
    let cfg = parse_config(&format!(
        "{SMALL}[[pairs]]\nmap1 = \"identity\"\nmap2 = \"poly:0.1:2\"\n[[pairs]]\nmap1 = \"moebius:0.3,0.1\"\nmap2 = \"scale:0.7\"\n"
    ))
    .unwrap();
    let (report, _, _) = run_pairs(&cfg);
    let bytes = report_json(&report).unwrap();
    let back = parse_report(&bytes).unwrap();
    assert_eq!(back, report);
    assert_eq!(report_json(&back).unwrap(), bytes);
    let PairOutcome::Completed(p) = &back.pairs[1].outcome else {
        panic!("pair errored")
    };
    let PairOutcome::Completed(q) = &report.pairs[1].outcome else {
        unreachable!()
    };
    for (a, b) in p.rows.iter().zip(&q.rows) {
        assert_eq!(a.lambda_2.to_bits(), b.lambda_2.to_bits());
        assert_eq!(a.theorem_bound.to_bits(), b.theorem_bound.to_bits());
    }
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{SMALL}output_dir = \"from-config\"\n"));
    let env_dir = dir.path().join("from-env");
    let o = bin()
        .current_dir(dir.path())
        .env(OUTPUT_DIR_ENV, &env_dir)
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::OK, "{}", stderr(&o));
    assert!(env_dir.join(REPORT_FILE).exists());
    assert!(!dir.path().join("from-config").exists());

    let flag_dir = dir.path().join("from-flag");
    let o = bin()
        .current_dir(dir.path())
        .env(OUTPUT_DIR_ENV, &env_dir)
        .arg("run")
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&flag_dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), exit::OK);
    assert!(flag_dir.join(REPORT_FILE).exists());

    let o = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(code(&o), exit::OK);
    assert!(dir.path().join("from-config").join(REPORT_FILE).exists());
}

#[test]
fn plot_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&format!(
        "{SMALL}emit_plot_data = true\n[[pairs]]\nmap1 = \"identity\"\nmap2 = \"scale:0.5\"\n"
    ))
    .unwrap();
    let out = run(&cfg, dir.path()).unwrap();
    assert_eq!(out.exit_code, exit::OK);
    let eig = std::fs::read_to_string(dir.path().join("pair00_map1_eigfun.txt")).unwrap();
    let vertices = 1 + 3 * 10 * 11;
    let data: Vec<&str> = eig.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect();
    assert_eq!(data.len(), vertices + 6 * 100);
    assert!(data[..vertices].iter().all(|l| l.split_whitespace().count() == 3));
    assert!(data[vertices..].iter().all(|l| l.split_whitespace().count() == 3));
    let boundary = std::fs::read_to_string(dir.path().join("pair00_boundary.txt")).unwrap();
    let rows: Vec<&str> = boundary.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 512);
    // scale(0.5) boundary is the circle of radius 1/2
    for r in rows {
        let v: Vec<f64> = r.split_whitespace().map(|x| x.parse().unwrap()).collect();
        assert!((v[3].hypot(v[4]) - 0.5).abs() < 1e-14, "{r}");
    }
}

#[test]
fn exit_code_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.join("out");
    let blocker = write(d, "not-a-dir", "");
    let cases: Vec<(&str, String, i32, &str)> = vec![
        ("valid", format!("{SMALL}[[pairs]]\nmap1 = \"identity\"\nmap2 = \"scale:0.9\"\n"), exit::OK, ""),
        ("alpha two", "alpha = 2.0\n".into(), exit::USAGE, "ValidationError"),
        ("refinement", "refinement = 4\n".into(), exit::USAGE, "ValidationError"),
        ("k", "k = 1\n".into(), exit::USAGE, "ValidationError"),
        ("level", "quadrature_level = 7\n".into(), exit::USAGE, "ValidationError"),
        ("syntax", "alpha = \n".into(), exit::USAGE, "ParseError"),
        ("unknown key", "colour = 1\n".into(), exit::USAGE, "ParseError"),
        (
            "unknown map",
            "[[pairs]]\nmap1 = \"identity\"\nmap2 = \"square\"\n".into(),
            exit::USAGE,
            "ParseError",
        ),
        (
            "non-univalent pair",
            format!("{SMALL}[[pairs]]\nmap1 = \"identity\"\nmap2 = {{ coeffs = [[0, 0], [1, 0], [-2, 0]] }}\n"),
            exit::NUMERICAL,
            "",
        ),
    ];
    for (name, text, want, kind) in cases {
        let cfg = write(d, "c.toml", &text);
        let o = bin().arg("run").arg(&cfg).arg("--output-dir").arg(&out).output().unwrap();
        assert_eq!(code(&o), want, "{name}: {}", stderr(&o));
        if !kind.is_empty() {
            let line = stderr(&o).lines().last().unwrap_or_default().to_string();
            assert!(line.starts_with(&format!("error kind={kind} message=\"")), "{name}: {line}");
        }
    }

    let cfg = write(d, "c.toml", SMALL);
    let o = bin().arg("run").arg(d.join("missing.toml")).output().unwrap();
    assert_eq!(code(&o), exit::IO);
    assert!(stderr(&o).contains("error kind=IoError"));
    let o = bin().arg("run").arg(&cfg).arg("--output-dir").arg(blocker.join("x")).output().unwrap();
    assert_eq!(code(&o), exit::IO);

    for args in [vec!["nope"], vec!["eigs", "--k"], vec!["functionals", "--map1", "identity"]] {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(code(&o), exit::USAGE, "{args:?}");
        assert!(stderr(&o).contains("error kind=UsageError message="));
    }
    let o = bin().args(["eigs", "--map", "coeffs:0;1;-2", "--refinement", "8"]).output().unwrap();
    assert_eq!(code(&o), exit::NUMERICAL, "{}", stderr(&o));
    let o = bin().args(["quasidisc", "--k", "0.5"]).output().unwrap();
    assert_eq!(code(&o), exit::NUMERICAL, "{}", stderr(&o));
}

#[test]
fn failed_check_maps_to_exit_one() {
    let cfg = parse_config(&format!("{SMALL}[[pairs]]\nmap1 = \"identity\"\nmap2 = \"scale:0.9\"\n")).unwrap();
    let (mut report, _, _) = run_pairs(&cfg);
    assert_eq!(exit_code_for(&report), exit::OK);
    report.summary.warnings = 3;
    assert_eq!(exit_code_for(&report), exit::OK);
    report.summary.failures = 1;
    assert_eq!(exit_code_for(&report), exit::CHECK_FAILED);
    report.summary.errored = 1;
    assert_eq!(exit_code_for(&report), exit::NUMERICAL);
}

#[test]
fn selftest_passes() {
    let o = bin().arg("selftest").output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), exit::OK, "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 10);
    assert!(!text.contains("FAIL "));
}

#[test]
fn quasidisc_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let pts: String = (0..64)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / 64.0;
            format!("{} {}\n", t.cos(), t.sin())
        })
        .collect();
    let curve = write(dir.path(), "circle.txt", &format!("# unit circle\n{pts}"));
    let o = bin().arg("quasidisc").arg("--curve").arg(&curve).args(["--samples", "64"]).output().unwrap();
    assert_eq!(code(&o), exit::OK, "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    let c: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("ahlfors_constant = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((c - 1.0).abs() < 1e-2, "{c}");
    let o = bin().args(["quasidisc", "--k", "1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("sup_p = inf"));
    let o = bin().args(["quasidisc"]).output().unwrap();
    assert_eq!(code(&o), exit::USAGE);
}

const MAP_POOL: [&str; 8] = [
    "identity",
    "scale:0.8",
    "scale:1.3",
    "moebius:0.2",
    "moebius:-0.1,0.3",
    "poly:0.05:2",
    "poly:0.1:3",
    "coeffs:0,0;1,0;0.1,0.05",
];

fn config_text(alpha: f64, r: usize, k: usize, level: usize, pairs: &[(usize, usize)]) -> String {
    let mut s = format!(
        "alpha = {alpha}\nrefinement = {r}\nk = {k}\nquadrature_level = {level}\nsobolev_ascent_iters = 4\n"
    );
    for (a, b) in pairs {
        s += &format!("[[pairs]]\nmap1 = \"{}\"\nmap2 = \"{}\"\n", MAP_POOL[*a], MAP_POOL[*b]);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn valid_configs_exit_cleanly(
        alpha in 2.2f64..9.0,
        r in 8usize..12,
        k in 2usize..5,
        level in 8usize..12,
        pairs in prop::collection::vec((0usize..8, 0usize..8), 0..3),
    ) {
        let cfg = parse_config(&config_text(alpha, r, k, level, &pairs)).unwrap();
        let (report, _, _) = run_pairs(&cfg);
        prop_assert_eq!(report.summary.errored, 0);
        prop_assert_eq!(report.summary.failures, 0);
        prop_assert_eq!(exit_code_for(&report), exit::OK);
        prop_assert_eq!(report.pairs.len(), pairs.len());
        let bytes = report_json(&report).unwrap();
        prop_assert_eq!(parse_report(&bytes).unwrap(), report);
    }

    #[test]
    fn invalid_numbers_are_usage_errors(
        alpha in -3.0f64..=2.0,
        r in 0usize..8,
        which in 0usize..2,
    ) {
        let text = if which == 0 {
            config_text(alpha, 10, 3, 8, &[(0, 1)])
        } else {
            config_text(4.0, r, 3, 8, &[(0, 1)])
        };
        let err = parse_config(&text).unwrap_err();
        prop_assert_eq!(err.exit_code(), exit::USAGE);
        prop_assert_eq!(err.kind(), "ValidationError");
    }
}
