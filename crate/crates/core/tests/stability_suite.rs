use std::time::Instant;

use confspec::fem::{Discretization, WeightedProblem};
use confspec::stability::*;
use confspec::{Complex64, Map64, Mesh64, SolverOptions};

fn params(r: usize) -> ExperimentParams {
    ExperimentParams {
        refinement: r,
        sobolev_ascent_iters: 40,
        ..ExperimentParams::default()
    }
}

#[test]
fn discrete_lemma_holds_on_suite_pairs() {
    let t = Instant::now();
    let id = Map64::identity();
    let others = [
        Map64::poly_perturb(0.05, 2).unwrap(),
        Map64::poly_perturb(0.1, 2).unwrap(),
        Map64::poly_perturb(0.2, 2).unwrap(),
        Map64::scale(0.9).unwrap(),
    ];
    for r in [32, 64] {
        let mesh = Mesh64::unit_disc(r).unwrap();
        for other in &others {
            let rep = verify_lemma_two_weights(&mesh, &id, other, 6, &SolverOptions::default())
                .unwrap_or_else(|e| panic!("R={r} {}: {e}", other.label()));
            assert!(rep.holds);
            assert!(rep.b_discrete > 0.0);
        }
    }
    assert!(t.elapsed().as_secs() < 300);
}

#[test]
fn discrete_lemma_on_more_pairs() {
    let mesh = Mesh64::unit_disc(20).unwrap();
    let c = |re, im| Complex64::new(re, im);
    let pairs = [
        (Map64::moebius(c(0.3, 0.0)).unwrap(), Map64::identity()),
        (Map64::poly_perturb(0.1, 3).unwrap(), Map64::poly_perturb(0.1, 2).unwrap()),
        (Map64::scale(0.5).unwrap(), Map64::poly_perturb(0.2, 4).unwrap()),
        (Map64::moebius(c(0.2, 0.3)).unwrap(), Map64::scale(1.2).unwrap()),
    ];
    for (a, b) in &pairs {
        let rep = verify_lemma_two_weights(&mesh, a, b, 6, &SolverOptions::default()).unwrap();
        assert!(rep.holds, "{} vs {}", a.label(), b.label());
    }
}

#[test]
fn equal_maps_give_zero_constant() {
    let mesh = Mesh64::unit_disc(12).unwrap();
    let m = Map64::poly_perturb(0.1, 3).unwrap();
    let rep = verify_lemma_two_weights(&mesh, &m, &m, 6, &SolverOptions::default()).unwrap();
    assert_eq!(rep.b_discrete, 0.0);
    assert!(rep.rows.iter().all(|r| r.gap == 0.0 && r.bound == 0.0));
}

#[test]
fn constant_ratio_constant_factorizes() {
    // |h₁ − h₂| = 0.19 everywhere and both centerings coincide, so the
    // optimal constant is 0.19 times the top ratio of the centered mass
    // against the stiffness, i.e. 0.19/λ₂.
    let disc = Discretization::unit_disc(24).unwrap();
    let p1 = WeightedProblem::new(&disc, &Map64::identity()).unwrap();
    let p2 = WeightedProblem::new(&disc, &Map64::scale(0.9).unwrap()).unwrap();
    let (b, per) = discrete_two_weight_constant(&p1, &p2, &SolverOptions::default().krylov).unwrap();
    let l2 = p1.solve(2, &SolverOptions::default()).unwrap().eigenvalues[1];
    let want = (1.0 - 0.81) / l2;
    assert!((b / want - 1.0).abs() < 1e-7, "{b} vs {want}");
    assert!((per[0] / per[1] - 1.0).abs() < 1e-7);
}

#[test]
fn null_perturbation_report_is_all_zero() {
    let id = Map64::identity();
    let rep = run_pair(&id, &id, &params(16), &SolverOptions::default()).unwrap();
    assert_eq!(rep.failures, 0);
    assert_eq!(rep.warnings, 0);
    for row in &rep.rows {
        assert_eq!(row.observed_gap, 0.0);
        assert_eq!(row.theorem_bound, 0.0);
        assert_eq!(row.measure_bound, 0.0);
        assert_eq!(row.lemma31_bound, 0.0);
        assert_eq!(row.lemma31_discrete_bound, 0.0);
    }
    assert_eq!(rep.lemma.b_discrete, 0.0);
    assert_eq!(rep.b_lemma32, 0.0);
}

#[test]
fn half_scale_theorem_bound_exceeds_gaps() {
    let rep = run_pair(&Map64::identity(), &Map64::scale(0.5).unwrap(), &params(32), &SolverOptions::default()).unwrap();
    assert_eq!(rep.failures, 0, "{:#?} {:#?}", rep.checks, rep.rows);
    // n = 1 is the trivial case 0 ≤ 0; its gap is rounding noise in λ₁
    for row in rep.rows.iter().skip(1) {
        assert!(row.theorem_bound >= row.observed_gap, "n={}", row.n);
        assert!(row.measure_bound >= row.theorem_bound);
        assert!(row.lemma31_bound < row.b * row.c_tilde_n || row.b * row.c_tilde_n == 0.0);
        assert!(row.constants_estimated);
    }
    assert!(rep.rows[0].nontriviality_threshold.is_none());
    assert!(rep.rows[1].nontriviality_threshold.is_some());
    let r2 = &rep.rows[1];
    assert!((r2.measure_bound / r2.theorem_bound - 3f64.sqrt()).abs() < 1e-8);
    let independent = 2.0 * r2.c_n * rep.constants.c_q.powi(2) * rep.functionals.e_alpha * rep.functionals.l2_gap;
    assert!((independent / r2.theorem_bound - 1.0).abs() < 1e-14);
}

#[test]
fn scaling_gap_is_exact_and_bounded() {
    for c in [0.8, 0.9, 0.95] {
        let rep = run_pair(&Map64::identity(), &Map64::scale(c).unwrap(), &params(24), &SolverOptions::default()).unwrap();
        for row in rep.rows.iter().skip(1) {
            let want = row.lambda_1 * (1.0 / (c * c) - 1.0);
            assert!((row.observed_gap / want - 1.0).abs() < 1e-9, "c={c} n={}", row.n);
            assert!(row.theorem_bound > row.observed_gap, "c={c} n={}", row.n);
            assert!(row.theorem_check.is_pass());
        }
        assert_eq!(rep.failures, 0);
    }
}

#[test]
fn ordering_and_symmetry_across_pairs() {
    let c = |re, im| Complex64::new(re, im);
    let maps = [
        Map64::identity(),
        Map64::poly_perturb(0.1, 2).unwrap(),
        Map64::moebius(c(0.3, 0.1)).unwrap(),
        Map64::scale(0.8).unwrap(),
    ];
    let p = ExperimentParams {
        k: 4,
        ..params(12)
    };
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            let ab = run_pair(&maps[i], &maps[j], &p, &SolverOptions::default()).unwrap();
            let ba = run_pair(&maps[j], &maps[i], &p, &SolverOptions::default()).unwrap();
            assert_eq!(ab.failures, 0, "{} vs {}", maps[i].label(), maps[j].label());
            for (x, y) in ab.rows.iter().zip(&ba.rows) {
                assert!(x.theorem_bound <= x.measure_bound * (1.0 + 1e-12));
                assert_eq!(x.c_n, y.c_n);
                assert_eq!(x.observed_gap, y.observed_gap);
            }
        }
    }
}

#[test]
fn epsilon_sweep_gap_grows_with_epsilon() {
    let p = ExperimentParams { k: 3, ..params(16) };
    let gaps: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&e| {
            run_pair(&Map64::identity(), &Map64::poly_perturb(e, 2).unwrap(), &p, &SolverOptions::default())
                .unwrap()
                .rows[1]
                .observed_gap
        })
        .collect();
    assert!(gaps[0] < gaps[1] && gaps[1] < gaps[2], "{gaps:?}");
}
