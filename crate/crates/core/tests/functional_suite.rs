use std::f64::consts::PI;

use confspec::functionals::*;
use confspec::{Complex64, Map64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn suite_maps() -> Vec<Map64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    vec![
        Map64::identity(),
        Map64::scale(0.5).unwrap(),
        Map64::scale(0.9).unwrap(),
        Map64::moebius(c(0.3, 0.0)).unwrap(),
        Map64::moebius(c(0.2, 0.3)).unwrap(),
        Map64::poly_perturb(0.05, 2).unwrap(),
        Map64::poly_perturb(0.2, 2).unwrap(),
        Map64::poly_perturb(0.15, 3).unwrap(),
        Map64::poly_perturb(0.1, 5).unwrap(),
        Map64::new(c(0.25, 0.0), vec![c(0.0, 0.0), c(0.8, 0.0), c(0.1, 0.05)], "mixed").unwrap(),
    ]
}

/// Ordered pairs of distinct suite maps, plus one equal pair.
fn suite_pairs() -> Vec<(Map64, Map64)> {
    let maps = suite_maps();
    let mut pairs = vec![(maps[0].clone(), maps[0].clone())];
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            pairs.push((maps[i].clone(), maps[j].clone()));
        }
    }
    pairs
}

#[test]
fn suite_is_large_enough() {
    assert!(suite_pairs().len() >= 12);
}

#[test]
fn lemma42_gap_squared_below_measure_variation() {
    for level in [16, 32] {
        let rule = QuadratureRule::new(level).unwrap();
        let mut violations = 0;
        for (a, b) in suite_pairs() {
            let g = l2_deriv_gap(&a, &b, &rule).unwrap();
            let mv = measure_variation(&a, &b, &rule).unwrap();
            if g * g > mv * (1.0 + 1e-12) + 1e-15 {
                violations += 1;
                eprintln!("{} vs {}: {} > {}", a.label(), b.label(), g * g, mv);
            }
        }
        assert_eq!(violations, 0, "level {level}");
    }
}

#[test]
fn lemma41_d_s_below_twice_e_times_gap() {
    for level in [16, 32] {
        let rule = QuadratureRule::new(level).unwrap();
        let mut violations = 0;
        for (a, b) in suite_pairs() {
            for p in [3.0, 4.0, 6.0] {
                let s = exponent_bridge(p).unwrap().s;
                let lhs = d_s(&a, &b, s, &rule).unwrap();
                let rhs = 2.0 * e_alpha(&a, &b, p, &rule).unwrap() * l2_deriv_gap(&a, &b, &rule).unwrap();
                if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                    violations += 1;
                    eprintln!("{} vs {} p={p}: {lhs} > {rhs}", a.label(), b.label());
                }
            }
        }
        assert_eq!(violations, 0, "level {level}");
    }
}

#[test]
fn functionals_are_symmetric_exactly() {
    let rule = QuadratureRule::new(16).unwrap();
    for (a, b) in suite_pairs() {
        assert_eq!(e_alpha(&a, &b, 4.0, &rule).unwrap(), e_alpha(&b, &a, 4.0, &rule).unwrap());
        assert_eq!(d_s(&a, &b, 1.5, &rule).unwrap(), d_s(&b, &a, 1.5, &rule).unwrap());
        assert_eq!(l2_deriv_gap(&a, &b, &rule).unwrap(), l2_deriv_gap(&b, &a, &rule).unwrap());
        assert_eq!(measure_variation(&a, &b, &rule).unwrap(), measure_variation(&b, &a, &rule).unwrap());
    }
}

#[test]
fn e_alpha_collapses_to_area_root() {
    let rule = QuadratureRule::new(20).unwrap();
    for m in suite_maps() {
        for alpha in [3.0, 4.0, 6.0] {
            let e = e_alpha(&m, &m, alpha, &rule).unwrap();
            let want = domain_area(&m, &rule).powf(1.0 / alpha);
            assert!((e / want - 1.0).abs() < 1e-10, "{} alpha={alpha}", m.label());
        }
    }
}

#[test]
fn pair_regularity_bounded_by_e_alpha() {
    let rule = QuadratureRule::new(16).unwrap();
    for (a, b) in suite_pairs() {
        let (f, i) = pair_regularity(&a, &b, 4.0, &rule).unwrap();
        let e = e_alpha(&a, &b, 4.0, &rule).unwrap();
        assert!(f.max(i).powf(0.25) <= e * (1.0 + 1e-12));
    }
    let (f, i) = pair_regularity(&Map64::identity(), &Map64::scale(0.5).unwrap(), 4.0, &rule).unwrap();
    assert!((f - PI / 16.0).abs() < 1e-12 && (i - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn quadrature_converges_for_kink_free_polynomial_pairs() {
    // The weights of these pairs never cross, so every integrand is smooth.
    let pairs = [
        (Map64::identity(), Map64::scale(0.5).unwrap()),
        (Map64::poly_perturb(0.1, 2).unwrap(), Map64::scale(0.5).unwrap()),
        (Map64::poly_perturb(0.2, 4).unwrap(), Map64::scale(0.7).unwrap()),
        (Map64::poly_perturb(0.15, 3).unwrap(), Map64::scale(1.5).unwrap()),
    ];
    for (a, b) in &pairs {
        for level in [16, 32] {
            let lo = PairFunctionals::compute(a, b, 4.0, &QuadratureRule::new(level).unwrap()).unwrap();
            let hi = PairFunctionals::compute(a, b, 4.0, &QuadratureRule::new(2 * level).unwrap()).unwrap();
            for (x, y) in [
                (lo.lp_norm_1, hi.lp_norm_1),
                (lo.lp_norm_2, hi.lp_norm_2),
                (lo.e_alpha, hi.e_alpha),
                (lo.d_s, hi.d_s),
                (lo.l2_gap, hi.l2_gap),
                (lo.measure_variation, hi.measure_variation),
                (lo.area_1, hi.area_1),
                (lo.area_2, hi.area_2),
            ] {
                assert!((x - y).abs() < 1e-8, "{} vs {} level {level}: {x} {y}", a.label(), b.label());
            }
        }
    }
}

#[test]
fn quadrature_error_shrinks_when_weights_cross() {
    let a = Map64::poly_perturb(0.1, 2).unwrap();
    let b = Map64::poly_perturb(0.1, 3).unwrap();
    let value = |l: usize| PairFunctionals::compute(&a, &b, 4.0, &QuadratureRule::new(l).unwrap()).unwrap();
    let (v16, v32, v64) = (value(16), value(32), value(64));
    let d1 = (v16.measure_variation - v32.measure_variation).abs();
    let d2 = (v32.measure_variation - v64.measure_variation).abs();
    assert!(d2 < d1 && d2 < 1e-4, "{d1} {d2}");
    // smooth functionals stay at rounding level even here
    assert!((v16.l2_gap - v64.l2_gap).abs() < 1e-12);
    assert!((v16.lp_norm_2 - v64.lp_norm_2).abs() < 1e-12);
}

#[test]
fn single_map_functionals_converge() {
    for m in suite_maps() {
        let a = domain_area(&m, &QuadratureRule::new(16).unwrap());
        let b = domain_area(&m, &QuadratureRule::new(32).unwrap());
        assert!((a - b).abs() < 1e-8, "{}", m.label());
    }
    let mo = Map64::moebius(Complex64::new(0.4, 0.0)).unwrap();
    assert!((domain_area(&mo, &QuadratureRule::new(32).unwrap()) - PI).abs() < 1e-8);
}

#[test]
fn measure_variation_matches_monte_carlo() {
    let a = Map64::moebius(Complex64::new(0.3, 0.0)).unwrap();
    let b = Map64::identity();
    let exact = measure_variation(&a, &b, &QuadratureRule::new(64).unwrap()).unwrap();
    let [p1, p2, m1, m2] = split_image_areas(&a, &b, &QuadratureRule::new(64).unwrap());
    assert!(((p1 - p2) - (m2 - m1)).abs() < 1e-6, "equal total areas");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 400_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let (x, y) = loop {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            if x * x + y * y < 1.0 {
                break (x, y);
            }
        };
        let z = Complex64::new(x, y);
        let v = PI * (a.weight(z) - b.weight(z)).abs();
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - exact).abs() < 4.0 * se, "mc {mean} ± {se}, quadrature {exact}");
    assert!((2.0 * (p1 - p2) - exact).abs() < 1e-6);
}
