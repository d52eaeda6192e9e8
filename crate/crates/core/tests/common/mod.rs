#![allow(dead_code)]

/// `J_m(x)` by its power series; accurate for the small arguments used here.
pub fn bessel_j(m: i32, x: f64) -> f64 {
    if m < 0 {
        let v = bessel_j(-m, x);
        return if m % 2 == 0 { v } else { -v };
    }
    let half = x / 2.0;
    let mut term = half.powi(m) / (1..=m).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k as f64 + m as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

pub fn bessel_j_prime(m: i32, x: f64) -> f64 {
    0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
}

/// Positive zeros of `J_m'` below `x_max`, by sign scan and bisection.
pub fn bessel_j_prime_zeros(m: i32, x_max: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    let step = 1e-3;
    let mut a = 1e-3;
    let mut fa = bessel_j_prime(m, a);
    while a < x_max {
        let b = a + step;
        let fb = bessel_j_prime(m, b);
        if fa == 0.0 || fa * fb < 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if bessel_j_prime(m, lo) * bessel_j_prime(m, mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    zeros
}

/// Smallest `k` Neumann eigenvalues of the unit disc with multiplicity:
/// `0` and `(j'_{m,i})²`, doubled for `m ≥ 1`.
pub fn disc_neumann_eigenvalues(k: usize) -> Vec<f64> {
    let mut all = vec![0.0];
    for m in 0..12 {
        for z in bessel_j_prime_zeros(m, 14.0) {
            all.push(z * z);
            if m > 0 {
                all.push(z * z);
            }
        }
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.truncate(k);
    all
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
