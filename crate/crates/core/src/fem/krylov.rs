//! Block Krylov Rayleigh–Ritz for the largest eigenvalues of a pencil
//! `K x = θ S x` with `S` symmetric positive definite. The basis of the
//! Krylov space of `S⁻¹K` is kept `S`-orthonormal (two passes of classical
//! Gram–Schmidt), so the Ritz problem is the ordinary symmetric matrix
//! `VᵀKV`. Used in shift-invert form for the smallest Neumann eigenvalues.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::dense::symmetric_eigen;
use crate::scalar::{axpy, dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub block: usize,
    pub max_basis: usize,
    /// Relative residual `‖Kx − θSx‖ / (|θ|‖Sx‖ + ‖Kx‖)` required for every
    /// wanted Ritz pair.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            block: 4,
            max_basis: 320,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

/// Operator triple for the pencil: `K·x`, `S·x` and `S⁻¹·x`.
pub trait Pencil<T> {
    fn dim(&self) -> usize;
    fn apply_k(&self, x: &[T], out: &mut [T]);
    fn apply_s(&self, x: &[T], out: &mut [T]);
    fn solve_s(&self, x: &mut [T]);
}

#[derive(Debug, Clone)]
pub struct RitzPairs<T> {
    /// Descending.
    pub values: Vec<T>,
    /// `S`-orthonormal.
    pub vectors: Vec<Vec<T>>,
    pub basis_size: usize,
    pub blocks: usize,
    pub max_residual: f64,
}

struct Basis<T> {
    v: Vec<Vec<T>>,
    sv: Vec<Vec<T>>,
    kv: Vec<Vec<T>>,
}

/// Largest `nev` eigenpairs of `K x = θ S x`.
pub fn largest<T: Scalar, P: Pencil<T>>(pencil: &P, nev: usize, opts: &KrylovOptions) -> Result<RitzPairs<T>> {
    let n = pencil.dim();
    if nev == 0 || nev > n {
        return Err(Error::arg("nev", format!("need 1 <= nev <= {n}")));
    }
    let block = opts.block.max(1).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pending: Vec<Vec<T>> = (0..block)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    // A solve first filters the start block towards the wanted end.
    for w in pending.iter_mut() {
        pencil.solve_s(w);
    }

    let mut basis = Basis {
        v: Vec::new(),
        sv: Vec::new(),
        kv: Vec::new(),
    };
    let mut gram: Vec<Vec<T>> = Vec::new();
    let mut blocks = 0;
    let mut last_residual = f64::INFINITY;
    let tol = T::lit(opts.tol);

    loop {
        blocks += 1;
        let start = basis.v.len();
        for mut w in pending.drain(..) {
            if basis.v.len() >= opts.max_basis.min(n) {
                break;
            }
            let mut sw = vec![T::zero(); n];
            pencil.apply_s(&w, &mut sw);
            let norm0 = dot(&w, &sw).max(T::zero()).sqrt();
            if !(norm0 > T::zero()) {
                continue;
            }
            for _ in 0..2 {
                let coeffs: Vec<T> = basis.sv.iter().map(|s| dot(s, &w)).collect();
                for (c, v) in coeffs.iter().zip(&basis.v) {
                    axpy(-*c, v, &mut w);
                }
            }
            pencil.apply_s(&w, &mut sw);
            let norm = dot(&w, &sw).max(T::zero()).sqrt();
            if !(norm > T::lit(1e-10) * norm0) {
                continue;
            }
            let inv = norm.recip();
            w.iter_mut().for_each(|x| *x *= inv);
            sw.iter_mut().for_each(|x| *x *= inv);
            let mut kw = vec![T::zero(); n];
            pencil.apply_k(&w, &mut kw);
            let row: Vec<T> = basis.v.iter().map(|v| dot(v, &kw)).collect();
            for (r, g) in gram.iter_mut().zip(&row) {
                r.push(*g);
            }
            let mut new_row = row;
            new_row.push(dot(&w, &kw));
            gram.push(new_row);
            basis.v.push(w);
            basis.sv.push(sw);
            basis.kv.push(kw);
        }
        let m = basis.v.len();
        let stalled = m == start;

        if m >= nev {
            let ritz = ritz_pairs(&basis, &gram, nev)?;
            let worst = ritz.2;
            last_residual = worst.to_f64_lossy();
            // An exhausted (invariant) Krylov space gives exact Ritz pairs up
            // to rounding, so only a loose residual check applies there.
            if worst <= tol || stalled || m == n {
                if worst > tol.max(T::lit(1e-6)) {
                    return Err(Error::ConvergenceFailure {
                        iterations: blocks,
                        basis: m,
                        residual: last_residual,
                    });
                }
                return Ok(RitzPairs {
                    values: ritz.0,
                    vectors: ritz.1,
                    basis_size: m,
                    blocks,
                    max_residual: last_residual,
                });
            }
        } else if stalled {
            // Krylov space exhausted below nev vectors: the remaining
            // eigenvalues are those of K on the S-complement, all zero when
            // K vanishes there.
            let ritz = ritz_pairs(&basis, &gram, m)?;
            let mut values = ritz.0;
            let mut vectors = ritz.1;
            while values.len() < nev {
                values.push(T::zero());
                vectors.push(vec![T::zero(); n]);
            }
            return Ok(RitzPairs {
                values,
                vectors,
                basis_size: m,
                blocks,
                max_residual: 0.0,
            });
        }
        if m >= opts.max_basis.min(n) {
            return Err(Error::ConvergenceFailure {
                iterations: blocks,
                basis: m,
                residual: last_residual,
            });
        }
        for kv in &basis.kv[start..] {
            let mut w = kv.clone();
            pencil.solve_s(&mut w);
            pending.push(w);
        }
    }
}

fn ritz_pairs<T: Scalar>(basis: &Basis<T>, gram: &[Vec<T>], nev: usize) -> Result<(Vec<T>, Vec<Vec<T>>, T)> {
    let m = basis.v.len();
    let n = basis.v[0].len();
    let mut flat = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            let (a, b) = if j <= i { (i, j) } else { (j, i) };
            flat[i * m + j] = gram[a][b];
        }
    }
    let eig = symmetric_eigen(&flat, m)?;
    let mut values = Vec::with_capacity(nev);
    let mut vectors = Vec::with_capacity(nev);
    let mut worst = T::zero();
    for idx in (m - nev..m).rev() {
        let theta = eig.values[idx];
        let y = &eig.vectors[idx];
        let mut x = vec![T::zero(); n];
        let mut kx = vec![T::zero(); n];
        let mut sx = vec![T::zero(); n];
        for (c, j) in y.iter().zip(0..m) {
            axpy(*c, &basis.v[j], &mut x);
            axpy(*c, &basis.kv[j], &mut kx);
            axpy(*c, &basis.sv[j], &mut sx);
        }
        let knorm = dot(&kx, &kx).sqrt();
        let snorm = dot(&sx, &sx).sqrt();
        let mut r2 = T::zero();
        for (k, s) in kx.iter().zip(&sx) {
            let r = *k - theta * *s;
            r2 += r * r;
        }
        let denom = theta.abs() * snorm + knorm;
        let rel = if denom > T::zero() { r2.sqrt() / denom } else { T::zero() };
        worst = worst.max(rel);
        values.push(theta);
        vectors.push(x);
    }
    Ok((values, vectors, worst))
}
