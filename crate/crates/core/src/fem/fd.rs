//! Polar finite-difference discretization of the weighted Neumann problem,
//! kept independent of the finite-element assembly for cross-checks.
//!
//! Nodes sit at `r_i = i/N` (`i = 1..=N`) and `θ_j = 2πj/N_θ`, plus one pole
//! node. The five-point stencil is written in conservative (control-volume)
//! form, which makes the matrix symmetric: the ghost-point Neumann closure at
//! `r = 1` becomes a half-width boundary cell, and the pole couples equally
//! to every node of the first ring (angular averaging). The weight enters as
//! a lumped diagonal mass `h(node) · |cell|`.

use num_complex::Complex;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::fem::krylov::{self, KrylovOptions, Pencil};
use crate::fem::skyline::SkylineCholesky;
use crate::fem::sparse::SymmetricSparseMatrix;
use crate::scalar::Scalar;

struct DiagonalPencil<'a, T> {
    diag: &'a [T],
    shifted: &'a SymmetricSparseMatrix<T>,
    chol: &'a SkylineCholesky<T>,
}

impl<T: Scalar> Pencil<T> for DiagonalPencil<'_, T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn apply_k(&self, x: &[T], out: &mut [T]) {
        for ((o, d), v) in out.iter_mut().zip(self.diag).zip(x) {
            *o = *d * *v;
        }
    }
    fn apply_s(&self, x: &[T], out: &mut [T]) {
        self.shifted.mul_vec_into(x, out);
    }
    fn solve_s(&self, x: &mut [T]) {
        self.chol.solve_in_place(x);
    }
}

/// Stiffness and lumped weighted mass of the polar scheme with `grid_n`
/// radial and `grid_n` angular intervals.
pub fn polar_fd_system<T: Scalar>(grid_n: usize, map: &ConformalMap<T>) -> Result<(SymmetricSparseMatrix<T>, Vec<T>)> {
    if !(8..=80).contains(&grid_n) {
        return Err(Error::arg("grid_n", "need 8 <= grid_n <= 80"));
    }
    let nr = grid_n;
    let nt = grid_n;
    let dr = T::one() / T::from_usize(nr);
    let dth = (T::PI() + T::PI()) / T::from_usize(nt);
    let half = T::lit(0.5);
    let idx = |i: usize, j: usize| 1 + (i - 1) * nt + (j % nt);
    let n = 1 + nr * nt;

    let mut trip: Vec<(usize, usize, T)> = Vec::with_capacity(5 * n);
    let mut couple = |p: usize, q: usize, w: T| {
        trip.push((p, p, w));
        trip.push((q, q, w));
        trip.push((p, q, -w));
        trip.push((q, p, -w));
    };
    for j in 0..nt {
        couple(0, idx(1, j), dth * half);
    }
    for i in 1..=nr {
        let r = T::from_usize(i) * dr;
        let width = if i == nr { dr * half } else { dr };
        for j in 0..nt {
            couple(idx(i, j), idx(i, j + 1), width / (r * dth));
            if i < nr {
                let face = r + dr * half;
                couple(idx(i, j), idx(i + 1, j), face * dth / dr);
            }
        }
    }
    let stiffness = SymmetricSparseMatrix::from_triplets(n, trip);

    let mut mass = vec![T::zero(); n];
    let pole_cell = T::PI() * dr * dr * T::lit(0.25);
    mass[0] = pole_cell * map.weight(Complex::new(T::zero(), T::zero()));
    for i in 1..=nr {
        let r = T::from_usize(i) * dr;
        let cell = if i == nr {
            let inner = T::one() - dr * half;
            dth * (T::one() - inner * inner) * half
        } else {
            dth * r * dr
        };
        for j in 0..nt {
            let z = Complex::from_polar(r, dth * T::from_usize(j));
            mass[idx(i, j)] = cell * map.weight(z);
        }
    }
    if let Some(k) = mass.iter().position(|m| !(*m > T::zero())) {
        return Err(Error::NonpositiveWeight {
            triangle: k,
            value: mass[k].to_f64_lossy(),
        });
    }
    Ok((stiffness, mass))
}

/// Smallest `k` generalized eigenvalues of the polar scheme.
pub fn fd_oracle_disc_eigs<T: Scalar>(grid_n: usize, map: &ConformalMap<T>, k: usize) -> Result<Vec<T>> {
    let (stiffness, mass) = polar_fd_system(grid_n, map)?;
    let total: T = mass.iter().copied().sum();
    let sigma = T::PI() / total;
    let diag = SymmetricSparseMatrix::from_triplets(
        mass.len(),
        mass.iter().enumerate().map(|(i, m)| (i, i, *m)).collect(),
    );
    let shifted = stiffness.combine(T::one(), &diag, sigma);
    let chol = SkylineCholesky::factor(&shifted)?;
    let pencil = DiagonalPencil {
        diag: &mass,
        shifted: &shifted,
        chol: &chol,
    };
    let ritz = krylov::largest(&pencil, k, &KrylovOptions::default())?;
    let mut values: Vec<T> = ritz.vectors.iter().map(|x| {
        let num = stiffness.quad_form(x);
        let den: T = x.iter().zip(&mass).map(|(v, m)| *m * *v * *v).sum();
        num / den
    }).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}
