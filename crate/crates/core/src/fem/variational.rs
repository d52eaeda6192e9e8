//! Weighted means, Rayleigh quotients and estimates of the Poincaré and
//! Poincaré–Sobolev constants of the weighted problem.

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::fem::mesh::Mesh;
use crate::fem::problem::{Discretization, SolverOptions, WeightedProblem};
use crate::scalar::{dot, Scalar};

/// Result of the gradient-ascent search for the best constant `C(q)` in
/// `‖f − f_h‖_{L^q(D,h)} ≤ C(q) ‖∇f‖_{L²(D)}`. The value is attained by a
/// concrete mesh function and is therefore a lower bound on the discrete
/// best constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate<T> {
    pub value: T,
    pub q: T,
    pub iterations: usize,
    pub accepted_steps: usize,
    pub converged: bool,
    pub lower_bound: bool,
}

impl<T: Scalar> WeightedProblem<'_, T> {
    /// `f_{D,h} = (1ᵀ M_h f)/(1ᵀ M_h 1)`.
    pub fn weighted_mean(&self, f: &[T]) -> T {
        dot(self.mass_ones(), f) / self.total_mass()
    }

    /// `fᵀAf / fᵀM_h f`, or with `f − f_{D,h}` in the denominator when
    /// `shifted` (where `0/0` is read as `0`).
    pub fn rayleigh_quotient(&self, f: &[T], shifted: bool) -> Result<T> {
        let a = self.stiffness();
        let num = a.quad_form(f);
        let full = self.mass().quad_form(f);
        let den = if shifted {
            let mean = self.weighted_mean(f);
            let g: Vec<T> = f.iter().map(|x| *x - mean).collect();
            self.mass().quad_form(&g)
        } else {
            full
        };
        let tiny = T::lit(1e-13);
        if den <= tiny * full.abs() || den <= T::min_positive_value() {
            let diag_norm: T = f
                .iter()
                .enumerate()
                .map(|(i, x)| a.get(i, i) * *x * *x)
                .sum();
            if num.abs() <= T::lit(1e-12) * diag_norm || num == T::zero() {
                return Ok(T::zero());
            }
            return Err(Error::ZeroDenominator);
        }
        Ok(num / den)
    }

    /// `‖f − f_{D,h}‖_{L^q(D,h)}` under the edge-midpoint rule.
    pub fn centered_lq_norm(&self, f: &[T], q: T) -> T {
        let mean = self.weighted_mean(f);
        self.lq_power_sum(f, mean, q).powf(q.recip())
    }

    fn lq_power_sum(&self, f: &[T], mean: T, q: T) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for s in self.samples() {
            let u = (f[s.a] + f[s.b]) * half - mean;
            acc += s.weight * u.abs().powf(q);
        }
        acc
    }

    /// Gradient of `f ↦ ‖f − f_{D,h}‖_{L^q(D,h)}` including the dependence
    /// of the mean on `f`; sums to zero.
    fn lq_norm_gradient(&self, f: &[T], q: T) -> (T, Vec<T>) {
        let half = T::lit(0.5);
        let mean = self.weighted_mean(f);
        let total = self.lq_power_sum(f, mean, q);
        let norm = total.powf(q.recip());
        let mut g = vec![T::zero(); f.len()];
        if !(total > T::zero()) {
            return (norm, g);
        }
        let qm2 = q - T::lit(2.0);
        for s in self.samples() {
            let u = (f[s.a] + f[s.b]) * half - mean;
            let c = s.weight * q * u.abs().powf(qm2) * u * half;
            g[s.a] += c;
            g[s.b] += c;
        }
        let sum: T = g.iter().copied().sum();
        let scale = sum / self.total_mass();
        for (gi, mi) in g.iter_mut().zip(self.mass_ones()) {
            *gi -= scale * *mi;
        }
        // d/df S^{1/q} = (1/q) S^{1/q − 1} dS/df
        let factor = norm / (q * total);
        g.iter_mut().for_each(|x| *x *= factor);
        (norm, g)
    }

    /// `√(1/λ₂)`.
    pub fn poincare_constant(&self, opts: &SolverOptions) -> Result<T> {
        let sol = self.solve(2, opts)?;
        let l2 = sol.eigenvalue(2)?;
        if !(l2 > T::zero()) {
            return Err(Error::DivisionByZero("lambda_2 is not positive"));
        }
        Ok(l2.recip().sqrt())
    }

    /// Lower-bound estimate of `C(q)` by normalized gradient ascent on the
    /// stiffness unit sphere, seeded with the second eigenvector. Steps use
    /// the stiffness (Riesz) gradient and are accepted only when they
    /// increase the ratio.
    pub fn sobolev_constant(&self, q: T, iters: usize, opts: &SolverOptions) -> Result<SobolevEstimate<T>> {
        if !(q >= T::lit(2.0)) {
            return Err(Error::arg("q", "need q >= 2"));
        }
        if iters == 0 {
            return Err(Error::arg("iters", "need iters >= 1"));
        }
        let sol = self.solve(2, opts)?;
        self.sobolev_constant_from(&sol.eigenvectors[1], q, iters)
    }

    /// As [`Self::sobolev_constant`], starting from `seed`.
    pub fn sobolev_constant_from(&self, seed: &[T], q: T, iters: usize) -> Result<SobolevEstimate<T>> {
        if !(q >= T::lit(2.0)) {
            return Err(Error::arg("q", "need q >= 2"));
        }
        if iters == 0 {
            return Err(Error::arg("iters", "need iters >= 1"));
        }
        if seed.len() != self.discretization().dim() {
            return Err(Error::arg("seed", "length does not match the mesh"));
        }
        let a = self.stiffness();
        let mut f = seed.to_vec();
        let energy = a.quad_form(&f);
        let diag: T = f.iter().enumerate().map(|(i, x)| a.get(i, i) * *x * *x).sum();
        if !(energy > T::lit(1e-12) * diag) {
            return Err(Error::arg("seed", "seed is constant"));
        }
        let norm_a = energy.sqrt();
        f.iter_mut().for_each(|x| *x /= norm_a);
        let ratio_of = |g: &[T]| self.centered_lq_norm(g, q) / a.quad_form(g).sqrt();

        let mut best = ratio_of(&f);
        let mut history = vec![best];
        let mut step = T::lit(0.1);
        let mut converged = false;
        let mut iterations = 0;
        let tiny = T::lit(1e-12);
        while iterations < iters {
            iterations += 1;
            let (_, grad) = self.lq_norm_gradient(&f, q);
            let mut dir = self.discretization().solve_stiffness_grounded(&grad)?;
            let along = a.bilinear(&f, &dir);
            for (d, x) in dir.iter_mut().zip(&f) {
                *d -= along * *x;
            }
            let dnorm = a.quad_form(&dir).max(T::zero()).sqrt();
            if !(dnorm > tiny) {
                converged = true;
                break;
            }
            dir.iter_mut().for_each(|d| *d /= dnorm);

            let mut accepted = false;
            for _ in 0..40 {
                let mut trial: Vec<T> = f.iter().zip(&dir).map(|(x, d)| *x + step * *d).collect();
                let tn = a.quad_form(&trial).sqrt();
                trial.iter_mut().for_each(|x| *x /= tn);
                let r = ratio_of(&trial);
                if r > best {
                    f = trial;
                    best = r;
                    history.push(r);
                    accepted = true;
                    step = (step + step).min(T::one());
                    break;
                }
                step *= T::lit(0.5);
                if step < tiny {
                    break;
                }
            }
            if !accepted {
                converged = true;
                break;
            }
        }
        let tail = &history[history.len().saturating_sub(10)..];
        if tail.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::ConvergenceFailure {
                iterations,
                basis: history.len(),
                residual: best.to_f64_lossy(),
            });
        }
        Ok(SobolevEstimate {
            value: best,
            q,
            iterations,
            accepted_steps: history.len() - 1,
            converged,
            lower_bound: true,
        })
    }
}

pub fn weighted_mean<T: Scalar>(mesh: &Mesh<T>, map: &ConformalMap<T>, f: &[T]) -> Result<T> {
    let disc = Discretization::new(mesh.clone())?;
    Ok(WeightedProblem::new(&disc, map)?.weighted_mean(f))
}

pub fn rayleigh_quotient<T: Scalar>(mesh: &Mesh<T>, map: &ConformalMap<T>, f: &[T], shifted: bool) -> Result<T> {
    let disc = Discretization::new(mesh.clone())?;
    WeightedProblem::new(&disc, map)?.rayleigh_quotient(f, shifted)
}

pub fn estimate_poincare_constant<T: Scalar>(mesh: &Mesh<T>, map: &ConformalMap<T>, opts: &SolverOptions) -> Result<T> {
    let disc = Discretization::new(mesh.clone())?;
    WeightedProblem::new(&disc, map)?.poincare_constant(opts)
}

pub fn estimate_sobolev_constant<T: Scalar>(
    mesh: &Mesh<T>,
    map: &ConformalMap<T>,
    q: T,
    iters: usize,
    opts: &SolverOptions,
) -> Result<SobolevEstimate<T>> {
    let disc = Discretization::new(mesh.clone())?;
    WeightedProblem::new(&disc, map)?.sobolev_constant(q, iters, opts)
}
