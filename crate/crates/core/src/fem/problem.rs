use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_stiffness, mass_from_samples, weight_samples, MidpointSample};
use crate::fem::dense::generalized_eigen;
use crate::fem::krylov::{self, KrylovOptions, Pencil};
use crate::fem::mesh::Mesh;
use crate::fem::skyline::SkylineCholesky;
use crate::fem::sparse::SymmetricSparseMatrix;
use crate::scalar::{axpy, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Problems with at most this many unknowns use the dense Cholesky
    /// reduction; larger ones use shift-invert block Krylov.
    pub dense_threshold: usize,
    /// Shift in units of `π/|Ω|`; the factorized operator is `A + σ M_h`.
    pub shift: f64,
    pub krylov: KrylovOptions,
}

pub const DEFAULT_DENSE_THRESHOLD: usize = 600;

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            shift: 1.0,
            krylov: KrylovOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    DenseCholesky,
    ShiftInvertKrylov,
}

/// Smallest eigenpairs of `A x = λ M_h x`. Eigenvalues are nondecreasing and
/// eigenvectors `M_h`-orthonormal; `λ₁` is whatever the solver produced.
#[derive(Debug, Clone)]
pub struct EigenSolution<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<T>>,
    pub weight_label: String,
    pub mesh_refinement: usize,
    pub method: SolveMethod,
    pub basis_size: usize,
    pub iterations: usize,
    pub max_residual: f64,
}

/// The part of an [`EigenSolution`] that goes into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SpectrumSummary<T> {
    pub weight_label: String,
    pub refinement: usize,
    pub eigenvalues: Vec<T>,
    pub method: SolveMethod,
    pub basis_size: usize,
    pub iterations: usize,
}

impl<T: Scalar> EigenSolution<T> {
    pub fn summary(&self) -> SpectrumSummary<T> {
        SpectrumSummary {
            weight_label: self.weight_label.clone(),
            refinement: self.mesh_refinement,
            eigenvalues: self.eigenvalues.clone(),
            method: self.method,
            basis_size: self.basis_size,
            iterations: self.iterations,
        }
    }

    /// `λ_n` with 1-based `n`.
    pub fn eigenvalue(&self, n: usize) -> Result<T> {
        if n == 0 || n > self.eigenvalues.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.eigenvalues.len(),
            });
        }
        Ok(self.eigenvalues[n - 1])
    }
}

/// Mesh plus weight-independent data: the stiffness matrix and, lazily, the
/// Cholesky factor of the stiffness with the centre vertex grounded (the
/// stiffness on the complement of constants).
#[derive(Debug)]
pub struct Discretization<T> {
    mesh: Mesh<T>,
    stiffness: SymmetricSparseMatrix<T>,
    grounded: OnceLock<std::result::Result<SkylineCholesky<T>, Error>>,
}

/// Index of the vertex whose value is pinned to zero when working modulo
/// constants.
pub(crate) const GROUND: usize = 0;

impl<T: Scalar> Discretization<T> {
    pub fn new(mesh: Mesh<T>) -> Result<Self> {
        let stiffness = assemble_stiffness(&mesh)?;
        Ok(Self {
            mesh,
            stiffness,
            grounded: OnceLock::new(),
        })
    }

    pub fn unit_disc(refinement: usize) -> Result<Self> {
        Self::new(Mesh::unit_disc(refinement)?)
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn stiffness(&self) -> &SymmetricSparseMatrix<T> {
        &self.stiffness
    }

    pub fn dim(&self) -> usize {
        self.mesh.num_vertices()
    }

    pub(crate) fn grounded_factor(&self) -> Result<&SkylineCholesky<T>> {
        self.grounded
            .get_or_init(|| SkylineCholesky::factor(&self.stiffness.without_index(GROUND)))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Solves `A g = r` on the complement of constants (`Σ r = 0` assumed),
    /// returning the representative with `g[GROUND] = 0`.
    pub(crate) fn solve_stiffness_grounded(&self, rhs: &[T]) -> Result<Vec<T>> {
        let chol = self.grounded_factor()?;
        let mut reduced: Vec<T> = rhs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != GROUND)
            .map(|(_, v)| *v)
            .collect();
        chol.solve_in_place(&mut reduced);
        let mut out = Vec::with_capacity(rhs.len());
        out.extend_from_slice(&reduced[..GROUND]);
        out.push(T::zero());
        out.extend_from_slice(&reduced[GROUND..]);
        Ok(out)
    }
}

/// A conformal weight assembled on a [`Discretization`].
#[derive(Debug)]
pub struct WeightedProblem<'a, T> {
    disc: &'a Discretization<T>,
    map: ConformalMap<T>,
    samples: Vec<MidpointSample<T>>,
    mass: SymmetricSparseMatrix<T>,
    mass_ones: Vec<T>,
    total_mass: T,
}

struct NeumannPencil<'a, T> {
    mass: &'a SymmetricSparseMatrix<T>,
    shifted: &'a SymmetricSparseMatrix<T>,
    chol: &'a SkylineCholesky<T>,
}

impl<T: Scalar> Pencil<T> for NeumannPencil<'_, T> {
    fn dim(&self) -> usize {
        self.mass.dim()
    }
    fn apply_k(&self, x: &[T], out: &mut [T]) {
        self.mass.mul_vec_into(x, out);
    }
    fn apply_s(&self, x: &[T], out: &mut [T]) {
        self.shifted.mul_vec_into(x, out);
    }
    fn solve_s(&self, x: &mut [T]) {
        self.chol.solve_in_place(x);
    }
}

impl<'a, T: Scalar> WeightedProblem<'a, T> {
    pub fn new(disc: &'a Discretization<T>, map: &ConformalMap<T>) -> Result<Self> {
        let samples = weight_samples(disc.mesh(), map)?;
        let mass = mass_from_samples(disc.dim(), &samples);
        let ones = vec![T::one(); disc.dim()];
        let mass_ones = mass.mul_vec(&ones);
        let total_mass = mass_ones.iter().copied().sum();
        Ok(Self {
            disc,
            map: map.clone(),
            samples,
            mass,
            mass_ones,
            total_mass,
        })
    }

    pub fn discretization(&self) -> &Discretization<T> {
        self.disc
    }

    pub fn map(&self) -> &ConformalMap<T> {
        &self.map
    }

    pub fn mass(&self) -> &SymmetricSparseMatrix<T> {
        &self.mass
    }

    pub fn stiffness(&self) -> &SymmetricSparseMatrix<T> {
        self.disc.stiffness()
    }

    pub(crate) fn samples(&self) -> &[MidpointSample<T>] {
        &self.samples
    }

    /// `M_h 1`
    pub fn mass_ones(&self) -> &[T] {
        &self.mass_ones
    }

    /// `1ᵀ M_h 1 = m_h(D)`, the discrete `|Ω|`.
    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    /// Smallest `k` eigenpairs.
    pub fn solve(&self, k: usize, opts: &SolverOptions) -> Result<EigenSolution<T>> {
        let n = self.disc.dim();
        if k < 2 || k >= n {
            return Err(Error::arg("k", format!("need 2 <= k < {n}")));
        }
        let mut sol = if n <= opts.dense_threshold {
            self.solve_dense(k)?
        } else {
            self.solve_krylov(k, opts)?
        };
        for v in sol.eigenvectors.iter_mut() {
            normalize_sign(v);
        }
        Ok(sol)
    }

    fn solve_dense(&self, k: usize) -> Result<EigenSolution<T>> {
        let n = self.disc.dim();
        let eig = generalized_eigen(&self.stiffness().to_dense(), &self.mass.to_dense(), n)?;
        Ok(EigenSolution {
            eigenvalues: eig.values[..k].to_vec(),
            eigenvectors: eig.vectors[..k].to_vec(),
            weight_label: self.map.label().to_string(),
            mesh_refinement: self.disc.mesh().refinement,
            method: SolveMethod::DenseCholesky,
            basis_size: n,
            iterations: 1,
            max_residual: 0.0,
        })
    }

    fn solve_krylov(&self, k: usize, opts: &SolverOptions) -> Result<EigenSolution<T>> {
        let sigma = T::lit(opts.shift) * T::PI() / self.total_mass;
        let shifted = self.stiffness().combine(T::one(), &self.mass, sigma);
        let chol = SkylineCholesky::factor(&shifted)?;
        let pencil = NeumannPencil {
            mass: &self.mass,
            shifted: &shifted,
            chol: &chol,
        };
        let ritz = krylov::largest(&pencil, k, &opts.krylov)?;
        // The Ritz vectors of (M, A + σM) are also Ritz vectors of (A, M);
        // a final k×k Rayleigh–Ritz restores exact M-orthonormality.
        let (values, vectors) = rayleigh_ritz(self.stiffness(), &self.mass, &ritz.vectors)?;
        Ok(EigenSolution {
            eigenvalues: values,
            eigenvectors: vectors,
            weight_label: self.map.label().to_string(),
            mesh_refinement: self.disc.mesh().refinement,
            method: SolveMethod::ShiftInvertKrylov,
            basis_size: ritz.basis_size,
            iterations: ritz.blocks,
            max_residual: ritz.max_residual,
        })
    }
}

/// Rayleigh–Ritz of the pencil `(A, M)` on the span of `basis`.
pub(crate) fn rayleigh_ritz<T: Scalar>(
    a: &SymmetricSparseMatrix<T>,
    m: &SymmetricSparseMatrix<T>,
    basis: &[Vec<T>],
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let k = basis.len();
    let abasis: Vec<Vec<T>> = basis.iter().map(|v| a.mul_vec(v)).collect();
    let mbasis: Vec<Vec<T>> = basis.iter().map(|v| m.mul_vec(v)).collect();
    let mut ar = vec![T::zero(); k * k];
    let mut mr = vec![T::zero(); k * k];
    for i in 0..k {
        for j in 0..=i {
            let av = crate::scalar::dot(&basis[i], &abasis[j]);
            let mv = crate::scalar::dot(&basis[i], &mbasis[j]);
            ar[i * k + j] = av;
            ar[j * k + i] = av;
            mr[i * k + j] = mv;
            mr[j * k + i] = mv;
        }
    }
    let eig = generalized_eigen(&ar, &mr, k)?;
    let n = basis[0].len();
    let vectors = eig
        .vectors
        .iter()
        .map(|y| {
            let mut x = vec![T::zero(); n];
            for (c, b) in y.iter().zip(basis) {
                axpy(*c, b, &mut x);
            }
            x
        })
        .collect();
    Ok((eig.values, vectors))
}

/// Makes the entry of largest magnitude (first one on ties) positive.
fn normalize_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Smallest `k` eigenpairs of the weighted Neumann problem for `map` on `mesh`.
pub fn solve_neumann<T: Scalar>(
    mesh: &Mesh<T>,
    map: &ConformalMap<T>,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenSolution<T>> {
    let disc = Discretization::new(mesh.clone())?;
    WeightedProblem::new(&disc, map)?.solve(k, opts)
}
