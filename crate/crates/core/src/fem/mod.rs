//! Linear finite elements for the weighted Neumann problem
//! `∬ ∇f·∇g = λ ∬ h f g` on the unit disc.

pub mod assembly;
pub mod dense;
pub mod fd;
pub mod krylov;
pub mod mesh;
pub mod problem;
pub mod skyline;
pub mod sparse;
pub mod variational;

pub use assembly::{assemble_stiffness, assemble_weighted_mass};
pub use fd::fd_oracle_disc_eigs;
pub use mesh::Mesh;
pub use problem::{
    solve_neumann, Discretization, EigenSolution, SolveMethod, SolverOptions, SpectrumSummary, WeightedProblem,
};
pub use sparse::SymmetricSparseMatrix;
pub use variational::{
    estimate_poincare_constant, estimate_sobolev_constant, rayleigh_quotient, weighted_mean, SobolevEstimate,
};

/// Structured concentric mesh with `refinement` rings.
pub fn mesh_unit_disc<T: crate::Scalar>(refinement: usize) -> crate::Result<Mesh<T>> {
    Mesh::unit_disc(refinement)
}
