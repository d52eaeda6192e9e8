//! Neumann-Laplacian spectra of planar domains `Ω = φ(D)` computed on the unit
//! disc through the conformal weight `h = |φ'|²`, together with the integral
//! functionals and spectral stability bounds that compare two such domains.
//!
//! Everything numeric is generic over a [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases at the crate root are what the command-line harness uses.
//!
//! Module map:
//!
//! * [`conformal`]: maps `φ = P ∘ m_a` (polynomial after a disc automorphism)
//!   with exact derivatives and the weight `h = |φ'|²`.
//! * [`functionals`]: polar Gauss rule on the disc and the pair functionals
//!   (`E_α`, `d_s`, L² derivative gap, measure variation, ...).
//! * [`fem`]: concentric P1 mesh, stiffness / weighted mass assembly, the
//!   generalized eigensolver and Poincaré / Sobolev constant estimates.
//! * [`stability`]: the eigenvalue-gap bounds and their discrete verification.
//! * [`quasidisc`]: quasidisc exponents and an Ahlfors three-point checker.

// `!(x > 0)` style tests are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod fem;
pub mod functionals;
pub mod quasidisc;
pub mod scalar;
pub mod stability;

pub use conformal::{ConformalMap, UnivalenceReport};
pub use error::{Error, Result};
pub use fem::{EigenSolution, Mesh, SolverOptions, SymmetricSparseMatrix};
pub use functionals::{PairFunctionals, QuadratureRule};
pub use num_complex::Complex;
pub use scalar::Scalar;
pub use stability::{BoundSet, LemmaReport};

pub type Complex64 = Complex<f64>;
pub type Map64 = ConformalMap<f64>;
pub type Rule64 = QuadratureRule<f64>;
pub type Mesh64 = Mesh<f64>;
pub type Eigen64 = EigenSolution<f64>;
pub type Pair64 = PairFunctionals<f64>;
pub type Bounds64 = BoundSet<f64>;

pub type Map32 = ConformalMap<f32>;
pub type Rule32 = QuadratureRule<f32>;
pub type Mesh32 = Mesh<f32>;
