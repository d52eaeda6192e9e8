//! P1 assembly on the disc mesh. The weighted mass form uses the three-point
//! edge-midpoint rule on each triangle; the same samples define the discrete
//! `L^q(D, h)` norms so that the `q = 2` norm coincides with `fᵀ M_h f`.

use num_complex::Complex;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::fem::mesh::Mesh;
use crate::fem::sparse::SymmetricSparseMatrix;
use crate::scalar::Scalar;

const MIN_AREA: f64 = 1e-14;

fn check_area<T: Scalar>(mesh: &Mesh<T>, idx: usize) -> Result<T> {
    let area = mesh.signed_area(idx);
    if !(area >= T::lit(MIN_AREA)) {
        return Err(Error::DegenerateTriangle {
            index: idx,
            area: area.to_f64_lossy(),
        });
    }
    Ok(area)
}

/// Local P1 stiffness of a triangle with counterclockwise vertices.
pub fn local_stiffness<T: Scalar>(p: [Complex<T>; 3], area: T) -> [[T; 3]; 3] {
    let mut b = [T::zero(); 3];
    let mut c = [T::zero(); 3];
    for k in 0..3 {
        let q = p[(k + 1) % 3];
        let r = p[(k + 2) % 3];
        b[k] = q.im - r.im;
        c[k] = r.re - q.re;
    }
    let scale = T::lit(0.25) / area;
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (b[i] * b[j] + c[i] * c[j]) * scale;
        }
    }
    out
}

/// Stiffness matrix `∬ ∇f·∇g` with no boundary condition (natural Neumann).
pub fn assemble_stiffness<T: Scalar>(mesh: &Mesh<T>) -> Result<SymmetricSparseMatrix<T>> {
    let mut trip = Vec::with_capacity(9 * mesh.triangles.len());
    for (idx, tri) in mesh.triangles.iter().enumerate() {
        let area = check_area(mesh, idx)?;
        let pts = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let k = local_stiffness(pts, area);
        for i in 0..3 {
            for j in 0..3 {
                trip.push((tri[i], tri[j], k[i][j]));
            }
        }
    }
    Ok(SymmetricSparseMatrix::from_triplets(mesh.num_vertices(), trip))
}

/// One edge-midpoint sample: the midpoint of edge `(a, b)` carrying weight
/// `area/3 · w(midpoint)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointSample<T> {
    pub a: usize,
    pub b: usize,
    pub weight: T,
}

/// Weighted edge-midpoint samples over the whole mesh for an arbitrary
/// pointwise weight.
pub fn midpoint_samples<T: Scalar>(
    mesh: &Mesh<T>,
    mut weight: impl FnMut(Complex<T>) -> T,
) -> Result<Vec<MidpointSample<T>>> {
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);
    let mut out = Vec::with_capacity(3 * mesh.triangles.len());
    for (idx, tri) in mesh.triangles.iter().enumerate() {
        let area = check_area(mesh, idx)?;
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let mid = (mesh.vertices[a] + mesh.vertices[b]) * half;
            out.push(MidpointSample {
                a,
                b,
                weight: area * third * weight(mid),
            });
        }
    }
    Ok(out)
}

/// Mass matrix of a set of midpoint samples:
/// `M_ij = Σ_s W_s φ_i(m_s) φ_j(m_s)` with `φ = 1/2` on both edge ends.
pub fn mass_from_samples<T: Scalar>(dim: usize, samples: &[MidpointSample<T>]) -> SymmetricSparseMatrix<T> {
    let quarter = T::lit(0.25);
    let mut trip = Vec::with_capacity(4 * samples.len());
    for s in samples {
        let w = s.weight * quarter;
        trip.push((s.a, s.a, w));
        trip.push((s.a, s.b, w));
        trip.push((s.b, s.a, w));
        trip.push((s.b, s.b, w));
    }
    SymmetricSparseMatrix::from_triplets(dim, trip)
}

/// Midpoint samples of the conformal weight `h = |φ'|²`, rejecting `h ≤ 0`.
pub fn weight_samples<T: Scalar>(mesh: &Mesh<T>, map: &ConformalMap<T>) -> Result<Vec<MidpointSample<T>>> {
    let samples = midpoint_samples(mesh, |z| map.weight(z))?;
    for (k, s) in samples.iter().enumerate() {
        if !(s.weight > T::zero()) {
            let tri = k / 3;
            let area = mesh.signed_area(tri);
            return Err(Error::NonpositiveWeight {
                triangle: tri,
                value: (s.weight * T::lit(3.0) / area).to_f64_lossy(),
            });
        }
    }
    Ok(samples)
}

/// Weighted mass matrix `∬ h f g` for the conformal weight of `map`.
pub fn assemble_weighted_mass<T: Scalar>(mesh: &Mesh<T>, map: &ConformalMap<T>) -> Result<SymmetricSparseMatrix<T>> {
    let samples = weight_samples(mesh, map)?;
    Ok(mass_from_samples(mesh.num_vertices(), &samples))
}
