use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Structured triangulation of the unit disc by concentric rings: ring `j`
/// has radius `j/R` and `6j` equally spaced vertices, vertex 0 is the centre.
/// Vertices are numbered ring by ring, which keeps the matrix envelope narrow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Mesh<T> {
    pub vertices: Vec<Complex<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub refinement: usize,
    pub boundary: Vec<bool>,
}

/// Index of the first vertex on ring `j`.
#[inline]
pub fn ring_start(j: usize) -> usize {
    if j == 0 {
        0
    } else {
        1 + 3 * j * (j - 1)
    }
}

#[inline]
fn ring_vertex(j: usize, t: usize) -> usize {
    if j == 0 {
        0
    } else {
        ring_start(j) + t % (6 * j)
    }
}

impl<T: Scalar> Mesh<T> {
    pub fn unit_disc(refinement: usize) -> Result<Self> {
        if refinement < 1 {
            return Err(Error::arg("refinement", "need refinement >= 1"));
        }
        let r_count = refinement;
        let n = ring_start(r_count + 1);
        let mut vertices = Vec::with_capacity(n);
        let mut boundary = Vec::with_capacity(n);
        vertices.push(Complex::new(T::zero(), T::zero()));
        boundary.push(false);
        let two_pi = T::PI() + T::PI();
        for j in 1..=r_count {
            let radius = T::from_usize(j) / T::from_usize(r_count);
            let count = 6 * j;
            for t in 0..count {
                let th = two_pi * T::from_usize(t) / T::from_usize(count);
                vertices.push(Complex::new(radius * th.cos(), radius * th.sin()));
                boundary.push(j == r_count);
            }
        }

        let mut triangles = Vec::with_capacity(6 * r_count * r_count);
        for j in 1..=r_count {
            for s in 0..6 {
                let outer = |k: usize| ring_vertex(j, s * j + k);
                let inner = |k: usize| ring_vertex(j - 1, s * (j - 1) + k);
                for k in 0..j {
                    triangles.push([inner(k), outer(k), outer(k + 1)]);
                }
                for k in 0..j.saturating_sub(1) {
                    triangles.push([inner(k), outer(k + 1), inner(k + 1)]);
                }
            }
        }
        let mut mesh = Self {
            vertices,
            triangles,
            refinement,
            boundary,
        };
        mesh.orient_counterclockwise();
        Ok(mesh)
    }

    fn orient_counterclockwise(&mut self) {
        for idx in 0..self.triangles.len() {
            if self.signed_area(idx) < T::zero() {
                self.triangles[idx].swap(1, 2);
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn signed_area(&self, idx: usize) -> T {
        let [a, b, c] = self.triangles[idx];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        T::lit(0.5) * ((q.re - p.re) * (r.im - p.im) - (r.re - p.re) * (q.im - p.im))
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).map(|i| self.signed_area(i)).sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> T {
        let mut best = T::infinity();
        for tri in &self.triangles {
            for k in 0..3 {
                let p = self.vertices[tri[k]];
                let u = self.vertices[tri[(k + 1) % 3]] - p;
                let v = self.vertices[tri[(k + 2) % 3]] - p;
                let cos = (u.re * v.re + u.im * v.im) / (u.norm() * v.norm());
                best = best.min(cos.max(-T::one()).min(T::one()).acos());
            }
        }
        best.to_degrees()
    }

    /// Every interior edge is shared by exactly two triangles, boundary edges
    /// by one, and no edge by more.
    pub fn is_conforming(&self) -> bool {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        let mut i = 0;
        while i < edges.len() {
            let mut j = i;
            while j < edges.len() && edges[j] == edges[i] {
                j += 1;
            }
            let count = j - i;
            let (a, b) = edges[i];
            let on_boundary = self.boundary[a] && self.boundary[b];
            if count > 2 || (count == 1 && !on_boundary) {
                return false;
            }
            i = j;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_counts() {
        let m1 = Mesh::<f64>::unit_disc(1).unwrap();
        assert_eq!(m1.num_vertices(), 7);
        assert_eq!(m1.triangles.len(), 6);
        let m2 = Mesh::<f64>::unit_disc(2).unwrap();
        assert_eq!(m2.num_vertices(), 19);
        assert_eq!(m2.triangles.len(), 24);
        assert!(Mesh::<f64>::unit_disc(0).is_err());
    }

    #[test]
    fn vertex_count_formula() {
        for r in [3usize, 8, 17] {
            let m = Mesh::<f64>::unit_disc(r).unwrap();
            assert_eq!(m.num_vertices(), 3 * r * r + 3 * r + 1);
            assert_eq!(m.triangles.len(), 6 * r * r);
        }
    }

    #[test]
    fn geometry_invariants() {
        for r in [1usize, 4, 16] {
            let m = Mesh::<f64>::unit_disc(r).unwrap();
            for (v, &b) in m.vertices.iter().zip(&m.boundary) {
                assert!(v.norm() <= 1.0 + 1e-12);
                if b {
                    assert!((v.norm() - 1.0).abs() <= 1e-12);
                }
            }
            for i in 0..m.triangles.len() {
                assert!(m.signed_area(i) > 0.0);
            }
            assert!(m.min_angle_degrees() >= 20.0, "min angle {}", m.min_angle_degrees());
            assert!(m.is_conforming());
        }
    }

    #[test]
    fn area_converges_to_pi() {
        let m = Mesh::<f64>::unit_disc(64).unwrap();
        // inscribed 384-gon
        let polygon = 0.5 * 384.0 * (2.0 * PI / 384.0).sin();
        assert!((m.total_area() - polygon).abs() < 1e-10);
        assert!((m.total_area() - PI).abs() / PI < 1e-3);
    }
}
