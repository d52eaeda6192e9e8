use crate::error::{Error, Result};
use crate::fem::sparse::SymmetricSparseMatrix;
use crate::scalar::{dot, Scalar};

/// Envelope (profile) Cholesky factor `A = L Lᵀ`. Row `i` of `L` is stored
/// densely from its first structural nonzero up to the diagonal; fill stays
/// inside that envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky<T> {
    first: Vec<usize>,
    ptr: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SkylineCholesky<T> {
    pub fn factor(a: &SymmetricSparseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let first: Vec<usize> = (0..n)
            .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i))
            .collect();
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            ptr.push(ptr[i] + (i - first[i] + 1));
        }
        let mut vals = vec![T::zero(); ptr[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    vals[ptr[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = ptr[i];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let (head, tail) = vals.split_at_mut(row_i);
                let lj = &head[ptr[j] + start - fj..ptr[j] + j - fj];
                let li = &tail[start - fi..j - fi];
                let s = tail[j - fi] - dot(li, lj);
                let diag = head[ptr[j + 1] - 1];
                tail[j - fi] = s / diag;
            }
            let row = &vals[row_i..row_i + (i - fi)];
            let d = vals[row_i + i - fi] - dot(row, row);
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    pivot: i,
                    value: d.to_f64_lossy(),
                });
            }
            vals[row_i + i - fi] = d.sqrt();
        }
        Ok(Self { first, ptr, vals })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn stored_entries(&self) -> usize {
        self.vals.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            let s = x[i] - dot(&row[..i - fi], &x[fi..i]);
            x[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            let xi = x[i] / row[i - fi];
            x[i] = xi;
            for (xj, l) in x[fi..i].iter_mut().zip(&row[..i - fi]) {
                *xj -= *l * xi;
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // tridiagonal 2,-1 plus a far corner entry to exercise the envelope
        let n = 6;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 4.0));
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
                trip.push((i + 1, i, -1.0));
            }
        }
        trip.push((0, 5, 0.5));
        trip.push((5, 0, 0.5));
        let a = SymmetricSparseMatrix::from_triplets(n, trip);
        let chol = SkylineCholesky::factor(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let x = chol.solve(&b);
        let ax = a.mul_vec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = SymmetricSparseMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(SkylineCholesky::factor(&a), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }
}
