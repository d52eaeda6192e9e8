use crate::scalar::Scalar;

/// Symmetric matrix in CSR form with both triangles stored. Symmetry is exact:
/// assembly always inserts `(i, j)` and `(j, i)` with the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSparseMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SymmetricSparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed in
    /// insertion order, so the result is independent of hash or thread order.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len() / 2);
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for (i, xi) in x.iter().enumerate().take(self.dim) {
            let mut row = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[k] * y[self.cols[k]];
            }
            acc += *xi * row;
        }
        acc
    }

    pub fn quad_form(&self, x: &[T]) -> T {
        self.bilinear(x, x)
    }

    /// `a·self + b·other`; the patterns are merged.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim, other.dim);
        if self.row_ptr == other.row_ptr && self.cols == other.cols {
            let vals = self.vals.iter().zip(&other.vals).map(|(x, y)| a * *x + b * *y).collect();
            return Self {
                dim: self.dim,
                row_ptr: self.row_ptr.clone(),
                cols: self.cols.clone(),
                vals,
            };
        }
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.dim {
            trip.extend(self.row(i).map(|(j, v)| (i, j, a * v)));
            trip.extend(other.row(i).map(|(j, v)| (i, j, b * v)));
        }
        Self::from_triplets(self.dim, trip)
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|v| a * *v).collect(),
        }
    }

    /// Principal submatrix with row/column `skip` removed.
    pub fn without_index(&self, skip: usize) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        let shift = |k: usize| if k > skip { k - 1 } else { k };
        for i in (0..self.dim).filter(|&i| i != skip) {
            for (j, v) in self.row(i) {
                if j != skip {
                    trip.push((shift(i), shift(j), v));
                }
            }
        }
        Self::from_triplets(self.dim - 1, trip)
    }

    /// Row sums `A·1`.
    pub fn row_sums(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn to_dense(&self) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for (j, v) in self.row(i) {
                out[i * n + j] = v;
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }
}
