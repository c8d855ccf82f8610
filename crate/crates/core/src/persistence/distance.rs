use super::PersistenceError;
use crate::embedding::PointCloud;
use crate::scalar::Scalar;

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Euclidean distances between the points of `cloud`.
    pub fn from_cloud(cloud: &PointCloud<T>) -> Self {
        let n = cloud.len();
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            let p = cloud.point(i);
            for j in (i + 1)..n {
                let q = cloud.point(j);
                let squared: T = p.iter().zip(q).map(|(&a, &b)| (a - b) * (a - b)).sum();
                let dist = squared.sqrt();
                entries[i * n + j] = dist;
                entries[j * n + i] = dist;
            }
        }
        Self { n, entries }
    }

    /// Validates a row-major `n x n` matrix: exact symmetry, zero diagonal,
    /// finite nonnegative entries.
    pub fn from_entries(n: usize, entries: Vec<T>) -> Result<Self, PersistenceError> {
        let bad = |msg: String| Err(PersistenceError::InvalidMatrix(msg));
        if entries.len() != n * n {
            return bad(format!("expected {} entries, got {}", n * n, entries.len()));
        }
        for i in 0..n {
            if entries[i * n + i] != T::zero() {
                return bad(format!("diagonal entry {i} is nonzero"));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < T::zero() {
                    return bad(format!("entry ({i}, {j}) = {v} is not a finite nonnegative distance"));
                }
                if v != entries[j * n + i] {
                    return bad(format!("entries ({i}, {j}) and ({j}, {i}) differ"));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `min_i max_j d(i, j)`: above this radius the Rips complex is a cone.
    pub fn enclosing_radius(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).iter().copied().fold(T::zero(), T::max))
            .fold(T::infinity(), T::min)
    }

    /// Every entry multiplied by `factor` (which must be positive and finite).
    pub fn scaled(&self, factor: T) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|&v| v * factor).collect() }
    }

    /// Matrix of the same points listed in the order `perm[0], perm[1], ...`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length");
        let n = self.n;
        let mut entries = vec![T::zero(); n * n];
        for (a, &i) in perm.iter().enumerate() {
            for (b, &j) in perm.iter().enumerate() {
                entries[a * n + b] = self.get(i, j);
            }
        }
        Self { n, entries }
    }
}
