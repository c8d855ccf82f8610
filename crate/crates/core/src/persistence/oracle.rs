use std::collections::{BTreeSet, HashMap};

use super::{DistanceMatrix, PersistenceDiagram, PersistenceError};
use crate::scalar::{total_cmp, Scalar};

/// Largest input [`brute_force_persistence`] accepts.
pub const ORACLE_MAX_POINTS: usize = 12;

struct Simplex<T> {
    vertices: Vec<usize>,
    value: T,
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for v in start..n {
            current.push(v);
            extend(v + 1, n, size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Persistence by explicit construction of the whole Rips filtration up to
/// dimension `max_dim + 1` and textbook left-to-right reduction of its
/// boundary matrix over the two-element field.
///
/// Simplices are ordered by (filtration value, dimension, vertex tuple).
/// Refuses more than [`ORACLE_MAX_POINTS`] points.
pub fn brute_force_persistence<T: Scalar>(
    dist: &DistanceMatrix<T>,
    max_dim: usize,
) -> Result<Vec<PersistenceDiagram<T>>, PersistenceError> {
    let n = dist.len();
    if n == 0 {
        return Err(PersistenceError::EmptyInput);
    }
    if n > ORACLE_MAX_POINTS {
        return Err(PersistenceError::TooLarge { n, limit: ORACLE_MAX_POINTS });
    }

    let mut simplices: Vec<Simplex<T>> = Vec::new();
    for size in 1..=(max_dim + 2).min(n) {
        for vertices in subsets(n, size) {
            let mut value = T::zero();
            for (a, &u) in vertices.iter().enumerate() {
                for &v in &vertices[a + 1..] {
                    value = value.max(dist.get(u, v));
                }
            }
            simplices.push(Simplex { vertices, value });
        }
    }
    simplices.sort_by(|a, b| {
        total_cmp(&a.value, &b.value)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
    let position: HashMap<&[usize], usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.vertices.as_slice(), i)).collect();

    let mut columns: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|s| {
            if s.vertices.len() == 1 {
                return BTreeSet::new();
            }
            (0..s.vertices.len())
                .map(|skip| {
                    let facet: Vec<usize> =
                        s.vertices.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    position[facet.as_slice()]
                })
                .collect()
        })
        .collect();

    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; simplices.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].iter().next_back() {
            match low_owner.get(&low) {
                Some(&i) => {
                    let other = columns[i].clone();
                    let column = &mut columns[j];
                    for row in other {
                        if !column.remove(&row) {
                            column.insert(row);
                        }
                    }
                }
                None => {
                    low_owner.insert(low, j);
                    paired[low] = true;
                    paired[j] = true;
                    pairs.push((low, j));
                    break;
                }
            }
        }
    }

    let mut points: Vec<Vec<(T, T)>> = vec![Vec::new(); max_dim + 1];
    for (birth, death) in pairs {
        let dim = simplices[birth].vertices.len() - 1;
        let (b, d) = (simplices[birth].value, simplices[death].value);
        if dim <= max_dim && d > b {
            points[dim].push((b, d));
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let dim = s.vertices.len() - 1;
        if !paired[i] && dim <= max_dim && columns[i].is_empty() {
            points[dim].push((s.value, T::infinity()));
        }
    }
    Ok(points.into_iter().enumerate().map(|(dim, p)| PersistenceDiagram::new(dim, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::PointCloud;

    fn cloud(rows: &[Vec<f64>]) -> DistanceMatrix<f64> {
        DistanceMatrix::from_cloud(&PointCloud::from_rows("t", rows).unwrap())
    }

    #[test]
    fn square() {
        let dm = cloud(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]);
        let diagrams = brute_force_persistence(&dm, 1).unwrap();
        assert_eq!(diagrams[0].points, vec![(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, f64::INFINITY)]);
        assert_eq!(diagrams[1].points, vec![(1.0, 2f64.sqrt())]);
    }

    #[test]
    fn collinear_points_have_no_loop() {
        let dm = cloud(&[vec![0.0], vec![1.0], vec![2.0]]);
        let diagrams = brute_force_persistence(&dm, 1).unwrap();
        assert!(diagrams[1].is_empty());
        assert_eq!(diagrams[0].len(), 3);
    }

    #[test]
    fn single_point() {
        let diagrams = brute_force_persistence(&cloud(&[vec![1.0, 2.0]]), 1).unwrap();
        assert_eq!(diagrams[0].points, vec![(0.0, f64::INFINITY)]);
        assert!(diagrams[1].is_empty());
    }

    #[test]
    fn refuses_large_inputs() {
        let rows: Vec<Vec<f64>> = (0..13).map(|i| vec![i as f64]).collect();
        assert_eq!(
            brute_force_persistence(&cloud(&rows), 1),
            Err(PersistenceError::TooLarge { n: 13, limit: ORACLE_MAX_POINTS })
        );
    }
}
