use crate::scalar::{total_cmp, Scalar};

/// Multiset of (birth, death) pairs in one homology dimension. Essential
/// classes have `death == +inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram<T> {
    pub dim: usize,
    pub points: Vec<(T, T)>,
}

impl<T: Scalar> PersistenceDiagram<T> {
    pub fn new(dim: usize, mut points: Vec<(T, T)>) -> Self {
        sort_pairs(&mut points);
        Self { dim, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points sorted by (birth, death); the order used for output and
    /// multiset comparison.
    pub fn canonical(&self) -> Vec<(T, T)> {
        let mut points = self.points.clone();
        sort_pairs(&mut points);
        points
    }

    /// Finite lifetimes `death - birth`.
    pub fn lifetimes(&self) -> impl Iterator<Item = T> + '_ {
        self.points.iter().filter(|(_, d)| d.is_finite()).map(|&(b, d)| d - b)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::new(self.dim, self.points.iter().map(|&(b, d)| (b * factor, d * factor)).collect())
    }
}

fn sort_pairs<T: Scalar>(points: &mut [(T, T)]) {
    points.sort_by(|a, b| total_cmp(&a.0, &b.0).then_with(|| total_cmp(&a.1, &b.1)));
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPersistence<T> {
    pub birth: T,
    pub lifetime: T,
}

/// The finite pair with the largest lifetime; ties go to the smaller birth,
/// then the smaller death. Pairs with infinite death are ignored.
pub fn max_persistence<T: Scalar>(diagram: &PersistenceDiagram<T>) -> Option<MaxPersistence<T>> {
    diagram
        .points
        .iter()
        .filter(|(_, d)| d.is_finite())
        .min_by(|a, b| {
            let (la, lb) = (a.1 - a.0, b.1 - b.0);
            total_cmp(&lb, &la).then_with(|| total_cmp(&a.0, &b.0)).then_with(|| total_cmp(&a.1, &b.1))
        })
        .map(|&(birth, death)| MaxPersistence { birth, lifetime: death - birth })
}
