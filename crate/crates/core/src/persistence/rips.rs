use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use super::{DistanceMatrix, PersistenceDiagram, PersistenceError, UnionFind};
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold<T> {
    /// Truncate at the enclosing radius; finite diagrams are unchanged.
    Auto,
    /// Only simplices with filtration value `<=` this radius are built.
    Explicit(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsOptions<T> {
    /// Highest homology dimension computed, 0 or 1.
    pub max_dim: usize,
    pub threshold: Threshold<T>,
}

impl<T> Default for RipsOptions<T> {
    fn default() -> Self {
        Self { max_dim: 1, threshold: Threshold::Auto }
    }
}

/// Filtration position of a simplex: value first; among equal values the
/// larger combinatorial index comes first, which favours zero-persistence
/// pairs between an edge and the triangles it is the longest edge of.
#[derive(Debug, Clone, Copy)]
struct Key<T> {
    value: T,
    index: u64,
}

impl<T: Scalar> PartialEq for Key<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Key<T> {}

impl<T: Scalar> PartialOrd for Key<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Key<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        total_cmp(&self.value, &other.value).then(other.index.cmp(&self.index))
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn choose3(n: u64) -> u64 {
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

/// Combinatorial number system index of the triangle `{a, b, c}`.
fn triangle_index(a: usize, b: usize, c: usize) -> u64 {
    let mut v = [a as u64, b as u64, c as u64];
    v.sort_unstable_by(|x, y| y.cmp(x));
    choose3(v[0]) + choose2(v[1]) + v[2]
}

#[derive(Debug, Clone, Copy)]
struct Edge<T> {
    value: T,
    lo: usize,
    hi: usize,
}

struct Complex<'a, T> {
    dist: &'a DistanceMatrix<T>,
    threshold: T,
}

impl<T: Scalar> Complex<'_, T> {
    /// Calls `visit` for every triangle containing `edge` that is present
    /// below the threshold.
    fn for_each_coface(&self, edge: &Edge<T>, mut visit: impl FnMut(Key<T>)) {
        let lo_row = self.dist.row(edge.lo);
        let hi_row = self.dist.row(edge.hi);
        for k in 0..self.dist.len() {
            if k == edge.lo || k == edge.hi {
                continue;
            }
            let (a, b) = (lo_row[k], hi_row[k]);
            if a > self.threshold || b > self.threshold {
                continue;
            }
            let value = edge.value.max(a).max(b);
            visit(Key { value, index: triangle_index(edge.lo, edge.hi, k) });
        }
    }

    /// The first coface in filtration order. For a fixed edge the triangle
    /// index grows with the third vertex, so scanning that vertex downwards
    /// meets ties in filtration order, and a coface with the edge's own value
    /// cannot be beaten.
    fn smallest_coface(&self, edge: &Edge<T>) -> Option<Key<T>> {
        let lo_row = self.dist.row(edge.lo);
        let hi_row = self.dist.row(edge.hi);
        let mut best: Option<(T, usize)> = None;
        for k in (0..self.dist.len()).rev() {
            let (a, b) = (lo_row[k], hi_row[k]);
            if k == edge.lo || k == edge.hi || a > self.threshold || b > self.threshold {
                continue;
            }
            let value = edge.value.max(a).max(b);
            if best.is_none_or(|(v, _)| value < v) {
                best = Some((value, k));
                if value == edge.value {
                    break;
                }
            }
        }
        best.map(|(value, k)| Key { value, index: triangle_index(edge.lo, edge.hi, k) })
    }
}

/// Pops cancelling duplicates off a min-heap of mod-2 entries and returns the
/// smallest entry with odd multiplicity, leaving it on the heap.
fn heap_pivot<T: Scalar>(heap: &mut BinaryHeap<Reverse<Key<T>>>) -> Option<Key<T>> {
    loop {
        let Reverse(top) = heap.pop()?;
        match heap.peek() {
            Some(Reverse(next)) if *next == top => {
                heap.pop();
            }
            _ => {
                heap.push(Reverse(top));
                return Some(top);
            }
        }
    }
}

/// Rips persistence diagrams for dimensions `0..=opts.max_dim`.
///
/// Dimension 0 comes from Kruskal's algorithm: every bar is born at 0 and the
/// finite deaths are the minimum-spanning-tree edge weights. Dimension 1 comes
/// from reducing the coboundary matrix of the remaining edges, processed from
/// the latest to the earliest in filtration order; the edges that killed a
/// component are cleared (their columns are known to reduce to zero).
/// Zero-lifetime pairs are not reported.
pub fn rips_persistence<T: Scalar>(
    dist: &DistanceMatrix<T>,
    opts: &RipsOptions<T>,
) -> Result<Vec<PersistenceDiagram<T>>, PersistenceError> {
    let n = dist.len();
    if n == 0 {
        return Err(PersistenceError::EmptyInput);
    }
    if opts.max_dim > 1 {
        return Err(PersistenceError::InvalidOptions(format!("max_dim {} > 1", opts.max_dim)));
    }
    let threshold = match opts.threshold {
        Threshold::Auto => dist.enclosing_radius(),
        Threshold::Explicit(t) if t > T::zero() => t,
        Threshold::Explicit(t) => {
            return Err(PersistenceError::InvalidOptions(format!("threshold {t} must be positive")))
        }
    };

    let mut edges = Vec::new();
    for hi in 1..n {
        for lo in 0..hi {
            let value = dist.get(lo, hi);
            if value <= threshold {
                edges.push(Edge { value, lo, hi });
            }
        }
    }
    // edges were generated in combinatorial index order, so a stable sort by
    // value yields the (value, index) filtration order
    edges.sort_by(|a, b| total_cmp(&a.value, &b.value));

    let mut components = UnionFind::new(n);
    let mut zero_dim = Vec::with_capacity(n);
    let mut cycle_edges = Vec::with_capacity(edges.len());
    for edge in &edges {
        if components.union(edge.lo, edge.hi) {
            if edge.value > T::zero() {
                zero_dim.push((T::zero(), edge.value));
            }
        } else {
            cycle_edges.push(*edge);
        }
    }
    let roots = (0..n).filter(|&v| components.find(v) == v).count();
    zero_dim.extend(std::iter::repeat_n((T::zero(), T::infinity()), roots));
    let mut diagrams = vec![PersistenceDiagram::new(0, zero_dim)];

    if opts.max_dim >= 1 {
        let complex = Complex { dist, threshold };
        diagrams.push(PersistenceDiagram::new(1, reduce_edges(&complex, &cycle_edges)));
    }
    Ok(diagrams)
}

fn reduce_edges<T: Scalar>(complex: &Complex<'_, T>, cycle_edges: &[Edge<T>]) -> Vec<(T, T)> {
    let mut pairs = Vec::new();
    // pivot triangle -> edges whose coboundaries sum to the reduced column
    let mut reduced: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let compact_floor = 64 * complex.dist.len();

    for (column, edge) in cycle_edges.iter().enumerate().rev() {
        let Some(first) = complex.smallest_coface(edge) else {
            pairs.push((edge.value, T::infinity()));
            continue;
        };
        // an unreduced coboundary has distinct entries, so its smallest one
        // is the pivot; if no earlier column owns it we are done
        if let Entry::Vacant(slot) = reduced.entry(first.index) {
            slot.insert(vec![column]);
            if first.value > edge.value {
                pairs.push((edge.value, first.value));
            }
            continue;
        }

        heap.clear();
        complex.for_each_coface(edge, |key| heap.push(Reverse(key)));
        let mut combination = vec![column];
        let mut compact_at = compact_floor;
        let pivot = loop {
            let Some(pivot) = heap_pivot(&mut heap) else { break None };
            let Some(owner) = reduced.get(&pivot.index) else { break Some(pivot) };
            for &other in owner {
                complex.for_each_coface(&cycle_edges[other], |key| heap.push(Reverse(key)));
            }
            combination.extend_from_slice(owner);
            if heap.len() > compact_at {
                compact(&mut heap);
                compact_at = (2 * heap.len()).max(compact_floor);
            }
        };
        match pivot {
            Some(pivot) => {
                combination.sort_unstable();
                reduced.insert(pivot.index, cancel_pairs(combination));
                if pivot.value > edge.value {
                    pairs.push((edge.value, pivot.value));
                }
            }
            None => pairs.push((edge.value, T::infinity())),
        }
    }
    pairs
}

/// Rebuilds a working column with every mod-2 cancellation applied, so the
/// heap holds at most twice the column's true support.
fn compact<T: Scalar>(heap: &mut BinaryHeap<Reverse<Key<T>>>) {
    let mut entries = std::mem::take(heap).into_vec();
    entries.sort_unstable();
    *heap = BinaryHeap::from(cancel_pairs(entries));
}

/// Removes entries that occur an even number of times from a sorted list.
fn cancel_pairs<E: PartialEq>(sorted: Vec<E>) -> Vec<E> {
    let mut out: Vec<E> = Vec::with_capacity(sorted.len());
    for x in sorted {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}
