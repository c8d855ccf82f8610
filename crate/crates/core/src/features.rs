//! Classifier features and exploratory descriptors derived from diagrams and
//! point clouds.

use serde::{Deserialize, Serialize};

use crate::embedding::PointCloud;
use crate::persistence::{max_persistence, PersistenceDiagram};
use crate::scalar::Scalar;
use crate::signal::ClassLabel;

/// One classifier row: the most persistent 1-cycle of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord<T> {
    pub record_id: String,
    pub label: ClassLabel,
    pub birth: T,
    pub lifetime: T,
}

/// Birth and lifetime of the longest bar, or `None` when the diagram has no
/// finite points (the record is then excluded).
pub fn extract_feature<T: Scalar>(
    record_id: impl Into<String>,
    label: ClassLabel,
    diagram: &PersistenceDiagram<T>,
) -> Option<FeatureRecord<T>> {
    max_persistence(diagram).map(|max| FeatureRecord {
        record_id: record_id.into(),
        label,
        birth: max.birth,
        lifetime: max.lifetime,
    })
}

/// 2-D histogram over (birth, lifetime).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid<T> {
    pub x_edges: Vec<T>,
    pub y_edges: Vec<T>,
    /// Row-major, `counts[ix * (y_edges.len() - 1) + iy]`.
    pub counts: Vec<u32>,
    /// Set when no point fell below the cutoff; edges are then all zero.
    pub degenerate: bool,
}

impl<T: Scalar> DensityGrid<T> {
    pub fn count(&self, ix: usize, iy: usize) -> u32 {
        self.counts[ix * (self.y_edges.len() - 1) + iy]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

fn uniform_edges<T: Scalar>(lo: T, hi: T, bins: usize) -> Vec<T> {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - T::of(0.5), hi + T::of(0.5)) };
    let mut edges: Vec<T> = (0..bins).map(|i| lo + (hi - lo) * T::of_usize(i) / T::of_usize(bins)).collect();
    edges.push(hi);
    edges
}

/// Bin of `v` among `edges`: half-open bins, the last one closed.
fn bin_of<T: Scalar>(edges: &[T], v: T) -> Option<usize> {
    let bins = edges.len() - 1;
    if v < edges[0] || v > edges[bins] {
        return None;
    }
    Some(edges[1..bins].partition_point(|&e| e <= v))
}

/// Histogram of the points in the lower part of a diagram: those whose
/// lifetime is at most `cutoff_fraction` of the largest lifetime. Bin edges
/// are uniform over the bounding box of the retained points (widened by 0.5
/// on each side along an axis where that box is flat).
pub fn lower_region_density<T: Scalar>(
    diagram: &PersistenceDiagram<T>,
    bins_x: usize,
    bins_y: usize,
    cutoff_fraction: T,
) -> DensityGrid<T> {
    assert!(bins_x > 0 && bins_y > 0, "grid needs at least one bin per axis");
    let points: Vec<(T, T)> = diagram.points.iter().filter(|p| p.1.is_finite()).map(|&(b, d)| (b, d - b)).collect();
    let max_lifetime = points.iter().map(|p| p.1).fold(T::zero(), T::max);
    let cutoff = cutoff_fraction * max_lifetime;
    let retained: Vec<(T, T)> = points.into_iter().filter(|p| p.1 <= cutoff).collect();

    if retained.is_empty() {
        return DensityGrid {
            x_edges: vec![T::zero(); bins_x + 1],
            y_edges: vec![T::zero(); bins_y + 1],
            counts: vec![0; bins_x * bins_y],
            degenerate: true,
        };
    }
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
    for &(x, y) in &retained {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let x_edges = uniform_edges(x_lo, x_hi, bins_x);
    let y_edges = uniform_edges(y_lo, y_hi, bins_y);
    let mut counts = vec![0u32; bins_x * bins_y];
    for &(x, y) in &retained {
        if let (Some(ix), Some(iy)) = (bin_of(&x_edges, x), bin_of(&y_edges, y)) {
            counts[ix * bins_y + iy] += 1;
        }
    }
    DensityGrid { x_edges, y_edges, counts, degenerate: false }
}

/// Projection of a cloud onto its top three principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca3<T> {
    pub projected: Vec<[T; 3]>,
    /// Variance share of each axis, nonincreasing.
    pub explained_ratio: [T; 3],
}

const PCA_TOLERANCE: f64 = 1e-10;
const PCA_MAX_ITERATIONS: usize = 20_000;

/// PCA by power iteration with deflation on the covariance matrix. Axis signs
/// are arbitrary. Components with (numerically) zero variance get ratio 0
/// and zero coordinates.
///
/// Panics if the cloud has fewer than 4 points.
pub fn pca3<T: Scalar>(cloud: &PointCloud<T>) -> Pca3<T> {
    assert!(cloud.len() >= 4, "PCA needs at least 4 points");
    let (n, d) = (cloud.len(), cloud.dim());
    let mut mean = vec![T::zero(); d];
    for p in cloud.points() {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m = *m + x;
        }
    }
    let inv_n = T::one() / T::of_usize(n);
    mean.iter_mut().for_each(|m| *m = *m * inv_n);

    let mut cov = vec![T::zero(); d * d];
    let mut centred = vec![T::zero(); d];
    for p in cloud.points() {
        for (c, (&x, &m)) in centred.iter_mut().zip(p.iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..d {
            let ci = centred[i];
            for j in i..d {
                cov[i * d + j] = cov[i * d + j] + ci * centred[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] * inv_n;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    let total: T = (0..d).map(|i| cov[i * d + i]).sum();
    let negligible = total * T::of(1e-12);

    let mut axes: Vec<Option<Vec<T>>> = Vec::with_capacity(3);
    let mut ratios = [T::zero(); 3];
    for (slot, ratio) in ratios.iter_mut().enumerate().take(d.min(3)) {
        let (value, vector) = leading_eigenpair(&cov, d, slot);
        if value <= negligible || total <= T::zero() {
            axes.push(None);
            continue;
        }
        *ratio = value / total;
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] = cov[i * d + j] - value * vector[i] * vector[j];
            }
        }
        axes.push(Some(vector));
    }
    axes.resize(3, None);

    let projected = cloud
        .points()
        .map(|p| {
            let mut out = [T::zero(); 3];
            for (o, axis) in out.iter_mut().zip(&axes) {
                if let Some(axis) = axis {
                    *o = p.iter().zip(&mean).zip(axis).map(|((&x, &m), &a)| (x - m) * a).sum();
                }
            }
            out
        })
        .collect();
    Pca3 { projected, explained_ratio: ratios }
}

fn leading_eigenpair<T: Scalar>(matrix: &[T], d: usize, salt: usize) -> (T, Vec<T>) {
    // fixed, non-symmetric start so no eigenvector is missed by construction
    let mut v: Vec<T> = (0..d).map(|i| T::one() + T::of(((i * 7 + salt * 13) % 11) as f64 / 11.0)).collect();
    normalize(&mut v);
    let mut next = vec![T::zero(); d];
    for _ in 0..PCA_MAX_ITERATIONS {
        for (i, out) in next.iter_mut().enumerate() {
            *out = matrix[i * d..(i + 1) * d].iter().zip(&v).map(|(&a, &b)| a * b).sum();
        }
        if normalize(&mut next) == T::zero() {
            return (T::zero(), v);
        }
        let change: T = next.iter().zip(&v).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
        std::mem::swap(&mut v, &mut next);
        if change < T::of(PCA_TOLERANCE) {
            break;
        }
    }
    let value = (0..d).map(|i| v[i] * matrix[i * d..(i + 1) * d].iter().zip(&v).map(|(&a, &b)| a * b).sum::<T>()).sum();
    (value, v)
}

fn normalize<T: Scalar>(v: &mut [T]) -> T {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        v.iter_mut().for_each(|x| *x = *x / norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn diagram(points: Vec<(f64, f64)>) -> PersistenceDiagram<f64> {
        PersistenceDiagram::new(1, points)
    }

    #[test]
    fn feature_from_longest_bar() {
        let record = extract_feature("r", ClassLabel::Voiced, &diagram(vec![(0.2, 1.4)])).unwrap();
        assert_eq!(record.birth, 0.2);
        assert!((record.lifetime - 1.2).abs() < 1e-15);
        assert_eq!(extract_feature("e", ClassLabel::Voiced, &diagram(vec![])), None);
        let tie = extract_feature("t", ClassLabel::Voiceless, &diagram(vec![(0.25, 0.75), (0.125, 0.625)])).unwrap();
        assert_eq!((tie.birth, tie.lifetime), (0.125, 0.5));
    }

    #[test]
    fn density_counts_lower_half() {
        let mut points: Vec<(f64, f64)> = (0..9).map(|i| (0.1 * i as f64, 0.1 * i as f64 + 0.05 * (i + 1) as f64)).collect();
        points.push((0.3, 2.3));
        let d = diagram(points.clone());
        let grid = lower_region_density(&d, 4, 4, 0.5);
        let below = points.iter().filter(|p| p.1 - p.0 <= 1.0).count() as u64;
        assert_eq!(grid.total(), below);
        assert!(!grid.degenerate);
    }

    #[test]
    fn single_point_grid_is_empty() {
        let grid = lower_region_density(&diagram(vec![(0.1, 0.9)]), 3, 3, 0.5);
        assert!(grid.degenerate);
        assert_eq!(grid.total(), 0);
        assert_eq!(grid.counts.len(), 9);
    }

    fn naive_binning(retained: &[(f64, f64)], x: &[f64], y: &[f64]) -> Vec<u32> {
        let (bx, by) = (x.len() - 1, y.len() - 1);
        let mut counts = vec![0; bx * by];
        for &(b, l) in retained {
            for i in 0..bx {
                let in_x = b >= x[i] && (b < x[i + 1] || (i == bx - 1 && b <= x[i + 1]));
                for j in 0..by {
                    let in_y = l >= y[j] && (l < y[j + 1] || (j == by - 1 && l <= y[j + 1]));
                    if in_x && in_y {
                        counts[i * by + j] += 1;
                    }
                }
            }
        }
        counts
    }

    #[test]
    fn density_matches_naive_binning() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let points: Vec<(f64, f64)> = (0..100)
            .map(|_| {
                let b = rng.random_range(0.0..1.0);
                (b, b + rng.random_range(0.001..1.0f64).powi(3))
            })
            .collect();
        let grid = lower_region_density(&diagram(points.clone()), 8, 8, 0.5);
        let max_l = points.iter().map(|p| p.1 - p.0).fold(0.0, f64::max);
        let retained: Vec<(f64, f64)> =
            points.iter().map(|p| (p.0, p.1 - p.0)).filter(|p| p.1 <= 0.5 * max_l).collect();
        assert_eq!(grid.counts, naive_binning(&retained, &grid.x_edges, &grid.y_edges));
        assert_eq!(grid.total(), retained.len() as u64);
    }

    proptest! {
        #[test]
        fn density_is_order_free(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut points: Vec<(f64, f64)> =
                (0..30).map(|_| { let b = rng.random_range(0.0..1.0); (b, b + rng.random_range(0.01..1.0)) }).collect();
            let a = lower_region_density(&diagram(points.clone()), 5, 5, 0.7);
            points.reverse();
            let b = lower_region_density(&PersistenceDiagram { dim: 1, points }, 5, 5, 0.7);
            prop_assert_eq!(a, b);
        }
    }

    fn gaussian_cloud(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>], shift: &[f64]) -> PointCloud<f64> {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut p = shift.to_vec();
                for b in basis {
                    let z: f64 = StandardNormal.sample(rng);
                    for (x, &e) in p.iter_mut().zip(b) {
                        *x += z * e;
                    }
                }
                p
            })
            .collect();
        PointCloud::from_rows("g", &rows).unwrap()
    }

    #[test]
    fn isotropic_cloud_splits_variance_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let pca = pca3(&gaussian_cloud(&mut rng, 3000, &basis, &[0.0; 3]));
        for r in pca.explained_ratio {
            assert!((r - 1.0 / 3.0).abs() < 0.1, "{:?}", pca.explained_ratio);
        }
        let sum: f64 = pca.explained_ratio.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn projection_contracts_distances_and_ignores_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let basis: Vec<Vec<f64>> = (0..5).map(|k| (0..8).map(|j| if j == k { 3.0 - 0.5 * k as f64 } else { 0.1 }).collect()).collect();
        let cloud = gaussian_cloud(&mut rng, 200, &basis, &[0.0; 8]);
        let moved = PointCloud::from_rows("m", &cloud.points().map(|p| p.iter().map(|x| x + 5.0).collect()).collect::<Vec<_>>()).unwrap();
        let (a, b) = (pca3(&cloud), pca3(&moved));
        let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        for _ in 0..20 {
            let (i, j) = (rng.random_range(0..200), rng.random_range(0..200));
            let projected = dist(&a.projected[i], &a.projected[j]);
            assert!(projected <= dist(cloud.point(i), cloud.point(j)) + 1e-12);
            assert!((projected - dist(&b.projected[i], &b.projected[j])).abs() < 1e-9);
        }
        assert!(a.explained_ratio.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn scaled_diagram_scales_feature() {
        let d = diagram(vec![(0.3, 1.7), (0.5, 0.9)]);
        let base = extract_feature("s", ClassLabel::Voiced, &d).unwrap();
        for alpha in [0.5, 2.0, 8.0] {
            let scaled = extract_feature("s", ClassLabel::Voiced, &d.scaled(alpha)).unwrap();
            assert_eq!((scaled.birth, scaled.lifetime), (base.birth * alpha, base.lifetime * alpha));
        }
    }

    #[test]
    fn planar_cloud_has_no_third_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = 100;
        let mut u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= un);
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let proj: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&u).for_each(|(x, a)| *x -= proj * a);
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= vn);

        let coeffs: Vec<(f64, f64)> = (0..300).map(|_| (rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0))).collect();
        let rows: Vec<Vec<f64>> = coeffs.iter().map(|&(a, b)| (0..d).map(|j| 2.0 + a * u[j] + b * v[j]).collect()).collect();
        let pca = pca3(&PointCloud::from_rows("plane", &rows).unwrap());
        assert!(pca.explained_ratio[2] < 1e-8, "{:?}", pca.explained_ratio);

        // spectrum of the 2x2 coefficient covariance in closed form
        let n = coeffs.len() as f64;
        let (ma, mb) = (coeffs.iter().map(|c| c.0).sum::<f64>() / n, coeffs.iter().map(|c| c.1).sum::<f64>() / n);
        let saa = coeffs.iter().map(|c| (c.0 - ma).powi(2)).sum::<f64>() / n;
        let sbb = coeffs.iter().map(|c| (c.1 - mb).powi(2)).sum::<f64>() / n;
        let sab = coeffs.iter().map(|c| (c.0 - ma) * (c.1 - mb)).sum::<f64>() / n;
        let half_trace = (saa + sbb) / 2.0;
        let top = half_trace + (((saa - sbb) / 2.0).powi(2) + sab * sab).sqrt();
        assert!((pca.explained_ratio[0] - top / (saa + sbb)).abs() < 1e-8);
        assert!((pca.explained_ratio[0] + pca.explained_ratio[1] - 1.0).abs() < 1e-8);
    }
}
