use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The classifier families on offer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Knn,
    Logistic,
    GaussianNb,
    LinearSvm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Knn, ModelKind::Logistic, ModelKind::GaussianNb, ModelKind::LinearSvm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::Logistic => "logistic",
            ModelKind::GaussianNb => "gaussian_nb",
            ModelKind::LinearSvm => "linear_svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().replace('-', "_"))
            .ok_or_else(|| format!("unknown model `{s}` (expected knn, logistic, gaussian_nb or linear_svm)"))
    }
}

/// Hyperparameters shared by all fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub knn_k: usize,
    /// z-score features with training-set statistics before fitting.
    pub standardize: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { knn_k: 5, standardize: true }
    }
}

pub const LOGISTIC_TOLERANCE: f64 = 1e-8;
pub const LOGISTIC_MAX_ITERATIONS: usize = 10_000;
pub const NB_VARIANCE_FLOOR: f64 = 1e-9;
pub const SVM_LAMBDA: f64 = 1e-3;
const SVM_ITERATIONS: usize = 5_000;

/// Per-feature z-score parameters, fixed at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: [f64; 2],
    pub scale: [f64; 2],
}

impl Scaler {
    pub fn identity() -> Self {
        Scaler { mean: [0.0; 2], scale: [1.0; 2] }
    }

    /// Constant features keep scale 1.
    pub fn fit(x: &[[f64; 2]]) -> Self {
        let n = x.len().max(1) as f64;
        let mut mean = [0.0; 2];
        let mut scale = [1.0; 2];
        for j in 0..2 {
            mean[j] = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                scale[j] = var.sqrt();
            } else {
                log::warn!("feature {j} is constant on the training set; left unscaled");
            }
        }
        Scaler { mean, scale }
    }

    pub fn apply(&self, row: [f64; 2]) -> [f64; 2] {
        [(row[0] - self.mean[0]) / self.scale[0], (row[1] - self.mean[1]) / self.scale[1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Fitted {
    Knn { k: usize, x: Vec<[f64; 2]>, y: Vec<bool> },
    Linear { w: [f64; 2], b: f64, slope: f64 },
    GaussianNb { log_prior: [f64; 2], mean: [[f64; 2]; 2], var: [[f64; 2]; 2] },
}

/// A fitted classifier; `score` is the confidence that a row is voiced.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub kind: ModelKind,
    pub scaler: Scaler,
    fitted: Fitted,
}

impl Classifier {
    /// `y[i]` is true for voiced rows. Both classes must be present.
    pub fn fit(kind: ModelKind, config: &ModelConfig, x: &[[f64; 2]], y: &[bool]) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(y.iter().any(|&v| v) && y.iter().any(|&v| !v), "both classes are needed to fit");
        let scaler = if config.standardize { Scaler::fit(x) } else { Scaler::identity() };
        let z: Vec<[f64; 2]> = x.iter().map(|&r| scaler.apply(r)).collect();
        let fitted = match kind {
            ModelKind::Knn => Fitted::Knn { k: config.knn_k.clamp(1, z.len()), x: z, y: y.to_vec() },
            ModelKind::Logistic => {
                let (w, b) = fit_logistic(&z, y);
                Fitted::Linear { w, b, slope: 1.0 }
            }
            ModelKind::GaussianNb => fit_gaussian_nb(&z, y),
            ModelKind::LinearSvm => {
                let (w, b) = fit_svm(&z, y);
                let margins: Vec<f64> = z.iter().map(|r| dot(w, *r) + b).collect();
                Fitted::Linear { w, b, slope: platt_slope(&margins, y) }
            }
        };
        Classifier { kind, scaler, fitted }
    }

    pub fn score(&self, row: [f64; 2]) -> f64 {
        let z = self.scaler.apply(row);
        match &self.fitted {
            Fitted::Knn { k, x, y } => {
                let mut order: Vec<(f64, usize)> = x.iter().enumerate().map(|(i, r)| (dist2(*r, z), i)).collect();
                // stable: equal distances keep training order
                order.sort_by(|a, b| a.0.total_cmp(&b.0));
                order[..*k].iter().filter(|(_, i)| y[*i]).count() as f64 / *k as f64
            }
            Fitted::Linear { w, b, slope } => sigmoid(slope * (dot(*w, z) + b)),
            Fitted::GaussianNb { log_prior, mean, var } => {
                let ll = |c: usize| {
                    log_prior[c]
                        - (0..2)
                            .map(|j| 0.5 * ((z[j] - mean[c][j]).powi(2) / var[c][j] + var[c][j].ln()))
                            .sum::<f64>()
                };
                // class 0 is voiced
                sigmoid(ll(0) - ll(1))
            }
        }
    }

    pub fn predict(&self, row: [f64; 2]) -> bool {
        self.score(row) >= 0.5
    }
}

fn dot(w: [f64; 2], x: [f64; 2]) -> f64 {
    w[0] * x[0] + w[1] * x[1]
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn fit_logistic(x: &[[f64; 2]], y: &[bool]) -> ([f64; 2], f64) {
    let n = x.len() as f64;
    let (mut w, mut b) = ([0.0; 2], 0.0);
    // step 1/L for the mean cross-entropy of standardized features
    let curvature = 0.25 * (1.0 + x.iter().map(|r| r[0] * r[0] + r[1] * r[1]).sum::<f64>() / n);
    let rate = 1.0 / curvature;
    for _ in 0..LOGISTIC_MAX_ITERATIONS {
        let mut grad = [0.0; 3];
        for (r, &t) in x.iter().zip(y) {
            let err = sigmoid(dot(w, *r) + b) - if t { 1.0 } else { 0.0 };
            grad[0] += err * r[0];
            grad[1] += err * r[1];
            grad[2] += err;
        }
        grad.iter_mut().for_each(|g| *g /= n);
        if grad.iter().map(|g| g * g).sum::<f64>().sqrt() < LOGISTIC_TOLERANCE {
            break;
        }
        w[0] -= rate * grad[0];
        w[1] -= rate * grad[1];
        b -= rate * grad[2];
    }
    (w, b)
}

fn fit_gaussian_nb(x: &[[f64; 2]], y: &[bool]) -> Fitted {
    let n = x.len() as f64;
    let mut log_prior = [0.0; 2];
    let mut mean = [[0.0; 2]; 2];
    let mut var = [[0.0; 2]; 2];
    for (c, want) in [true, false].into_iter().enumerate() {
        let rows: Vec<[f64; 2]> = x.iter().zip(y).filter(|(_, &t)| t == want).map(|(r, _)| *r).collect();
        let m = rows.len() as f64;
        log_prior[c] = (m / n).ln();
        for j in 0..2 {
            mean[c][j] = rows.iter().map(|r| r[j]).sum::<f64>() / m;
            let v = rows.iter().map(|r| (r[j] - mean[c][j]).powi(2)).sum::<f64>() / m;
            if v < NB_VARIANCE_FLOOR {
                log::warn!("class variance of feature {j} below floor; using {NB_VARIANCE_FLOOR:e}");
            }
            var[c][j] = v.max(NB_VARIANCE_FLOOR);
        }
    }
    Fitted::GaussianNb { log_prior, mean, var }
}

/// Full-batch subgradient descent on lambda/2 |w|^2 + mean hinge loss,
/// keeping the iterate with the lowest objective.
fn fit_svm(x: &[[f64; 2]], y: &[bool]) -> ([f64; 2], f64) {
    let n = x.len() as f64;
    let sign: Vec<f64> = y.iter().map(|&t| if t { 1.0 } else { -1.0 }).collect();
    let objective = |w: [f64; 2], b: f64| {
        let hinge: f64 = x.iter().zip(&sign).map(|(r, s)| (1.0 - s * (dot(w, *r) + b)).max(0.0)).sum();
        0.5 * SVM_LAMBDA * (w[0] * w[0] + w[1] * w[1]) + hinge / n
    };
    let (mut w, mut b) = ([0.0; 2], 0.0);
    let (mut best, mut best_obj) = ((w, b), objective(w, b));
    for t in 1..=SVM_ITERATIONS {
        let mut grad = [SVM_LAMBDA * w[0], SVM_LAMBDA * w[1], 0.0];
        for (r, s) in x.iter().zip(&sign) {
            if s * (dot(w, *r) + b) < 1.0 {
                grad[0] -= s * r[0] / n;
                grad[1] -= s * r[1] / n;
                grad[2] -= s / n;
            }
        }
        let rate = 1.0 / (t as f64).sqrt();
        w[0] -= rate * grad[0];
        w[1] -= rate * grad[1];
        b -= rate * grad[2];
        let obj = objective(w, b);
        if obj < best_obj {
            best = (w, b);
            best_obj = obj;
        }
    }
    best
}

/// Slope `a >= 0` of the sigmoid `1 / (1 + exp(-a m))` that best fits the
/// labels given margins `m`, using smoothed targets. Newton on a convex 1-D
/// cross-entropy.
fn platt_slope(margins: &[f64], y: &[bool]) -> f64 {
    let n_pos = y.iter().filter(|&&t| t).count() as f64;
    let n_neg = y.len() as f64 - n_pos;
    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let mut a: f64 = 1.0;
    for _ in 0..100 {
        let (mut g, mut h) = (0.0, 0.0);
        for (&m, &t) in margins.iter().zip(y) {
            let p = sigmoid(a * m);
            g += (p - if t { hi } else { lo }) * m;
            h += p * (1.0 - p) * m * m;
        }
        if h <= 0.0 {
            break;
        }
        let next = (a - g / h).max(0.0);
        if (next - a).abs() < 1e-12 * a.max(1.0) {
            a = next;
            break;
        }
        a = next;
    }
    a
}
