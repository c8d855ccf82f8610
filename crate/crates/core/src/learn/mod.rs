//! Binary classifiers over (birth, lifetime) features, stratified splitting,
//! k-fold cross-validation and ROC reporting.
//!
//! Classifiers work in `f64` only; features from `f32` pipelines are widened
//! with [`Dataset::from_records`].

mod metrics;
mod models;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureRecord;
use crate::scalar::Scalar;
use crate::signal::ClassLabel;

pub use metrics::{accuracy, roc_auc, Roc};
pub use models::{
    Classifier, ModelConfig, ModelKind, Scaler, LOGISTIC_MAX_ITERATIONS, LOGISTIC_TOLERANCE, NB_VARIANCE_FLOOR,
    SVM_LAMBDA,
};

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("both classes must be present")]
    SingleClass,
    #[error("class {label} has {count} records, at least {needed} needed")]
    TooFewRecords { label: ClassLabel, count: usize, needed: usize },
    #[error("invalid split spec: {0}")]
    InvalidSpec(String),
}

/// Labelled feature rows in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<FeatureRecord<f64>>,
}

impl Dataset {
    pub fn new(records: Vec<FeatureRecord<f64>>) -> Self {
        Dataset { records }
    }

    pub fn from_records<T: Scalar>(records: &[FeatureRecord<T>]) -> Self {
        Dataset::new(
            records
                .iter()
                .map(|r| FeatureRecord {
                    record_id: r.record_id.clone(),
                    label: r.label,
                    birth: r.birth.to_f64_lossy(),
                    lifetime: r.lifetime.to_f64_lossy(),
                })
                .collect(),
        )
    }

    pub fn records(&self) -> &[FeatureRecord<f64>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// (voiced, voiceless)
    pub fn class_counts(&self) -> (usize, usize) {
        let voiced = self.records.iter().filter(|r| r.label == ClassLabel::Voiced).count();
        (voiced, self.records.len() - voiced)
    }

    pub fn features(&self) -> Vec<[f64; 2]> {
        self.records.iter().map(|r| [r.birth, r.lifetime]).collect()
    }

    /// True for voiced rows.
    pub fn targets(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.label == ClassLabel::Voiced).collect()
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset::new(indices.iter().map(|&i| self.records[i].clone()).collect())
    }

    fn class_indices(&self, label: ClassLabel) -> Vec<usize> {
        (0..self.records.len()).filter(|&i| self.records[i].label == label).collect()
    }

    fn require_each_class(&self, needed: usize) -> Result<(), LearnError> {
        let (voiced, voiceless) = self.class_counts();
        if voiced == 0 || voiceless == 0 {
            return Err(LearnError::SingleClass);
        }
        for (label, count) in [(ClassLabel::Voiced, voiced), (ClassLabel::Voiceless, voiceless)] {
            if count < needed {
                return Err(LearnError::TooFewRecords { label, count, needed });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { test_fraction: 0.3, folds: 5, seed: 0 }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), LearnError> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(LearnError::InvalidSpec(format!("test fraction {} not in (0, 1)", self.test_fraction)));
        }
        if self.folds < 2 {
            return Err(LearnError::InvalidSpec(format!("{} folds, at least 2 needed", self.folds)));
        }
        Ok(())
    }
}

/// Test records per class: `count * fraction` rounded half to even, kept
/// within `1..count` so both sides see the class.
pub fn stratum_test_count(count: usize, fraction: f64) -> usize {
    ((count as f64 * fraction).round_ties_even() as usize).clamp(1, count - 1)
}

/// Seeded per-class shuffle, then the first `stratum_test_count` records of
/// each class go to the test side. Both sides keep dataset order.
pub fn split_stratified(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), LearnError> {
    spec.validate()?;
    dataset.require_each_class(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut is_test = vec![false; dataset.len()];
    for label in [ClassLabel::Voiced, ClassLabel::Voiceless] {
        let mut members = dataset.class_indices(label);
        members.shuffle(&mut rng);
        let n_test = stratum_test_count(members.len(), spec.test_fraction);
        for &i in &members[..n_test] {
            is_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| is_test[i]);
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub true_voiced: usize,
    pub false_voiced: usize,
    pub true_voiceless: usize,
    pub false_voiceless: usize,
}

/// Outcome of scoring one model on held-out records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub accuracy: f64,
    pub auc: f64,
    /// (false-positive rate, true-positive rate)
    pub roc: Vec<(f64, f64)>,
    pub fold_accuracies: Vec<f64>,
    pub mean_cv_accuracy: Option<f64>,
    pub confusion: Confusion,
    pub n_train: usize,
    pub n_test: usize,
}

/// Fit on `train`, score `test`.
pub fn evaluate_holdout(
    train: &Dataset,
    test: &Dataset,
    kind: ModelKind,
    config: &ModelConfig,
) -> Result<EvalReport, LearnError> {
    train.require_each_class(1)?;
    let model = Classifier::fit(kind, config, &train.features(), &train.targets());
    let truth = test.targets();
    let scores: Vec<f64> = test.features().into_iter().map(|r| model.score(r)).collect();
    let predicted: Vec<bool> = scores.iter().map(|&s| s >= 0.5).collect();
    let roc = roc_auc(&scores, &truth)?;
    let mut confusion = Confusion::default();
    for (&p, &t) in predicted.iter().zip(&truth) {
        match (p, t) {
            (true, true) => confusion.true_voiced += 1,
            (true, false) => confusion.false_voiced += 1,
            (false, false) => confusion.true_voiceless += 1,
            (false, true) => confusion.false_voiceless += 1,
        }
    }
    Ok(EvalReport {
        model: kind,
        accuracy: accuracy(&predicted, &truth),
        auc: roc.auc,
        roc: roc.points,
        fold_accuracies: Vec::new(),
        mean_cv_accuracy: None,
        confusion,
        n_train: train.len(),
        n_test: test.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<EvalReport>,
    pub mean_accuracy: f64,
}

/// Stratified k-fold: each class is shuffled with the spec seed and dealt
/// round-robin into folds.
pub fn kfold_cv(
    dataset: &Dataset,
    spec: &SplitSpec,
    kind: ModelKind,
    config: &ModelConfig,
) -> Result<CrossValidation, LearnError> {
    spec.validate()?;
    dataset.require_each_class(spec.folds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut fold_of = vec![0usize; dataset.len()];
    for label in [ClassLabel::Voiced, ClassLabel::Voiceless] {
        let mut members = dataset.class_indices(label);
        members.shuffle(&mut rng);
        for (position, &i) in members.iter().enumerate() {
            fold_of[i] = position % spec.folds;
        }
    }
    let folds = (0..spec.folds)
        .map(|f| {
            let (held, kept): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| fold_of[i] == f);
            evaluate_holdout(&dataset.subset(&kept), &dataset.subset(&held), kind, config)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mean_accuracy = folds.iter().map(|r| r.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(CrossValidation { folds, mean_accuracy })
}

/// Holdout split, cross-validation on the training side, then a final fit on
/// the whole training side scored on the test side.
pub fn train_eval(
    dataset: &Dataset,
    spec: &SplitSpec,
    kind: ModelKind,
    config: &ModelConfig,
) -> Result<EvalReport, LearnError> {
    let (train, test) = split_stratified(dataset, spec)?;
    let cv = kfold_cv(&train, spec, kind, config)?;
    let mut report = evaluate_holdout(&train, &test, kind, config)?;
    report.fold_accuracies = cv.folds.iter().map(|r| r.accuracy).collect();
    report.mean_cv_accuracy = Some(cv.mean_accuracy);
    Ok(report)
}
