use super::LearnError;

/// ROC curve and the area under it.
#[derive(Debug, Clone, PartialEq)]
pub struct Roc {
    /// (false-positive rate, true-positive rate), from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC by sweeping a threshold down through the distinct scores, with
/// `positive[i]` marking voiced records. Tied scores form one step, so the
/// area gives half credit to tied positive/negative pairs.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Result<Roc, LearnError> {
    assert_eq!(scores.len(), positive.len(), "one label per score");
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    // twice the area in units of one (positive, negative) pair
    let mut doubled_area: u64 = 0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let (prev_tp, prev_fp) = (tp, fp);
        let score = scores[order[i]];
        while i < order.len() && scores[order[i]] == score {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += (fp - prev_fp) * (tp + prev_tp);
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    let auc = doubled_area as f64 / (2 * n_pos as u64 * n_neg as u64) as f64;
    Ok(Roc { points, auc })
}

/// Fraction of predictions equal to the truth.
pub fn accuracy(predicted: &[bool], truth: &[bool]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len() as f64
}
