use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n: usize,
    /// F1 of a predictor that labels every item positive.
    pub baseline_f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 over the positive class.
pub fn f1_binary(pred: &[bool], gold: &[bool]) -> Result<EvalReport, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { left: pred.len(), right: gold.len() });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let tp = pred.iter().zip(gold).filter(|(p, g)| **p && **g).count();
    let fp = pred.iter().zip(gold).filter(|(p, g)| **p && !**g).count();
    let fn_ = pred.iter().zip(gold).filter(|(p, g)| !**p && **g).count();
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    let n = gold.len();
    let p = gold.iter().filter(|g| **g).count();
    let baseline_f1 = 2.0 * p as f64 / (n + p) as f64;
    Ok(EvalReport { precision, recall, f1, n, baseline_f1 })
}
