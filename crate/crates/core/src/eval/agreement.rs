use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementKind {
    Cohen,
    Fleiss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub kind: AgreementKind,
    pub kappa: f64,
    pub n_items: usize,
}

/// Chance-corrected agreement; when chance agreement is 1 the coefficient is
/// 1 for perfect observed agreement and 0 otherwise.
fn chance_corrected(p_o: f64, p_e: f64) -> f64 {
    if (1.0 - p_e).abs() < f64::EPSILON {
        if (1.0 - p_o).abs() < f64::EPSILON {
            1.0
        } else {
            0.0
        }
    } else {
        (p_o - p_e) / (1.0 - p_e)
    }
}

/// Cohen's kappa for two annotators over the same items.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<AgreementReport, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = a.len() as f64;
    let p_o = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut marg: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    for x in a {
        marg.entry(x).or_default().0 += 1;
    }
    for y in b {
        marg.entry(y).or_default().1 += 1;
    }
    let p_e: f64 = marg.values().map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n)).sum();
    Ok(AgreementReport { kind: AgreementKind::Cohen, kappa: chance_corrected(p_o, p_e), n_items: a.len() })
}

/// Fleiss' kappa over an items × categories matrix of vote counts. Every row
/// must sum to the same number of raters, at least two.
pub fn fleiss_kappa(counts: &[Vec<usize>]) -> Result<AgreementReport, EvalError> {
    let first = counts.first().ok_or(EvalError::Empty)?;
    let k = first.len();
    let raters: usize = first.iter().sum();
    if raters < 2 {
        return Err(EvalError::TooFewRaters);
    }
    for (row, c) in counts.iter().enumerate() {
        if c.len() != k {
            return Err(EvalError::RaggedCategories { row, expected: k, found: c.len() });
        }
        let s: usize = c.iter().sum();
        if s != raters {
            return Err(EvalError::RaggedRaters { row, expected: raters, found: s });
        }
    }
    let n = raters as f64;
    let items = counts.len() as f64;
    let p_bar = counts
        .iter()
        .map(|row| (row.iter().map(|&c| (c * c) as f64).sum::<f64>() - n) / (n * (n - 1.0)))
        .sum::<f64>()
        / items;
    let p_e: f64 = (0..k)
        .map(|j| {
            let pj = counts.iter().map(|row| row[j] as f64).sum::<f64>() / (items * n);
            pj * pj
        })
        .sum();
    Ok(AgreementReport { kind: AgreementKind::Fleiss, kappa: chance_corrected(p_bar, p_e), n_items: counts.len() })
}
