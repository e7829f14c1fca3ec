//! Independent reference implementations used by the property and
//! acceptance tests. Deliberately naive.
#![allow(dead_code)]

use std::collections::BTreeMap;

use accord_core::extraction::RelationType;
use accord_core::selection::{normalize_reference, DescriptionRecord};

/// Count-sort of normalized references: count desc, max score desc, name asc.
pub fn rank_references(descs: &[DescriptionRecord], target: &str, relation: RelationType, k: usize) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for d in descs {
        if d.target == target && d.relation == relation {
            let n = normalize_reference(&d.reference);
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    let stat = |name: &str| {
        let matching: Vec<&DescriptionRecord> = descs
            .iter()
            .filter(|d| d.target == target && d.relation == relation && normalize_reference(&d.reference) == name)
            .collect();
        let max = matching.iter().map(|d| d.score).fold(f64::NEG_INFINITY, f64::max);
        (matching.len(), max)
    };
    // Selection sort on the explicit comparison.
    let mut out = Vec::new();
    while out.len() < k && !names.is_empty() {
        let mut best = 0;
        for i in 1..names.len() {
            let (ci, si) = stat(&names[i]);
            let (cb, sb) = stat(&names[best]);
            if ci > cb || (ci == cb && (si > sb || (si == sb && names[i] < names[best]))) {
                best = i;
            }
        }
        out.push(names.remove(best));
    }
    out
}

/// Every maximal common run, picked longest first, then earliest description
/// index, then earliest context index, among tokens not yet used.
pub fn shared_runs(desc: &[String], ctx: &[String], min_tokens: usize) -> Vec<(usize, usize, usize)> {
    let mut used_d = vec![false; desc.len()];
    let mut used_c = vec![false; ctx.len()];
    let mut runs = Vec::new();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..desc.len() {
            for j in 0..ctx.len() {
                let mut len = 0;
                while i + len < desc.len()
                    && j + len < ctx.len()
                    && !used_d[i + len]
                    && !used_c[j + len]
                    && desc[i + len] == ctx[j + len]
                {
                    len += 1;
                }
                if len > 0 && best.is_none_or(|(_, _, bl)| len > bl) {
                    best = Some((i, j, len));
                }
            }
        }
        match best {
            Some((i, j, len)) if len >= min_tokens.max(1) => {
                for t in 0..len {
                    used_d[i + t] = true;
                    used_c[j + t] = true;
                }
                runs.push((i, j, len));
            }
            _ => return runs,
        }
    }
}

pub fn cohen_kappa(a: &[u8], b: &[u8]) -> f64 {
    let n = a.len() as f64;
    let p_o = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut ca: BTreeMap<u8, f64> = BTreeMap::new();
    let mut cb: BTreeMap<u8, f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1.0;
        *cb.entry(y).or_default() += 1.0;
    }
    let p_e: f64 = ca.iter().map(|(k, v)| v / n * cb.get(k).copied().unwrap_or(0.0) / n).sum();
    if p_e == 1.0 {
        return if p_o == 1.0 { 1.0 } else { 0.0 };
    }
    (p_o - p_e) / (1.0 - p_e)
}

/// Slope of y on x from the normal equations (XᵀX)β = Xᵀy, solved by Cramer's rule.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let slope = (n * sxy - sx * sy) / det;
    (slope, intercept)
}

/// F1 of the classifier that predicts positive everywhere, computed from counts.
pub fn all_positive_f1(gold: &[bool]) -> f64 {
    let tp = gold.iter().filter(|g| **g).count() as f64;
    let fp = gold.len() as f64 - tp;
    if tp == 0.0 {
        return 0.0;
    }
    let precision = tp / (tp + fp);
    let recall = 1.0;
    2.0 * precision * recall / (precision + recall)
}
