//! Reduces candidate descriptions to a small stratified set per target.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Lexicon;
use crate::extraction::RelationType;
pub use crate::generation::DescriptionRecord;
use crate::text::normalize_phrase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub k: usize,
    pub relations: Vec<RelationType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_size_cap: Option<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { k: 3, relations: vec![RelationType::Compare, RelationType::IsA], set_size_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid selection config: {0}")]
pub struct SelectionConfigError(String);

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectionConfigError> {
        if self.k == 0 {
            return Err(SelectionConfigError("k must be at least 1".into()));
        }
        if self.relations.is_empty() {
            return Err(SelectionConfigError("relations must be nonempty".into()));
        }
        if self.relations.iter().collect::<BTreeSet<_>>().len() != self.relations.len() {
            return Err(SelectionConfigError("relations must not repeat".into()));
        }
        if self.set_size_cap == Some(0) {
            return Err(SelectionConfigError("set_size_cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptionSet {
    pub target: String,
    pub entries: Vec<DescriptionRecord>,
    pub produced_with: SelectionConfig,
}

/// Lowercase with a singular head: "Autoencoders" and "autoencoder" count as one.
pub fn normalize_reference(reference: &str) -> String {
    normalize_phrase(reference)
}

pub fn filter_by_lexicon(descs: &[DescriptionRecord], lexicon: &Lexicon) -> Vec<DescriptionRecord> {
    descs.iter().filter(|d| lexicon.contains(&d.reference)).cloned().collect()
}

/// Top-`k` normalized references for (target, relation): by descending record
/// count, then higher maximum score, then lexicographic.
pub fn rank_references(descs: &[DescriptionRecord], target: &str, relation: RelationType, k: usize) -> Vec<String> {
    let mut stats: HashMap<String, (usize, f64)> = HashMap::new();
    for d in descs.iter().filter(|d| d.target == target && d.relation == relation) {
        let e = stats.entry(normalize_reference(&d.reference)).or_insert((0, f64::NEG_INFINITY));
        e.0 += 1;
        e.1 = e.1.max(d.score);
    }
    let mut ranked: Vec<(String, usize, f64)> = stats.into_iter().map(|(r, (c, s))| (r, c, s)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| b.2.total_cmp(&a.2)).then_with(|| a.0.cmp(&b.0)));
    ranked.into_iter().take(k).map(|(r, _, _)| r).collect()
}

/// Preference order among records of one triple: higher score, shorter text, smaller id.
fn better(a: &DescriptionRecord, b: &DescriptionRecord) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.text.chars().count().cmp(&b.text.chars().count()))
        .then_with(|| a.description_id.cmp(&b.description_id))
}

pub type Triple = (String, String, RelationType);

/// One record per (target, normalized reference, relation).
pub fn best_per_triple(descs: &[DescriptionRecord]) -> BTreeMap<Triple, DescriptionRecord> {
    let mut best: BTreeMap<Triple, DescriptionRecord> = BTreeMap::new();
    for d in descs {
        let key = (d.target.clone(), normalize_reference(&d.reference), d.relation);
        match best.get(&key) {
            Some(cur) if better(cur, d) != Ordering::Greater => {}
            _ => {
                best.insert(key, d.clone());
            }
        }
    }
    best
}

pub fn build_set(descs: &[DescriptionRecord], target: &str, cfg: &SelectionConfig) -> DescriptionSet {
    let own: Vec<DescriptionRecord> = descs.iter().filter(|d| d.target == target).cloned().collect();
    let best = best_per_triple(&own);
    let mut entries = Vec::new();
    for &relation in &cfg.relations {
        for reference in rank_references(&own, target, relation, cfg.k) {
            if let Some(rec) = best.get(&(target.to_string(), reference, relation)) {
                entries.push(rec.clone());
            }
        }
    }
    if let Some(cap) = cfg.set_size_cap {
        entries.truncate(cap);
    }
    DescriptionSet { target: target.to_string(), entries, produced_with: cfg.clone() }
}

/// One set per distinct target, in target order. Targets without entries are skipped.
pub fn build_sets(descs: &[DescriptionRecord], cfg: &SelectionConfig) -> Vec<DescriptionSet> {
    let targets: BTreeSet<&str> = descs.iter().map(|d| d.target.as_str()).collect();
    targets.into_iter().map(|t| build_set(descs, t, cfg)).filter(|s| !s.entries.is_empty()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityCell {
    pub candidate_count: usize,
    pub unique_reference_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityEntry {
    pub target: String,
    pub relation: RelationType,
    #[serde(flatten)]
    pub cell: DiversityCell,
}

/// Candidate and unique-reference counts for every target × relation.
pub fn diversity_report(descs: &[DescriptionRecord], targets: &[String]) -> Vec<DiversityEntry> {
    let mut out = Vec::new();
    for target in targets {
        for relation in RelationType::ALL {
            let refs: Vec<String> = descs
                .iter()
                .filter(|d| &d.target == target && d.relation == relation)
                .map(|d| normalize_reference(&d.reference))
                .collect();
            let unique = refs.iter().collect::<BTreeSet<_>>().len();
            out.push(DiversityEntry {
                target: target.clone(),
                relation,
                cell: DiversityCell { candidate_count: refs.len(), unique_reference_count: unique },
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LexiconEntry;

    fn rec(id: &str, reference: &str, relation: RelationType, score: f64, text: &str) -> DescriptionRecord {
        DescriptionRecord {
            description_id: id.into(),
            target: "t".into(),
            relation,
            reference: reference.into(),
            elaboration: "e".into(),
            text: text.into(),
            context_id: "c".into(),
            paper_id: "p".into(),
            score,
        }
    }

    use RelationType::{Compare, IsA, PartOf};

    #[test]
    fn lexicon_filter() {
        let lex = Lexicon::from_entries([LexiconEntry { concept: "generative model".into(), score: 2.0 }]);
        let ds = vec![rec("1", "Generative Model", IsA, 1.0, "x"), rec("2", "thing", IsA, 1.0, "x")];
        let kept = filter_by_lexicon(&ds, &lex);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].description_id, "1");
        assert!(filter_by_lexicon(&ds, &Lexicon::default()).is_empty());
    }

    #[test]
    fn ranking_examples() {
        let mut ds = Vec::new();
        for (r, n) in [("a", 3), ("b", 2), ("c", 1)] {
            for i in 0..n {
                ds.push(rec(&format!("{r}{i}"), r, IsA, 0.5, "x"));
            }
        }
        assert_eq!(rank_references(&ds, "t", IsA, 2), ["a", "b"]);
        assert_eq!(rank_references(&ds[..1], "t", IsA, 3), ["a"]);
        let tie = vec![rec("1", "a", IsA, 0.9, "x"), rec("2", "a", IsA, 0.1, "x"), rec("3", "b", IsA, 0.7, "x"), rec("4", "b", IsA, 0.7, "x")];
        assert_eq!(rank_references(&tie, "t", IsA, 1), ["a"]);
        let plural = vec![rec("1", "autoencoders", IsA, 0.5, "x"), rec("2", "autoencoder", IsA, 0.5, "x"), rec("3", "gan", IsA, 0.5, "x")];
        assert_eq!(rank_references(&plural, "t", IsA, 1), ["autoencoder"]);
    }

    #[test]
    fn best_record() {
        let ds = vec![rec("1", "a", IsA, 0.8, "x"), rec("2", "a", IsA, 0.6, "x")];
        assert_eq!(best_per_triple(&ds).values().next().unwrap().description_id, "1");
        let tie = vec![rec("1", "a", IsA, 0.8, &"x".repeat(90)), rec("2", "a", IsA, 0.8, &"x".repeat(60))];
        assert_eq!(best_per_triple(&tie).values().next().unwrap().description_id, "2");
        assert_eq!(best_per_triple(&ds[..1]).len(), 1);
    }

    #[test]
    fn set_shapes() {
        let mut ds = Vec::new();
        for rel in [Compare, IsA] {
            for r in ["a", "b", "c", "d"] {
                ds.push(rec(&format!("{rel}{r}"), r, rel, 0.5, "x"));
            }
        }
        let set = build_set(&ds, "t", &SelectionConfig::default());
        assert_eq!(set.entries.len(), 6);
        assert!(set.entries[..3].iter().all(|e| e.relation == Compare));
        assert!(set.entries[3..].iter().all(|e| e.relation == IsA));
        let capped = build_set(&ds, "t", &SelectionConfig { set_size_cap: Some(4), ..Default::default() });
        assert_eq!(capped.entries, set.entries[..4]);
        let only_isa: Vec<_> = ds.iter().filter(|d| d.relation == IsA).cloned().collect();
        let s = build_set(&only_isa, "t", &SelectionConfig::default());
        assert_eq!(s.entries.len(), 3);
        assert!(build_set(&ds, "other", &SelectionConfig::default()).entries.is_empty());
    }

    #[test]
    fn diversity_examples() {
        let ds: Vec<_> = ["a", "a", "b", "c", "c"].iter().enumerate().map(|(i, r)| rec(&i.to_string(), r, IsA, 0.5, "x")).collect();
        let rep = diversity_report(&ds, &["t".to_string()]);
        assert_eq!(rep.len(), 4);
        let isa = rep.iter().find(|e| e.relation == IsA).unwrap();
        assert_eq!(isa.cell, DiversityCell { candidate_count: 5, unique_reference_count: 3 });
        let part = rep.iter().find(|e| e.relation == PartOf).unwrap();
        assert_eq!(part.cell, DiversityCell { candidate_count: 0, unique_reference_count: 0 });
        let one = diversity_report(&ds[..1], &["t".to_string()]);
        assert_eq!(one.iter().find(|e| e.relation == IsA).unwrap().cell, DiversityCell { candidate_count: 1, unique_reference_count: 1 });
    }

    #[test]
    fn config_validation() {
        assert!(SelectionConfig::default().validate().is_ok());
        assert!(SelectionConfig { k: 0, ..Default::default() }.validate().is_err());
        assert!(SelectionConfig { relations: vec![IsA, IsA], ..Default::default() }.validate().is_err());
        assert!(SelectionConfig { relations: vec![], ..Default::default() }.validate().is_err());
    }
}
