use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::patterns::find_matches;
use super::{binary_prediction, BinaryPrediction, ExtractionError, Extractor, ExtractorConfig, RelationScores, RelationType};
use crate::corpus::{DemarcatedContext, Lexicon};

/// Offline baseline: a context is positive when any surface pattern fires, and
/// each relation scores 1.0 when one of its patterns fires.
#[derive(Debug, Clone)]
pub struct RuleExtractor {
    lexicon: Lexicon,
    binary_threshold: f64,
    relation_threshold: f64,
}

impl RuleExtractor {
    pub fn new(lexicon: Lexicon, cfg: &ExtractorConfig) -> Self {
        RuleExtractor { lexicon, binary_threshold: cfg.binary_threshold, relation_threshold: cfg.relation_threshold }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn matched_relations(&self, item: &DemarcatedContext) -> BTreeSet<RelationType> {
        find_matches(item, &self.lexicon).into_iter().map(|m| m.relation).collect()
    }
}

impl Extractor for RuleExtractor {
    fn classify_binary_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<BinaryPrediction, ExtractionError>> {
        items
            .par_iter()
            .map(|item| {
                let score = if self.matched_relations(item).is_empty() { 0.0 } else { 1.0 };
                Ok(binary_prediction(item, score, self.binary_threshold))
            })
            .collect()
    }

    fn classify_relations_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<RelationScores, ExtractionError>> {
        items
            .par_iter()
            .map(|item| {
                let matched = self.matched_relations(item);
                let raw: BTreeMap<RelationType, f64> =
                    RelationType::ALL.iter().map(|&r| (r, if matched.contains(&r) { 1.0 } else { 0.0 })).collect();
                Ok(RelationScores::from_scores(item, raw, self.relation_threshold))
            })
            .collect()
    }
}
