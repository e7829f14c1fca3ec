//! Two-stage extraction: a binary "does this context describe the target in
//! terms of another concept" decision, then multilabel relation typing.
//!
//! Two interchangeable backends implement [`Extractor`]: the offline
//! [`RuleExtractor`] built on Hearst-style surface patterns, and the
//! [`RemoteScorer`] HTTP client.

pub mod patterns;
mod remote;
mod rule;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::DemarcatedContext;

pub use remote::{RemoteScorer, RemoteScorerConfig};
pub use rule::RuleExtractor;

/// The four permitted target/reference relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationType {
    #[serde(rename = "is-a")]
    IsA,
    /// Surface form "is like".
    #[serde(rename = "compare", alias = "is-like")]
    Compare,
    #[serde(rename = "part-of")]
    PartOf,
    #[serde(rename = "used-for")]
    UsedFor,
}

impl RelationType {
    pub const ALL: [RelationType; 4] = [RelationType::IsA, RelationType::Compare, RelationType::PartOf, RelationType::UsedFor];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::IsA => "is-a",
            RelationType::Compare => "compare",
            RelationType::PartOf => "part-of",
            RelationType::UsedFor => "used-for",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown relation type {0:?}")]
pub struct UnknownRelation(pub String);

impl FromStr for RelationType {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().replace('_', "-").as_str() {
            "is-a" | "isa" => Ok(RelationType::IsA),
            "compare" | "is-like" => Ok(RelationType::Compare),
            "part-of" | "partof" => Ok(RelationType::PartOf),
            "used-for" | "usedfor" => Ok(RelationType::UsedFor),
            _ => Err(UnknownRelation(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryPrediction {
    pub context_id: String,
    pub target: String,
    pub label: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationScores {
    pub context_id: String,
    pub target: String,
    pub scores: BTreeMap<RelationType, f64>,
    pub predicted: BTreeSet<RelationType>,
}

impl RelationScores {
    /// Applies the threshold; relations missing from `scores` count as 0.
    pub fn from_scores(item: &DemarcatedContext, raw: BTreeMap<RelationType, f64>, threshold: f64) -> Self {
        let scores: BTreeMap<RelationType, f64> =
            RelationType::ALL.iter().map(|r| (*r, raw.get(r).copied().unwrap_or(0.0))).collect();
        let predicted = scores.iter().filter(|(_, &s)| s >= threshold).map(|(r, _)| *r).collect();
        RelationScores {
            context_id: item.context_id.clone(),
            target: item.target_concept.clone(),
            scores,
            predicted,
        }
    }

    pub fn score(&self, relation: RelationType) -> f64 {
        self.scores.get(&relation).copied().unwrap_or(0.0)
    }

    /// Predicted relation with the highest score; ties go to the canonical order.
    pub fn top(&self) -> Option<RelationType> {
        self.predicted
            .iter()
            .copied()
            .fold(None, |best: Option<RelationType>, r| match best {
                Some(b) if self.score(b) >= self.score(r) => Some(b),
                _ => Some(r),
            })
    }
}

pub fn binary_prediction(item: &DemarcatedContext, score: f64, threshold: f64) -> BinaryPrediction {
    BinaryPrediction {
        context_id: item.context_id.clone(),
        target: item.target_concept.clone(),
        label: score >= threshold,
        score,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorBackend {
    #[default]
    Rule,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractorConfig {
    pub backend: ExtractorBackend,
    pub binary_threshold: f64,
    pub relation_threshold: f64,
    pub remote: Option<RemoteScorerConfig>,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        ExtractorConfig { backend: ExtractorBackend::Rule, binary_threshold: 0.5, relation_threshold: 0.5, remote: None }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<(), ExtractionError> {
        for (name, t) in [("binary_threshold", self.binary_threshold), ("relation_threshold", self.relation_threshold)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(ExtractionError::Config(format!("{name} must be in (0, 1), got {t}")));
            }
        }
        if self.backend == ExtractorBackend::Remote && self.remote.is_none() {
            return Err(ExtractionError::Config("remote backend selected without scorer settings".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractionError {
    #[error("scorer unreachable for {item_id}: {message}")]
    Transport { item_id: String, message: String },
    #[error("scorer protocol error for {item_id}: {message}")]
    Protocol { item_id: String, message: String },
    #[error("extractor configuration: {0}")]
    Config(String),
}

/// Backend contract shared by the rule baseline and the remote scorer.
///
/// Batch methods return one result per input, in input order.
pub trait Extractor: Sync {
    fn classify_binary_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<BinaryPrediction, ExtractionError>>;

    fn classify_relations_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<RelationScores, ExtractionError>>;

    fn classify_binary(&self, item: &DemarcatedContext) -> Result<BinaryPrediction, ExtractionError> {
        self.classify_binary_batch(std::slice::from_ref(item)).pop().expect("one result per item")
    }

    fn classify_relations(&self, item: &DemarcatedContext) -> Result<RelationScores, ExtractionError> {
        self.classify_relations_batch(std::slice::from_ref(item)).pop().expect("one result per item")
    }
}

/// One demarcated item after both stages. `relations` is present only for
/// stage-1 positives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub item_id: String,
    pub paper_id: String,
    pub context: DemarcatedContext,
    pub binary: BinaryPrediction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<RelationScores>,
}

impl ExtractionRecord {
    pub fn is_positive(&self) -> bool {
        self.binary.label && self.relations.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub item_id: String,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExtractionOutcome {
    pub records: Vec<ExtractionRecord>,
    pub failures: Vec<ItemFailure>,
}

/// Runs stage 1 on every item and stage 2 only on stage-1 positives. A failed
/// item is reported in `failures` and skipped; the rest of the batch proceeds.
pub fn run_extraction(items: &[(String, DemarcatedContext)], extractor: &dyn Extractor) -> ExtractionOutcome {
    let contexts: Vec<DemarcatedContext> = items.iter().map(|(_, c)| c.clone()).collect();
    let mut outcome = ExtractionOutcome::default();
    let stage1 = extractor.classify_binary_batch(&contexts);
    let mut positives = Vec::new();
    let mut records: Vec<Option<ExtractionRecord>> = Vec::with_capacity(items.len());
    for ((paper_id, ctx), result) in items.iter().zip(stage1) {
        match result {
            Ok(binary) => {
                if binary.label {
                    positives.push(records.len());
                }
                records.push(Some(ExtractionRecord {
                    item_id: ctx.item_id(),
                    paper_id: paper_id.clone(),
                    context: ctx.clone(),
                    binary,
                    relations: None,
                }));
            }
            Err(e) => {
                outcome.failures.push(ItemFailure { item_id: ctx.item_id(), stage: "binary".into(), message: e.to_string() });
                records.push(None);
            }
        }
    }
    let stage2_inputs: Vec<DemarcatedContext> = positives.iter().map(|&i| contexts[i].clone()).collect();
    let stage2 = extractor.classify_relations_batch(&stage2_inputs);
    for (&idx, result) in positives.iter().zip(stage2) {
        match result {
            Ok(scores) => {
                if let Some(rec) = records[idx].as_mut() {
                    rec.relations = Some(scores);
                }
            }
            Err(e) => {
                outcome.failures.push(ItemFailure { item_id: contexts[idx].item_id(), stage: "relations".into(), message: e.to_string() });
                records[idx] = None;
            }
        }
    }
    outcome.records = records.into_iter().flatten().collect();
    outcome
}
