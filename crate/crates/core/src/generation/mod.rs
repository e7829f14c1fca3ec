//! Description generation: relation-routed few-shot prompts for a remote
//! completion API, or an offline template backend, followed by parsing and
//! quality filtering.

pub mod filter;
pub mod parse;
pub mod prompt;
mod remote;
pub mod template;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{DemarcatedContext, Lexicon};
use crate::extraction::{ExtractionRecord, ItemFailure, RelationType};

pub use filter::{filter_description, FilterOptions, FilterVerdict, RejectReason};
pub use parse::{parse_description, parse_descriptions, ParsedDescription};
pub use prompt::{build_prompt, ExemplarBank, FewShotExample, Prompt, INSTRUCTION};
pub use remote::{trim_completion, RemoteGenerator, RemoteGeneratorConfig, GENERATOR_TOKEN_ENV};
pub use template::{generate_template, render};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("generator configuration: {0}")]
    Config(String),
    #[error("unparseable generation: {0}")]
    Unparseable(String),
    #[error("generator unreachable for {key}: {message}")]
    Transport { key: String, message: String },
    #[error("generator protocol error for {key}: {message}")]
    Protocol { key: String, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorBackend {
    #[default]
    Template,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGeneration {
    pub context_id: String,
    pub target: String,
    pub relation: RelationType,
    pub text: String,
    pub backend: GeneratorBackend,
}

/// How a context with several predicted relations is prompted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationRouting {
    /// One generation per predicted relation.
    #[default]
    AllPredicted,
    /// One generation for the highest-scoring predicted relation.
    TopScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub backend: GeneratorBackend,
    pub routing: RelationRouting,
    pub relax_reference: bool,
    pub remote: Option<RemoteGeneratorConfig>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { backend: GeneratorBackend::Template, routing: RelationRouting::AllPredicted, relax_reference: false, remote: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationJob {
    pub context: DemarcatedContext,
    pub relation: RelationType,
}

impl GenerationJob {
    /// Idempotency key: one stored generation per (context, target, relation).
    pub fn key(&self) -> String {
        format!("{}|{}", self.context.item_id(), self.relation)
    }
}

/// Backend contract: one result per job, in job order.
pub trait Generator: Sync {
    fn generate_batch(&self, jobs: &[GenerationJob]) -> Vec<Result<RawGeneration, GenerationError>>;
}

pub struct TemplateGenerator {
    lexicon: Lexicon,
}

impl TemplateGenerator {
    pub fn new(lexicon: Lexicon) -> Self {
        TemplateGenerator { lexicon }
    }
}

impl Generator for TemplateGenerator {
    fn generate_batch(&self, jobs: &[GenerationJob]) -> Vec<Result<RawGeneration, GenerationError>> {
        jobs.par_iter().map(|j| generate_template(&j.context, j.relation, &self.lexicon)).collect()
    }
}

/// A filtered, parsed description ready for selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptionRecord {
    pub description_id: String,
    pub target: String,
    pub relation: RelationType,
    pub reference: String,
    pub elaboration: String,
    pub text: String,
    pub context_id: String,
    pub paper_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub key: String,
    pub text: String,
    pub reasons: Vec<RejectReason>,
}

#[derive(Debug, Clone, Default)]
pub struct GenerationOutcome {
    pub descriptions: Vec<DescriptionRecord>,
    pub rejected: Vec<Rejection>,
    pub failures: Vec<ItemFailure>,
}

/// Relations to prompt for one stage-2 positive.
pub fn route(record: &ExtractionRecord, routing: RelationRouting) -> Vec<RelationType> {
    let Some(scores) = record.relations.as_ref().filter(|_| record.binary.label) else {
        return Vec::new();
    };
    match routing {
        RelationRouting::AllPredicted => scores.predicted.iter().copied().collect(),
        RelationRouting::TopScore => scores.top().into_iter().collect(),
    }
}

/// Generates, parses and filters descriptions for every stage-2 positive.
/// Negatives are never sent to the generator.
pub fn generate_descriptions(records: &[ExtractionRecord], generator: &dyn Generator, cfg: &GenerationConfig) -> GenerationOutcome {
    let mut jobs = Vec::new();
    let mut owners = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        for relation in route(rec, cfg.routing) {
            jobs.push(GenerationJob { context: rec.context.clone(), relation });
            owners.push(i);
        }
    }
    let results = generator.generate_batch(&jobs);
    let opts = FilterOptions { relax_reference: cfg.relax_reference };
    let mut out = GenerationOutcome::default();
    for ((job, &owner), result) in jobs.iter().zip(&owners).zip(results) {
        let rec = &records[owner];
        let key = job.key();
        let raw = match result {
            Ok(raw) => raw,
            Err(e) => {
                out.failures.push(ItemFailure { item_id: key, stage: "generation".into(), message: e.to_string() });
                continue;
            }
        };
        let parsed = match parse_descriptions(&raw.text, Some(&job.context.target_concept)) {
            Ok(p) => p,
            Err(_) => {
                out.rejected.push(Rejection { key, text: raw.text, reasons: vec![RejectReason::Unparseable] });
                continue;
            }
        };
        let context_text = job.context.original_text();
        let score = rec.relations.as_ref().map_or(0.0, |s| s.score(job.relation));
        let many = parsed.len() > 1;
        for (n, p) in parsed.into_iter().enumerate() {
            let verdict = filter_description(&p, &context_text, opts);
            if !verdict.accepted {
                out.rejected.push(Rejection { key: key.clone(), text: p.text, reasons: verdict.reasons });
                continue;
            }
            let description_id = if many { format!("{key}#{n}") } else { key.clone() };
            out.descriptions.push(DescriptionRecord {
                description_id,
                target: job.context.target_concept.clone(),
                relation: p.relation,
                reference: p.reference,
                elaboration: p.elaboration,
                text: p.text,
                context_id: job.context.context_id.clone(),
                paper_id: rec.paper_id.clone(),
                score,
            });
        }
    }
    out
}
