use std::path::{Path, PathBuf};

use accord_core::eval::{
    cohen_kappa, corpus_stats, f1_binary, fleiss_kappa, ols_slope, preference_agreement, preference_summary,
    validate_annotation, AnnotationRecord, PreferenceBallot, ValidationOptions, VoteEncoding,
};
use accord_core::corpus::Lexicon;
use accord_core::generation::DescriptionRecord;
use accord_core::selection::diversity_report;
use anyhow::Context;
use clap::{Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::stages::read;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Encoding {
    Three,
    Collapsed,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Cohen's kappa between two JSON arrays of labels.
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Fleiss' kappa over a JSON item × category count matrix.
    Fleiss {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Precision, recall, F1 and the all-positive baseline from two JSON bool arrays.
    F1 {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Set-preference counts, medians and preferred-description means (JSON Lines ballots).
    Preferences {
        #[arg(long)]
        ballots: PathBuf,
    },
    /// Per-concept Fleiss' kappa over description votes.
    Agreement {
        #[arg(long)]
        ballots: PathBuf,
        #[arg(long, value_enum, default_value = "three")]
        encoding: Encoding,
    },
    /// OLS slope from a JSON object {"x": [...], "y": [...]}.
    Ols {
        #[arg(long)]
        data: PathBuf,
    },
    /// Candidate and unique-reference counts per target and relation.
    Diversity {
        #[arg(long)]
        descriptions: PathBuf,
        /// Comma-separated targets; defaults to every target present.
        #[arg(long)]
        targets: Option<String>,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
}

/// Labels compare by their JSON text, so strings, numbers and booleans all work.
fn labels(path: &Path) -> anyhow::Result<Vec<String>> {
    Ok(read_json::<Vec<Value>>(path)?.iter().map(Value::to_string).collect())
}

#[derive(Deserialize)]
struct XY {
    x: Vec<f64>,
    y: Vec<f64>,
}

pub fn run(cmd: &EvalCommand, seed: u64) -> anyhow::Result<Value> {
    Ok(match cmd {
        EvalCommand::Kappa { a, b } => serde_json::to_value(cohen_kappa(&labels(a)?, &labels(b)?)?)?,
        EvalCommand::Fleiss { matrix } => serde_json::to_value(fleiss_kappa(&read_json::<Vec<Vec<usize>>>(matrix)?)?)?,
        EvalCommand::F1 { pred, gold } => {
            serde_json::to_value(f1_binary(&read_json::<Vec<bool>>(pred)?, &read_json::<Vec<bool>>(gold)?)?)?
        }
        EvalCommand::Preferences { ballots } => {
            serde_json::to_value(preference_summary(&read::<PreferenceBallot>(ballots)?, seed)?)?
        }
        EvalCommand::Agreement { ballots, encoding } => {
            let encoding = match encoding {
                Encoding::Three => VoteEncoding::Three,
                Encoding::Collapsed => VoteEncoding::Collapsed,
            };
            let per_concept = preference_agreement(&read::<PreferenceBallot>(ballots)?, encoding);
            let mean = if per_concept.is_empty() {
                None
            } else {
                Some(per_concept.iter().map(|c| c.kappa).sum::<f64>() / per_concept.len() as f64)
            };
            json!({ "concepts": per_concept, "mean_kappa": mean })
        }
        EvalCommand::Ols { data } => {
            let xy: XY = read_json(data)?;
            serde_json::to_value(ols_slope(&xy.x, &xy.y)?)?
        }
        EvalCommand::Diversity { descriptions, targets } => {
            let descs: Vec<DescriptionRecord> = read(descriptions)?;
            let targets: Vec<String> = match targets {
                Some(t) => t.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                None => {
                    let mut t: Vec<String> = descs.iter().map(|d| d.target.clone()).collect();
                    t.sort();
                    t.dedup();
                    t
                }
            };
            serde_json::to_value(diversity_report(&descs, &targets))?
        }
    })
}

#[derive(Serialize)]
struct RecordViolations<'a> {
    context_id: &'a str,
    annotator_id: &'a str,
    violations: Vec<accord_core::eval::Violation>,
}

/// Corpus statistics plus per-record validation findings.
pub fn stats(annotations: &Path, lexicon: &Lexicon, relax_reference: bool) -> anyhow::Result<Value> {
    let records: Vec<AnnotationRecord> = read(annotations)?;
    let opts = ValidationOptions { relax_reference };
    let findings: Vec<RecordViolations> = records
        .iter()
        .map(|r| RecordViolations {
            context_id: &r.context_id,
            annotator_id: &r.annotator_id,
            violations: validate_annotation(r, lexicon, opts),
        })
        .filter(|f| !f.violations.is_empty())
        .collect();
    Ok(json!({ "stats": corpus_stats(&records), "invalid_records": findings.len(), "violations": findings }))
}
