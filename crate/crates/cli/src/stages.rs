//! Pipeline stages over JSON Lines files. The chained `pipeline` command and
//! the per-stage commands go through these same functions.

use std::path::{Path, PathBuf};

use accord_core::corpus::{load_corpus, load_lexicon, Lexicon, WindowSizes};
use accord_core::extraction::{
    ExtractionOutcome, ExtractionRecord, Extractor, ExtractorBackend, ExtractorConfig, ItemFailure, RemoteScorer,
    RuleExtractor,
};
use accord_core::generation::{
    DescriptionRecord, ExemplarBank, GenerationConfig, GenerationOutcome, Generator, GeneratorBackend, RemoteGenerator,
    TemplateGenerator,
};
use accord_core::io::{read_jsonl, write_jsonl};
use accord_core::pipeline::{self, DemarcatedItem, Ingested, Provenance};
use accord_core::selection::{DescriptionSet, SelectionConfig};
use anyhow::{anyhow, Context};

pub fn lexicon(path: &Path, min_score: f64) -> anyhow::Result<Lexicon> {
    load_lexicon(path, min_score).with_context(|| format!("loading lexicon {}", path.display()))
}

pub fn ingest(corpus: &Path, lexicon: &Lexicon, sizes: &WindowSizes) -> anyhow::Result<Ingested> {
    let papers = load_corpus(corpus).with_context(|| format!("loading corpus {}", corpus.display()))?;
    let ingested = pipeline::ingest(&papers, lexicon, sizes)?;
    log::info!("{} papers -> {} contexts, {} demarcated items", papers.len(), ingested.provenance.len(), ingested.items.len());
    Ok(ingested)
}

pub fn extractor(cfg: &ExtractorConfig, lexicon: Option<&Lexicon>) -> anyhow::Result<Box<dyn Extractor>> {
    cfg.validate()?;
    Ok(match cfg.backend {
        ExtractorBackend::Rule => {
            let lexicon = lexicon.ok_or_else(|| anyhow!("the rule extractor needs --lexicon"))?;
            Box::new(RuleExtractor::new(lexicon.clone(), cfg))
        }
        ExtractorBackend::Remote => Box::new(RemoteScorer::new(cfg)?),
    })
}

pub fn generator(
    cfg: &GenerationConfig,
    lexicon: Option<&Lexicon>,
    exemplars: Option<&Path>,
) -> anyhow::Result<Box<dyn Generator>> {
    Ok(match cfg.backend {
        GeneratorBackend::Template => {
            let lexicon = lexicon.ok_or_else(|| anyhow!("the template generator needs --lexicon"))?;
            Box::new(TemplateGenerator::new(lexicon.clone()))
        }
        GeneratorBackend::Remote => {
            let remote = cfg.remote.clone().ok_or_else(|| anyhow!("the remote generator needs --generator-endpoint"))?;
            let bank = match exemplars {
                Some(p) => ExemplarBank::load(p).with_context(|| format!("loading exemplars {}", p.display()))?,
                None => ExemplarBank::builtin(),
            };
            Box::new(RemoteGenerator::new(remote, bank)?)
        }
    })
}

fn report_failures(stage: &str, failures: &[ItemFailure], out: Option<&Path>) -> anyhow::Result<()> {
    if !failures.is_empty() {
        log::warn!("{stage}: {} items failed", failures.len());
        for f in failures.iter().take(5) {
            log::warn!("  {}: {}", f.item_id, f.message);
        }
    }
    if let Some(path) = out {
        write_jsonl(path, failures)?;
    }
    Ok(())
}

pub fn extract(items: &[DemarcatedItem], extractor: &dyn Extractor, failures_out: Option<&Path>) -> anyhow::Result<ExtractionOutcome> {
    let outcome = pipeline::extract(items, extractor);
    let positives = outcome.records.iter().filter(|r| r.is_positive()).count();
    log::info!("extraction: {} records, {positives} positive", outcome.records.len());
    report_failures("extraction", &outcome.failures, failures_out)?;
    Ok(outcome)
}

pub fn generate(
    records: Vec<ExtractionRecord>,
    generator: &dyn Generator,
    cfg: &GenerationConfig,
    rejected_out: Option<&Path>,
    failures_out: Option<&Path>,
) -> anyhow::Result<GenerationOutcome> {
    let outcome = pipeline::generate(&ExtractionOutcome { records, failures: Vec::new() }, generator, cfg);
    log::info!("generation: {} accepted, {} rejected", outcome.descriptions.len(), outcome.rejected.len());
    if let Some(path) = rejected_out {
        write_jsonl(path, &outcome.rejected)?;
    }
    report_failures("generation", &outcome.failures, failures_out)?;
    Ok(outcome)
}

/// Sets plus the provenance rows they reference.
pub fn select(
    descs: &[DescriptionRecord],
    lexicon: &Lexicon,
    cfg: &SelectionConfig,
    provenance: Option<&[Provenance]>,
) -> anyhow::Result<(Vec<DescriptionSet>, Option<Vec<Provenance>>)> {
    cfg.validate()?;
    let sets = pipeline::select(descs, lexicon, cfg);
    log::info!("selection: {} sets", sets.len());
    let prov = match provenance {
        None => None,
        Some(p) => Some(
            pipeline::set_provenance(&sets, p)
                .map_err(|missing| anyhow!("no provenance for contexts: {}", missing.join(", ")))?,
        ),
    };
    Ok((sets, prov))
}

pub fn write_sets(out: &Path, sets: &[DescriptionSet], provenance: Option<&[Provenance]>) -> anyhow::Result<()> {
    write_jsonl(out, sets)?;
    if let Some(p) = provenance {
        write_jsonl(crate::config::provenance_path(out), p)?;
    }
    Ok(())
}

pub fn read<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    Ok(read_jsonl(path)?)
}

/// Intermediate file names inside a work directory.
pub struct WorkFiles {
    pub items: PathBuf,
    pub provenance: PathBuf,
    pub extractions: PathBuf,
    pub descriptions: PathBuf,
    pub rejected: PathBuf,
    pub extract_failures: PathBuf,
    pub generate_failures: PathBuf,
}

impl WorkFiles {
    pub fn new(dir: &Path) -> Self {
        WorkFiles {
            items: dir.join("items.jsonl"),
            provenance: dir.join("provenance.jsonl"),
            extractions: dir.join("extractions.jsonl"),
            descriptions: dir.join("descriptions.jsonl"),
            rejected: dir.join("rejected.jsonl"),
            extract_failures: dir.join("extraction_failures.jsonl"),
            generate_failures: dir.join("generation_failures.jsonl"),
        }
    }
}
