//! Stage functions shared by the individual CLI subcommands and the chained
//! pipeline, so both produce identical outputs.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{build_candidate_contexts, demarcate_targets, CorpusError, DemarcatedContext, Lexicon, PaperRecord, WindowSizes};
use crate::extraction::{run_extraction, ExtractionOutcome, Extractor};
use crate::generation::{generate_descriptions, DescriptionRecord, GenerationConfig, GenerationOutcome, Generator};
use crate::selection::{build_sets, filter_by_lexicon, DescriptionSet, SelectionConfig};

/// A demarcated context together with the paper it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemarcatedItem {
    pub paper_id: String,
    #[serde(flatten)]
    pub context: DemarcatedContext,
}

/// Source text and paper metadata for one context window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub context_id: String,
    pub paper_id: String,
    pub text: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub items: Vec<DemarcatedItem>,
    pub provenance: Vec<Provenance>,
}

/// Candidate windows, then one demarcated item per distinct concept per window.
pub fn ingest(corpus: &[PaperRecord], lexicon: &Lexicon, sizes: &WindowSizes) -> Result<Ingested, CorpusError> {
    let per_paper: Vec<Result<Ingested, CorpusError>> = corpus
        .par_iter()
        .map(|paper| {
            let mut out = Ingested::default();
            for ctx in build_candidate_contexts(paper, lexicon, sizes) {
                for d in demarcate_targets(&ctx)? {
                    out.items.push(DemarcatedItem { paper_id: paper.paper_id.clone(), context: d });
                }
                out.provenance.push(Provenance {
                    context_id: ctx.context_id,
                    paper_id: paper.paper_id.clone(),
                    text: ctx.text,
                    title: paper.title.clone(),
                    url: paper.url.clone(),
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Ingested::default();
    for r in per_paper {
        let r = r?;
        all.items.extend(r.items);
        all.provenance.extend(r.provenance);
    }
    Ok(all)
}

pub fn extract(items: &[DemarcatedItem], extractor: &dyn Extractor) -> ExtractionOutcome {
    let pairs: Vec<(String, DemarcatedContext)> = items.iter().map(|i| (i.paper_id.clone(), i.context.clone())).collect();
    run_extraction(&pairs, extractor)
}

pub fn generate(outcome: &ExtractionOutcome, generator: &dyn Generator, cfg: &GenerationConfig) -> GenerationOutcome {
    generate_descriptions(&outcome.records, generator, cfg)
}

/// Lexicon filter on references, then one stratified set per target.
pub fn select(descs: &[DescriptionRecord], lexicon: &Lexicon, cfg: &SelectionConfig) -> Vec<DescriptionSet> {
    build_sets(&filter_by_lexicon(descs, lexicon), cfg)
}

/// Provenance rows referenced by the sets, in first-use order. Returns the
/// context ids that have no provenance as the error.
pub fn set_provenance(sets: &[DescriptionSet], provenance: &[Provenance]) -> Result<Vec<Provenance>, Vec<String>> {
    let by_id: BTreeMap<&str, &Provenance> = provenance.iter().map(|p| (p.context_id.as_str(), p)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for e in sets.iter().flat_map(|s| &s.entries) {
        if !seen.insert(e.context_id.as_str()) {
            continue;
        }
        match by_id.get(e.context_id.as_str()) {
            Some(p) => out.push((*p).clone()),
            None => missing.push(e.context_id.clone()),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(missing)
    }
}
