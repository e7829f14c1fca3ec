//! Deterministic offline generator: renders the pattern matches found by the
//! rule extractor into the canonical surface form of each relation.

use super::{GenerationError, GeneratorBackend, RawGeneration};
use crate::corpus::{DemarcatedContext, Lexicon};
use crate::extraction::patterns::{find_matches, PatternMatch};
use crate::extraction::RelationType;
use crate::text::{indefinite_article, normalize_phrase};

/// Canonical surface form. `cue` only matters for used-for ("is used for" or
/// "is applied to").
pub fn render(target: &str, relation: RelationType, reference: &str, elaboration: &str) -> String {
    render_with_cue(target, relation, reference, elaboration, "is used for")
}

fn render_with_cue(target: &str, relation: RelationType, reference: &str, elaboration: &str, cue: &str) -> String {
    let elab = elaboration.trim();
    let body = match relation {
        RelationType::IsA => {
            let article = indefinite_article(reference);
            format!("{target} is {article} {reference} {elab}")
        }
        RelationType::Compare => format!("{target} is like {reference} in that {elab}"),
        RelationType::PartOf => format!("{target} is part of {reference} {elab}"),
        RelationType::UsedFor if elab.is_empty() => format!("{target} {cue} {reference}"),
        RelationType::UsedFor => format!("{target} {cue} {reference} {elab}"),
    };
    let body = body.trim_end();
    if body.ends_with('.') {
        body.to_string()
    } else {
        format!("{body}.")
    }
}

fn usable(m: &PatternMatch, relation: RelationType) -> bool {
    m.relation == relation && (relation == RelationType::UsedFor || m.elaboration.is_some())
}

/// Renders the first usable pattern match for `relation`.
pub fn generate_template(
    ctx: &DemarcatedContext,
    relation: RelationType,
    lexicon: &Lexicon,
) -> Result<RawGeneration, GenerationError> {
    let m = find_matches(ctx, lexicon).into_iter().find(|m| usable(m, relation)).ok_or_else(|| {
        GenerationError::Unparseable(format!("no {relation} pattern with an elaboration for {}", ctx.item_id()))
    })?;
    let target = ctx.target_concept.to_lowercase();
    let reference = normalize_phrase(&m.reference);
    let text = render_with_cue(&target, relation, &reference, m.elaboration.as_deref().unwrap_or(""), m.cue);
    Ok(RawGeneration {
        context_id: ctx.context_id.clone(),
        target: ctx.target_concept.clone(),
        relation,
        text,
        backend: GeneratorBackend::Template,
    })
}
