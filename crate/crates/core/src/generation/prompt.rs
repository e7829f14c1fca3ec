use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GenerationError;
use crate::corpus::{DemarcatedContext, MARKER_CLOSE, MARKER_OPEN};
use crate::extraction::RelationType;
use crate::text::{count_token_runs, singular_tokens};

pub const INSTRUCTION: &str = "Describe the provided concept in terms of another concept in the text.";
pub const EXEMPLARS_PER_PROMPT: usize = 5;

const BUILTIN_BANK: &str = include_str!("../../data/exemplars.jsonl");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub relation: RelationType,
    /// Demarcated context text.
    pub extraction: String,
    pub description: String,
}

impl FewShotExample {
    pub fn target(&self) -> Option<&str> {
        let open = self.extraction.find(MARKER_OPEN)? + MARKER_OPEN.len();
        let close = open + self.extraction[open..].find(MARKER_CLOSE)?;
        Some(&self.extraction[open..close])
    }

    fn validate(&self) -> Result<(), String> {
        let target = self.target().ok_or("extraction has no demarcated target")?;
        let n = count_token_runs(&singular_tokens(&self.description), &singular_tokens(target));
        if n != 1 {
            return Err(format!("description names target {target:?} {n} times, expected once"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExemplarBank {
    examples: Vec<FewShotExample>,
}

impl ExemplarBank {
    pub fn new(examples: Vec<FewShotExample>) -> Result<Self, GenerationError> {
        for (i, ex) in examples.iter().enumerate() {
            ex.validate().map_err(|e| GenerationError::Config(format!("exemplar {}: {e}", i + 1)))?;
        }
        Ok(ExemplarBank { examples })
    }

    pub fn builtin() -> Self {
        Self::read(BUILTIN_BANK.as_bytes()).expect("bundled exemplar bank is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GenerationError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| GenerationError::Config(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn read(reader: impl BufRead) -> Result<Self, GenerationError> {
        let mut examples = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| GenerationError::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let ex = serde_json::from_str(&line)
                .map_err(|e| GenerationError::Config(format!("exemplar bank line {}: {e}", n + 1)))?;
            examples.push(ex);
        }
        Self::new(examples)
    }

    pub fn for_relation(&self, relation: RelationType) -> impl Iterator<Item = &FewShotExample> {
        self.examples.iter().filter(move |e| e.relation == relation)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub instruction: String,
    pub relation: RelationType,
    pub examples: Vec<FewShotExample>,
    pub query: String,
}

impl Prompt {
    /// Plain-text completion prompt: instruction, the exemplar pairs, then the
    /// query with an open description slot.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n\n", self.instruction);
        for ex in &self.examples {
            out.push_str(&format!("Text: {}\nDescription: {}\n\n", ex.extraction, ex.description));
        }
        out.push_str(&format!("Text: {}\nDescription:", self.query));
        out
    }
}

/// The first five bank exemplars of `relation`, in bank order, then the query.
pub fn build_prompt(ctx: &DemarcatedContext, relation: RelationType, bank: &ExemplarBank) -> Result<Prompt, GenerationError> {
    let examples: Vec<FewShotExample> = bank.for_relation(relation).take(EXEMPLARS_PER_PROMPT).cloned().collect();
    if examples.len() < EXEMPLARS_PER_PROMPT {
        return Err(GenerationError::Config(format!(
            "exemplar bank has {} {relation} exemplars, need {EXEMPLARS_PER_PROMPT}",
            examples.len()
        )));
    }
    Ok(Prompt { instruction: INSTRUCTION.to_string(), relation, examples, query: ctx.text_with_markers.clone() })
}
