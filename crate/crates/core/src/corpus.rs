//! Corpus ingestion: paper records, the scored concept lexicon, sentence
//! splitting, 1–2 sentence candidate windows, concept matching and target
//! demarcation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::text::{self, LoweredText};

/// Opening marker wrapped around a demarcated target mention.
pub const MARKER_OPEN: &str = "<<";
/// Closing marker wrapped around a demarcated target mention.
pub const MARKER_CLOSE: &str = ">>";

/// Tokens (lowercased, including the final period) after which a period does
/// not end a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    "al.", "e.g.", "i.e.", "fig.", "figs.", "eq.", "eqs.", "cf.", "vs.", "sec.", "approx.",
    "resp.", "no.", "ref.", "refs.", "tab.", "ch.", "dr.", "mr.", "ms.", "prof.", "st.",
];

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: invalid record: {message}")]
    InvalidRecord { line: usize, message: String },
    #[error("duplicate paper_id {paper_id:?} on lines {first_line} and {second_line}")]
    DuplicatePaperId { paper_id: String, first_line: usize, second_line: usize },
    #[error("lexicon line {line}: {message}")]
    LexiconLine { line: usize, message: String },
    #[error("min_score must be finite, got {0}")]
    InvalidMinScore(f64),
    #[error("window sizes must be a nonempty subset of {{1, 2}}, got {0:?}")]
    InvalidWindowSizes(Vec<usize>),
    #[error("mention span {start}..{end} is not a valid span of a {len}-byte context")]
    MentionOutOfBounds { start: usize, end: usize, len: usize },
    #[error("context {context_id} already contains a marker token")]
    MarkerCollision { context_id: String },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    Abstract,
    Introduction,
    RelatedWork,
}

impl SectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionKind::Abstract => "abstract",
            SectionKind::Introduction => "introduction",
            SectionKind::RelatedWork => "related_work",
        }
    }
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub kind: SectionKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub sections: Vec<Section>,
}

impl PaperRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.paper_id.trim().is_empty() {
            return Err("paper_id is empty".into());
        }
        for (i, section) in self.sections.iter().enumerate() {
            if section.text.trim().is_empty() {
                return Err(format!("section {i} ({}) has empty text", section.kind));
            }
        }
        Ok(())
    }
}

/// Reads a JSON Lines corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<PaperRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io { path: path.into(), source })?;
    read_corpus(std::io::BufReader::new(file)).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io { path: path.into(), source },
        other => other,
    })
}

/// Parses corpus records from a reader, one JSON object per line. Blank lines
/// are skipped; line numbers in errors are 1-based.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<PaperRecord>> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io { path: PathBuf::new(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PaperRecord = serde_json::from_str(&line)
            .map_err(|e| CorpusError::MalformedLine { line: line_no, message: e.to_string() })?;
        record
            .validate()
            .map_err(|message| CorpusError::InvalidRecord { line: line_no, message })?;
        if let Some(&first_line) = seen.get(&record.paper_id) {
            return Err(CorpusError::DuplicatePaperId {
                paper_id: record.paper_id,
                first_line,
                second_line: line_no,
            });
        }
        seen.insert(record.paper_id.clone(), line_no);
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub concept: String,
    pub score: f64,
}

/// Scored concept strings, lowercased and deduplicated.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, f64>,
    // First word of each concept -> concepts starting with it.
    by_first_word: HashMap<String, Vec<String>>,
    // Concepts that do not start with a word character.
    unkeyed: Vec<String>,
    normalized: HashSet<String>,
}

impl Lexicon {
    /// Builds a lexicon, lowercasing concepts and keeping the max score on duplicates.
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut map: BTreeMap<String, f64> = BTreeMap::new();
        for e in entries {
            let concept = e.concept.trim().to_lowercase();
            if concept.is_empty() {
                continue;
            }
            map.entry(concept).and_modify(|s| *s = s.max(e.score)).or_insert(e.score);
        }
        let mut by_first_word: HashMap<String, Vec<String>> = HashMap::new();
        let mut unkeyed = Vec::new();
        for concept in map.keys() {
            match first_word(concept) {
                Some(w) => by_first_word.entry(w.to_string()).or_default().push(concept.clone()),
                None => unkeyed.push(concept.clone()),
            }
        }
        let normalized = map.keys().map(|c| text::normalize_phrase(c)).collect();
        Lexicon { entries: map, by_first_word, unkeyed, normalized }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score(&self, concept: &str) -> Option<f64> {
        self.entries.get(&concept.to_lowercase()).copied()
    }

    /// Case-insensitive membership; a plural surface form of a concept also counts.
    pub fn contains(&self, phrase: &str) -> bool {
        let lowered = phrase.trim().to_lowercase();
        self.entries.contains_key(&lowered) || self.normalized.contains(&text::normalize_phrase(&lowered))
    }

    pub fn entries(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.entries.iter().map(|(c, s)| LexiconEntry { concept: c.clone(), score: *s })
    }

    fn candidates_for(&self, word: &str) -> impl Iterator<Item = &String> {
        let singular = text::singularize(word);
        let primary = self.by_first_word.get(word).into_iter().flatten();
        let secondary = (singular != word)
            .then(|| self.by_first_word.get(&singular))
            .flatten()
            .into_iter()
            .flatten();
        primary.chain(secondary).chain(self.unkeyed.iter())
    }
}

fn first_word(concept: &str) -> Option<&str> {
    let end = concept.find(|c: char| !text::is_word_char(c)).unwrap_or(concept.len());
    (end > 0).then(|| &concept[..end])
}

/// Reads a `concept<TAB>score` lexicon, keeping entries with `score >= min_score`.
pub fn load_lexicon(path: impl AsRef<Path>, min_score: f64) -> Result<Lexicon> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io { path: path.into(), source })?;
    read_lexicon(std::io::BufReader::new(file), min_score)
}

pub fn read_lexicon(reader: impl BufRead, min_score: f64) -> Result<Lexicon> {
    if !min_score.is_finite() {
        return Err(CorpusError::InvalidMinScore(min_score));
    }
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io { path: PathBuf::new(), source })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (concept, score) = line
            .rsplit_once('\t')
            .ok_or_else(|| CorpusError::LexiconLine { line: line_no, message: "expected concept<TAB>score".into() })?;
        let score: f64 = score.trim().parse().map_err(|_| CorpusError::LexiconLine {
            line: line_no,
            message: format!("non-numeric score {:?}", score.trim()),
        })?;
        if !score.is_finite() || score < 0.0 {
            return Err(CorpusError::LexiconLine { line: line_no, message: format!("score {score} must be finite and >= 0") });
        }
        if concept.trim().is_empty() {
            return Err(CorpusError::LexiconLine { line: line_no, message: "empty concept".into() });
        }
        if score >= min_score {
            entries.push(LexiconEntry { concept: concept.to_string(), score });
        }
    }
    Ok(Lexicon::from_entries(entries))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
    pub index: usize,
}

/// Byte ranges strictly inside matched `()` / `[]` pairs.
pub(crate) fn bracket_ranges(text: &str) -> Vec<(usize, usize)> {
    let mut stack: Vec<(char, usize)> = Vec::new();
    let mut ranges = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => stack.push((c, i)),
            ')' | ']' => {
                let opener = if c == ')' { '(' } else { '[' };
                if let Some(pos) = stack.iter().rposition(|&(o, _)| o == opener) {
                    let (_, start) = stack[pos];
                    stack.truncate(pos);
                    ranges.push((start, i));
                }
            }
            _ => {}
        }
    }
    ranges
}

fn is_abbreviation(text: &str, period: usize) -> bool {
    let token_start = text[..period].rfind(char::is_whitespace).map_or(0, |p| p + 1);
    let token = text[token_start..=period]
        .trim_start_matches(['(', '[', '"', '\''])
        .to_lowercase();
    ABBREVIATIONS.contains(&token.as_str())
}

/// Rule-based sentence splitter.
///
/// A sentence ends at `.`, `!` or `?` (plus trailing closing quotes) followed by
/// whitespace or end of text, unless the period closes an abbreviation from
/// [`ABBREVIATIONS`] or sits inside a matched bracket pair (citations).
/// Sentence text is trimmed; offsets are byte offsets into `text`.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let protected = bracket_ranges(text);
    let inside = |i: usize| protected.iter().any(|&(s, e)| s < i && i < e);
    let mut sentences = Vec::new();
    let mut seg_start = 0;
    let push = |start: usize, end: usize, sentences: &mut Vec<Sentence>| {
        let raw = &text[start..end];
        let lead = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        if !trimmed.is_empty() {
            let s = start + lead;
            sentences.push(Sentence {
                text: trimmed.to_string(),
                char_start: s,
                char_end: s + trimmed.len(),
                index: sentences.len(),
            });
        }
    };
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') || inside(i) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, q)) = iter.peek() {
            if matches!(q, '"' | '\'' | '\u{201d}' | '\u{2019}') {
                end = j + q.len_utf8();
                iter.next();
            } else {
                break;
            }
        }
        let at_break = text[end..].chars().next().is_none_or(char::is_whitespace);
        if !at_break || (c == '.' && is_abbreviation(text, i)) {
            continue;
        }
        push(seg_start, end, &mut sentences);
        seg_start = end;
    }
    push(seg_start, text.len(), &mut sentences);
    sentences
}

/// Allowed window sizes: a nonempty subset of {1, 2}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct WindowSizes(BTreeSet<usize>);

impl WindowSizes {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = sizes.into_iter().collect();
        if set.is_empty() || set.iter().any(|&s| s != 1 && s != 2) {
            return Err(CorpusError::InvalidWindowSizes(set.into_iter().collect()));
        }
        Ok(WindowSizes(set))
    }

    pub fn both() -> Self {
        WindowSizes([1, 2].into())
    }

    pub fn contains(&self, size: usize) -> bool {
        self.0.contains(&size)
    }
}

impl Default for WindowSizes {
    fn default() -> Self {
        Self::both()
    }
}

impl TryFrom<Vec<usize>> for WindowSizes {
    type Error = CorpusError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        WindowSizes::new(v)
    }
}

impl From<WindowSizes> for Vec<usize> {
    fn from(w: WindowSizes) -> Self {
        w.0.into_iter().collect()
    }
}

/// Inclusive sentence-index ranges of every window over `sentence_count`
/// sentences, ordered by first index then size.
pub fn enumerate_windows(sentence_count: usize, sizes: &WindowSizes) -> Vec<(usize, usize)> {
    let mut windows = Vec::new();
    for first in 0..sentence_count {
        if sizes.contains(1) {
            windows.push((first, first));
        }
        if sizes.contains(2) && first + 1 < sentence_count {
            windows.push((first, first + 1));
        }
    }
    windows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptMention {
    pub concept: String,
    pub char_start: usize,
    pub char_end: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateContext {
    pub context_id: String,
    pub paper_id: String,
    pub text: String,
    pub window_size: usize,
    pub mentions: Vec<ConceptMention>,
}

/// Finds lexicon concepts in `text`.
///
/// Matching is case-insensitive and respects word boundaries. A concept also
/// matches the regular plural of its last word ("autoencoders" for
/// "autoencoder"). Overlaps are resolved in favour of the longer match, then the
/// earlier one. Offsets are byte offsets into `text`.
pub fn match_concepts(text: &str, lexicon: &Lexicon) -> Vec<ConceptMention> {
    let lowered = LoweredText::new(text);
    let low = lowered.as_str();
    let mut hits: Vec<(usize, usize, &String)> = Vec::new();
    let mut pos = 0;
    while pos < low.len() {
        let Some(c) = low[pos..].chars().next() else { break };
        if !text::is_word_char(c) || !text::is_boundary_before(low, pos) {
            pos += c.len_utf8();
            continue;
        }
        let word_end = low[pos..].find(|c: char| !text::is_word_char(c)).map_or(low.len(), |o| pos + o);
        let word = &low[pos..word_end];
        let mut seen = HashSet::new();
        for concept in lexicon.candidates_for(word) {
            if !seen.insert(concept) {
                continue;
            }
            if let Some(end) = match_at(low, pos, concept) {
                hits.push((pos, end, concept));
            }
        }
        pos = word_end;
    }
    // Longest first, then earliest; greedily keep non-overlapping.
    hits.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)).then(a.2.cmp(b.2)));
    let mut taken: Vec<(usize, usize, &String)> = Vec::new();
    for hit in hits {
        if taken.iter().all(|t| hit.1 <= t.0 || hit.0 >= t.1) {
            taken.push(hit);
        }
    }
    taken.sort_by_key(|t| t.0);
    taken
        .into_iter()
        .map(|(s, e, concept)| {
            let (cs, ce) = lowered.to_source_span(s, e);
            ConceptMention {
                concept: concept.clone(),
                char_start: cs,
                char_end: ce,
                score: lexicon.score(concept).unwrap_or(0.0),
            }
        })
        .collect()
}

fn match_at(low: &str, pos: usize, concept: &str) -> Option<usize> {
    let rest = &low[pos..];
    if rest.starts_with(concept) {
        let end = pos + concept.len();
        if text::is_boundary_after(low, end) {
            return Some(end);
        }
        for suffix in ["s", "es"] {
            if low[end..].starts_with(suffix) && text::is_boundary_after(low, end + suffix.len()) {
                return Some(end + suffix.len());
            }
        }
    }
    if let Some(stem) = concept.strip_suffix('y') {
        if rest.starts_with(stem) && low[pos + stem.len()..].starts_with("ies") {
            let end = pos + stem.len() + 3;
            if text::is_boundary_after(low, end) {
                return Some(end);
            }
        }
    }
    None
}

/// Splits each section into sentences and emits every window that mentions at
/// least one lexicon concept. Windows never cross section boundaries.
pub fn build_candidate_contexts(record: &PaperRecord, lexicon: &Lexicon, sizes: &WindowSizes) -> Vec<CandidateContext> {
    let mut kind_counts: HashMap<SectionKind, usize> = HashMap::new();
    let mut out = Vec::new();
    for section in &record.sections {
        let ordinal = kind_counts.entry(section.kind).or_insert(0);
        *ordinal += 1;
        let section_key = if *ordinal == 1 {
            section.kind.to_string()
        } else {
            format!("{}.{}", section.kind, ordinal)
        };
        let sentences = split_sentences(&section.text);
        for (first, last) in enumerate_windows(sentences.len(), sizes) {
            let start = sentences[first].char_start;
            let end = sentences[last].char_end;
            let window_text = &section.text[start..end];
            let mentions = match_concepts(window_text, lexicon);
            if mentions.is_empty() {
                continue;
            }
            out.push(CandidateContext {
                context_id: format!("{}:{}:{}-{}", record.paper_id, section_key, first, last),
                paper_id: record.paper_id.clone(),
                text: window_text.to_string(),
                window_size: last - first + 1,
                mentions,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemarcatedContext {
    pub context_id: String,
    pub target_concept: String,
    pub text_with_markers: String,
}

impl DemarcatedContext {
    /// Key unique per (context, target); used on the scorer wire and in output files.
    pub fn item_id(&self) -> String {
        format!("{}|{}", self.context_id, self.target_concept)
    }

    /// (text before, marked surface, text after).
    pub fn parts(&self) -> (&str, &str, &str) {
        let t = &self.text_with_markers;
        let open = t.find(MARKER_OPEN).expect("demarcated text carries an opening marker");
        let inner_start = open + MARKER_OPEN.len();
        let close = inner_start + t[inner_start..].find(MARKER_CLOSE).expect("demarcated text carries a closing marker");
        (&t[..open], &t[inner_start..close], &t[close + MARKER_CLOSE.len()..])
    }

    pub fn original_text(&self) -> String {
        strip_markers(&self.text_with_markers)
    }
}

/// Wraps the mention span in [`MARKER_OPEN`] / [`MARKER_CLOSE`].
pub fn demarcate(context: &CandidateContext, mention: &ConceptMention) -> Result<DemarcatedContext> {
    let text = &context.text;
    let (s, e) = (mention.char_start, mention.char_end);
    if s >= e || e > text.len() || !text.is_char_boundary(s) || !text.is_char_boundary(e) {
        return Err(CorpusError::MentionOutOfBounds { start: s, end: e, len: text.len() });
    }
    if text.contains(MARKER_OPEN) || text.contains(MARKER_CLOSE) {
        return Err(CorpusError::MarkerCollision { context_id: context.context_id.clone() });
    }
    let text_with_markers = format!("{}{MARKER_OPEN}{}{MARKER_CLOSE}{}", &text[..s], &text[s..e], &text[e..]);
    Ok(DemarcatedContext {
        context_id: context.context_id.clone(),
        target_concept: mention.concept.clone(),
        text_with_markers,
    })
}

/// Removes one pair of markers.
pub fn strip_markers(text: &str) -> String {
    let Some(open) = text.find(MARKER_OPEN) else {
        return text.to_string();
    };
    let mut out = String::with_capacity(text.len());
    out.push_str(&text[..open]);
    let rest = &text[open + MARKER_OPEN.len()..];
    match rest.find(MARKER_CLOSE) {
        Some(close) => {
            out.push_str(&rest[..close]);
            out.push_str(&rest[close + MARKER_CLOSE.len()..]);
        }
        None => out.push_str(rest),
    }
    out
}

/// One demarcated context per distinct concept, at its first mention.
pub fn demarcate_targets(context: &CandidateContext) -> Result<Vec<DemarcatedContext>> {
    let mut seen = HashSet::new();
    context
        .mentions
        .iter()
        .filter(|m| seen.insert(m.concept.as_str()))
        .map(|m| demarcate(context, m))
        .collect()
}
