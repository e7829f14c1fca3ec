//! Shared text utilities: case folding with offset maps, word tokens,
//! singularization and the closed word lists used by the shallow chunker.

/// Lowercased copy of a string that remembers where every lowered byte came from.
///
/// `char::to_lowercase` may change the UTF-8 length of a character, so spans
/// found in the lowered text have to be mapped back before slicing the original.
#[derive(Debug, Clone)]
pub struct LoweredText {
    lowered: String,
    // For every byte of `lowered`: the [start, end) byte range of the source char.
    origin: Vec<(usize, usize)>,
    source_len: usize,
}

impl LoweredText {
    pub fn new(source: &str) -> Self {
        let mut lowered = String::with_capacity(source.len());
        let mut origin = Vec::with_capacity(source.len());
        for (start, ch) in source.char_indices() {
            let end = start + ch.len_utf8();
            for lc in ch.to_lowercase() {
                let before = lowered.len();
                lowered.push(lc);
                origin.extend(std::iter::repeat_n((start, end), lowered.len() - before));
            }
        }
        LoweredText { lowered, origin, source_len: source.len() }
    }

    pub fn as_str(&self) -> &str {
        &self.lowered
    }

    /// Maps a byte span of the lowered text back onto the source string.
    pub fn to_source_span(&self, start: usize, end: usize) -> (usize, usize) {
        if start >= end {
            let at = self.origin.get(start).map_or(self.source_len, |o| o.0);
            return (at, at);
        }
        (self.origin[start].0, self.origin[end - 1].1)
    }
}

pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// True when `pos` is not inside a word, i.e. the chars on either side are not
/// both word characters.
pub fn is_boundary_before(text: &str, pos: usize) -> bool {
    text[..pos].chars().next_back().is_none_or(|c| !is_word_char(c))
}

pub fn is_boundary_after(text: &str, pos: usize) -> bool {
    text[pos..].chars().next().is_none_or(|c| !is_word_char(c))
}

/// Byte spans of whitespace-separated tokens with leading and trailing
/// punctuation stripped. Tokens that are pure punctuation are dropped.
pub fn word_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut offset = 0;
    for piece in text.split_whitespace() {
        let start = offset + text[offset..].find(piece).expect("piece comes from text");
        offset = start + piece.len();
        let trimmed_front = piece.trim_start_matches(|c: char| !c.is_alphanumeric());
        let lead = piece.len() - trimmed_front.len();
        let trimmed = trimmed_front.trim_end_matches(|c: char| !c.is_alphanumeric());
        if !trimmed.is_empty() {
            spans.push((start + lead, start + lead + trimmed.len()));
        }
    }
    spans
}

/// Lowercased, punctuation-stripped tokens.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    word_spans(text).into_iter().map(|(s, e)| text[s..e].to_lowercase()).collect()
}

const INVARIANT_PLURALS: &[&str] = &["series", "species", "news", "data", "physics", "mathematics"];

/// Rule-based English singularization of a single lowercase word.
pub fn singularize(word: &str) -> String {
    let w = word;
    if w.chars().count() <= 3 || INVARIANT_PLURALS.contains(&w) {
        return w.to_string();
    }
    if w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") || w.ends_with("as") {
        return w.to_string();
    }
    if let Some(stem) = w.strip_suffix("ies") {
        return format!("{stem}y");
    }
    if let Some(stem) = w.strip_suffix("sses") {
        return format!("{stem}ss");
    }
    for suffix in ["xes", "ches", "shes", "zes"] {
        if w.ends_with(suffix) {
            return w[..w.len() - 2].to_string();
        }
    }
    match w.strip_suffix('s') {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => w.to_string(),
    }
}

/// Lowercase, collapse whitespace and singularize the head (last) word.
pub fn normalize_phrase(phrase: &str) -> String {
    let lowered = phrase.to_lowercase();
    let mut words: Vec<&str> = lowered.split_whitespace().collect();
    let Some(last) = words.pop() else {
        return String::new();
    };
    let head = singularize(last);
    words.push(&head);
    words.join(" ")
}

/// Tokenize and singularize every token; used for plural-tolerant containment.
pub fn singular_tokens(text: &str) -> Vec<String> {
    normalized_tokens(text).iter().map(|t| singularize(t)).collect()
}

/// Counts non-overlapping occurrences of `needle` as a contiguous token run in `haystack`.
pub fn count_token_runs(haystack: &[String], needle: &[String]) -> usize {
    if needle.is_empty() || needle.len() > haystack.len() {
        return 0;
    }
    let mut count = 0;
    let mut i = 0;
    while i + needle.len() <= haystack.len() {
        if haystack[i..i + needle.len()] == *needle {
            count += 1;
            i += needle.len();
        } else {
            i += 1;
        }
    }
    count
}

/// Token-index start positions of every occurrence of `needle` in `haystack`.
pub fn token_run_positions(haystack: &[String], needle: &[String]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len()).filter(|&i| haystack[i..i + needle.len()] == *needle).collect()
}

pub fn indefinite_article(word: &str) -> &'static str {
    match word.chars().next() {
        Some(c) if "aeiou".contains(c) => "an",
        _ => "a",
    }
}

pub const DETERMINERS: &[&str] = &[
    "a", "an", "the", "some", "such", "these", "those", "this", "that", "many", "other", "various",
    "several", "most", "all", "any", "each", "their", "its", "our", "his", "her", "both", "few",
    "more", "less", "existing", "popular", "common", "recent",
];

/// Words that end a noun chunk when scanning forward after a relation cue.
pub const CHUNK_STOPWORDS: &[&str] = &[
    "that", "which", "who", "whose", "where", "when", "while", "in", "for", "to", "with", "by",
    "on", "at", "from", "as", "since", "because", "than", "and", "or", "but", "of", "into", "via",
    "through", "under", "over", "using", "based", "due", "although", "though", "if", "whereas",
    "it", "they", "we", "he", "she", "there", "then", "so", "not",
];

/// Subordinators and prepositions that close a coordinated list.
pub const LIST_CLOSERS: &[&str] = &[
    "since", "because", "while", "which", "that", "who", "where", "when", "to", "in", "for",
    "with", "by", "on", "at", "from", "as", "although", "though", "whereas", "if", "than", "etc",
    "among", "between", "into", "through", "via", "using", "without", "within", "after", "before",
    "during", "respectively",
];

/// Modal verbs: not inflected when converting a plural predicate to singular.
pub const MODALS: &[&str] = &["can", "could", "may", "might", "must", "shall", "should", "will", "would"];

/// Closed list of verb forms recognised by the shallow chunker. There is no
/// tagger; anything not listed is treated as nominal.
pub const VERBS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "has", "have", "had", "do", "does",
    "did", "can", "could", "may", "might", "must", "shall", "should", "will", "would", "become",
    "becomes", "became", "tend", "tends", "learn", "learns", "capture", "captures", "offer",
    "offers", "achieve", "achieves", "outperform", "outperforms", "require", "requires",
    "consider", "considers", "show", "shows", "provide", "provides", "allow", "allows", "enable",
    "enables", "perform", "performs", "generate", "generates", "produce", "produces", "rely",
    "relies", "gained", "gain", "made", "make", "makes", "improve", "improves", "approximate",
    "approximates", "represent", "represents", "maximize", "maximizes", "minimize", "minimizes",
    "employ", "employs", "utilize", "utilizes", "apply", "applies", "encode", "encodes", "decode",
    "decodes", "predict", "predicts", "compute", "computes", "combine", "combines", "obtain",
    "obtains", "suffer", "suffers", "remain", "remains", "depend", "depends", "contain",
    "contains", "consist", "consists", "include", "includes", "exploit", "exploits", "introduce",
    "introduces", "propose", "proposes", "fail", "fails", "operate", "operates", "synthesize",
    "synthesizes", "seek", "seeks", "describe", "describes", "treat", "treats", "assume",
    "assumes", "differ", "differs", "exhibit", "exhibits", "take", "takes", "find", "finds",
    "give", "gives", "explore", "explores", "used",
];

pub fn is_verb(word: &str) -> bool {
    VERBS.contains(&word)
}

pub fn is_determiner(word: &str) -> bool {
    DETERMINERS.contains(&word)
}

pub fn is_chunk_stop(word: &str) -> bool {
    CHUNK_STOPWORDS.contains(&word) || is_verb(word)
}

fn inflect_singular(word: &str) -> String {
    match word {
        "have" => "has".to_string(),
        "are" => "is".to_string(),
        "were" => "was".to_string(),
        "do" => "does".to_string(),
        w if MODALS.contains(&w) || !is_verb(w) => w.to_string(),
        w if w.ends_with("ed") || w.ends_with('s') => w.to_string(),
        w if w.ends_with("sh") || w.ends_with("ch") || w.ends_with('x') || w.ends_with('o') => format!("{w}es"),
        w if w.ends_with('y') && !w.ends_with("ay") && !w.ends_with("ey") && !w.ends_with("oy") => {
            format!("{}ies", &w[..w.len() - 1])
        }
        w => format!("{w}s"),
    }
}

/// Inflect a plural-subject predicate for a singular subject: the first word,
/// and any verb that directly follows a coordinating "and"/"but"/"or".
pub fn singular_agreement(predicate: &str) -> String {
    let words: Vec<&str> = predicate.split(' ').collect();
    let mut out = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let after_conj = i > 0 && matches!(words[i - 1], "and" | "but" | "or");
        if i == 0 || after_conj {
            out.push(inflect_singular(w));
        } else {
            out.push(w.to_string());
        }
    }
    out.join(" ")
}

/// Collapse runs of whitespace and tidy the spacing left behind by removed
/// citation brackets (`" ,"` -> `","`).
pub fn tidy_spacing(text: &str) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = String::with_capacity(collapsed.len());
    let mut chars = collapsed.chars().peekable();
    while let Some(c) = chars.next() {
        if c == ' ' && matches!(chars.peek(), Some(',' | '.' | ';' | ':')) {
            continue;
        }
        out.push(c);
    }
    // ",," can appear when a bracket group sat between two commas.
    while out.contains(",,") {
        out = out.replace(",,", ",");
    }
    out
}
