//! Hearst-style surface patterns over a demarcated context.
//!
//! The analysis works on the sentence that holds the target mention, after
//! citation brackets and parentheticals are removed. It recognises:
//!
//! * is-a: `<target> is a <NP>`, `<NP> such as / including / like <target>`,
//!   `<target>, a <NP>`
//! * compare: the target coordinated with another lexicon concept in a
//!   `such as` / `including` / `like` list, or `<target> and <X> are both ...`
//! * part-of: `<target> is (a) component/part of <NP>`, `<NP> consists of ... <target>`
//! * used-for: `used for`, `utilized for`, `employed for`, `applied to` after the
//!   target, or in the next sentence when it opens with a pronoun.
//!
//! Each match also carries the reference concept and, where recoverable, an
//! elaboration clause; the template generator renders those directly.

use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::{self, match_concepts, DemarcatedContext, Lexicon, MARKER_CLOSE, MARKER_OPEN};
use crate::extraction::RelationType;
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_alphanumeric)
    }

    fn is(&self, word: &str) -> bool {
        self.text == word
    }
}

/// Splits into lowercase word tokens (keeping internal `-`, `'`, `/`, `+`, `.`)
/// and single-character punctuation tokens. Offsets are byte offsets into `s`.
pub fn tokenize(s: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let n = chars.len();
    let offset_of = |i: usize| if i < n { chars[i].0 } else { s.len() };
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let mut j = i + 1;
            let mut has_dot = false;
            while j < n {
                let cj = chars[j].1;
                if cj.is_alphanumeric() {
                    j += 1;
                } else if matches!(cj, '-' | '\'' | '/' | '+' | '.')
                    && j + 1 < n
                    && chars[j + 1].1.is_alphanumeric()
                {
                    has_dot |= cj == '.';
                    j += 1;
                } else {
                    break;
                }
            }
            // "e.g." keeps its final period.
            if has_dot && j < n && chars[j].1 == '.' {
                j += 1;
            }
            let (start, end) = (offset_of(i), offset_of(j));
            tokens.push(Token { text: s[start..end].to_lowercase(), start, end });
            i = j;
        } else {
            let (start, end) = (offset_of(i), offset_of(i + 1));
            tokens.push(Token { text: s[start..end].to_string(), start, end });
            i += 1;
        }
    }
    tokens
}

/// Joins tokens with single spaces, without space before closing punctuation
/// or after opening brackets.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_open = false;
    for (i, tok) in tokens.iter().enumerate() {
        let closing = matches!(tok.text.as_str(), "," | "." | ";" | ":" | "!" | "?" | ")" | "]");
        if i > 0 && !closing && !prev_open {
            out.push(' ');
        }
        out.push_str(&tok.text);
        prev_open = matches!(tok.text.as_str(), "(" | "[");
    }
    out
}

fn is_separator(tok: &Token) -> bool {
    tok.is(",") || tok.is("and") || tok.is("or")
}

fn is_clause_punct(tok: &Token) -> bool {
    matches!(tok.text.as_str(), "," | ";" | ":" | "." | "!" | "?")
}

fn is_closer(tok: &Token) -> bool {
    text::LIST_CLOSERS.contains(&tok.text.as_str())
}

fn is_verb(tok: &Token) -> bool {
    text::is_verb(&tok.text)
}

/// Forward noun chunk: skips leading determiners, then takes words until a
/// verb, stop word, determiner or punctuation. Returns a token index range.
pub fn forward_chunk(tokens: &[Token], start: usize) -> (usize, usize) {
    let mut s = start;
    while s < tokens.len() && text::is_determiner(&tokens[s].text) {
        s += 1;
    }
    let mut e = s;
    while e < tokens.len()
        && tokens[e].is_word()
        && !text::is_chunk_stop(&tokens[e].text)
        && !text::is_determiner(&tokens[e].text)
    {
        e += 1;
    }
    (s, e)
}

/// Backward noun chunk ending right before `end`.
fn backward_chunk(tokens: &[Token], end: usize) -> (usize, usize) {
    let mut s = end;
    while s > 0 {
        let t = &tokens[s - 1];
        if !t.is_word() || text::is_chunk_stop(&t.text) || text::is_determiner(&t.text) {
            break;
        }
        s -= 1;
    }
    (s, end)
}

/// The sentence that holds the target, split around the target mention.
#[derive(Debug, Clone)]
pub struct TargetSentence {
    pub target: String,
    pub pre: Vec<Token>,
    pub post: Vec<Token>,
    pub next: Vec<Token>,
}

/// Removes bracket groups that do not contain a marker, then tidies spacing.
fn strip_bracket_groups(text: &str) -> String {
    let mut ranges = corpus::bracket_ranges(text);
    ranges.sort();
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (open, close) in ranges {
        if open < cursor {
            continue; // nested in a removed group
        }
        let group = &text[open..=close];
        if group.contains(MARKER_OPEN) || group.contains(MARKER_CLOSE) {
            continue;
        }
        out.push_str(&text[cursor..open]);
        out.push(' ');
        cursor = close + 1;
    }
    out.push_str(&text[cursor..]);
    text::tidy_spacing(&out)
}

fn without_final_punct(mut tokens: Vec<Token>) -> Vec<Token> {
    while tokens.last().is_some_and(|t| matches!(t.text.as_str(), "." | "!" | "?")) {
        tokens.pop();
    }
    tokens
}

pub fn analyse(ctx: &DemarcatedContext) -> Option<TargetSentence> {
    let cleaned = strip_bracket_groups(&ctx.text_with_markers.to_lowercase());
    let sentences = corpus::split_sentences(&cleaned);
    let idx = sentences.iter().position(|s| s.text.contains(MARKER_OPEN))?;
    let sentence = &sentences[idx].text;
    let open = sentence.find(MARKER_OPEN)?;
    let close = open + sentence[open..].find(MARKER_CLOSE)?;
    let pre = tokenize(&sentence[..open]);
    let post = without_final_punct(tokenize(&sentence[close + MARKER_CLOSE.len()..]));
    let next = sentences.get(idx + 1).map(|s| without_final_punct(tokenize(&s.text))).unwrap_or_default();
    Some(TargetSentence { target: ctx.target_concept.to_lowercase(), pre, post, next })
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ListScan {
    items: Vec<(usize, usize)>,
    /// Index where the material after the list begins.
    tail: usize,
}

/// Reads coordinated list items (`, X`, `and X`, `, and X`) starting at `i`.
/// The list ends at an item that opens with a subordinator/preposition or
/// contains a verb; in the latter case the tail starts at that verb.
fn scan_list(tokens: &[Token], mut i: usize) -> ListScan {
    let mut items = Vec::new();
    loop {
        let mut j = i;
        if j < tokens.len() && tokens[j].is(",") {
            j += 1;
            if j < tokens.len() && (tokens[j].is("and") || tokens[j].is("or")) {
                j += 1;
            }
        } else if j < tokens.len() && (tokens[j].is("and") || tokens[j].is("or")) {
            j += 1;
        } else {
            return ListScan { items, tail: i };
        }
        let mut k = j;
        while k < tokens.len() && !is_clause_punct(&tokens[k]) && !tokens[k].is("and") && !tokens[k].is("or") {
            k += 1;
        }
        let item = &tokens[j..k];
        if item.is_empty() || is_closer(&item[0]) {
            return ListScan { items, tail: j };
        }
        if let Some(v) = item.iter().position(is_verb) {
            return ListScan { items, tail: j + v };
        }
        if item.len() > 6 {
            return ListScan { items, tail: j };
        }
        items.push((j, k));
        i = k;
    }
}

/// Segments of a list prefix (material between a trigger and the target).
fn list_prefix_items(tokens: &[Token]) -> Option<Vec<(usize, usize)>> {
    let mut items = Vec::new();
    let mut start = 0;
    for (i, tok) in tokens.iter().enumerate().chain(std::iter::once((tokens.len(), &Token { text: ",".into(), start: 0, end: 0 }))) {
        if is_separator(tok) {
            if i > start {
                items.push((start, i));
            }
            start = i + 1;
            continue;
        }
        if !tok.is_word() || is_verb(tok) || is_closer(tok) {
            return None;
        }
    }
    if items.iter().any(|&(s, e)| e - s > 6) {
        return None;
    }
    Some(items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Trigger {
    start: usize,
    /// First token of the list prefix.
    end: usize,
}

fn find_trigger(pre: &[Token]) -> Option<Trigger> {
    let k = (0..pre.len()).rev().find(|&k| {
        pre[k].is("including")
            || pre[k].is("like")
            || pre[k].is("e.g.")
            || (pre[k].is("such") && pre.get(k + 1).is_some_and(|t| t.is("as")))
    })?;
    let mut end = if pre[k].is("such") { k + 2 } else { k + 1 };
    if pre.get(end).is_some_and(|t| t.is(",")) {
        end += 1;
    }
    list_prefix_items(&pre[end..])?;
    Some(Trigger { start: k, end })
}

static PURPOSE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:(?:has|have|had|is|are|was|were)\s+)?(?:(?:been|become|became)\s+)?(?:\w+ly\s+)?(?:popular|used|utilized|useful|employed|adopted|applied|suitable)\s+(for|in|to)\s+(.+)$",
    )
    .expect("valid regex")
});

/// Turns the material after a subject into a relative clause ("that ...").
fn relative_clause(tokens: &[Token], singular: bool) -> Option<String> {
    let tokens = match tokens.first() {
        Some(t) if t.is(",") => &tokens[1..],
        _ => tokens,
    };
    let first = tokens.first()?;
    let copula = if singular { "is" } else { "are" };
    let phrase = detokenize(tokens);
    if let Some(caps) = PURPOSE.captures(&phrase) {
        let prep = &caps[1];
        let verb = if prep == "to" { "applied" } else { "used" };
        return Some(format!("that {copula} {verb} {prep} {}", &caps[2]));
    }
    let agree = |body: &str| if singular { text::singular_agreement(body) } else { body.to_string() };
    if matches!(first.text.as_str(), "that" | "which" | "who") && tokens.len() > 1 {
        return Some(format!("that {}", agree(&detokenize(&tokens[1..]))));
    }
    if is_verb(first) {
        return Some(format!("that {}", agree(&phrase)));
    }
    None
}

fn phrase_of(tokens: &[Token], (s, e): (usize, usize)) -> String {
    detokenize(&tokens[s..e])
}

fn singular_phrase(tokens: &[Token], span: (usize, usize)) -> String {
    text::normalize_phrase(&phrase_of(tokens, span))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternMatch {
    pub relation: RelationType,
    pub reference: String,
    pub elaboration: Option<String>,
    /// Relation cue to use when rendering ("is used for", "is applied to", ...).
    pub cue: &'static str,
}

struct Matcher<'a> {
    lexicon: &'a Lexicon,
    sent: &'a TargetSentence,
    target_norm: String,
    out: Vec<PatternMatch>,
}

impl Matcher<'_> {
    fn push(&mut self, relation: RelationType, reference: String, elaboration: Option<String>, cue: &'static str) {
        let reference = reference.trim().to_string();
        if reference.is_empty() || text::normalize_phrase(&reference) == self.target_norm {
            return;
        }
        let elaboration = elaboration.map(|e| e.trim().to_string()).filter(|e| !e.is_empty());
        let m = PatternMatch { relation, reference, elaboration, cue };
        if !self.out.contains(&m) {
            self.out.push(m);
        }
    }

    /// First lexicon concept other than the target inside the token span.
    fn concept_in(&self, tokens: &[Token], (s, e): (usize, usize)) -> Option<String> {
        let item = detokenize(&tokens[s..e]);
        match_concepts(&item, self.lexicon)
            .into_iter()
            .map(|m| m.concept)
            .find(|c| text::normalize_phrase(c) != self.target_norm)
    }

    fn copula_patterns(&mut self) {
        let post = &self.sent.post;
        let mut j = usize::from(post.first().is_some_and(|t| t.is(",")));
        if !post.get(j).is_some_and(|t| t.is("is") || t.is("are")) {
            return;
        }
        j += 1;
        if post.get(j).is_some_and(|t| t.is("a") || t.is("an")) {
            let np = forward_chunk(post, j + 1);
            if np.1 > np.0 && !self.part_of_at(post, np.0) {
                let elab = relative_clause(&post[np.1..], true);
                self.push(RelationType::IsA, singular_phrase(post, np), elab, "is a");
            }
        }
        self.part_of_after(j);
    }

    fn part_of_at(&self, tokens: &[Token], i: usize) -> bool {
        let mut i = i;
        if tokens.get(i).is_some_and(|t| !matches!(t.text.as_str(), "part" | "parts" | "component" | "components")) {
            i += 1; // one adjective: "key component of"
        }
        tokens.get(i).is_some_and(|t| matches!(t.text.as_str(), "part" | "parts" | "component" | "components"))
            && tokens.get(i + 1).is_some_and(|t| t.is("of"))
    }

    /// `(a|the)? (adj)? part/component of <NP>` starting at `j` in post.
    fn part_of_after(&mut self, j: usize) {
        let post = &self.sent.post;
        let mut i = j;
        if post.get(i).is_some_and(|t| matches!(t.text.as_str(), "a" | "an" | "the" | "one")) {
            i += 1;
        }
        if !self.part_of_at(post, i) {
            return;
        }
        let of = (i..post.len()).find(|&k| post[k].is("of")).expect("checked by part_of_at");
        let np = forward_chunk(post, of + 1);
        if np.1 > np.0 {
            let elab = relative_clause(&post[np.1..], true);
            self.push(RelationType::PartOf, singular_phrase(post, np), elab, "is part of");
        }
    }

    fn appositive_patterns(&mut self) {
        let post = &self.sent.post;
        if !post.first().is_some_and(|t| t.is(",")) {
            return;
        }
        if post.get(1).is_some_and(|t| t.is("a") || t.is("an")) && !self.part_of_at(post, 2) {
            let np = forward_chunk(post, 2);
            if np.1 > np.0 {
                let elab = relative_clause(&post[np.1..], true);
                self.push(RelationType::IsA, singular_phrase(post, np), elab, "is a");
            }
        }
        self.part_of_after(1);
    }

    fn trigger_patterns(&mut self) {
        let pre = &self.sent.pre;
        let post = &self.sent.post;
        let Some(trigger) = find_trigger(pre) else { return };
        let mut np_end = trigger.start;
        if np_end > 0 && pre[np_end - 1].is(",") {
            np_end -= 1;
        }
        let np = backward_chunk(pre, np_end);
        let has_np = np.1 > np.0;
        if pre[trigger.start].is("like") && !has_np {
            return;
        }
        let scan = scan_list(post, 0);
        let tail = &post[scan.tail..];
        if has_np {
            self.push(RelationType::IsA, singular_phrase(pre, np), relative_clause(tail, true), "is a");
        }

        let before: Vec<(usize, usize)> = list_prefix_items(&pre[trigger.end..])
            .unwrap_or_default()
            .into_iter()
            .map(|(s, e)| (s + trigger.end, e + trigger.end))
            .collect();
        let reference = scan
            .items
            .iter()
            .find_map(|&span| self.concept_in(post, span))
            .or_else(|| before.iter().rev().find_map(|&span| self.concept_in(pre, span)));
        if let Some(reference) = reference {
            let predicate = relative_clause(tail, false);
            let elab = match (has_np, predicate) {
                (true, Some(p)) => Some(format!("they are both {} {p}", phrase_of(pre, np))),
                (true, None) => Some(format!("they are both {}", phrase_of(pre, np))),
                (false, Some(p)) => Some(format!("they both {}", p.strip_prefix("that ").unwrap_or(&p))),
                (false, None) => None,
            };
            self.push(RelationType::Compare, reference, elab, "is like");
        }
    }

    fn both_pattern(&mut self) {
        let post = &self.sent.post;
        if !post.first().is_some_and(|t| t.is("and")) {
            return;
        }
        let Some(k) = (1..post.len().saturating_sub(1)).find(|&k| post[k].is("are") && post[k + 1].is("both")) else {
            return;
        };
        if k - 1 > 6 || post[1..k].iter().any(|t| is_verb(t) || !t.is_word()) {
            return;
        }
        if let Some(reference) = self.concept_in(post, (1, k)) {
            let rest = detokenize(&post[k + 2..]);
            let elab = (!rest.is_empty()).then(|| format!("they are both {rest}"));
            self.push(RelationType::Compare, reference, elab, "is like");
        }
    }

    fn consists_pattern(&mut self) {
        let pre = &self.sent.pre;
        let Some(k) = (0..pre.len())
            .rev()
            .find(|&k| matches!(pre[k].text.as_str(), "consists" | "consist" | "comprises" | "comprise"))
        else {
            return;
        };
        let mut list_start = k + 1;
        if pre.get(list_start).is_some_and(|t| t.is("of")) {
            list_start += 1;
        }
        if list_prefix_items(&pre[list_start..]).is_none() {
            return;
        }
        let np = backward_chunk(pre, k);
        if np.1 > np.0 {
            let scan = scan_list(&self.sent.post, 0);
            let elab = relative_clause(&self.sent.post[scan.tail..], true);
            self.push(RelationType::PartOf, singular_phrase(pre, np), elab, "is part of");
        }
    }

    fn used_for_pattern(&mut self) {
        let sent = self.sent;
        let found = find_use_cue(&sent.post).map(|c| (&sent.post, c)).or_else(|| {
            let opens_with_pronoun = sent
                .next
                .first()
                .is_some_and(|t| matches!(t.text.as_str(), "it" | "they" | "this" | "these"));
            if opens_with_pronoun {
                find_use_cue(&sent.next).map(|c| (&sent.next, c))
            } else {
                None
            }
        });
        let Some((tokens, (cue_end, cue))) = found else { return };
        let after = detokenize(&tokens[cue_end..]);
        let mention = match_concepts(&after, self.lexicon)
            .into_iter()
            .find(|m| text::normalize_phrase(&m.concept) != self.target_norm);
        if let Some(m) = mention {
            let rest = tokenize(&after[m.char_end..]);
            let scan = scan_list(&rest, 0);
            let mut tail = &rest[scan.tail..];
            if tail.first().is_some_and(|t| t.is(",")) {
                tail = &tail[1..];
            }
            self.push(RelationType::UsedFor, m.concept, Some(detokenize(tail)), cue);
        } else {
            let after_tokens = &tokens[cue_end..];
            let np = forward_chunk(after_tokens, 0);
            if np.1 > np.0 {
                let mut tail = &after_tokens[np.1..];
                if tail.first().is_some_and(|t| t.is(",")) {
                    tail = &tail[1..];
                }
                self.push(RelationType::UsedFor, singular_phrase(after_tokens, np), Some(detokenize(tail)), cue);
            }
        }
    }
}

/// Returns (index after the cue, rendering cue).
fn find_use_cue(tokens: &[Token]) -> Option<(usize, &'static str)> {
    tokens.windows(2).enumerate().find_map(|(i, w)| match (w[0].text.as_str(), w[1].text.as_str()) {
        ("used" | "utilized" | "employed", "for") => Some((i + 2, "is used for")),
        ("applied", "to") => Some((i + 2, "is applied to")),
        _ => None,
    })
}

/// All pattern matches for the demarcated target, in a fixed order:
/// is-a, part-of, compare, used-for.
pub fn find_matches(ctx: &DemarcatedContext, lexicon: &Lexicon) -> Vec<PatternMatch> {
    let Some(sent) = analyse(ctx) else { return Vec::new() };
    let mut m = Matcher { lexicon, target_norm: text::normalize_phrase(&sent.target), sent: &sent, out: Vec::new() };
    m.copula_patterns();
    m.appositive_patterns();
    m.trigger_patterns();
    m.consists_pattern();
    m.both_pattern();
    m.used_for_pattern();
    let mut out = m.out;
    out.sort_by_key(|p| p.relation);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LexiconEntry;

    fn lexicon() -> Lexicon {
        Lexicon::from_entries(
            [
                "variational autoencoder",
                "generative adversarial network",
                "generative adversarial net",
                "autoencoder",
                "word representation",
                "sentence classification",
                "relation classification",
                "sentiment analysis",
                "beam search",
                "importance sampling",
            ]
            .iter()
            .map(|c| LexiconEntry { concept: c.to_string(), score: 2.0 }),
        )
    }

    fn ctx(text: &str, target: &str) -> DemarcatedContext {
        DemarcatedContext { context_id: "c".into(), target_concept: target.into(), text_with_markers: text.into() }
    }

    fn relations(ms: &[PatternMatch]) -> Vec<RelationType> {
        let mut r: Vec<_> = ms.iter().map(|m| m.relation).collect();
        r.dedup();
        r
    }

    #[test]
    fn tokenizer_keeps_compounds() {
        let toks: Vec<String> = tokenize("real-valued data, e.g., word2vec (vae).").into_iter().map(|t| t.text).collect();
        assert_eq!(toks, ["real-valued", "data", ",", "e.g.", ",", "word2vec", "(", "vae", ")", "."]);
        assert_eq!(detokenize(&tokenize("data, such as ( images ) .")), "data, such as (images).");
    }

    #[test]
    fn bracket_groups_are_removed() {
        assert_eq!(
            strip_bracket_groups("models such as <<vaes>> (vaes) [10] , gans (gans) [5] , and more"),
            "models such as <<vaes>>, gans, and more"
        );
    }

    #[test]
    fn copula_is_a() {
        let m = find_matches(&ctx("<<variational autoencoder>> is a generative model that learns.", "variational autoencoder"), &lexicon());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].relation, RelationType::IsA);
        assert_eq!(m[0].reference, "generative model");
        assert_eq!(m[0].elaboration.as_deref(), Some("that learns"));
    }

    #[test]
    fn no_pattern() {
        assert!(find_matches(&ctx("we evaluate <<beam search>> extensively", "beam search"), &lexicon()).is_empty());
    }

    #[test]
    fn such_as_with_purpose_predicate() {
        let text = "recently, deep generative models such as <<variational autoencoders>> (vaes) (rezende et al., 2014) have become increasingly popular for modelling real-valued data, such as images.";
        let m = find_matches(&ctx(text, "variational autoencoder"), &lexicon());
        assert_eq!(relations(&m), [RelationType::IsA]);
        assert_eq!(m[0].reference, "deep generative model");
        assert_eq!(m[0].elaboration.as_deref(), Some("that is used for modelling real-valued data, such as images"));
    }

    #[test]
    fn coordination_gives_compare() {
        let text = "some such models, including <<variational autoencoders>> (vaes) and generative adversarial networks (gans) [goodfellow et al., 2014, kingma and welling, 2013, rezende et al., 2014], learn an explicit low-dimensional manifold that approximates a natural signal class.";
        let m = find_matches(&ctx(text, "variational autoencoder"), &lexicon());
        let cmp = m.iter().find(|m| m.relation == RelationType::Compare).unwrap();
        assert_eq!(cmp.reference, "generative adversarial network");
        assert_eq!(
            cmp.elaboration.as_deref(),
            Some("they are both models that learn an explicit low-dimensional manifold that approximates a natural signal class")
        );
    }

    #[test]
    fn compare_reference_before_target() {
        let text = "we then compare the performance of rbm with other standard representation learning algorithms, including principal or independent component analysis (pca, ica), autoencoders (ae), <<variational autoencoders>> (vae), and their sparse variants.";
        let m = find_matches(&ctx(text, "variational autoencoder"), &lexicon());
        let cmp = m.iter().find(|m| m.relation == RelationType::Compare).unwrap();
        assert_eq!(cmp.reference, "autoencoder");
        assert_eq!(cmp.elaboration.as_deref(), Some("they are both standard representation learning algorithms"));
    }

    #[test]
    fn list_subject_predicate() {
        let text = "backed by the recent success of deep generative models, such as <<variational autoencoders>> (vaes) [10] , generative adversarial nets (gans) [5] , and autoregressive models [12] , existing models have made progress towards controllable text generation [15, 8, 9, 18].";
        let m = find_matches(&ctx(text, "variational autoencoder"), &lexicon());
        let cmp = m.iter().find(|m| m.relation == RelationType::Compare).unwrap();
        assert_eq!(cmp.reference, "generative adversarial net");
        assert_eq!(
            cmp.elaboration.as_deref(),
            Some("they are both deep generative models that have made progress towards controllable text generation")
        );
    }

    #[test]
    fn used_for_in_following_pronoun_sentence() {
        let text = "word embedding is a <<word representation>> that captures semantic and syntactic similarities between words. it has been widely utilized for a variety of tasks, such as sentence classification [42], relation classification [41], and sentiment analysis [38], since the introduction of word2vec software.";
        let m = find_matches(&ctx(text, "word representation"), &lexicon());
        assert_eq!(relations(&m), [RelationType::UsedFor]);
        assert_eq!(m[0].reference, "sentence classification");
        assert_eq!(m[0].elaboration.as_deref(), Some("since the introduction of word2vec software"));
    }

    #[test]
    fn part_of_patterns() {
        let m = find_matches(&ctx("<<attention>> is a key component of the transformer that mixes tokens.", "attention"), &lexicon());
        assert_eq!(relations(&m), [RelationType::PartOf]);
        assert_eq!(m[0].reference, "transformer");
        let m = find_matches(&ctx("the pipeline consists of a tokenizer and <<beam search>>.", "beam search"), &lexicon());
        assert_eq!(relations(&m), [RelationType::PartOf]);
        assert_eq!(m[0].reference, "pipeline");
    }

    #[test]
    fn are_both_pattern() {
        let m = find_matches(
            &ctx("<<beam search>> and importance sampling are both approximate inference methods.", "beam search"),
            &lexicon(),
        );
        assert_eq!(relations(&m), [RelationType::Compare]);
        assert_eq!(m[0].reference, "importance sampling");
        assert_eq!(m[0].elaboration.as_deref(), Some("they are both approximate inference methods"));
    }

    #[test]
    fn appositive_is_a() {
        let m = find_matches(&ctx("we use <<beam search>>, a heuristic search algorithm, in decoding.", "beam search"), &lexicon());
        assert_eq!(relations(&m), [RelationType::IsA]);
        assert_eq!(m[0].reference, "heuristic search algorithm");
    }
}
