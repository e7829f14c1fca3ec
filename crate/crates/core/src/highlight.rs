//! Shared-span highlighting between a description and its source context.
//!
//! Offsets here are in Unicode scalar values (chars), half-open, because they
//! are consumed by clients that index strings by character.

use serde::{Deserialize, Serialize};

pub const DEFAULT_MIN_TOKENS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", from = "[usize; 2]")]
pub struct HighlightSpan {
    pub char_start: usize,
    pub char_end: usize,
}

impl From<HighlightSpan> for [usize; 2] {
    fn from(s: HighlightSpan) -> Self {
        [s.char_start, s.char_end]
    }
}

impl From<[usize; 2]> for HighlightSpan {
    fn from([char_start, char_end]: [usize; 2]) -> Self {
        HighlightSpan { char_start, char_end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HlToken {
    pub norm: String,
    pub char_start: usize,
    pub char_end: usize,
}

/// Whitespace tokens with leading/trailing punctuation stripped, lowercased.
/// Tokens that are pure punctuation are dropped.
pub fn highlight_tokens(text: &str) -> Vec<HlToken> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let (mut s, mut e) = (start, i);
        while s < e && !chars[s].is_alphanumeric() {
            s += 1;
        }
        while e > s && !chars[e - 1].is_alphanumeric() {
            e -= 1;
        }
        if s < e {
            let norm: String = chars[s..e].iter().collect::<String>().to_lowercase();
            out.push(HlToken { norm, char_start: s, char_end: e });
        }
    }
    out
}

/// A common token run: (description token index, context token index, length).
pub type Run = (usize, usize, usize);

/// Greedy longest-first common runs over unused tokens. Ties go to the
/// earliest description position, then the earliest context position.
pub fn shared_runs(desc: &[String], ctx: &[String], min_tokens: usize) -> Vec<Run> {
    let min_tokens = min_tokens.max(1);
    let mut used_d = vec![false; desc.len()];
    let mut used_c = vec![false; ctx.len()];
    let mut runs = Vec::new();
    let mut dp = vec![0usize; (desc.len() + 1) * (ctx.len() + 1)];
    let w = ctx.len() + 1;
    loop {
        // dp[i][j]: length of the common run ending at desc[i-1], ctx[j-1].
        let mut best: Option<Run> = None;
        for i in 1..=desc.len() {
            for j in 1..=ctx.len() {
                let v = if !used_d[i - 1] && !used_c[j - 1] && desc[i - 1] == ctx[j - 1] { dp[(i - 1) * w + j - 1] + 1 } else { 0 };
                dp[i * w + j] = v;
                if v == 0 {
                    continue;
                }
                let cand = (i - v, j - v, v);
                let wins = match best {
                    None => true,
                    Some((bd, bc, bl)) => v > bl || (v == bl && (cand.0, cand.1) < (bd, bc)),
                };
                if wins {
                    best = Some(cand);
                }
            }
        }
        match best {
            Some((d, c, len)) if len >= min_tokens => {
                used_d[d..d + len].iter_mut().for_each(|u| *u = true);
                used_c[c..c + len].iter_mut().for_each(|u| *u = true);
                runs.push((d, c, len));
            }
            _ => break,
        }
    }
    runs
}

/// Highlight spans on each side, sorted by start and non-overlapping.
pub fn shared_spans(description: &str, context: &str, min_tokens: usize) -> (Vec<HighlightSpan>, Vec<HighlightSpan>) {
    let dt = highlight_tokens(description);
    let ct = highlight_tokens(context);
    let dn: Vec<String> = dt.iter().map(|t| t.norm.clone()).collect();
    let cn: Vec<String> = ct.iter().map(|t| t.norm.clone()).collect();
    let runs = shared_runs(&dn, &cn, min_tokens);
    let span = |toks: &[HlToken], s: usize, len: usize| HighlightSpan {
        char_start: toks[s].char_start,
        char_end: toks[s + len - 1].char_end,
    };
    let mut d: Vec<HighlightSpan> = runs.iter().map(|&(ds, _, len)| span(&dt, ds, len)).collect();
    let mut c: Vec<HighlightSpan> = runs.iter().map(|&(_, cs, len)| span(&ct, cs, len)).collect();
    d.sort();
    c.sort();
    (d, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice(s: &str, sp: HighlightSpan) -> String {
        s.chars().skip(sp.char_start).take(sp.char_end - sp.char_start).collect()
    }

    #[test]
    fn identity_and_disjoint() {
        let s = "Deep generative models, such as VAEs.";
        let (d, c) = shared_spans(s, s, 1);
        assert_eq!(d, [HighlightSpan { char_start: 0, char_end: s.chars().count() - 1 }]);
        assert_eq!(d, c);
        let (d, c) = shared_spans("alpha beta gamma", "delta epsilon", 1);
        assert!(d.is_empty() && c.is_empty());
    }

    #[test]
    fn shared_clause_is_highlighted() {
        let desc = "variational autoencoder is a deep generative model that is used for modelling real-valued data, such as images.";
        let ctx = "recently, deep generative models such as variational autoencoders (vaes) have become increasingly popular for modelling real-valued data, such as images.";
        let (d, c) = shared_spans(desc, ctx, 3);
        assert_eq!(d.len(), 1);
        assert_eq!(slice(desc, d[0]), "for modelling real-valued data, such as images");
        assert_eq!(slice(ctx, c[0]), "for modelling real-valued data, such as images");
    }

    #[test]
    fn unicode_offsets_are_chars() {
        let (d, c) = shared_spans("é a b c", "x é a b c", 4);
        assert_eq!(d, [HighlightSpan { char_start: 0, char_end: 7 }]);
        assert_eq!(c, [HighlightSpan { char_start: 2, char_end: 9 }]);
    }

    #[test]
    fn span_serializes_as_pair() {
        let s = HighlightSpan { char_start: 3, char_end: 9 };
        assert_eq!(serde_json::to_string(&s).unwrap(), "[3,9]");
    }
}
