//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any fail.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use accord_core::corpus::{
    build_candidate_contexts, enumerate_windows, load_corpus, load_lexicon, split_sentences, Lexicon, LexiconEntry,
    PaperRecord, Section, SectionKind, WindowSizes,
};
use accord_core::eval::{cohen_kappa, f1_binary, fleiss_kappa, ols_slope};
use accord_core::extraction::{ExtractorConfig, RelationType, RuleExtractor};
use accord_core::generation::{
    filter_description, parse_description, parse_descriptions, FilterOptions, GenerationConfig, ParsedDescription,
    RejectReason, TemplateGenerator,
};
use accord_core::highlight::{highlight_tokens, shared_runs, shared_spans, HighlightSpan};
use accord_core::pipeline::{extract, generate, ingest, select};
use accord_core::selection::{build_set, normalize_reference, rank_references, DescriptionRecord, SelectionConfig};
use accord_service::{router, DescriptionIndex};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use RelationType::{Compare, IsA, UsedFor};

fn core_data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn within(limit: Duration, start: Instant) {
    let took = start.elapsed();
    assert!(took < limit, "took {took:?}, limit {limit:?}");
}

fn coordinated_list_parse() {
    let start = Instant::now();
    let rows = [
        "[sentence classification, relation classification] is a task that word embedding has been utilized for since the introduction of word2vec software.",
        "sentence classification is like [relation classification, sentiment analysis] in that they are both tasks that word embedding has been used for since the introduction of word2vec software.",
        "relation classification is like [sentence classification, sentiment analysis] in that they are both tasks that word embedding has been used for since the introduction of word2vec software.",
        "word representation has been used for [sentence classification, relation classification, sentiment analysis] since the introduction of word2vec software.",
    ];
    let (sc, rc, sa, wr) = ("sentence classification", "relation classification", "sentiment analysis", "word representation");
    let expected: BTreeSet<(&str, RelationType, &str)> = [
        (sc, IsA, "task"),
        (rc, IsA, "task"),
        (sc, Compare, rc),
        (sc, Compare, sa),
        (rc, Compare, sc),
        (rc, Compare, sa),
        (wr, UsedFor, sc),
        (wr, UsedFor, rc),
        (wr, UsedFor, sa),
    ]
    .into();
    let mut got = BTreeSet::new();
    for row in rows {
        for p in parse_descriptions(row, None).unwrap() {
            got.insert((p.target, p.relation, p.reference));
        }
    }
    let got: BTreeSet<(&str, RelationType, &str)> = got.iter().map(|(t, r, f)| (t.as_str(), *r, f.as_str())).collect();
    assert_eq!(got, expected);
    // Single-target readings agree with the expansion.
    assert_eq!(parse_description(rows[3], wr).unwrap().reference, sc);
    within(Duration::from_secs(1), start);
}

fn tokens_of(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_lowercase).collect()
}

/// Equal, or one token added or dropped at either end.
fn within_one_token(got: &str, want: &str) -> bool {
    let (g, w) = (tokens_of(got), tokens_of(want));
    if g == w {
        return true;
    }
    let (long, short) = if g.len() > w.len() { (&g, &w) } else { (&w, &g) };
    long.len() == short.len() + 1 && (long[1..] == short[..] || long[..short.len()] == short[..])
}

fn single_target_parse() {
    let start = Instant::now();
    let target = "variational autoencoder";
    let rows: [(&str, RelationType, &str); 6] = [
        ("variational autoencoder is like generative adversarial network in that they are both models that learn an explicit low-dimensional manifold that approximates a natural signal class.", Compare, "generative adversarial network"),
        ("variational autoencoder is like autoencoders in that they are both methods for representation learning and are more robust with respect to sample size than deterministic methods such as pca or ica.", Compare, "autoencoders"),
        ("variational autoencoder is like generative adversarial net in that they are both deep generative models that have made progress towards controllable text generation.", Compare, "generative adversarial net"),
        ("variational autoencoder is a generative model that is used in combination with neural networks to learn complex distribution of training data by embedding them into a low-dimensional latent space.", IsA, "generative model"),
        ("variational autoencoder is a deep generative model that is used for modelling real-valued data, such as images.", IsA, "deep generative model"),
        ("variational autoencoder is a latent variable model that does not offer an exact density estimate.", IsA, "latent variable model"),
    ];
    let mut matched = 0;
    for (text, relation, reference) in rows {
        let p: ParsedDescription = parse_description(text, target).unwrap();
        assert!(!p.elaboration.trim().is_empty(), "empty elaboration for {text}");
        if p.relation == relation && within_one_token(&p.reference, reference) {
            matched += 1;
        }
    }
    assert!(matched >= 5, "{matched}/6 rows matched");
    within(Duration::from_secs(1), start);
}

const WORDS: &[&str] = &["model", "data", "we", "train", "network", "results", "show", "improves", "zeta", "images"];

fn windowing_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lexicon = Lexicon::from_entries([LexiconEntry { concept: "zeta".into(), score: 2.0 }]);
    for case in 0..1000 {
        let m = rng.random_range(1..=50);
        let sentences: Vec<String> = (0..m)
            .map(|_| {
                let n = rng.random_range(1..10);
                let words: Vec<&str> = (0..n).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
                format!("{} zeta{}", words.join(" "), [".", "!", "?"][rng.random_range(0..3)])
            })
            .collect();
        let text = sentences.join(" ");
        let found = split_sentences(&text).len();
        assert_eq!(found, m, "case {case}: split {found} sentences, wrote {m}");
        assert_eq!(enumerate_windows(found, &WindowSizes::both()).len(), 2 * m - 1, "case {case}");
        let paper = PaperRecord {
            paper_id: "p".into(),
            title: "t".into(),
            url: None,
            sections: vec![Section { kind: SectionKind::Abstract, text }],
        };
        assert_eq!(build_candidate_contexts(&paper, &lexicon, &WindowSizes::both()).len(), 2 * m - 1, "case {case}");
    }
}

fn end_to_end_offline() {
    let start = Instant::now();
    let corpus = load_corpus(core_data("mini_corpus.jsonl")).unwrap();
    let lexicon = load_lexicon(core_data("mini_lexicon.tsv"), 1.0).unwrap();
    let ingested = ingest(&corpus, &lexicon, &WindowSizes::both()).unwrap();
    assert!(ingested.provenance.len() >= 10, "only {} contexts", ingested.provenance.len());
    let extracted = extract(&ingested.items, &RuleExtractor::new(lexicon.clone(), &ExtractorConfig::default()));
    let generated = generate(&extracted, &TemplateGenerator::new(lexicon.clone()), &GenerationConfig::default());
    let context_of = |id: &str| ingested.provenance.iter().find(|p| p.context_id == id).unwrap().text.clone();
    for d in &generated.descriptions {
        let p = parse_description(&d.text, &d.target).unwrap();
        assert!(filter_description(&p, &context_of(&d.context_id), FilterOptions::default()).accepted, "{}", d.text);
    }
    let sets = select(&generated.descriptions, &lexicon, &SelectionConfig::default());
    let vae = sets.iter().find(|s| s.target == "variational autoencoder").expect("no set for variational autoencoder");
    assert!(vae.entries.iter().any(|e| e.relation == IsA));
    assert!(vae.entries.iter().any(|e| e.relation == Compare));
    let triples: BTreeSet<(String, String, RelationType)> =
        vae.entries.iter().map(|e| (e.target.clone(), normalize_reference(&e.reference), e.relation)).collect();
    assert_eq!(triples.len(), vae.entries.len());
    within(Duration::from_secs(5), start);
}

const REFS: &[&str] = &["autoencoder", "autoencoders", "gan", "flow", "diffusion model", "Flow", "rbm", "pca", "gans"];

fn record(i: usize, target: &str, reference: &str, relation: RelationType, score: f64) -> DescriptionRecord {
    DescriptionRecord {
        description_id: format!("d{i:03}"),
        target: target.into(),
        relation,
        reference: reference.into(),
        elaboration: "e".into(),
        text: format!("{target} vs {reference}{}", "!".repeat(i % 4)),
        context_id: format!("c{i}"),
        paper_id: "p".into(),
        score,
    }
}

fn random_pool(rng: &mut ChaCha8Rng, max: usize) -> Vec<DescriptionRecord> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|i| {
            let target = ["t", "u"][rng.random_range(0..2)];
            let relation = RelationType::ALL[rng.random_range(0..4)];
            let score = [0.2, 0.5, 0.9][rng.random_range(0..3)];
            record(i, target, REFS.choose(rng).unwrap(), relation, score)
        })
        .collect()
}

fn selection_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..500 {
        let mut pool = random_pool(&mut rng, 30);
        // Guarantee at least three distinct references in both default relations.
        for relation in [Compare, IsA] {
            for r in ["alpha", "beta", "gamma"] {
                pool.push(record(pool.len(), "t", r, relation, rng.random_range(0.0..1.0)));
            }
        }
        let set = build_set(&pool, "t", &SelectionConfig::default());
        assert_eq!(set.entries.len(), 6, "case {case}");
        assert_eq!(set.entries.iter().filter(|e| e.relation == Compare).count(), 3, "case {case}");
        assert_eq!(set.entries.iter().filter(|e| e.relation == IsA).count(), 3, "case {case}");
        let triples: BTreeSet<(String, String, RelationType)> =
            set.entries.iter().map(|e| (e.target.clone(), normalize_reference(&e.reference), e.relation)).collect();
        assert_eq!(triples.len(), 6, "case {case}");
    }
}

fn frequency_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let pool = random_pool(&mut rng, 20);
        let relation = RelationType::ALL[rng.random_range(0..4)];
        let k = rng.random_range(1..=5);
        assert_eq!(
            rank_references(&pool, "t", relation, k),
            oracles::rank_references(&pool, "t", relation, k),
            "case {case}"
        );
    }
}

fn filters() {
    let ctx = "we compare beam search with greedy decoding, as in smith et al. (2019) and in our work on decoding.";
    let check = |text: &str, target: &str, relation: RelationType, reference: &str, want: RejectReason| {
        let p = ParsedDescription {
            target: target.into(),
            relation,
            reference: reference.into(),
            elaboration: "they both decode sequences".into(),
            text: text.into(),
        };
        let v = filter_description(&p, ctx, FilterOptions::default());
        assert!(!v.accepted, "{text} accepted");
        assert!(v.reasons.contains(&want), "{text}: {:?} lacks {want}", v.reasons);
    };
    check(
        "beam search is like greedy decoding in that our work uses both.",
        "beam search",
        Compare,
        "greedy decoding",
        RejectReason::UnresolvedReference,
    );
    check(
        "beam search is like greedy decoding in that beam search decodes sequences.",
        "beam search",
        Compare,
        "greedy decoding",
        RejectReason::DuplicateTarget,
    );
    check("beam search is like smith et al. in that they both decode.", "beam search", Compare, "smith et al.", RejectReason::AuthorNameReference);
    check("beam search is like smith (2019) in that they both decode.", "beam search", Compare, "smith (2019)", RejectReason::AuthorNameReference);
    let clean = ParsedDescription {
        target: "beam search".into(),
        relation: Compare,
        reference: "greedy decoding".into(),
        elaboration: "they both decode sequences".into(),
        text: "beam search is like greedy decoding in that they both decode sequences.".into(),
    };
    assert!(filter_description(&clean, ctx, FilterOptions::default()).accepted);
}

fn statistics_oracles() {
    let labels = ["a", "b", "c", "a", "b"];
    assert_eq!(cohen_kappa(&labels, &labels).unwrap().kappa, 1.0);
    // p_o = 0.5, p_e = 0.5.
    let k = cohen_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap().kappa;
    assert!(k.abs() < 1e-12, "{k}");
    assert_eq!(fleiss_kappa(&[vec![3, 0], vec![0, 3], vec![3, 0]]).unwrap().kappa, 1.0);
    let k = fleiss_kappa(&[vec![1, 1], vec![1, 1]]).unwrap().kappa;
    assert!((k + 1.0).abs() < 1e-12, "{k}");

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let n = rng.random_range(1..100);
        let gold: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        let p = gold.iter().filter(|g| **g).count() as f64;
        let r = f1_binary(&vec![true; n], &gold).unwrap();
        assert!((r.baseline_f1 - r.f1).abs() < 1e-12);
        assert!((r.baseline_f1 - 2.0 * p / (n as f64 + p)).abs() < 1e-12);
        assert!((r.f1 - oracles::all_positive_f1(&gold)).abs() < 1e-12);
    }
    for case in 0..100 {
        let n = rng.random_range(3..60);
        let x: Vec<f64> = (0..n).map(|i| i as f64 + rng.random_range(-0.4..0.4)).collect();
        let y: Vec<f64> = x.iter().map(|xi| 0.03 * xi + rng.random_range(-1.0..1.0)).collect();
        let fit = ols_slope(&x, &y).unwrap();
        let (slope, intercept) = oracles::ols_slope(&x, &y);
        assert!((fit.slope - slope).abs() < 1e-9, "case {case}: {} vs {slope}", fit.slope);
        assert!((fit.intercept - intercept).abs() < 1e-9, "case {case}");
    }
}

fn shared_spans_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vocab = ["a", "b", "c", "d", "e"];
    for case in 0..500 {
        let d: Vec<String> = (0..rng.random_range(0..=40)).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect();
        let c: Vec<String> = (0..rng.random_range(0..=40)).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect();
        let min = rng.random_range(1..=3);
        let want = oracles::shared_runs(&d, &c, min);
        assert_eq!(shared_runs(&d, &c, min), want, "case {case}");
        // Through the string API: spans are the oracle runs mapped to char offsets.
        let (ds, cs) = (d.join(" "), c.join(" "));
        let (dt, ct) = (highlight_tokens(&ds), highlight_tokens(&cs));
        let to_span = |toks: &[accord_core::highlight::HlToken], s: usize, len: usize| HighlightSpan {
            char_start: toks[s].char_start,
            char_end: toks[s + len - 1].char_end,
        };
        let mut wd: Vec<HighlightSpan> = want.iter().map(|&(s, _, l)| to_span(&dt, s, l)).collect();
        let mut wc: Vec<HighlightSpan> = want.iter().map(|&(_, s, l)| to_span(&ct, s, l)).collect();
        wd.sort();
        wc.sort();
        assert_eq!(shared_spans(&ds, &cs, min), (wd, wc), "case {case}");
    }
    let s = "deep generative models, such as variational autoencoders, learn latent spaces.";
    let whole = HighlightSpan { char_start: 0, char_end: s.chars().count() - 1 };
    assert_eq!(shared_spans(s, s, 1), (vec![whole], vec![whole]));
    let (d, c) = shared_spans("beam search decodes", "latent variable model", 1);
    assert!(d.is_empty() && c.is_empty());
}

fn get_json(base: &str, path: &str) -> (u16, Value) {
    let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
    let mut resp = agent.get(&format!("{base}{path}")).call().unwrap();
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_json().unwrap())
}

fn service_contract() {
    let index = DescriptionIndex::load(fixture("sets.jsonl"), fixture("provenance.jsonl")).unwrap();
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let app = router(Arc::new(index), None);
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });

    let (status, body) = get_json(&base, "/api/health");
    assert_eq!(status, 200);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["concepts"], 2);

    let (_, body) = get_json(&base, "/api/concepts?q=var");
    assert_eq!(body["concepts"], serde_json::json!(["variational autoencoder"]));
    let (_, body) = get_json(&base, "/api/concepts?q=");
    assert_eq!(body["concepts"].as_array().unwrap().len(), 2);
    let (_, body) = get_json(&base, "/api/concepts?q=zz");
    assert_eq!(body["concepts"], serde_json::json!([]));

    let (status, body) = get_json(&base, "/api/concepts/variational%20autoencoder/cards?relations=compare,is-a&k=3");
    assert_eq!(status, 200);
    assert_eq!(body["target"], "variational autoencoder");
    let groups = body["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0]["relation"], "compare");
    assert_eq!(groups[1]["relation"], "is-a");
    for g in groups {
        let cards = g["cards"].as_array().unwrap();
        assert_eq!(cards.len(), 3);
        for card in cards {
            for key in ["text", "reference", "context", "paper_url", "paper_title"] {
                assert!(card[key].is_string(), "card field {key}");
            }
            for (side, owner) in [("description", "text"), ("context", "context")] {
                let len = card[owner].as_str().unwrap().chars().count() as u64;
                let mut last_end = 0;
                for pair in card["highlights"][side].as_array().unwrap() {
                    let (s, e) = (pair[0].as_u64().unwrap(), pair[1].as_u64().unwrap());
                    assert!(s < e && e <= len && s >= last_end, "bad span [{s}, {e}] on {side}");
                    last_end = e;
                }
            }
        }
    }

    let (status, body) = get_json(&base, "/api/concepts/lstm/cards");
    assert_eq!(status, 404);
    assert_eq!(body, serde_json::json!({"error": "unknown_concept"}));
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("coordinated list parse", coordinated_list_parse),
        ("single target parse", single_target_parse),
        ("windowing property", windowing_property),
        ("end-to-end offline pipeline", end_to_end_offline),
        ("selection contract", selection_contract),
        ("frequency-oracle equivalence", frequency_oracle),
        ("filters", filters),
        ("statistics oracles", statistics_oracles),
        ("shared spans vs oracle", shared_spans_oracle),
        ("service contract", service_contract),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(()) => println!("PASS {:>2} {name} ({} ms)", i + 1, start.elapsed().as_millis()),
            Err(payload) => {
                failed += 1;
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {:>2} {name}: {}", i + 1, msg.replace('\n', " "));
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
