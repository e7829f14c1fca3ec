use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{binary_prediction, BinaryPrediction, ExtractionError, Extractor, ExtractorConfig, RelationScores, RelationType};
use crate::corpus::DemarcatedContext;
use crate::http::{bearer_from_env, map_bounded, CallError, JsonClient};

pub const SCORER_TOKEN_ENV: &str = "ACCORD_SCORER_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteScorerConfig {
    pub endpoint: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub batch_size: usize,
    pub auth_header: String,
}

impl Default for RemoteScorerConfig {
    fn default() -> Self {
        RemoteScorerConfig {
            endpoint: String::new(),
            timeout_ms: 30_000,
            max_retries: 3,
            max_in_flight: 4,
            batch_size: 8,
            auth_header: "Authorization".into(),
        }
    }
}

#[derive(Serialize)]
struct WireItem<'a> {
    context_id: String,
    text: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    mode: &'static str,
    items: Vec<WireItem<'a>>,
}

#[derive(Deserialize)]
struct BinaryItem {
    context_id: String,
    score: f64,
}

#[derive(Deserialize)]
struct RelationsItem {
    context_id: String,
    scores: HashMap<String, f64>,
}

#[derive(Deserialize)]
struct WireResponse<T> {
    items: Vec<T>,
}

/// HTTP client for an external classifier. Items travel in batches keyed by
/// the item id (`context_id|target`); a failed batch is retried item by item
/// so one bad context cannot sink its neighbours.
pub struct RemoteScorer {
    client: JsonClient,
    cfg: RemoteScorerConfig,
    binary_threshold: f64,
    relation_threshold: f64,
}

impl RemoteScorer {
    pub fn new(cfg: &ExtractorConfig) -> Result<Self, ExtractionError> {
        cfg.validate()?;
        let remote = cfg.remote.clone().ok_or_else(|| ExtractionError::Config("missing scorer settings".into()))?;
        if remote.endpoint.is_empty() {
            return Err(ExtractionError::Config("scorer endpoint is empty".into()));
        }
        if remote.batch_size == 0 || remote.max_in_flight == 0 {
            return Err(ExtractionError::Config("batch_size and max_in_flight must be positive".into()));
        }
        let client = JsonClient::new(
            &remote.endpoint,
            Duration::from_millis(remote.timeout_ms),
            remote.max_retries,
            bearer_from_env(&remote.auth_header, SCORER_TOKEN_ENV),
        );
        Ok(RemoteScorer { client, cfg: remote, binary_threshold: cfg.binary_threshold, relation_threshold: cfg.relation_threshold })
    }

    fn call<T: for<'de> Deserialize<'de> + Keyed>(
        &self,
        mode: &'static str,
        batch: &[DemarcatedContext],
    ) -> Result<HashMap<String, T>, CallError> {
        let req = WireRequest {
            mode,
            items: batch.iter().map(|c| WireItem { context_id: c.item_id(), text: &c.text_with_markers }).collect(),
        };
        let resp: WireResponse<T> = self.client.post(&req)?;
        Ok(resp.items.into_iter().map(|i| (i.key().to_string(), i)).collect())
    }

    fn run<T, R>(
        &self,
        mode: &'static str,
        items: &[DemarcatedContext],
        convert: impl Fn(&DemarcatedContext, T) -> Result<R, String> + Sync,
    ) -> Vec<Result<R, ExtractionError>>
    where
        T: for<'de> Deserialize<'de> + Keyed + Send,
        R: Send,
    {
        let batches: Vec<&[DemarcatedContext]> = items.chunks(self.cfg.batch_size).collect();
        let per_batch = map_bounded(&batches, self.cfg.max_in_flight, |batch| {
            let first = self.call::<T>(mode, batch).map(|mut got| {
                batch.iter().map(|c| got.remove(&c.item_id())).collect::<Vec<_>>()
            });
            match first {
                Ok(found) if found.iter().all(Option::is_some) || batch.len() == 1 => found
                    .into_iter()
                    .zip(batch.iter())
                    .map(|(f, c)| match f {
                        Some(v) => convert(c, v).map_err(|m| protocol(c, m)),
                        None => Err(protocol(c, "response is missing this item".into())),
                    })
                    .collect::<Vec<_>>(),
                Err(e) if batch.len() == 1 => vec![Err(to_error(&batch[0], e))],
                _ => batch
                    .iter()
                    .map(|c| match self.call::<T>(mode, std::slice::from_ref(c)) {
                        Ok(mut got) => match got.remove(&c.item_id()) {
                            Some(v) => convert(c, v).map_err(|m| protocol(c, m)),
                            None => Err(protocol(c, "response is missing this item".into())),
                        },
                        Err(e) => Err(to_error(c, e)),
                    })
                    .collect(),
            }
        });
        per_batch.into_iter().flatten().collect()
    }
}

trait Keyed {
    fn key(&self) -> &str;
}

impl Keyed for BinaryItem {
    fn key(&self) -> &str {
        &self.context_id
    }
}

impl Keyed for RelationsItem {
    fn key(&self) -> &str {
        &self.context_id
    }
}

fn protocol(c: &DemarcatedContext, message: String) -> ExtractionError {
    ExtractionError::Protocol { item_id: c.item_id(), message }
}

fn to_error(c: &DemarcatedContext, e: CallError) -> ExtractionError {
    match e {
        CallError::Transport(message) => ExtractionError::Transport { item_id: c.item_id(), message },
        CallError::Protocol(message) => ExtractionError::Protocol { item_id: c.item_id(), message },
    }
}

fn check_unit(score: f64) -> Result<f64, String> {
    if (0.0..=1.0).contains(&score) {
        Ok(score)
    } else {
        Err(format!("score {score} outside [0, 1]"))
    }
}

impl Extractor for RemoteScorer {
    fn classify_binary_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<BinaryPrediction, ExtractionError>> {
        self.run("binary", items, |c, item: BinaryItem| {
            Ok(binary_prediction(c, check_unit(item.score)?, self.binary_threshold))
        })
    }

    fn classify_relations_batch(&self, items: &[DemarcatedContext]) -> Vec<Result<RelationScores, ExtractionError>> {
        self.run("relations", items, |c, item: RelationsItem| {
            let mut raw = BTreeMap::new();
            for r in RelationType::ALL {
                let s = item.scores.get(r.as_str()).ok_or_else(|| format!("missing score for {r}"))?;
                raw.insert(r, check_unit(*s)?);
            }
            Ok(RelationScores::from_scores(c, raw, self.relation_threshold))
        })
    }
}
