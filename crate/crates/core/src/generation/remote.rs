use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::prompt::{build_prompt, ExemplarBank};
use super::{GenerationError, GenerationJob, Generator, GeneratorBackend, RawGeneration};
use crate::http::{bearer_from_env, map_bounded, CallError, JsonClient};

pub const GENERATOR_TOKEN_ENV: &str = "ACCORD_GENERATOR_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteGeneratorConfig {
    pub endpoint: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub max_tokens: u32,
    pub temperature: f64,
    pub auth_header: String,
}

impl Default for RemoteGeneratorConfig {
    fn default() -> Self {
        RemoteGeneratorConfig {
            endpoint: String::new(),
            timeout_ms: 30_000,
            max_retries: 3,
            max_in_flight: 4,
            max_tokens: 100,
            temperature: 0.0,
            auth_header: "Authorization".into(),
        }
    }
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

/// Keeps the completion up to the first blank line.
pub fn trim_completion(text: &str) -> &str {
    let mut end = text.len();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim().is_empty() && offset > 0 && !text[..offset].trim().is_empty() {
            end = offset;
            break;
        }
        offset += line.len();
    }
    text[..end].trim()
}

pub struct RemoteGenerator {
    client: JsonClient,
    cfg: RemoteGeneratorConfig,
    bank: ExemplarBank,
}

impl RemoteGenerator {
    pub fn new(cfg: RemoteGeneratorConfig, bank: ExemplarBank) -> Result<Self, GenerationError> {
        if cfg.endpoint.is_empty() {
            return Err(GenerationError::Config("generator endpoint is empty".into()));
        }
        if cfg.max_in_flight == 0 {
            return Err(GenerationError::Config("max_in_flight must be positive".into()));
        }
        let client = JsonClient::new(
            &cfg.endpoint,
            Duration::from_millis(cfg.timeout_ms),
            cfg.max_retries,
            bearer_from_env(&cfg.auth_header, GENERATOR_TOKEN_ENV),
        );
        Ok(RemoteGenerator { client, cfg, bank })
    }

    fn generate_one(&self, job: &GenerationJob) -> Result<RawGeneration, GenerationError> {
        let key = job.key();
        let prompt = build_prompt(&job.context, job.relation, &self.bank)?;
        let rendered = prompt.render();
        let req = CompletionRequest { prompt: &rendered, max_tokens: self.cfg.max_tokens, temperature: self.cfg.temperature };
        let resp: CompletionResponse = self.client.post(&req).map_err(|e| match e {
            CallError::Transport(message) => GenerationError::Transport { key: key.clone(), message },
            CallError::Protocol(message) => GenerationError::Protocol { key: key.clone(), message },
        })?;
        let text = trim_completion(&resp.text);
        if text.is_empty() {
            return Err(GenerationError::Unparseable(format!("empty completion for {key}")));
        }
        Ok(RawGeneration {
            context_id: job.context.context_id.clone(),
            target: job.context.target_concept.clone(),
            relation: job.relation,
            text: text.to_string(),
            backend: GeneratorBackend::Remote,
        })
    }
}

impl Generator for RemoteGenerator {
    /// Jobs sharing a (context, target, relation) key are sent once; every
    /// duplicate receives the stored result.
    fn generate_batch(&self, jobs: &[GenerationJob]) -> Vec<Result<RawGeneration, GenerationError>> {
        let mut first_of: HashMap<String, usize> = HashMap::new();
        let mut unique: Vec<&GenerationJob> = Vec::new();
        let slot: Vec<usize> = jobs
            .iter()
            .map(|j| {
                *first_of.entry(j.key()).or_insert_with(|| {
                    unique.push(j);
                    unique.len() - 1
                })
            })
            .collect();
        let results = map_bounded(&unique, self.cfg.max_in_flight, |j| self.generate_one(j));
        slot.into_iter().map(|i| results[i].clone()).collect()
    }
}
