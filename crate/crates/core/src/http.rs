//! Blocking JSON-over-HTTP calls with bounded retries, plus a small bounded
//! worker pool shared by the remote scorer and the remote generator.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum CallError {
    /// Connection failure, timeout, or a retryable status after the retry budget.
    Transport(String),
    /// Non-retryable status or malformed payload.
    Protocol(String),
}

pub(crate) struct JsonClient {
    agent: ureq::Agent,
    endpoint: String,
    auth: Option<(String, String)>,
    max_retries: u32,
    backoff: Duration,
}

impl JsonClient {
    pub(crate) fn new(endpoint: &str, timeout: Duration, max_retries: u32, auth: Option<(String, String)>) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        JsonClient { agent, endpoint: endpoint.to_string(), auth, max_retries, backoff: Duration::from_millis(50) }
    }

    fn attempt<Req: Serialize, Resp: DeserializeOwned>(&self, body: &Req) -> Result<Resp, (bool, CallError)> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some((name, value)) = &self.auth {
            req = req.header(name.as_str(), value.as_str());
        }
        let mut resp = req.send_json(body).map_err(|e| (true, CallError::Transport(e.to_string())))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err((true, CallError::Transport(format!("status {status}"))));
        }
        if status >= 400 {
            return Err((false, CallError::Protocol(format!("status {status}"))));
        }
        resp.body_mut().read_json::<Resp>().map_err(|e| (false, CallError::Protocol(format!("malformed payload: {e}"))))
    }

    /// Posts `body`, retrying transport failures up to `max_retries` times.
    pub(crate) fn post<Req: Serialize, Resp: DeserializeOwned>(&self, body: &Req) -> Result<Resp, CallError> {
        let mut attempt = 0;
        loop {
            match self.attempt(body) {
                Ok(r) => return Ok(r),
                Err((true, e)) if attempt < self.max_retries => {
                    attempt += 1;
                    log::debug!("retrying {} after {:?} (attempt {attempt})", self.endpoint, e);
                    std::thread::sleep(self.backoff * attempt);
                }
                Err((_, e)) => return Err(e),
            }
        }
    }
}

/// Bearer auth from an environment variable, if it is set and nonempty.
pub(crate) fn bearer_from_env(header: &str, var: &str) -> Option<(String, String)> {
    std::env::var(var).ok().filter(|v| !v.is_empty()).map(|token| (header.to_string(), format!("Bearer {token}")))
}

/// Maps `f` over `items` with at most `workers` calls in flight, preserving
/// input order in the output.
pub(crate) fn map_bounded<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = workers.max(1).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot filled")).collect()
}
