//! The adapter abstraction: one `send` per attempt, returning extracted text
//! plus usage. HTTP adapters retry transport-level failures (connect errors,
//! 429, 5xx) with exponential backoff and full jitter; that budget is
//! separate from the harness's JSON-parse retries.

use std::time::{Duration, Instant};

use async_trait::async_trait;
use rand::Rng;

use mazeval_core::report::TokenUsage;

use crate::error::HarnessError;
use crate::provider::{extract_response, HttpRequestSpec, ProviderRequest};

/// One attempt's outcome: the model text, usage, flags, and how long it took.
#[derive(Debug, Clone, PartialEq)]
pub struct AdapterResponse {
    pub text: String,
    pub tokens: TokenUsage,
    pub usage_missing: bool,
    pub truncated: bool,
    pub latency_s: f64,
}

#[async_trait]
pub trait SolverAdapter: Send + Sync {
    async fn send(&self, request: &ProviderRequest) -> Result<AdapterResponse, HarnessError>;
}

const TRANSPORT_ATTEMPTS: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(500);
const BACKOFF_CAP: Duration = Duration::from_secs(8);

pub struct HttpAdapter {
    client: reqwest::Client,
}

impl HttpAdapter {
    pub fn new(client: reqwest::Client) -> HttpAdapter {
        HttpAdapter { client }
    }

    async fn send_http(&self, spec: &HttpRequestSpec) -> Result<AdapterResponse, HarnessError> {
        let started = Instant::now();
        let mut last_error = String::new();
        for attempt in 0..TRANSPORT_ATTEMPTS {
            if attempt > 0 {
                tokio::time::sleep(backoff_delay(attempt)).await;
            }
            let mut req = self.client.post(&spec.url);
            for (name, value) in &spec.headers {
                req = req.header(name, value);
            }
            match req.json(&spec.body).send().await {
                Err(e) => {
                    last_error = format!("request error: {e}");
                }
                Ok(resp) => {
                    let status = resp.status();
                    if status.as_u16() == 429 || status.is_server_error() {
                        last_error = format!("retryable status {status}");
                        continue;
                    }
                    let bytes = resp
                        .bytes()
                        .await
                        .map_err(|e| HarnessError::Transport(format!("body read: {e}")))?;
                    if !status.is_success() {
                        return Err(HarnessError::Transport(format!(
                            "status {status}: {}",
                            String::from_utf8_lossy(&bytes[..bytes.len().min(300)])
                        )));
                    }
                    let body: serde_json::Value = serde_json::from_slice(&bytes)
                        .map_err(|e| HarnessError::BadPayload(format!("non-JSON body: {e}")))?;
                    let extracted = extract_response(spec.adapter_kind, &body)?;
                    return Ok(AdapterResponse {
                        text: extracted.text,
                        tokens: extracted.tokens,
                        usage_missing: extracted.usage_missing,
                        truncated: extracted.truncated,
                        latency_s: started.elapsed().as_secs_f64(),
                    });
                }
            }
        }
        Err(HarnessError::Transport(format!(
            "gave up after {TRANSPORT_ATTEMPTS} attempts: {last_error}"
        )))
    }
}

fn backoff_delay(attempt: u32) -> Duration {
    let cap = BACKOFF_CAP.min(BACKOFF_BASE * 2u32.pow(attempt));
    // Full jitter.
    let micros = rand::rng().random_range(0..=cap.as_micros() as u64);
    Duration::from_micros(micros)
}

#[async_trait]
impl SolverAdapter for HttpAdapter {
    async fn send(&self, request: &ProviderRequest) -> Result<AdapterResponse, HarnessError> {
        match request {
            ProviderRequest::Http(spec) => self.send_http(spec).await,
            ProviderRequest::Local(_) => Err(HarnessError::InvalidConfig(
                "http adapter received a local request".into(),
            )),
        }
    }
}
