//! HTTP client for the annotation sidecar: `POST /annotate`, `POST /qa` and
//! `GET /health`.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use crate::annotation::qa::QaProvider;
use crate::annotation::{AnnotationProvider, Capabilities};
use crate::document::{Layers, RawArticle};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8000`.
    pub endpoint: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_pool")]
    pub pool_size: usize,
}

fn default_timeout_ms() -> u64 {
    30_000
}

fn default_retries() -> u32 {
    2
}

fn default_pool() -> usize {
    4
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout_ms: default_timeout_ms(),
            retries: default_retries(),
            pool_size: default_pool(),
        }
    }
}

#[derive(Debug, Serialize)]
struct AnnotateRequest<'a> {
    id: &'a str,
    title: &'a str,
    body: &'a str,
}

#[derive(Debug, Serialize)]
struct QaRequest<'a> {
    context: &'a str,
    question: &'a str,
}

#[derive(Debug, Deserialize)]
struct QaResponse {
    answer: String,
    score: f64,
}

#[derive(Debug, Deserialize)]
struct HealthResponse {
    status: String,
}

/// Client of the sidecar; serves both as annotation and Q&A provider.
#[derive(Debug, Clone)]
pub struct RemoteProvider {
    config: RemoteConfig,
    agent: Agent,
}

impl RemoteProvider {
    pub fn new(config: RemoteConfig) -> Self {
        let agent_config = Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .max_idle_connections(config.pool_size.max(1))
            .max_idle_connections_per_host(config.pool_size.max(1))
            .http_status_as_error(true)
            .build();
        RemoteProvider {
            agent: Agent::new_with_config(agent_config),
            config,
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.config.endpoint.trim_end_matches('/'))
    }

    fn with_retries<T>(&self, label: &str, mut f: impl FnMut() -> std::result::Result<T, ureq::Error>) -> Result<T> {
        let mut attempt = 0;
        loop {
            match f() {
                Ok(v) => return Ok(v),
                Err(e) => {
                    let retryable = match &e {
                        ureq::Error::StatusCode(code) => *code >= 500,
                        ureq::Error::Json(_) => false,
                        _ => true,
                    };
                    if !retryable || attempt >= self.config.retries {
                        return Err(Error::Endpoint {
                            endpoint: label.to_string(),
                            message: e.to_string(),
                        });
                    }
                    attempt += 1;
                    log::debug!("{label}: attempt {attempt} failed ({e}), retrying");
                    thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
                }
            }
        }
    }

    /// `GET /health`, returning the reported status (`ready` or `loading`).
    pub fn health(&self) -> Result<String> {
        let url = self.url("/health");
        let label = format!("GET {url}");
        let resp: HealthResponse = self.with_retries(&label, || {
            self.agent.get(&url).call()?.into_body().read_json()
        })?;
        Ok(resp.status)
    }
}

impl AnnotationProvider for RemoteProvider {
    fn name(&self) -> &str {
        "remote"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            qa: false,
            ..Capabilities::all()
        }
    }

    fn annotate(&self, article: &RawArticle) -> Result<Layers> {
        let url = self.url("/annotate");
        let label = format!("POST {url}");
        let request = AnnotateRequest {
            id: &article.id,
            title: &article.title,
            body: &article.body,
        };
        self.with_retries(&label, || {
            self.agent.post(&url).send_json(&request)?.into_body().read_json()
        })
    }
}

impl QaProvider for RemoteProvider {
    fn name(&self) -> &str {
        "remote"
    }

    fn answer(&self, context: &str, question: &str) -> Result<(String, f64)> {
        let url = self.url("/qa");
        let label = format!("POST {url}");
        let request = QaRequest { context, question };
        let resp: QaResponse = self.with_retries(&label, || {
            self.agent.post(&url).send_json(&request)?.into_body().read_json()
        })?;
        Ok((resp.answer, resp.score))
    }
}
