//! One-shot chat-model baseline: prompt assembly, answer parsing, and
//! cached replay of raw responses.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::document::RawArticle;
use crate::error::{Error, Result};
use crate::question::{PerQuestion, Question};

const TEMPLATE: &str = include_str!("../data/baseline/prompt.txt");
const EXAMPLE_ARTICLE: &str = "<<EXAMPLE_ARTICLE>>";
const EXAMPLE_ANSWER: &str = "<<EXAMPLE_ANSWER>>";
const ARTICLE: &str = "<<ARTICLE>>";

/// Key order of the answer object in the prompt.
const KEY_ORDER: [Question; 6] = [
    Question::Who,
    Question::What,
    Question::Where,
    Question::When,
    Question::Why,
    Question::How,
];

/// The one-shot demonstration: an article and its expected answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineExample {
    pub title: String,
    pub body: String,
    pub answers: PerQuestion<Vec<String>>,
}

impl BaselineExample {
    pub fn parse(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::from_json(&e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../data/baseline/example.json")).expect("shipped example is valid")
    }
}

fn render_article(title: &str, body: &str) -> String {
    format!("{title}\n\n{body}")
}

/// Answers as a JSON object with keys in prompt order.
pub fn render_answers(answers: &PerQuestion<Vec<String>>) -> String {
    let lines: Vec<String> = KEY_ORDER
        .iter()
        .map(|&q| {
            let list = serde_json::to_string(answers.get(q)).expect("strings serialize");
            format!("    \"{q}\": {list}")
        })
        .collect();
    format!("{{\n{}\n}}", lines.join(",\n"))
}

/// A fully assembled prompt and its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptBundle {
    /// Fixed instruction text, without the inserted parts.
    pub instructions: String,
    pub example_article: String,
    pub example_answers: String,
    pub article: String,
    /// The prompt sent to the model.
    pub text: String,
}

pub fn build_prompt(article: &RawArticle, example: Option<&BaselineExample>) -> Result<PromptBundle> {
    let example = example.ok_or_else(|| Error::Invalid("the baseline prompt needs a one-shot example".into()))?;
    if article.body.trim().is_empty() {
        return Err(Error::Invalid(format!("{}: empty article body", article.id)));
    }
    let example_article = render_article(&example.title, &example.body);
    let example_answers = render_answers(&example.answers);
    let target = render_article(&article.title, &article.body);
    let text = TEMPLATE
        .replacen(EXAMPLE_ARTICLE, &example_article, 1)
        .replacen(EXAMPLE_ANSWER, &example_answers, 1)
        .replacen(ARTICLE, &target, 1);
    Ok(PromptBundle {
        instructions: TEMPLATE
            .replacen(EXAMPLE_ARTICLE, "", 1)
            .replacen(EXAMPLE_ANSWER, "", 1)
            .replacen(ARTICLE, "", 1),
        example_article,
        example_answers,
        article: target,
        text,
    })
}

fn strip_fences(raw: &str) -> &str {
    let t = raw.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let rest = rest.split_once('\n').map_or("", |(_, r)| r);
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

/// Strict parse of a model response. Code fences around the object are
/// tolerated; the object must have exactly the six question keys, each a
/// string, a list of strings, or null.
pub fn parse_baseline_answer(raw: &str) -> Result<PerQuestion<Vec<String>>> {
    let reject = |message: String| Error::BaselineAnswer {
        message,
        raw: raw.to_string(),
    };
    let value: Value = serde_json::from_str(strip_fences(raw)).map_err(|e| reject(format!("not a JSON object: {e}")))?;
    let Value::Object(map) = value else {
        return Err(reject("top-level value is not an object".into()));
    };
    if let Some(extra) = map.keys().find(|k| !Question::ALL.iter().any(|q| q.as_str() == k.as_str())) {
        return Err(reject(format!("unexpected key '{extra}'")));
    }
    let mut out: PerQuestion<Vec<String>> = PerQuestion::default();
    for q in Question::ALL {
        let v = map.get(q.as_str()).ok_or_else(|| reject(format!("missing key '{q}'")))?;
        *out.get_mut(q) = match v {
            Value::Null => Vec::new(),
            Value::String(s) => vec![s.clone()],
            Value::Array(items) => items
                .iter()
                .map(|i| match i {
                    Value::String(s) => Ok(s.clone()),
                    other => Err(reject(format!("'{q}' holds a non-string item {other}"))),
                })
                .collect::<Result<_>>()?,
            other => return Err(reject(format!("'{q}' holds {other}"))),
        };
    }
    Ok(out)
}

/// For each answer, whether it occurs verbatim in the title or body.
pub fn quotation_check(article: &RawArticle, answers: &PerQuestion<Vec<String>>) -> PerQuestion<Vec<bool>> {
    PerQuestion::from_fn(|q| {
        answers
            .get(q)
            .iter()
            .map(|a| article.body.contains(a.as_str()) || article.title.contains(a.as_str()))
            .collect()
    })
}

/// A chat-completion endpoint taking one user message.
pub trait ChatClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatConfig {
    /// Full URL of the chat-completion endpoint.
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    /// JSON pointer to the reply text in the response body.
    #[serde(default = "default_response_path")]
    pub response_path: String,
    /// Environment variable holding the bearer token, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default = "default_chat_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_response_path() -> String {
    "/choices/0/message/content".into()
}

fn default_chat_timeout_ms() -> u64 {
    120_000
}

#[derive(Debug, Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
}

pub struct HttpChatClient {
    config: ChatConfig,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(config: ChatConfig) -> Self {
        let token = config.api_key_env.as_deref().and_then(|v| std::env::var(v).ok());
        let agent_config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(true)
            .build();
        HttpChatClient {
            agent: ureq::Agent::new_with_config(agent_config),
            token,
            config,
        }
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        let endpoint_err = |message: String| Error::Endpoint {
            endpoint: format!("POST {}", self.config.endpoint),
            message,
        };
        let body = ChatRequest {
            model: &self.config.model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: self.config.temperature,
        };
        let mut req = self.agent.post(&self.config.endpoint);
        if let Some(token) = &self.token {
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        let value: Value = req
            .send_json(&body)
            .and_then(|r| r.into_body().read_json())
            .map_err(|e| endpoint_err(e.to_string()))?;
        value
            .pointer(&self.config.response_path)
            .and_then(Value::as_str)
            .map(String::from)
            .ok_or_else(|| endpoint_err(format!("no text at '{}' in the response", self.config.response_path)))
    }
}

/// Raw responses on disk, one `<id>.txt` per article.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn path_for(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.txt"))
    }

    pub fn get(&self, id: &str) -> Option<String> {
        std::fs::read_to_string(self.path_for(id)).ok()
    }

    /// Writes through a temporary file and a rename so readers never see a
    /// partial response.
    pub fn put(&self, id: &str, raw: &str) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let tmp = self.dir.join(format!(".{id}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, raw).map_err(|e| Error::io(&tmp, e))?;
        let dest = self.path_for(id);
        std::fs::rename(&tmp, &dest).map_err(|e| Error::io(&dest, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BaselineOutcome {
    Answered {
        answers: PerQuestion<Vec<String>>,
        /// Whether each answer is a verbatim quotation of the article.
        verbatim: PerQuestion<Vec<bool>>,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRun {
    pub outcomes: BTreeMap<String, BaselineOutcome>,
    /// Requests sent to the client during this run.
    pub requests: usize,
}

impl BaselineRun {
    /// Answered articles only.
    pub fn answers(&self) -> BTreeMap<String, PerQuestion<Vec<String>>> {
        self.outcomes
            .iter()
            .filter_map(|(id, o)| match o {
                BaselineOutcome::Answered { answers, .. } => Some((id.clone(), answers.clone())),
                BaselineOutcome::Failed { .. } => None,
            })
            .collect()
    }

    pub fn failures(&self) -> Vec<(&str, &str)> {
        self.outcomes
            .iter()
            .filter_map(|(id, o)| match o {
                BaselineOutcome::Failed { error } => Some((id.as_str(), error.as_str())),
                BaselineOutcome::Answered { .. } => None,
            })
            .collect()
    }
}

/// Cache-first baseline run. On a miss the article is sent to the client
/// and the raw response is cached before parsing. Failures are recorded per
/// article; the run continues. Articles are processed in parallel on the
/// current rayon pool.
pub fn run_baseline(
    articles: &[RawArticle],
    client: Option<&dyn ChatClient>,
    cache: &ResponseCache,
    example: &BaselineExample,
) -> BaselineRun {
    let requests = AtomicUsize::new(0);
    let results: Vec<(String, BaselineOutcome)> = articles
        .par_iter()
        .map(|article| {
            let raw = match cache.get(&article.id) {
                Some(raw) => Ok(raw),
                None => match client {
                    None => Err(Error::Invalid("no cached response and no chat endpoint configured".into())),
                    Some(c) => build_prompt(article, Some(example)).and_then(|p| {
                        requests.fetch_add(1, Ordering::Relaxed);
                        let raw = c.complete(&p.text)?;
                        cache.put(&article.id, &raw)?;
                        Ok(raw)
                    }),
                },
            };
            let outcome = match raw.and_then(|r| parse_baseline_answer(&r)) {
                Ok(answers) => BaselineOutcome::Answered {
                    verbatim: quotation_check(article, &answers),
                    answers,
                },
                Err(e) => {
                    log::warn!("{}: baseline failed: {e}", article.id);
                    BaselineOutcome::Failed { error: e.to_string() }
                }
            };
            (article.id.clone(), outcome)
        })
        .collect();
    BaselineRun {
        outcomes: results.into_iter().collect(),
        requests: requests.into_inner(),
    }
}
