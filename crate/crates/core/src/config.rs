//! The run configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotation::qa::QaGates;
use crate::annotation::remote::RemoteConfig;
use crate::baseline::ChatConfig;
use crate::error::{Error, Result};
use crate::extract::SimilarityConfig;
use crate::resources::ResourcePaths;
use crate::score::ScoreConfig;
use crate::select::Thresholds;

/// One annotation provider; providers run in the listed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProviderConfig {
    Heuristic,
    /// Pre-annotated documents, one `<id>.json` per article.
    File { dir: PathBuf },
    Remote(RemoteConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationConfig {
    #[serde(default = "default_providers")]
    pub providers: Vec<ProviderConfig>,
    /// Temporal pattern grammar; the shipped one when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_patterns: Option<PathBuf>,
}

fn default_providers() -> Vec<ProviderConfig> {
    vec![ProviderConfig::Heuristic]
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        AnnotationConfig {
            providers: default_providers(),
            temporal_patterns: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote: Option<RemoteConfig>,
    /// Prompt templates; the shipped set when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompts: Option<PathBuf>,
    #[serde(default)]
    pub gates: QaGates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_output_dir(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chat: Option<ChatConfig>,
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
    /// One-shot example article; the shipped one when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<PathBuf>,
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from("baseline-cache")
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            chat: None,
            cache_dir: default_cache_dir(),
            example: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub annotation: AnnotationConfig,
    #[serde(default)]
    pub qa: QaConfig,
    #[serde(default)]
    pub resources: ResourcePaths,
    #[serde(default)]
    pub similarity: SimilarityConfig,
    #[serde(default)]
    pub scoring: ScoreConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub baseline: BaselineConfig,
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn rebase_opt(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(p) = p {
        rebase(base, p);
    }
}

impl RunConfig {
    /// Parses and validates.
    pub fn parse(src: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(src).map_err(|e| Error::from_toml(&e, src))?;
        config.validate()?;
        Ok(config)
    }

    /// Parses, validates and resolves relative paths against the directory
    /// of the file.
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&src)?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.annotation.providers {
            if let ProviderConfig::File { dir } = p {
                rebase(base, dir);
            }
        }
        rebase_opt(base, &mut self.annotation.temporal_patterns);
        rebase_opt(base, &mut self.qa.prompts);
        let r = &mut self.resources;
        for p in [
            &mut r.action_verbs,
            &mut r.causal_verbs,
            &mut r.causal_major,
            &mut r.causal_minor,
            &mut r.copulative,
            &mut r.method_markers,
            &mut r.synonyms,
            &mut r.gazetteer,
        ] {
            rebase_opt(base, p);
        }
        rebase(base, &mut self.output.dir);
        rebase(base, &mut self.baseline.cache_dir);
        rebase_opt(base, &mut self.baseline.example);
    }

    pub fn validate(&self) -> Result<()> {
        if self.annotation.providers.is_empty() {
            return Err(Error::Config("no annotation provider configured".into()));
        }
        for p in &self.annotation.providers {
            if let ProviderConfig::Remote(r) = p {
                check_endpoint("annotation.providers", &r.endpoint)?;
            }
        }
        if self.qa.enabled {
            match &self.qa.remote {
                Some(r) => check_endpoint("qa.remote", &r.endpoint)?,
                None => return Err(Error::Config("qa is enabled but qa.remote is not set".into())),
            }
        }
        self.qa.gates.validate()?;
        self.similarity
            .validate()
            .map_err(|e| Error::Config(format!("similarity: {e}")))?;
        self.scoring.weights.validate()?;
        self.thresholds.validate()?;
        if let Some(chat) = &self.baseline.chat {
            check_endpoint("baseline.chat", &chat.endpoint)?;
            if !chat.temperature.is_finite() || chat.temperature < 0.0 {
                return Err(Error::Config(format!("baseline.chat.temperature is {}", chat.temperature)));
            }
            if !chat.response_path.is_empty() && !chat.response_path.starts_with('/') {
                return Err(Error::Config(format!(
                    "baseline.chat.response_path '{}' is not a JSON pointer",
                    chat.response_path
                )));
            }
        }
        Ok(())
    }

    /// The configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

fn check_endpoint(field: &str, endpoint: &str) -> Result<()> {
    if endpoint.starts_with("http://") || endpoint.starts_with("https://") {
        Ok(())
    } else {
        Err(Error::Config(format!("{field}: endpoint '{endpoint}' is not an http(s) URL")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn providers_in_order() {
        let src = r#"
[[annotation.providers]]
kind = "file"
dir = "ann"

[[annotation.providers]]
kind = "remote"
endpoint = "http://127.0.0.1:9"
"#;
        let mut c = RunConfig::parse(src).unwrap();
        c.resolve_paths(Path::new("/base"));
        assert_eq!(
            c.annotation.providers[0],
            ProviderConfig::File {
                dir: PathBuf::from("/base/ann")
            }
        );
        assert!(matches!(c.annotation.providers[1], ProviderConfig::Remote(_)));
    }

    #[test]
    fn bad_weight_sum_is_rejected() {
        let src = "[scoring.weights.how]\nverb_tense = 0.5\ncopulative_phrases = 0.3\nprepositions = 0.2\nqa_similarity = 0.5\n";
        assert!(matches!(RunConfig::parse(src), Err(Error::FactorMismatch { .. })));
    }

    #[test]
    fn qa_requires_endpoint() {
        assert!(matches!(RunConfig::parse("[qa]\nenabled = true\n"), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[thresholds]\nwhom = 0.3\n").is_err());
    }
}
