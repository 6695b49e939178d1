//! The full article pipeline: annotation, optional Q&A chain, extraction,
//! scoring and selection.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::annotation::file::FileProvider;
use crate::annotation::heuristic::HeuristicProvider;
use crate::annotation::qa::{run_qa_chain, QaCall, QaGates, QaPromptSet, QaProvider};
use crate::annotation::remote::RemoteProvider;
use crate::annotation::{annotate, AnnotationProvider, TemporalGrammar};
use crate::config::{ProviderConfig, RunConfig};
use crate::document::{AnnotatedDocument, RawArticle};
use crate::error::Result;
use crate::extract::{extract_all, SimilarityConfig};
use crate::question::PerQuestion;
use crate::resources::Resources;
use crate::score::{score_all, ScoreConfig, ScoredCandidate};
use crate::select::{select, AnswerSet, Thresholds};

pub struct QaStage {
    pub provider: Box<dyn QaProvider>,
    pub prompts: QaPromptSet,
    pub gates: QaGates,
}

pub struct Pipeline {
    pub providers: Vec<Box<dyn AnnotationProvider>>,
    pub grammar: TemporalGrammar,
    pub qa: Option<QaStage>,
    pub resources: Resources,
    pub similarity: SimilarityConfig,
    pub scoring: ScoreConfig,
    pub thresholds: Thresholds,
}

/// An annotated and scored article, before thresholds apply.
#[derive(Debug, Clone)]
pub struct ScoredArticle {
    pub document: AnnotatedDocument,
    pub scored: PerQuestion<Vec<ScoredCandidate>>,
    pub qa_calls: Vec<QaCall>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArticleReport {
    #[serde(flatten)]
    pub answers: AnswerSet,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ArticleReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

impl Pipeline {
    /// Heuristic annotation, shipped resources and default scoring.
    pub fn heuristic() -> Self {
        let resources = Resources::builtin();
        Pipeline {
            providers: vec![Box::new(HeuristicProvider::new(resources.gazetteer.clone()))],
            grammar: TemporalGrammar::builtin(),
            qa: None,
            resources,
            similarity: SimilarityConfig::default(),
            scoring: ScoreConfig::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn from_config(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let resources = Resources::load(&config.resources)?;
        let providers = config
            .annotation
            .providers
            .iter()
            .map(|p| -> Box<dyn AnnotationProvider> {
                match p {
                    ProviderConfig::Heuristic => Box::new(HeuristicProvider::new(resources.gazetteer.clone())),
                    ProviderConfig::File { dir } => Box::new(FileProvider::new(dir)),
                    ProviderConfig::Remote(r) => Box::new(RemoteProvider::new(r.clone())),
                }
            })
            .collect();
        let grammar = match &config.annotation.temporal_patterns {
            Some(p) => TemporalGrammar::load(p)?,
            None => TemporalGrammar::builtin(),
        };
        let qa = match (&config.qa.enabled, &config.qa.remote) {
            (true, Some(remote)) => Some(QaStage {
                provider: Box::new(RemoteProvider::new(remote.clone())),
                prompts: match &config.qa.prompts {
                    Some(p) => QaPromptSet::load(p)?,
                    None => QaPromptSet::builtin(),
                },
                gates: config.qa.gates,
            }),
            _ => None,
        };
        Ok(Pipeline {
            providers,
            grammar,
            qa,
            resources,
            similarity: config.similarity,
            scoring: config.scoring.clone(),
            thresholds: config.thresholds,
        })
    }

    /// Annotation layers, with Q&A answers from the chain when it is enabled.
    pub fn annotate(&self, article: &RawArticle) -> Result<(AnnotatedDocument, Vec<QaCall>, Vec<String>)> {
        let providers: Vec<&dyn AnnotationProvider> = self.providers.iter().map(|p| p.as_ref()).collect();
        let mut doc = annotate(article, &providers, &self.grammar)?;
        let mut warnings = Vec::new();
        let mut calls = Vec::new();
        if let Some(qa) = &self.qa {
            let outcome = run_qa_chain(&doc, qa.provider.as_ref(), &qa.prompts, &qa.gates);
            if let Some(w) = outcome.warning {
                log::warn!("{w}");
                warnings.push(w);
            }
            doc.qa_answers = outcome.answers;
            calls = outcome.calls;
        }
        Ok((doc, calls, warnings))
    }

    pub fn score_document(&self, doc: &AnnotatedDocument) -> PerQuestion<Vec<ScoredCandidate>> {
        let candidates = extract_all(doc, &self.resources, &self.similarity);
        score_all(candidates, doc, &self.resources.gazetteer, &self.similarity, &self.scoring)
    }

    pub fn score(&self, article: &RawArticle) -> Result<ScoredArticle> {
        let (document, qa_calls, warnings) = self.annotate(article)?;
        let scored = self.score_document(&document);
        Ok(ScoredArticle {
            document,
            scored,
            qa_calls,
            warnings,
        })
    }

    pub fn select(&self, scored: &ScoredArticle) -> ArticleReport {
        ArticleReport {
            answers: select(
                &scored.document.article.id,
                &scored.scored,
                &self.thresholds,
                &self.scoring.weights,
            ),
            warnings: scored.warnings.clone(),
        }
    }

    pub fn process(&self, article: &RawArticle) -> Result<ArticleReport> {
        Ok(self.select(&self.score(article)?))
    }

    /// Scores every article on the current rayon pool; results are keyed by
    /// article id.
    pub fn score_many(&self, articles: &[RawArticle]) -> BTreeMap<String, Result<ScoredArticle>> {
        articles
            .par_iter()
            .map(|a| (a.id.clone(), self.score(a)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    }

    pub fn process_many(&self, articles: &[RawArticle]) -> BTreeMap<String, Result<ArticleReport>> {
        articles
            .par_iter()
            .map(|a| (a.id.clone(), self.process(a)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    }
}
