//! Provider contract that turns a raw article into annotation layers, plus
//! the built-in detectors that always run on top of provider output.

pub mod file;
pub mod heuristic;
pub mod qa;
pub mod remote;
pub mod temporal;

use serde::{Deserialize, Serialize};

use crate::document::{
    AnnotatedDocument, EntityLabel, Layers, Pos, RawArticle, TemporalClass, TemporalSpan,
};
use crate::error::{Error, Result};
use crate::text::normalize_surface;

pub use temporal::{merge_adjacent_temporals, TemporalGrammar};

/// Layers a provider promises to fill. Layers it does not declare are
/// ignored even if present in its output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    /// Sentences and tokens, which always travel together.
    pub segmentation: bool,
    pub pos: bool,
    pub chunks: bool,
    pub ner: bool,
    pub coref: bool,
    pub qa: bool,
}

impl Capabilities {
    pub fn all() -> Self {
        Capabilities {
            segmentation: true,
            pos: true,
            chunks: true,
            ner: true,
            coref: true,
            qa: true,
        }
    }
}

pub trait AnnotationProvider: Send + Sync {
    fn name(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    fn annotate(&self, article: &RawArticle) -> Result<Layers>;
}

/// Runs the providers in order and merges their layers; the first provider to
/// fill a layer wins. The temporal detector then runs over the merged
/// document and its output is unioned with provider temporals and DATE
/// entities before adjacent spans are merged.
pub fn annotate(
    article: &RawArticle,
    providers: &[&dyn AnnotationProvider],
    grammar: &TemporalGrammar,
) -> Result<AnnotatedDocument> {
    if !providers
        .iter()
        .any(|p| p.capabilities().segmentation && p.capabilities().pos)
    {
        return Err(Error::Config(
            "no annotation provider supplies sentences, tokens and part-of-speech tags".into(),
        ));
    }
    let mut merged = Layers::default();
    for provider in providers {
        let caps = provider.capabilities();
        let wants = (caps.segmentation && merged.sentences.is_empty())
            || (caps.chunks && merged.chunks.is_empty())
            || (caps.ner && merged.entities.is_empty())
            || (caps.coref && merged.coref_chains.is_empty())
            || (caps.qa && merged.qa_answers.is_empty());
        if !wants {
            continue;
        }
        let layers = provider.annotate(article)?;
        merge_into(&mut merged, layers, caps, provider.name());
    }
    let mut doc = AnnotatedDocument::from_parts(article.clone(), merged);
    let mut temporals = std::mem::take(&mut doc.temporals);
    temporals.extend(grammar.detect_in_document(&doc));
    temporals.extend(
        doc.entities
            .iter()
            .filter(|e| e.label == EntityLabel::Date)
            .map(|e| TemporalSpan {
                klass: TemporalClass::Date,
                span: e.span.clone(),
            }),
    );
    doc.temporals = merge_adjacent_temporals(&temporals, &doc);
    let violations = doc.validate();
    if !violations.is_empty() {
        return Err(Error::Validation {
            id: article.id.clone(),
            violations,
        });
    }
    Ok(doc)
}

fn merge_into(merged: &mut Layers, layers: Layers, caps: Capabilities, provider: &str) {
    if caps.segmentation && merged.sentences.is_empty() && !layers.sentences.is_empty() {
        merged.sentences = layers.sentences;
        merged.tokens = layers.tokens.clone();
    }
    if caps.chunks && merged.chunks.is_empty() && !layers.chunks.is_empty() {
        if merged.tokens != layers.tokens {
            // token indices refer to this provider's tokens; remap by span
            merged.chunks = layers
                .chunks
                .into_iter()
                .filter_map(|mut c| {
                    let head = layers.tokens.get(c.head_token)?;
                    match merged.tokens.iter().position(|t| t.span == head.span) {
                        Some(i) => {
                            c.head_token = i;
                            Some(c)
                        }
                        None => {
                            log::warn!(
                                "{provider}: chunk {:?} dropped, head token has no counterpart",
                                c.span.text
                            );
                            None
                        }
                    }
                })
                .collect();
        } else {
            merged.chunks = layers.chunks;
        }
    }
    if caps.ner && merged.entities.is_empty() {
        merged.entities = layers.entities;
    }
    if merged.temporals.is_empty() {
        merged.temporals = layers.temporals;
    }
    if caps.coref && merged.coref_chains.is_empty() {
        merged.coref_chains = layers.coref_chains;
    }
    if caps.qa && merged.qa_answers.is_empty() {
        merged.qa_answers = layers.qa_answers;
    }
}

/// Document token indices of gerunds in one sentence: a VERB ending in "ant"
/// directly preceded by the preposition "en".
pub fn detect_gerunds(doc: &AnnotatedDocument, sentence: usize) -> Vec<usize> {
    let idx = doc.token_indices(sentence);
    idx.windows(2)
        .filter(|w| {
            let (prev, tok) = (&doc.tokens[w[0]], &doc.tokens[w[1]]);
            tok.pos == Pos::Verb
                && normalize_surface(&tok.span.text).ends_with("ant")
                && prev.pos == Pos::Adp
                && normalize_surface(&prev.span.text) == "en"
        })
        .map(|w| w[1])
        .collect()
}
