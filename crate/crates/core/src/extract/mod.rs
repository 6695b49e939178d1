//! Candidate extraction: the action (who, what), environment (when, where),
//! cause (why) and method (how) extractors.

mod action;
mod cause;
mod environment;
mod method;
pub mod similarity;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::document::{AnnotatedDocument, ChunkKind, EntityLabel, Span, TemporalClass};
use crate::question::{PerQuestion, Question};
use crate::resources::Resources;

pub use action::{extract_what, extract_who};
pub use cause::extract_why;
pub use environment::{extract_when, extract_where};
pub use method::extract_how;
pub use similarity::{long_words, similarity, similarity_with, Measure, SimilarityConfig};

/// Where a candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Ner,
    NpSubject,
    VpSequence,
    ActionVerb,
    TitleSimilar,
    TemporalRegex,
    CausalVerb,
    CausalMarker,
    Gerund,
    Preposition,
    Qa,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Ner => "NER",
            Provenance::NpSubject => "NP_SUBJECT",
            Provenance::VpSequence => "VP_SEQUENCE",
            Provenance::ActionVerb => "ACTION_VERB",
            Provenance::TitleSimilar => "TITLE_SIMILAR",
            Provenance::TemporalRegex => "TEMPORAL_REGEX",
            Provenance::CausalVerb => "CAUSAL_VERB",
            Provenance::CausalMarker => "CAUSAL_MARKER",
            Provenance::Gerund => "GERUND",
            Provenance::Preposition => "PREPOSITION",
            Provenance::Qa => "QA",
        }
    }
}

/// Values computed during extraction and read by the scorers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Features {
    /// Number of tokens covered by the candidate span.
    pub token_count: usize,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub entity_labels: BTreeSet<EntityLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klass: Option<TemporalClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gazetteer_id: Option<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub major_conj_count: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub minor_conj_count: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub causal_verb_count: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub copulative_phrase_count: usize,
    #[serde(default, skip_serializing_if = "is_false")]
    pub has_gerund: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub has_future: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub has_preposition: bool,
    /// The candidate's sentence uses an action verb.
    #[serde(default, skip_serializing_if = "is_false")]
    pub has_action_verb: bool,
    /// The candidate's sentence contains the chunk pattern NP, VP, NP.
    #[serde(default, skip_serializing_if = "is_false")]
    pub has_np_vp_np: bool,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Features {
    fn absorb(&mut self, other: &Features) {
        self.entity_labels.extend(other.entity_labels.iter().copied());
        self.klass = self.klass.max(other.klass);
        if self.gazetteer_id.is_none() {
            self.gazetteer_id.clone_from(&other.gazetteer_id);
        }
        self.major_conj_count = self.major_conj_count.max(other.major_conj_count);
        self.minor_conj_count = self.minor_conj_count.max(other.minor_conj_count);
        self.causal_verb_count = self.causal_verb_count.max(other.causal_verb_count);
        self.copulative_phrase_count = self.copulative_phrase_count.max(other.copulative_phrase_count);
        self.has_gerund |= other.has_gerund;
        self.has_future |= other.has_future;
        self.has_preposition |= other.has_preposition;
        self.has_action_verb |= other.has_action_verb;
        self.has_np_vp_np |= other.has_np_vp_np;
    }
}

/// A text span proposed as an answer to one question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub question: Question,
    pub span: Span,
    pub text: String,
    /// Sentence of the first mention.
    pub sentence_index: usize,
    pub provenance: BTreeSet<Provenance>,
    pub features: Features,
    /// Spans of every mention merged into this candidate, in document order.
    pub mentions: Vec<Span>,
}

impl Candidate {
    /// Builds a candidate for `span`, which must lie inside a sentence.
    pub fn new(question: Question, doc: &AnnotatedDocument, span: Span, tag: Provenance) -> Option<Self> {
        let sentence_index = doc.sentence_at(span.start)?;
        let token_count = doc
            .tokens
            .iter()
            .filter(|t| span.contains(&t.span))
            .count()
            .max(1);
        Some(Candidate {
            question,
            text: span.text.clone(),
            mentions: vec![span.clone()],
            span,
            sentence_index,
            provenance: BTreeSet::from([tag]),
            features: Features {
                token_count,
                ..Features::default()
            },
        })
    }

    fn absorb(&mut self, other: Candidate) {
        self.provenance.extend(other.provenance);
        self.features.absorb(&other.features);
        self.mentions.extend(other.mentions);
        self.mentions.sort_by_key(|m| (m.start, m.end));
        self.mentions.dedup();
    }
}

/// Drops candidates equivalent to an earlier kept one, merging their
/// provenance, features and mentions into it. Input is scanned in document
/// order.
pub fn dedup_candidates(mut cands: Vec<Candidate>, sim: &SimilarityConfig) -> Vec<Candidate> {
    cands.sort_by(|a, b| (a.span.start, b.span.end).cmp(&(b.span.start, a.span.end)));
    let mut kept: Vec<Candidate> = Vec::with_capacity(cands.len());
    for c in cands {
        match kept.iter_mut().find(|k| sim.equivalent(&k.text, &c.text)) {
            Some(k) => k.absorb(c),
            None => kept.push(c),
        }
    }
    kept
}

/// Whether the chunk sequence of a sentence contains NP, VP, NP contiguously.
pub fn has_np_vp_np(doc: &AnnotatedDocument, sentence: usize) -> bool {
    let kinds: Vec<ChunkKind> = doc.chunks_in(sentence).iter().map(|c| c.kind).collect();
    kinds
        .windows(3)
        .any(|w| w == [ChunkKind::Np, ChunkKind::Vp, ChunkKind::Np])
}

/// Whole-sentence span of a sentence.
fn sentence_span(doc: &AnnotatedDocument, sentence: usize) -> Span {
    doc.sentences[sentence].span.clone()
}

/// Runs every extractor and tags candidates matching a retained Q&A answer.
pub fn extract_all(doc: &AnnotatedDocument, res: &Resources, sim: &SimilarityConfig) -> PerQuestion<Vec<Candidate>> {
    let mut out = PerQuestion {
        who: extract_who(doc, sim),
        what: extract_what(doc, &res.action_verbs, sim),
        when: extract_when(doc, sim),
        where_: extract_where(doc, &res.gazetteer, sim),
        why: extract_why(doc, &res.causal_verbs, &res.causal_major, &res.causal_minor),
        how: extract_how(doc, &res.copulative, &res.method_markers),
    };
    for q in Question::ALL {
        if let Some(answer) = doc.qa_answer(q) {
            for c in out.get_mut(q).iter_mut() {
                if sim.equivalent(&c.text, &answer.text) {
                    c.provenance.insert(Provenance::Qa);
                }
            }
        }
    }
    out
}
