//! Annotated-document data model and its JSON interchange format.
//!
//! All offsets are Unicode code points into [`RawArticle::body`]. Every span
//! carries a redundant copy of the text it covers so annotation files can be
//! audited by eye and drift between text and offsets is detected on load.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::question::Question;
use crate::text::CharIndex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArticle {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlet: Option<String>,
    pub title: String,
    /// Plain text, paragraphs separated by newlines.
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

impl Span {
    /// Builds a span over `source`, copying the covered text.
    pub fn over(source: &CharIndex<'_>, start: usize, end: usize) -> Option<Span> {
        if start >= end {
            return None;
        }
        source.slice(start, end).map(|text| Span {
            start,
            end,
            text: text.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Coarse part-of-speech tagset; providers map their own tags into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Propn,
    Verb,
    Aux,
    Adj,
    Adv,
    Adp,
    Det,
    Pron,
    Conj,
    Num,
    Punct,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tense {
    Present,
    Future,
    Past,
    ParticiplePresent,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub span: Span,
    pub lemma: String,
    pub pos: Pos,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tense: Option<Tense>,
    pub sentence_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RootKind {
    Np,
    Vp,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChunkKind {
    Np,
    Vp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sentence {
    pub index: usize,
    pub span: Span,
    pub root_kind: RootKind,
    /// Token index of the syntactic root, when the provider knows it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_token: Option<usize>,
}

/// A flat NP or VP chunk. Chunks are stored as one document-level layer; the
/// per-sentence chunk sequence is derived from span containment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chunk {
    pub kind: ChunkKind,
    pub span: Span,
    pub head_token: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityLabel {
    Per,
    Org,
    Loc,
    Date,
    Misc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpan {
    pub label: EntityLabel,
    pub span: Span,
}

/// Temporal expression class, ordered from least to most precise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TemporalClass {
    Duration,
    Set,
    Date,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporalSpan {
    pub klass: TemporalClass,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorefChain {
    pub mentions: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaAnswer {
    pub question: Question,
    pub text: String,
    pub confidence: f64,
}

/// Annotation layers without the article. This is also the response body of
/// the remote `/annotate` endpoint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layers {
    #[serde(default)]
    pub sentences: Vec<Sentence>,
    #[serde(default)]
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub chunks: Vec<Chunk>,
    #[serde(default)]
    pub entities: Vec<EntitySpan>,
    #[serde(default)]
    pub temporals: Vec<TemporalSpan>,
    #[serde(default)]
    pub coref_chains: Vec<CorefChain>,
    #[serde(default)]
    pub qa_answers: Vec<QaAnswer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatedDocument {
    pub article: RawArticle,
    #[serde(default)]
    pub sentences: Vec<Sentence>,
    #[serde(default)]
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub chunks: Vec<Chunk>,
    #[serde(default)]
    pub entities: Vec<EntitySpan>,
    #[serde(default)]
    pub temporals: Vec<TemporalSpan>,
    #[serde(default)]
    pub coref_chains: Vec<CorefChain>,
    #[serde(default)]
    pub qa_answers: Vec<QaAnswer>,
}

/// Layer named by a validation violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Article,
    Sentences,
    Tokens,
    Chunks,
    Entities,
    Temporals,
    CorefChains,
    QaAnswers,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Layer::Article => "article",
            Layer::Sentences => "sentences",
            Layer::Tokens => "tokens",
            Layer::Chunks => "chunks",
            Layer::Entities => "entities",
            Layer::Temporals => "temporals",
            Layer::CorefChains => "coref_chains",
            Layer::QaAnswers => "qa_answers",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub layer: Layer,
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{}]: {}", self.layer, i, self.message),
            None => write!(f, "{}: {}", self.layer, self.message),
        }
    }
}

impl AnnotatedDocument {
    pub fn from_parts(article: RawArticle, layers: Layers) -> Self {
        AnnotatedDocument {
            article,
            sentences: layers.sentences,
            tokens: layers.tokens,
            chunks: layers.chunks,
            entities: layers.entities,
            temporals: layers.temporals,
            coref_chains: layers.coref_chains,
            qa_answers: layers.qa_answers,
        }
    }

    pub fn into_parts(self) -> (RawArticle, Layers) {
        (
            self.article,
            Layers {
                sentences: self.sentences,
                tokens: self.tokens,
                chunks: self.chunks,
                entities: self.entities,
                temporals: self.temporals,
                coref_chains: self.coref_chains,
                qa_answers: self.qa_answers,
            },
        )
    }

    /// Parses the interchange format and validates every invariant.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let doc: AnnotatedDocument =
            serde_json::from_slice(bytes).map_err(|e| Error::from_json(&e))?;
        let violations = doc.validate();
        if violations.is_empty() {
            Ok(doc)
        } else {
            Err(Error::Validation {
                id: doc.article.id.clone(),
                violations,
            })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization is infallible")
    }

    pub fn body_index(&self) -> CharIndex<'_> {
        CharIndex::new(&self.article.body)
    }

    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }

    /// Index of the sentence containing the span's start offset.
    pub fn sentence_of(&self, span: &Span) -> Result<usize> {
        self.sentence_at(span.start)
            .ok_or(Error::SpanOutsideSentences {
                start: span.start,
                end: span.end,
            })
    }

    pub fn sentence_at(&self, offset: usize) -> Option<usize> {
        let pos = self
            .sentences
            .partition_point(|s| s.span.start <= offset);
        let candidate = pos.checked_sub(1)?;
        let sentence = &self.sentences[candidate];
        (offset < sentence.span.end).then_some(sentence.index)
    }

    /// Indices into `tokens` of the tokens of one sentence, in order.
    pub fn token_indices(&self, sentence: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.tokens.len())
            .filter(|&i| self.tokens[i].sentence_index == sentence)
            .collect();
        idx.sort_by_key(|&i| self.tokens[i].span.start);
        idx
    }

    pub fn tokens_in(&self, sentence: usize) -> Vec<&Token> {
        self.token_indices(sentence)
            .into_iter()
            .map(|i| &self.tokens[i])
            .collect()
    }

    /// The sentence's chunk sequence, ordered by start.
    pub fn chunks_in(&self, sentence: usize) -> Vec<&Chunk> {
        let Some(s) = self.sentences.get(sentence) else {
            return Vec::new();
        };
        let mut chunks: Vec<&Chunk> = self
            .chunks
            .iter()
            .filter(|c| s.span.contains(&c.span))
            .collect();
        chunks.sort_by_key(|c| c.span.start);
        chunks
    }

    /// Size of the coreference chain a span belongs to. An exact mention match
    /// wins; otherwise the largest chain with an overlapping mention.
    pub fn coref_count(&self, span: &Span) -> Option<usize> {
        let exact = self
            .coref_chains
            .iter()
            .find(|c| c.mentions.iter().any(|m| m.start == span.start && m.end == span.end));
        if let Some(chain) = exact {
            return Some(chain.mentions.len());
        }
        self.coref_chains
            .iter()
            .filter(|c| c.mentions.iter().any(|m| m.overlaps(span)))
            .map(|c| c.mentions.len())
            .max()
    }

    pub fn qa_answer(&self, question: Question) -> Option<&QaAnswer> {
        self.qa_answers.iter().find(|a| a.question == question)
    }

    /// Every invariant violation; empty iff the document is valid.
    pub fn validate(&self) -> Vec<Violation> {
        Validator::new(self).run()
    }
}

struct Validator<'a> {
    doc: &'a AnnotatedDocument,
    body: CharIndex<'a>,
    out: Vec<Violation>,
}

impl<'a> Validator<'a> {
    fn new(doc: &'a AnnotatedDocument) -> Self {
        Validator {
            doc,
            body: doc.body_index(),
            out: Vec::new(),
        }
    }

    fn push(&mut self, layer: Layer, index: Option<usize>, message: impl Into<String>) {
        self.out.push(Violation {
            layer,
            index,
            message: message.into(),
        });
    }

    /// Checks bounds and the redundant text copy. Returns false on failure.
    fn check_span(&mut self, layer: Layer, index: usize, span: &Span) -> bool {
        if span.start >= span.end || span.end > self.body.len() {
            self.push(
                layer,
                Some(index),
                format!(
                    "span [{}, {}) out of bounds for text of length {}",
                    span.start,
                    span.end,
                    self.body.len()
                ),
            );
            return false;
        }
        let source = self.body.slice(span.start, span.end).unwrap_or_default();
        if source != span.text {
            self.push(
                layer,
                Some(index),
                format!(
                    "span text {:?} differs from source slice {:?}",
                    span.text, source
                ),
            );
            return false;
        }
        true
    }

    fn run(mut self) -> Vec<Violation> {
        self.article();
        self.sentences();
        self.tokens();
        self.chunks();
        let doc = self.doc;
        for (i, e) in doc.entities.iter().enumerate() {
            self.check_span(Layer::Entities, i, &e.span);
        }
        for (i, t) in doc.temporals.iter().enumerate() {
            self.check_span(Layer::Temporals, i, &t.span);
        }
        self.coref();
        self.qa();
        self.out
    }

    fn article(&mut self) {
        let article = &self.doc.article;
        if article.id.trim().is_empty() {
            self.push(Layer::Article, None, "id is empty");
        }
        if article.title.trim().is_empty() {
            self.push(Layer::Article, None, "title is empty");
        }
        if article.body.trim().is_empty() {
            self.push(Layer::Article, None, "body is empty");
        }
    }

    fn sentences(&mut self) {
        let doc = self.doc;
        if doc.sentences.is_empty() {
            self.push(Layer::Sentences, None, "document has no sentences");
        }
        let mut prev_end = 0;
        for (i, s) in doc.sentences.iter().enumerate() {
            if s.index != i {
                self.push(
                    Layer::Sentences,
                    Some(i),
                    format!("index {} is not contiguous (expected {i})", s.index),
                );
            }
            if !self.check_span(Layer::Sentences, i, &s.span) {
                continue;
            }
            if s.span.start < prev_end {
                self.push(Layer::Sentences, Some(i), "overlaps the previous sentence");
            }
            prev_end = s.span.end;
            if let Some(root) = s.root_token {
                match doc.tokens.get(root) {
                    Some(t) if s.span.contains(&t.span) => {}
                    _ => self.push(
                        Layer::Sentences,
                        Some(i),
                        format!("root token {root} does not resolve inside the sentence"),
                    ),
                }
            }
        }
    }

    fn tokens(&mut self) {
        let doc = self.doc;
        let mut last_end: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, t) in doc.tokens.iter().enumerate() {
            if !self.check_span(Layer::Tokens, i, &t.span) {
                continue;
            }
            let Some(sentence) = doc.sentences.get(t.sentence_index) else {
                self.push(
                    Layer::Tokens,
                    Some(i),
                    format!("sentence index {} does not exist", t.sentence_index),
                );
                continue;
            };
            if !sentence.span.contains(&t.span) {
                self.push(
                    Layer::Tokens,
                    Some(i),
                    format!("lies outside sentence {}", t.sentence_index),
                );
                continue;
            }
            if let Some(&end) = last_end.get(&t.sentence_index) {
                if t.span.start < end {
                    self.push(
                        Layer::Tokens,
                        Some(i),
                        format!(
                            "overlaps or precedes the previous token of sentence {}",
                            t.sentence_index
                        ),
                    );
                }
            }
            last_end.insert(t.sentence_index, t.span.end);
        }
    }

    fn chunks(&mut self) {
        let doc = self.doc;
        let mut last_end: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, c) in doc.chunks.iter().enumerate() {
            if !self.check_span(Layer::Chunks, i, &c.span) {
                continue;
            }
            match doc.tokens.get(c.head_token) {
                Some(head) if c.span.contains(&head.span) => {}
                Some(_) => self.push(
                    Layer::Chunks,
                    Some(i),
                    format!("head token {} lies outside the chunk", c.head_token),
                ),
                None => self.push(
                    Layer::Chunks,
                    Some(i),
                    format!("head token {} does not exist", c.head_token),
                ),
            }
            let sentence = doc.sentence_at(c.span.start);
            let end_sentence = doc.sentence_at(c.span.end - 1);
            match sentence {
                Some(s) if end_sentence == Some(s) => {
                    if let Some(&end) = last_end.get(&s) {
                        if c.span.start < end {
                            self.push(
                                Layer::Chunks,
                                Some(i),
                                format!("overlaps or precedes the previous chunk of sentence {s}"),
                            );
                        }
                    }
                    last_end.insert(s, c.span.end);
                }
                _ => self.push(Layer::Chunks, Some(i), "is not contained in a single sentence"),
            }
        }
    }

    fn coref(&mut self) {
        let doc = self.doc;
        for (i, chain) in doc.coref_chains.iter().enumerate() {
            if chain.mentions.is_empty() {
                self.push(Layer::CorefChains, Some(i), "chain has no mentions");
            }
            let mut seen = HashSet::new();
            let mut duplicate = false;
            for m in &chain.mentions {
                if !self.check_span(Layer::CorefChains, i, m) {
                    continue;
                }
                if !seen.insert((m.start, m.end)) {
                    duplicate = true;
                }
            }
            if duplicate {
                self.push(Layer::CorefChains, Some(i), "chain repeats a mention span");
            }
        }
    }

    fn qa(&mut self) {
        let doc = self.doc;
        let mut seen = HashSet::new();
        for (i, a) in doc.qa_answers.iter().enumerate() {
            if !(0.0..=1.0).contains(&a.confidence) {
                self.push(
                    Layer::QaAnswers,
                    Some(i),
                    format!("confidence {} outside [0, 1]", a.confidence),
                );
            }
            if !seen.insert(a.question) {
                self.push(
                    Layer::QaAnswers,
                    Some(i),
                    format!("more than one retained answer for '{}'", a.question),
                );
            }
        }
    }
}
