//! Explainable 5W1H answer extraction for French news articles, with an
//! evaluation harness and an LLM baseline.

pub mod annotation;
pub mod baseline;
pub mod config;
pub mod document;
pub mod error;
pub mod evaluate;
pub mod extract;
pub mod pipeline;
pub mod question;
pub mod score;
pub mod select;
pub mod resources;
pub mod text;
pub mod tokenize;

pub use document::{
    AnnotatedDocument, Chunk, ChunkKind, CorefChain, EntityLabel, EntitySpan, Layer, Layers, Pos,
    QaAnswer, RawArticle, RootKind, Sentence, Span, TemporalClass, TemporalSpan, Tense, Token,
    Violation,
};
pub use error::{Error, Result};
pub use question::{PerQuestion, Question};
pub use config::RunConfig;
pub use pipeline::{ArticleReport, Pipeline, ScoredArticle};
