use std::path::PathBuf;

use crate::document::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed document, corpus or config syntax.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("document '{id}' failed validation: {}", summarize(.violations))]
    Validation {
        id: String,
        violations: Vec<Violation>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("lexicon '{name}': {message}")]
    Lexicon { name: String, message: String },

    #[error("gazetteer: {0}")]
    Gazetteer(String),

    #[error("span [{start}, {end}) lies outside every sentence")]
    SpanOutsideSentences { start: usize, end: usize },

    /// Remote annotation or chat endpoint failed.
    #[error("endpoint {endpoint}: {message}")]
    Endpoint { endpoint: String, message: String },

    #[error("factor mismatch for '{question}': {message}")]
    FactorMismatch { question: String, message: String },

    #[error("unknown participant '{0}'")]
    UnknownParticipant(String),

    #[error("baseline answer rejected: {message}")]
    BaselineAnswer { message: String, raw: String },

    #[error("{0}")]
    Invalid(String),
}

fn summarize(violations: &[Violation]) -> String {
    match violations {
        [] => "no violations".to_string(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    pub(crate) fn from_toml(err: &toml::de::Error, src: &str) -> Self {
        let (line, column) = err
            .span()
            .map(|span| line_col(src, span.start))
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: err.message().to_string(),
        }
    }
}

fn line_col(src: &str, byte: usize) -> (usize, usize) {
    let prefix = &src[..byte.min(src.len())];
    let line = prefix.matches('\n').count() + 1;
    let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
