//! Shared inputs for the criterion benches.

use std::path::{Path, PathBuf};

use qqoqcp_core::evaluate::AnnotatedCorpus;
use qqoqcp_core::RawArticle;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus")
}

/// The fixture corpus articles, without their gold annotations.
pub fn fixture_articles() -> Vec<RawArticle> {
    AnnotatedCorpus::load(&corpus_dir())
        .expect("fixture corpus loads")
        .articles
        .into_iter()
        .map(|a| a.article)
        .collect()
}
