#![allow(dead_code)]

pub mod http;
pub mod oracle;

use std::path::{Path, PathBuf};

use qqoqcp_core::annotation::heuristic::HeuristicProvider;
use qqoqcp_core::annotation::{annotate, TemporalGrammar};
use qqoqcp_core::resources::Gazetteer;
use qqoqcp_core::{AnnotatedDocument, RawArticle};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures().join("corpus")
}

pub fn coref_doc() -> AnnotatedDocument {
    let bytes = std::fs::read(fixtures().join("coref/coref12.json")).unwrap();
    AnnotatedDocument::parse(&bytes).unwrap()
}

pub fn chain_gazetteer() -> Gazetteer {
    Gazetteer::load(&fixtures().join("geo/chain_gazetteer.json")).unwrap()
}

pub fn chain_article() -> RawArticle {
    serde_json::from_str(&std::fs::read_to_string(fixtures().join("geo/chain_article.json")).unwrap()).unwrap()
}

pub fn annotate_with(article: &RawArticle, gaz: Gazetteer) -> AnnotatedDocument {
    let provider = HeuristicProvider::new(gaz);
    annotate(article, &[&provider], &TemporalGrammar::builtin()).unwrap()
}

pub fn article(id: &str, title: &str, body: &str) -> RawArticle {
    RawArticle {
        id: id.into(),
        outlet: None,
        title: title.into(),
        body: body.into(),
    }
}
