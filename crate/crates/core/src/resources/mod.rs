//! Lexicons and the geographic gazetteer.

mod gazetteer;
mod lexicon;

use std::path::{Path, PathBuf};

pub use gazetteer::{BoundingBox, Gazetteer, GazetteerEntry};
pub use lexicon::{Lexicon, LexiconMatch, MatchOn, SynonymTable};

use crate::error::Result;

/// Every lexical resource the extractors need.
#[derive(Debug, Clone)]
pub struct Resources {
    pub action_verbs: Lexicon,
    pub causal_verbs: Lexicon,
    pub causal_major: Lexicon,
    pub causal_minor: Lexicon,
    pub copulative: Lexicon,
    pub method_markers: Lexicon,
    pub gazetteer: Gazetteer,
}

/// Optional file overrides; unset fields use the shipped data.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcePaths {
    pub action_verbs: Option<PathBuf>,
    pub causal_verbs: Option<PathBuf>,
    pub causal_major: Option<PathBuf>,
    pub causal_minor: Option<PathBuf>,
    pub copulative: Option<PathBuf>,
    pub method_markers: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
}

fn shipped(name: &str, src: &str) -> Lexicon {
    Lexicon::parse(name, src).expect("shipped lexicon is valid").0
}

fn pick(path: Option<&Path>, name: &str, src: &str) -> Result<Lexicon> {
    match path {
        Some(p) => Ok(Lexicon::load(p)?.0),
        None => Ok(shipped(name, src)),
    }
}

impl Resources {
    /// Shipped resources, with action and causal verbs expanded by the
    /// shipped synonym table.
    pub fn builtin() -> Self {
        Self::load(&ResourcePaths::default()).expect("shipped resources are valid")
    }

    pub fn load(paths: &ResourcePaths) -> Result<Self> {
        let synonyms = match &paths.synonyms {
            Some(p) => SynonymTable::load(p)?,
            None => SynonymTable::parse(include_str!("../../data/synonyms.tsv"))?,
        };
        macro_rules! lex {
            ($field:ident, $file:literal) => {
                pick(
                    paths.$field.as_deref(),
                    stringify!($field),
                    include_str!(concat!("../../data/lexicons/", $file)),
                )?
            };
        }
        Ok(Resources {
            action_verbs: lex!(action_verbs, "action_verbs.txt").expand_with_synonyms(&synonyms),
            causal_verbs: lex!(causal_verbs, "causal_verbs.txt").expand_with_synonyms(&synonyms),
            causal_major: lex!(causal_major, "causal_major.txt"),
            causal_minor: lex!(causal_minor, "causal_minor.txt"),
            copulative: lex!(copulative, "copulative.txt"),
            method_markers: lex!(method_markers, "method_markers.txt"),
            gazetteer: match &paths.gazetteer {
                Some(p) => Gazetteer::load(p)?,
                None => Gazetteer::builtin(),
            },
        })
    }
}
