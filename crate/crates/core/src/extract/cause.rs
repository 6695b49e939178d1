//! Why candidates.

use std::collections::BTreeSet;

use super::{sentence_span, Candidate, Provenance};
use crate::document::AnnotatedDocument;
use crate::question::Question;
use crate::resources::Lexicon;

fn distinct_matches(lex: &Lexicon, doc: &AnnotatedDocument, sentence: usize) -> usize {
    let tokens = doc.tokens_in(sentence);
    lex.match_tokens(&tokens, &doc.body_index())
        .into_iter()
        .map(|m| m.entry)
        .collect::<BTreeSet<_>>()
        .len()
}

/// Every sentence with a causal verb or a causal marker, as a whole-sentence
/// candidate carrying the per-kind counts of distinct matches.
pub fn extract_why(
    doc: &AnnotatedDocument,
    causal_verbs: &Lexicon,
    causal_major: &Lexicon,
    causal_minor: &Lexicon,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for s in &doc.sentences {
        let verbs = distinct_matches(causal_verbs, doc, s.index);
        let major = distinct_matches(causal_major, doc, s.index);
        let minor = distinct_matches(causal_minor, doc, s.index);
        if verbs + major + minor == 0 {
            continue;
        }
        let tag = if verbs > 0 { Provenance::CausalVerb } else { Provenance::CausalMarker };
        let Some(mut c) = Candidate::new(Question::Why, doc, sentence_span(doc, s.index), tag) else {
            continue;
        };
        if verbs > 0 && major + minor > 0 {
            c.provenance.insert(Provenance::CausalMarker);
        }
        c.features.causal_verb_count = verbs;
        c.features.major_conj_count = major;
        c.features.minor_conj_count = minor;
        out.push(c);
    }
    out
}
