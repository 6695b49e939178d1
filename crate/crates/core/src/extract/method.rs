//! How candidates.

use std::collections::BTreeSet;

use super::{sentence_span, Candidate, Provenance};
use crate::annotation::detect_gerunds;
use crate::document::{AnnotatedDocument, Pos, Tense};
use crate::question::Question;
use crate::resources::Lexicon;

/// Sentences with a gerund, a copulative phrase or a method marker.
pub fn extract_how(doc: &AnnotatedDocument, copulative: &Lexicon, method_markers: &Lexicon) -> Vec<Candidate> {
    let body = doc.body_index();
    let mut out = Vec::new();
    for s in &doc.sentences {
        let tokens = doc.tokens_in(s.index);
        let has_gerund = !detect_gerunds(doc, s.index).is_empty();
        let copulatives = copulative
            .match_tokens(&tokens, &body)
            .into_iter()
            .map(|m| m.entry)
            .collect::<BTreeSet<_>>()
            .len();
        let has_preposition = !method_markers.match_tokens(&tokens, &body).is_empty();
        if !has_gerund && copulatives == 0 && !has_preposition {
            continue;
        }
        let tag = if has_gerund { Provenance::Gerund } else { Provenance::Preposition };
        let Some(mut c) = Candidate::new(Question::How, doc, sentence_span(doc, s.index), tag) else {
            continue;
        };
        if has_gerund && (copulatives > 0 || has_preposition) {
            c.provenance.insert(Provenance::Preposition);
        }
        c.features.has_gerund = has_gerund;
        c.features.copulative_phrase_count = copulatives;
        c.features.has_preposition = has_preposition;
        c.features.has_future = tokens
            .iter()
            .any(|t| matches!(t.pos, Pos::Verb | Pos::Aux) && t.tense == Some(Tense::Future));
        out.push(c);
    }
    out
}
