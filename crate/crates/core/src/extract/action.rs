//! Who and what candidates.

use super::{dedup_candidates, has_np_vp_np, sentence_span, Candidate, Provenance, SimilarityConfig};
use crate::document::{AnnotatedDocument, Chunk, ChunkKind, EntityLabel, RootKind, Span};
use crate::question::Question;
use crate::resources::Lexicon;

/// Position of the root VP within the sentence's chunk sequence.
fn root_vp(doc: &AnnotatedDocument, chunks: &[&Chunk], sentence: usize) -> Option<usize> {
    let root = doc.sentences[sentence].root_token.and_then(|t| doc.tokens.get(t));
    match root {
        Some(tok) => chunks
            .iter()
            .position(|c| c.kind == ChunkKind::Vp && c.span.contains(&tok.span)),
        None => chunks.iter().position(|c| c.kind == ChunkKind::Vp),
    }
}

/// PER and ORG entities, plus the NP subject preceding the root of every
/// sentence whose root is a verb phrase.
pub fn extract_who(doc: &AnnotatedDocument, sim: &SimilarityConfig) -> Vec<Candidate> {
    let mut cands = Vec::new();
    for e in &doc.entities {
        if !matches!(e.label, EntityLabel::Per | EntityLabel::Org) {
            continue;
        }
        if let Some(mut c) = Candidate::new(Question::Who, doc, e.span.clone(), Provenance::Ner) {
            c.features.entity_labels.insert(e.label);
            cands.push(c);
        }
    }
    for s in &doc.sentences {
        if s.root_kind != RootKind::Vp {
            continue;
        }
        let chunks = doc.chunks_in(s.index);
        let Some(root) = root_vp(doc, &chunks, s.index) else {
            continue;
        };
        let subject = chunks[..root].iter().rev().find(|c| c.kind == ChunkKind::Np);
        if let Some(np) = subject {
            if let Some(c) = Candidate::new(Question::Who, doc, np.span.clone(), Provenance::NpSubject) {
                cands.push(c);
            }
        }
    }
    dedup_candidates(cands, sim)
}

/// Chunk sequences following VP roots, sentences using an action verb, and
/// sentences similar to the title.
pub fn extract_what(doc: &AnnotatedDocument, action_verbs: &Lexicon, sim: &SimilarityConfig) -> Vec<Candidate> {
    let body = doc.body_index();
    let mut cands = Vec::new();
    for s in &doc.sentences {
        let tokens = doc.tokens_in(s.index);
        let has_action = !action_verbs.match_tokens(&tokens, &body).is_empty();
        let structure = has_np_vp_np(doc, s.index);
        let mut push = |span, tag| {
            if let Some(mut c) = Candidate::new(Question::What, doc, span, tag) {
                c.features.has_action_verb = has_action;
                c.features.has_np_vp_np = structure;
                cands.push(c);
            }
        };
        if s.root_kind == RootKind::Vp {
            let chunks = doc.chunks_in(s.index);
            if let (Some(root), Some(last)) = (root_vp(doc, &chunks, s.index), chunks.last()) {
                if let Some(span) = Span::over(&body, chunks[root].span.start, last.span.end) {
                    push(span, Provenance::VpSequence);
                }
            }
        }
        if has_action {
            push(sentence_span(doc, s.index), Provenance::ActionVerb);
        }
        if sim.equivalent(&s.span.text, &doc.article.title) {
            push(sentence_span(doc, s.index), Provenance::TitleSimilar);
        }
    }
    dedup_candidates(cands, sim)
}
