//! When and where candidates.

use super::{dedup_candidates, Candidate, Provenance, SimilarityConfig};
use crate::document::{AnnotatedDocument, EntityLabel, TemporalClass};
use crate::question::Question;
use crate::resources::Gazetteer;

/// Merged temporal spans, plus DATE entities that no temporal span covers.
pub fn extract_when(doc: &AnnotatedDocument, sim: &SimilarityConfig) -> Vec<Candidate> {
    let dates: Vec<_> = doc
        .entities
        .iter()
        .filter(|e| e.label == EntityLabel::Date)
        .collect();
    let mut cands = Vec::new();
    for t in &doc.temporals {
        if let Some(mut c) = Candidate::new(Question::When, doc, t.span.clone(), Provenance::TemporalRegex) {
            c.features.klass = Some(t.klass);
            if dates.iter().any(|e| e.span.overlaps(&t.span)) {
                c.provenance.insert(Provenance::Ner);
                c.features.entity_labels.insert(EntityLabel::Date);
            }
            cands.push(c);
        }
    }
    for e in dates {
        if doc.temporals.iter().any(|t| t.span.overlaps(&e.span)) {
            continue;
        }
        if let Some(mut c) = Candidate::new(Question::When, doc, e.span.clone(), Provenance::Ner) {
            c.features.klass = Some(TemporalClass::Date);
            c.features.entity_labels.insert(EntityLabel::Date);
            cands.push(c);
        }
    }
    dedup_candidates(cands, sim)
}

/// LOC entities, resolved against the gazetteer when possible.
pub fn extract_where(doc: &AnnotatedDocument, gaz: &Gazetteer, sim: &SimilarityConfig) -> Vec<Candidate> {
    let cands = doc
        .entities
        .iter()
        .filter(|e| e.label == EntityLabel::Loc)
        .filter_map(|e| {
            let mut c = Candidate::new(Question::Where, doc, e.span.clone(), Provenance::Ner)?;
            c.features.entity_labels.insert(EntityLabel::Loc);
            c.features.gazetteer_id = gaz.lookup(&e.span.text).map(|g| g.id.clone());
            Some(c)
        })
        .collect();
    dedup_candidates(cands, sim)
}
