//! Factor scores and weighted totals of every candidate.

mod weights;

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::document::{AnnotatedDocument, QaAnswer, TemporalClass};
use crate::extract::{Candidate, SimilarityConfig};
use crate::question::{PerQuestion, Question};
use crate::resources::Gazetteer;
use crate::text::normalize_surface;
use crate::tokenize::tokenize;

pub use weights::*;

/// Smallest area of the size normalization: a small property.
pub const AREA_MIN_M2: f64 = 225.0;
/// Largest area of the size normalization: 530,000 km².
pub const AREA_MAX_M2: f64 = 5.3e11;
/// Size score of locations without a known area.
pub const UNKNOWN_SIZE_SCORE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionDenominator {
    N,
    #[serde(rename = "n_minus_1")]
    NMinus1,
}

/// `1 - index / denominator` with a 0-based sentence index, clamped to
/// [0, 1]. The `NMinus1` denominator is 1.0 for single-sentence documents.
pub fn position_score(sentence_index: usize, n_sentences: usize, denominator: PositionDenominator) -> f64 {
    let denom = match denominator {
        PositionDenominator::N => n_sentences as f64,
        PositionDenominator::NMinus1 => {
            if n_sentences <= 1 {
                return 1.0;
            }
            (n_sentences - 1) as f64
        }
    };
    if denom <= 0.0 {
        return 1.0;
    }
    (1.0 - sentence_index as f64 / denom).clamp(0.0, 1.0)
}

/// `value / max`, 0 when `max` is 0.
pub fn normalized_ratio(value: f64, max: f64) -> f64 {
    if max <= 0.0 {
        0.0
    } else {
        (value / max).clamp(0.0, 1.0)
    }
}

/// Log-normalized size score: 1 at 225 m² and below, 0 at 530,000 km² and
/// above.
pub fn size_score(area_m2: f64) -> f64 {
    let t = (area_m2.ln() - AREA_MIN_M2.ln()) / (AREA_MAX_M2.ln() - AREA_MIN_M2.ln());
    (1.0 - t.min(1.0)).clamp(0.0, 1.0)
}

pub fn temporal_precision(klass: TemporalClass) -> f64 {
    match klass {
        TemporalClass::Time => 1.00,
        TemporalClass::Date => 0.66,
        TemporalClass::Set => 0.33,
        TemporalClass::Duration => 0.00,
    }
}

pub fn verb_tense_score(has_future: bool, has_gerund: bool) -> f64 {
    match (has_future, has_gerund) {
        (true, true) => 1.00,
        (false, true) => 0.66,
        (true, false) => 0.33,
        (false, false) => 0.00,
    }
}

/// Which candidates count towards a location's containment score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentDirection {
    /// Candidates enclosing the location; nested places score higher.
    #[default]
    Enclosing,
    /// Candidates the location encloses.
    Enclosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TitlePresence {
    /// Every long word of the candidate appears in the title.
    #[default]
    Containment,
    /// Candidate and title are similar at the similarity threshold.
    Similarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionDenominators {
    #[serde(default = "n")]
    pub who: PositionDenominator,
    #[serde(default = "n")]
    pub what: PositionDenominator,
    #[serde(default = "n")]
    pub when: PositionDenominator,
    #[serde(default = "n", rename = "where")]
    pub where_: PositionDenominator,
    #[serde(default = "n_minus_1")]
    pub why: PositionDenominator,
}

fn n() -> PositionDenominator {
    PositionDenominator::N
}

fn n_minus_1() -> PositionDenominator {
    PositionDenominator::NMinus1
}

impl Default for PositionDenominators {
    fn default() -> Self {
        PositionDenominators {
            who: n(),
            what: n(),
            when: n(),
            where_: n(),
            why: n_minus_1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreConfig {
    #[serde(default)]
    pub weights: FactorWeights,
    #[serde(default)]
    pub position: PositionDenominators,
    #[serde(default)]
    pub containment: ContainmentDirection,
    #[serde(default)]
    pub title_presence: TitlePresence,
}

/// A candidate with its factor scores and weighted total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub candidate: Candidate,
    pub factors: IndexMap<String, f64>,
    pub total: f64,
}

fn finish(
    q: Question,
    cfg: &ScoreConfig,
    cands: Vec<Candidate>,
    mut factors: impl FnMut(&Candidate) -> Vec<(&'static str, f64)>,
) -> Vec<ScoredCandidate> {
    let weights = cfg.weights.get(q);
    cands
        .into_iter()
        .map(|c| {
            let scores: IndexMap<String, f64> = factors(&c)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.clamp(0.0, 1.0)))
                .collect();
            let total = aggregate(q, weights, &scores).expect("scorer emits every weighted factor");
            ScoredCandidate {
                candidate: c,
                factors: scores,
                total,
            }
        })
        .collect()
}

fn qa_match(c: &Candidate, qa: Option<&QaAnswer>, sim: &SimilarityConfig) -> f64 {
    match qa {
        Some(a) if sim.equivalent(&c.text, &a.text) => 1.0,
        _ => 0.0,
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Non-overlapping windows of the candidate's token length, anywhere in the
/// body, that are similar to the candidate.
fn window_occurrences(doc: &AnnotatedDocument, text: &str, sim: &SimilarityConfig) -> usize {
    let k = tokenize(text).len().max(1);
    let body = doc.body_index();
    let mut count = 0;
    for s in &doc.sentences {
        let toks = doc.tokens_in(s.index);
        let mut i = 0;
        while i + k <= toks.len() {
            let window = body.slice(toks[i].span.start, toks[i + k - 1].span.end).unwrap_or("");
            if sim.equivalent(window, text) {
                count += 1;
                i += k;
            } else {
                i += 1;
            }
        }
    }
    count
}

/// Word-bounded occurrences of the lowercased candidate text in the body.
fn surface_occurrences(body_norm: &str, text: &str) -> usize {
    let needle = normalize_surface(text.trim());
    if needle.is_empty() {
        return 0;
    }
    body_norm
        .match_indices(&needle)
        .filter(|(at, m)| {
            let before = body_norm[..*at].chars().next_back();
            let after = body_norm[at + m.len()..].chars().next();
            !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
        })
        .count()
}

fn frequency_counts(doc: &AnnotatedDocument, cands: &[Candidate]) -> Vec<f64> {
    let body_norm = normalize_surface(&doc.article.body);
    cands
        .iter()
        .map(|c| surface_occurrences(&body_norm, &c.text).max(c.mentions.len()) as f64)
        .collect()
}

/// Raw who frequency: coreference chain size, or a similarity count over the
/// text when no chain covers any mention.
pub fn who_frequency(doc: &AnnotatedDocument, c: &Candidate, sim: &SimilarityConfig) -> usize {
    let coref = c.mentions.iter().filter_map(|m| doc.coref_count(m)).max();
    match coref {
        Some(n) => n,
        None => window_occurrences(doc, &c.text, sim).max(c.mentions.len()),
    }
}

fn in_title(c: &Candidate, title: &str, mode: TitlePresence, sim: &SimilarityConfig) -> bool {
    match mode {
        TitlePresence::Similarity => sim.equivalent(&c.text, title),
        TitlePresence::Containment => {
            let words = crate::extract::long_words(&c.text);
            if words.is_empty() {
                let needle = crate::text::fold(&c.text);
                return !needle.is_empty()
                    && crate::text::fold(title)
                        .split(|ch: char| !ch.is_alphanumeric())
                        .any(|w| w == needle);
            }
            let title_words = crate::extract::long_words(title);
            words.keys().all(|w| title_words.contains_key(w))
        }
    }
}

pub fn score_who(
    cands: Vec<Candidate>,
    doc: &AnnotatedDocument,
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let freq: Vec<f64> = cands.iter().map(|c| who_frequency(doc, c, sim) as f64).collect();
    let max_freq = max_of(freq.iter().copied());
    let n = doc.n_sentences();
    let mut i = 0;
    finish(Question::Who, cfg, cands, |c| {
        let f = freq[i];
        i += 1;
        vec![
            (FREQUENCY, normalized_ratio(f, max_freq)),
            (POSITION, position_score(c.sentence_index, n, cfg.position.who)),
            (TITLE_PRESENCE, f64::from(u8::from(in_title(c, &doc.article.title, cfg.title_presence, sim)))),
            (PER_TYPE, f64::from(u8::from(c.features.entity_labels.contains(&crate::document::EntityLabel::Per)))),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

/// Mean total of the who candidates mentioned in the given sentence, 0 if none.
pub fn who_average(doc: &AnnotatedDocument, who: &[ScoredCandidate], sentence: usize) -> f64 {
    let totals: Vec<f64> = who
        .iter()
        .filter(|w| {
            w.candidate
                .mentions
                .iter()
                .any(|m| doc.sentence_at(m.start) == Some(sentence))
        })
        .map(|w| w.total)
        .collect();
    if totals.is_empty() {
        0.0
    } else {
        totals.iter().sum::<f64>() / totals.len() as f64
    }
}

pub fn score_what(
    cands: Vec<Candidate>,
    doc: &AnnotatedDocument,
    who: &[ScoredCandidate],
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let max_len = max_of(cands.iter().map(|c| c.features.token_count as f64));
    let n = doc.n_sentences();
    finish(Question::What, cfg, cands, |c| {
        vec![
            (POSITION, position_score(c.sentence_index, n, cfg.position.what)),
            (LENGTH, normalized_ratio(c.features.token_count as f64, max_len)),
            (WHO_AVERAGE, who_average(doc, who, c.sentence_index)),
            (ACTION_VERBS, f64::from(u8::from(c.features.has_action_verb))),
            (NP_VP_NP, f64::from(u8::from(c.features.has_np_vp_np))),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

pub fn score_when(
    cands: Vec<Candidate>,
    doc: &AnnotatedDocument,
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let freq = frequency_counts(doc, &cands);
    let max_freq = max_of(freq.iter().copied());
    let n = doc.n_sentences();
    let mut i = 0;
    finish(Question::When, cfg, cands, |c| {
        let f = freq[i];
        i += 1;
        let klass = c.features.klass.unwrap_or_else(|| {
            log::warn!("{}: when candidate '{}' has no temporal class, using DATE", doc.article.id, c.text);
            TemporalClass::Date
        });
        vec![
            (TEMPORAL_PRECISION, temporal_precision(klass)),
            (FREQUENCY, normalized_ratio(f, max_freq)),
            (POSITION, position_score(c.sentence_index, n, cfg.position.when)),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

/// Raw containment counts: for each candidate, the number of other distinct
/// resolved candidates enclosing it (or enclosed by it).
pub fn containment_counts(cands: &[Candidate], gaz: &Gazetteer, direction: ContainmentDirection) -> Vec<usize> {
    let resolved: Vec<Option<&crate::resources::GazetteerEntry>> = cands
        .iter()
        .map(|c| c.features.gazetteer_id.as_deref().and_then(|id| gaz.get(id)))
        .collect();
    resolved
        .iter()
        .map(|me| {
            let Some(me) = me else { return 0 };
            resolved
                .iter()
                .flatten()
                .filter(|o| o.id != me.id)
                .filter(|o| match direction {
                    ContainmentDirection::Enclosing => gaz.contains(o, me),
                    ContainmentDirection::Enclosed => gaz.contains(me, o),
                })
                .map(|o| o.id.as_str())
                .collect::<BTreeSet<_>>()
                .len()
        })
        .collect()
}

pub fn score_where(
    cands: Vec<Candidate>,
    doc: &AnnotatedDocument,
    gaz: &Gazetteer,
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let freq = frequency_counts(doc, &cands);
    let max_freq = max_of(freq.iter().copied());
    let contained: Vec<f64> = containment_counts(&cands, gaz, cfg.containment)
        .into_iter()
        .map(|n| n as f64)
        .collect();
    let max_contained = max_of(contained.iter().copied());
    let n = doc.n_sentences();
    let mut i = 0;
    finish(Question::Where, cfg, cands, |c| {
        let (f, k) = (freq[i], contained[i]);
        i += 1;
        let area = c
            .features
            .gazetteer_id
            .as_deref()
            .and_then(|id| gaz.get(id))
            .and_then(|g| g.area_m2);
        vec![
            (POSITION, position_score(c.sentence_index, n, cfg.position.where_)),
            (FREQUENCY, normalized_ratio(f, max_freq)),
            (CONTAINMENT, normalized_ratio(k, max_contained)),
            (SIZE, area.map_or(UNKNOWN_SIZE_SCORE, size_score)),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

pub fn score_why(
    cands: Vec<Candidate>,
    doc: &AnnotatedDocument,
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let max_major = max_of(cands.iter().map(|c| c.features.major_conj_count as f64));
    let max_minor = max_of(cands.iter().map(|c| c.features.minor_conj_count as f64));
    let max_verbs = max_of(cands.iter().map(|c| c.features.causal_verb_count as f64));
    let n = doc.n_sentences();
    finish(Question::Why, cfg, cands, |c| {
        vec![
            (MAJOR_CAUSAL, normalized_ratio(c.features.major_conj_count as f64, max_major)),
            (MINOR_CAUSAL, normalized_ratio(c.features.minor_conj_count as f64, max_minor)),
            (POSITION, position_score(c.sentence_index, n, cfg.position.why)),
            (CAUSAL_VERBS, normalized_ratio(c.features.causal_verb_count as f64, max_verbs)),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

pub fn score_how(
    cands: Vec<Candidate>,
    qa: Option<&QaAnswer>,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> Vec<ScoredCandidate> {
    let max_cop = max_of(cands.iter().map(|c| c.features.copulative_phrase_count as f64));
    finish(Question::How, cfg, cands, |c| {
        vec![
            (VERB_TENSE, verb_tense_score(c.features.has_future, c.features.has_gerund)),
            (COPULATIVE_PHRASES, normalized_ratio(c.features.copulative_phrase_count as f64, max_cop)),
            (PREPOSITIONS, f64::from(u8::from(c.features.has_preposition))),
            (QA_SIMILARITY, qa_match(c, qa, sim)),
        ]
    })
}

/// Scores every question's candidates; who is scored first because what
/// depends on it.
pub fn score_all(
    cands: PerQuestion<Vec<Candidate>>,
    doc: &AnnotatedDocument,
    gaz: &Gazetteer,
    sim: &SimilarityConfig,
    cfg: &ScoreConfig,
) -> PerQuestion<Vec<ScoredCandidate>> {
    let qa = |q| doc.qa_answer(q);
    let who = score_who(cands.who, doc, qa(Question::Who), sim, cfg);
    let what = score_what(cands.what, doc, &who, qa(Question::What), sim, cfg);
    PerQuestion {
        what,
        when: score_when(cands.when, doc, qa(Question::When), sim, cfg),
        where_: score_where(cands.where_, doc, gaz, qa(Question::Where), sim, cfg),
        why: score_why(cands.why, doc, qa(Question::Why), sim, cfg),
        how: score_how(cands.how, qa(Question::How), sim, cfg),
        who,
    }
}
