//! Temporal expression detection driven by a data-file pattern grammar, and
//! the merge rule for adjacent temporal spans.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use crate::document::{AnnotatedDocument, Pos, Span, TemporalClass, TemporalSpan};
use crate::error::{Error, Result};
use crate::text::{unify_apostrophe, CharIndex};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrammarFile {
    #[serde(default)]
    classes: BTreeMap<String, Vec<String>>,
    patterns: Vec<PatternDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDef {
    name: String,
    klass: TemporalClass,
    regex: String,
}

#[derive(Debug, Clone)]
struct Pattern {
    name: String,
    klass: TemporalClass,
    regex: Regex,
}

/// Compiled set of named temporal patterns.
#[derive(Debug, Clone)]
pub struct TemporalGrammar {
    patterns: Vec<Pattern>,
}

/// One raw grammar hit, before overlap resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMatch {
    pub pattern: String,
    pub span: TemporalSpan,
}

impl TemporalGrammar {
    pub fn parse(src: &str) -> Result<Self> {
        let file: GrammarFile = toml::from_str(src).map_err(|e| Error::from_toml(&e, src))?;
        let mut patterns = Vec::with_capacity(file.patterns.len());
        for def in file.patterns {
            let expanded = expand_classes(&def.regex, &file.classes)
                .map_err(|m| Error::Config(format!("temporal pattern '{}': {m}", def.name)))?;
            let regex = Regex::new(&format!(r"(?i)\b(?:{expanded})\b")).map_err(|e| {
                Error::Config(format!("temporal pattern '{}': {e}", def.name))
            })?;
            patterns.push(Pattern {
                name: def.name,
                klass: def.klass,
                regex,
            });
        }
        if patterns.is_empty() {
            return Err(Error::Config("temporal grammar has no patterns".into()));
        }
        Ok(TemporalGrammar { patterns })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/temporal_patterns.toml"))
            .expect("shipped temporal grammar compiles")
    }

    pub fn pattern_names(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(|p| p.name.as_str())
    }

    /// All raw hits of every pattern in `text`; offsets are code points
    /// relative to `base` within `source`.
    fn raw_matches(&self, source: &CharIndex<'_>, start: usize, end: usize) -> Vec<TemporalMatch> {
        let Some(segment) = source.slice(start, end) else {
            return Vec::new();
        };
        // char-for-char substitution keeps code-point offsets aligned
        let normalized: String = segment
            .chars()
            .map(|c| match unify_apostrophe(c) {
                '\u{00A0}' | '\u{202F}' => ' ',
                other => other,
            })
            .collect();
        let local = CharIndex::new(&normalized);
        let mut out = Vec::new();
        for p in &self.patterns {
            for m in p.regex.find_iter(&normalized) {
                let s = start + local.char_offset(m.start());
                let e = start + local.char_offset(m.end());
                if let Some(span) = Span::over(source, s, e) {
                    out.push(TemporalMatch {
                        pattern: p.name.clone(),
                        span: TemporalSpan {
                            klass: p.klass,
                            span,
                        },
                    });
                }
            }
        }
        out
    }

    /// Detects temporal expressions in `source[start..end)` and resolves
    /// overlaps: longest first, then most precise class, then earliest.
    pub fn detect(&self, source: &CharIndex<'_>, start: usize, end: usize) -> Vec<TemporalSpan> {
        let mut hits = self.raw_matches(source, start, end);
        hits.sort_by(|a, b| {
            b.span
                .span
                .len()
                .cmp(&a.span.span.len())
                .then(b.span.klass.cmp(&a.span.klass))
                .then(a.span.span.start.cmp(&b.span.span.start))
        });
        let mut kept: Vec<TemporalSpan> = Vec::new();
        for hit in hits {
            if kept.iter().all(|k| !k.span.overlaps(&hit.span.span)) {
                kept.push(hit.span);
            }
        }
        kept.sort_by_key(|t| t.span.start);
        kept
    }

    /// Runs the detector over every sentence of the document.
    pub fn detect_in_document(&self, doc: &AnnotatedDocument) -> Vec<TemporalSpan> {
        let body = doc.body_index();
        doc.sentences
            .iter()
            .flat_map(|s| self.detect(&body, s.span.start, s.span.end))
            .collect()
    }
}

fn expand_classes(regex: &str, classes: &BTreeMap<String, Vec<String>>) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(regex.len());
    let mut rest = regex;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or("unterminated '{'")?;
        let name = &after[..close];
        // regex repetition such as \d{1,2} passes through untouched
        if name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            out.push('{');
            out.push_str(name);
            out.push('}');
        } else {
            let alts = classes
                .get(name)
                .ok_or_else(|| format!("unknown class '{{{name}}}'"))?;
            out.push_str("(?:");
            out.push_str(&alts.join("|"));
            out.push(')');
        }
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Merges maximal runs of temporal spans separated only by whitespace,
/// conjunctions or punctuation within one sentence. The merged span takes the
/// most precise class of its run. Overlapping spans are merged as well.
pub fn merge_adjacent_temporals(spans: &[TemporalSpan], doc: &AnnotatedDocument) -> Vec<TemporalSpan> {
    let body = doc.body_index();
    let mut sorted: Vec<&TemporalSpan> = spans.iter().collect();
    sorted.sort_by_key(|t| (t.span.start, t.span.end));
    let mut out: Vec<TemporalSpan> = Vec::new();
    for t in sorted {
        if let Some(last) = out.last_mut() {
            if t.span.start <= last.span.end || separable(doc, &body, last.span.end, t.span.start) {
                let end = last.span.end.max(t.span.end);
                if let Some(span) = Span::over(&body, last.span.start, end) {
                    last.span = span;
                    last.klass = last.klass.max(t.klass);
                    continue;
                }
            }
        }
        out.push(t.clone());
    }
    out
}

/// True when the gap `[from, to)` holds only whitespace and tokens tagged as
/// conjunction or punctuation, without crossing a sentence boundary.
fn separable(doc: &AnnotatedDocument, body: &CharIndex<'_>, from: usize, to: usize) -> bool {
    let (Some(a), Some(b)) = (doc.sentence_at(from.saturating_sub(1)), doc.sentence_at(to)) else {
        return false;
    };
    if a != b {
        return false;
    }
    let Some(gap) = body.slice(from, to) else {
        return false;
    };
    let mut covered = vec![false; to - from];
    for t in doc.tokens.iter().filter(|t| t.span.start >= from && t.span.end <= to) {
        if !matches!(t.pos, Pos::Conj | Pos::Punct) {
            return false;
        }
        for slot in &mut covered[t.span.start - from..t.span.end - from] {
            *slot = true;
        }
    }
    // anything not covered by a separator token must be whitespace
    gap.chars()
        .zip(covered)
        .all(|(c, tok)| tok || c.is_whitespace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::heuristic::HeuristicProvider;
    use crate::annotation::AnnotationProvider;
    use crate::document::{AnnotatedDocument, RawArticle};

    fn detect(text: &str) -> Vec<(TemporalClass, String)> {
        let g = TemporalGrammar::builtin();
        let idx = CharIndex::new(text);
        g.detect(&idx, 0, idx.len())
            .into_iter()
            .map(|t| (t.klass, t.span.text))
            .collect()
    }

    fn doc(body: &str) -> AnnotatedDocument {
        let article = RawArticle {
            id: "t".into(),
            outlet: None,
            title: "Titre".into(),
            body: body.into(),
        };
        let layers = HeuristicProvider::default().annotate(&article).unwrap();
        AnnotatedDocument::from_parts(article, layers)
    }

    #[test]
    fn vague_duration_from_the_corpus() {
        assert_eq!(
            detect("La décision sera prise d'ici un mois ou deux."),
            [(TemporalClass::Duration, "d'ici un mois ou deux".to_string())]
        );
    }

    #[test]
    fn vague_date_within_week() {
        assert_eq!(
            detect("Le rapport sera déposé dans le courant de la semaine."),
            [(TemporalClass::Date, "dans le courant de la semaine".to_string())]
        );
    }

    #[test]
    fn clock_time() {
        assert_eq!(
            detect("La séance commence à 14 h 30."),
            [(TemporalClass::Time, "à 14 h 30".to_string())]
        );
    }

    #[test]
    fn recurring_interval() {
        assert_eq!(
            detect("Le marché ouvre chaque lundi."),
            [(TemporalClass::Set, "chaque lundi".to_string())]
        );
    }

    #[test]
    fn weekday_after_verb() {
        assert_eq!(
            detect("Le premier ministre a annoncé lundi un nouveau plan."),
            [(TemporalClass::Date, "lundi".to_string())]
        );
    }

    #[test]
    fn curly_apostrophes_are_normalized() {
        assert_eq!(
            detect("Les travaux dureront d’ici 2026."),
            [(TemporalClass::Date, "d’ici 2026".to_string())]
        );
    }

    #[test]
    fn no_match_is_empty() {
        assert!(detect("Le chat dort sur le canapé.").is_empty());
    }

    #[test]
    fn full_dates_beat_weekday_alone() {
        assert_eq!(
            detect("Il est arrivé le mardi 3 mars 2020."),
            [(TemporalClass::Date, "le mardi 3 mars 2020".to_string())]
        );
    }

    #[test]
    fn comma_separated_days_merge() {
        let d = doc("Les écoles ferment lundi, mardi et mercredi.");
        let spans = TemporalGrammar::builtin().detect_in_document(&d);
        assert_eq!(spans.len(), 3);
        let merged = merge_adjacent_temporals(&spans, &d);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].span.text, "lundi, mardi et mercredi");
        assert_eq!(merged[0].klass, TemporalClass::Date);
    }

    #[test]
    fn merge_keeps_most_precise_class() {
        let d = doc("La réunion aura lieu mardi, à 14 h.");
        let spans = TemporalGrammar::builtin().detect_in_document(&d);
        let merged = merge_adjacent_temporals(&spans, &d);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].klass, TemporalClass::Time);
    }

    #[test]
    fn verb_between_spans_blocks_merge() {
        let d = doc("Lundi commence la grève qui durera jusqu'à mardi.");
        let spans = TemporalGrammar::builtin().detect_in_document(&d);
        assert_eq!(spans.len(), 2, "{spans:?}");
        assert_eq!(merge_adjacent_temporals(&spans, &d).len(), 2);
    }

    #[test]
    fn single_span_unchanged_and_merge_idempotent() {
        let d = doc("Il viendra lundi.");
        let spans = TemporalGrammar::builtin().detect_in_document(&d);
        let once = merge_adjacent_temporals(&spans, &d);
        assert_eq!(once, spans);
        assert_eq!(merge_adjacent_temporals(&once, &d), once);
    }

    #[test]
    fn unknown_class_is_a_config_error() {
        let src = "[[patterns]]\nname = \"x\"\nklass = \"DATE\"\nregex = \"{nope}\"\n";
        assert!(matches!(TemporalGrammar::parse(src), Err(Error::Config(_))));
    }
}
