//! Threshold-based answer selection and the explainable answer report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::document::Span;
use crate::error::{Error, Result};
use crate::extract::Provenance;
use crate::question::{PerQuestion, Question};
use crate::score::{FactorWeights, ScoredCandidate};

/// Minimum total score per question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "half")]
    pub who: f64,
    #[serde(default = "half")]
    pub what: f64,
    #[serde(default = "half")]
    pub when: f64,
    #[serde(default = "half", rename = "where")]
    pub where_: f64,
    #[serde(default = "half")]
    pub why: f64,
    #[serde(default = "half")]
    pub how: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::uniform(half())
    }
}

impl Thresholds {
    pub fn uniform(tau: f64) -> Self {
        Thresholds {
            who: tau,
            what: tau,
            when: tau,
            where_: tau,
            why: tau,
            how: tau,
        }
    }

    pub fn get(&self, q: Question) -> f64 {
        match q {
            Question::Who => self.who,
            Question::What => self.what,
            Question::When => self.when,
            Question::Where => self.where_,
            Question::Why => self.why,
            Question::How => self.how,
        }
    }

    pub fn set(&mut self, q: Question, tau: f64) {
        match q {
            Question::Who => self.who = tau,
            Question::What => self.what = tau,
            Question::When => self.when = tau,
            Question::Where => self.where_ = tau,
            Question::Why => self.why = tau,
            Question::How => self.how = tau,
        }
    }

    /// Values must be finite and non-negative; values above 1 select nothing.
    pub fn validate(&self) -> Result<()> {
        for q in Question::ALL {
            let t = self.get(q);
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Config(format!("threshold for '{q}' is {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDetail {
    pub weight: f64,
    pub score: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub question: Question,
    pub text: String,
    pub span: Span,
    pub sentence_index: usize,
    pub score: f64,
    pub factors: IndexMap<String, FactorDetail>,
    pub provenance: BTreeSet<Provenance>,
}

/// Ranked answers of one article.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub id: String,
    pub answers: PerQuestion<Vec<Answer>>,
}

impl AnswerSet {
    /// Answer texts per question, in rank order.
    pub fn texts(&self) -> PerQuestion<Vec<String>> {
        PerQuestion::from_fn(|q| self.answers.get(q).iter().map(|a| a.text.clone()).collect())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("answer sets serialize");
        s.push('\n');
        s
    }
}

fn answer(q: Question, sc: &ScoredCandidate, weights: &FactorWeights) -> Answer {
    let w = weights.get(q);
    let factors = sc
        .factors
        .iter()
        .map(|(name, &score)| {
            let weight = w.get(name).copied().unwrap_or(0.0);
            (
                name.clone(),
                FactorDetail {
                    weight,
                    score,
                    contribution: weight * score,
                },
            )
        })
        .collect();
    Answer {
        question: q,
        text: sc.candidate.text.clone(),
        span: sc.candidate.span.clone(),
        sentence_index: sc.candidate.sentence_index,
        score: sc.total,
        factors,
        provenance: sc.candidate.provenance.clone(),
    }
}

/// Ranks one question's candidates: score descending, then earlier sentence,
/// then earlier span start.
pub fn rank(scored: &[ScoredCandidate]) -> Vec<&ScoredCandidate> {
    let mut sorted: Vec<&ScoredCandidate> = scored.iter().collect();
    sorted.sort_by(|a, b| {
        b.total
            .total_cmp(&a.total)
            .then(a.candidate.sentence_index.cmp(&b.candidate.sentence_index))
            .then(a.candidate.span.start.cmp(&b.candidate.span.start))
    });
    sorted
}

/// Keeps the candidates scoring at least the question's threshold.
pub fn select(
    id: &str,
    scored: &PerQuestion<Vec<ScoredCandidate>>,
    thresholds: &Thresholds,
    weights: &FactorWeights,
) -> AnswerSet {
    AnswerSet {
        id: id.to_string(),
        answers: PerQuestion::from_fn(|q| {
            let tau = thresholds.get(q);
            rank(scored.get(q))
                .into_iter()
                .filter(|sc| sc.total >= tau)
                .map(|sc| answer(q, sc, weights))
                .collect()
        }),
    }
}

/// Plain-text breakdown of one answer: one line per factor, then the total.
pub fn explain(a: &Answer) -> String {
    let mut out = String::new();
    let tags: Vec<&str> = a.provenance.iter().map(|p| p.as_str()).collect();
    let _ = writeln!(
        out,
        "{} (sentence {}, chars {}..{}): {:?}",
        a.question, a.sentence_index, a.span.start, a.span.end, a.text
    );
    let _ = writeln!(out, "  provenance: {}", tags.join(", "));
    let _ = writeln!(out, "  {:<20} {:>7} {:>7} {:>12}", "factor", "weight", "score", "contribution");
    for (name, f) in &a.factors {
        let _ = writeln!(
            out,
            "  {:<20} {:>7.2} {:>7.4} {:>12.4}",
            name, f.weight, f.score, f.contribution
        );
    }
    let sum: f64 = a.factors.values().map(|f| f.contribution).sum();
    let _ = writeln!(out, "  {:<20} {:>7} {:>7} {:>12.4}", "total", "", "", sum);
    out
}

/// Explanations of every answer of an article, grouped by question.
pub fn explain_set(set: &AnswerSet) -> String {
    let mut out = format!("article {}\n", set.id);
    for (q, answers) in set.answers.iter() {
        if answers.is_empty() {
            let _ = writeln!(out, "{q}: no answer above threshold");
        }
        for a in answers {
            out.push_str(&explain(a));
        }
    }
    out
}
