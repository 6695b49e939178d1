//! Agreement between participants, threshold sweeps and answer counts.

mod agreement;
mod corpus;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::SimilarityConfig;
use crate::question::{PerQuestion, Question};
use crate::score::ScoredCandidate;
use crate::select::rank;

pub use agreement::{agreement, match_answers};
pub use corpus::{
    article_path, read_manifest, resolve_participants, AnnotatedCorpus, ArticleAnswers, CorpusArticle, CorpusIssue,
    Participant, MANIFEST,
};

/// Symmetric matrix over participants; `None` where no article was
/// comparable.
pub type Matrix = Vec<Vec<Option<f64>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub participants: Vec<String>,
    /// Mean per-article agreement of every pair, per question.
    pub questions: PerQuestion<Matrix>,
    /// Mean over questions of every pair.
    pub overall: Matrix,
    /// Mean over all distinct pairs and questions.
    pub mean: Option<f64>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean agreement of two participants on one question over the articles
/// both answered.
pub fn pair_agreement(
    articles: &[&str],
    p: &Participant,
    r: &Participant,
    q: Question,
    sim: &SimilarityConfig,
) -> Option<f64> {
    let per_article: Vec<f64> = articles
        .par_iter()
        .filter_map(|id| {
            let (a, b) = (p.answers_to(id, q)?, r.answers_to(id, q)?);
            Some(agreement(a, b, sim))
        })
        .collect();
    mean(per_article)
}

/// Agreement of every pair of participants, per question, averaged over
/// articles. Articles a participant did not annotate for a question are
/// skipped for that pair.
pub fn pairwise_agreement(
    corpus: &AnnotatedCorpus,
    participants: &[Participant],
    sim: &SimilarityConfig,
) -> Result<AgreementReport> {
    if participants.is_empty() {
        return Err(Error::Invalid("no participants given".into()));
    }
    let ids = corpus.ids();
    let n = participants.len();
    let questions = PerQuestion::from_fn(|q| {
        let mut m: Matrix = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = pair_agreement(&ids, &participants[i], &participants[j], q, sim);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    });
    let overall: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| mean(Question::ALL.iter().filter_map(|&q| questions.get(q)[i][j])))
                .collect()
        })
        .collect();
    let mean_all = mean(
        Question::ALL
            .iter()
            .flat_map(|&q| {
                let m = questions.get(q);
                (0..n).flat_map(move |i| ((i + 1)..n).filter_map(move |j| m[i][j]))
            })
            .collect::<Vec<_>>(),
    );
    Ok(AgreementReport {
        participants: participants.iter().map(|p| p.id.clone()).collect(),
        questions,
        overall,
        mean: mean_all,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

impl AgreementReport {
    /// Row of one participant against every other, per question.
    pub fn versus(&self, id: &str) -> Option<PerQuestion<Vec<(String, Option<f64>)>>> {
        let i = self.participants.iter().position(|p| p == id)?;
        Some(PerQuestion::from_fn(|q| {
            self.participants
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, p)| (p.clone(), self.questions.get(q)[i][j]))
                .collect()
        }))
    }

    /// One aligned table per question, then the overall table.
    pub fn render(&self) -> String {
        let width = self.participants.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let mut table = |title: &str, m: &Matrix| {
            let _ = write!(out, "{title:<width$}");
            for p in &self.participants {
                let _ = write!(out, " {p:>width$}");
            }
            out.push('\n');
            for (i, p) in self.participants.iter().enumerate() {
                let _ = write!(out, "{p:<width$}");
                for v in &m[i] {
                    let _ = write!(out, " {:>width$}", cell(*v));
                }
                out.push('\n');
            }
            out.push('\n');
        };
        for (q, m) in self.questions.iter() {
            table(q.as_str(), m);
        }
        table("overall", &self.overall);
        let _ = writeln!(out, "mean agreement over distinct pairs: {}", cell(self.mean));
        out
    }
}

/// System answer texts for one question at threshold `tau`.
pub fn answers_at(scored: &[ScoredCandidate], tau: f64) -> Vec<String> {
    rank(scored)
        .into_iter()
        .filter(|s| s.total >= tau)
        .map(|s| s.candidate.text.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub agreement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub question: Question,
    pub curve: Vec<SweepPoint>,
    /// Threshold of maximal agreement; ties go to the smaller threshold.
    pub best: Option<f64>,
}

/// Agreement of the system at each threshold of `grid` for one question,
/// averaged over annotators. `scored` maps article ids to the system's
/// scored candidates.
pub fn threshold_sweep(
    scored: &BTreeMap<String, PerQuestion<Vec<ScoredCandidate>>>,
    annotators: &[Participant],
    grid: &[f64],
    question: Question,
    sim: &SimilarityConfig,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Invalid("threshold grid is empty".into()));
    }
    if let Some(t) = grid.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::Invalid(format!("threshold {t} is not a non-negative number")));
    }
    let ids: Vec<&str> = scored.keys().map(String::as_str).collect();
    let curve: Vec<SweepPoint> = grid
        .iter()
        .map(|&tau| {
            let system = Participant {
                id: "system".into(),
                answers: scored
                    .iter()
                    .map(|(id, s)| {
                        let mut a: ArticleAnswers = PerQuestion::default();
                        *a.get_mut(question) = Some(answers_at(s.get(question), tau));
                        (id.clone(), a)
                    })
                    .collect(),
            };
            let per_annotator = annotators
                .iter()
                .filter_map(|ann| pair_agreement(&ids, &system, ann, question, sim))
                .collect::<Vec<_>>();
            SweepPoint {
                tau,
                agreement: mean(per_annotator),
            }
        })
        .collect();
    let best = curve
        .iter()
        .filter_map(|p| p.agreement.map(|a| (p.tau, a)))
        .fold(None::<(f64, f64)>, |acc, (t, a)| match acc {
            Some((bt, ba)) if ba > a || (ba == a && bt <= t) => Some((bt, ba)),
            _ => Some((t, a)),
        })
        .map(|(t, _)| t);
    Ok(SweepResult {
        question,
        curve,
        best,
    })
}

impl SweepResult {
    pub fn render(&self) -> String {
        let mut out = format!("{:>6}  agreement ({})\n", "tau", self.question);
        for p in &self.curve {
            let _ = writeln!(out, "{:>6.3}  {}", p.tau, cell(p.agreement));
        }
        out
    }

    /// Config snippet setting the recommended threshold.
    pub fn suggested_config(&self) -> String {
        match self.best {
            Some(t) => format!("[thresholds]\n{} = {t}\n", self.question),
            None => format!("# no comparable articles for '{}'\n", self.question),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub participants: Vec<String>,
    /// Mean number of answers per question, per participant.
    pub questions: PerQuestion<Vec<Option<f64>>>,
    /// Mean over every answered (article, question) of each participant.
    pub all: Vec<Option<f64>>,
}

/// Mean number of answers per question for each participant.
pub fn answer_count_stats(corpus: &AnnotatedCorpus, participants: &[Participant]) -> CountTable {
    let ids = corpus.ids();
    let lens = |p: &Participant, q: Question| -> Vec<f64> {
        ids.iter()
            .filter_map(|id| p.answers_to(id, q).map(|a| a.len() as f64))
            .collect()
    };
    CountTable {
        participants: participants.iter().map(|p| p.id.clone()).collect(),
        questions: PerQuestion::from_fn(|q| participants.iter().map(|p| mean(lens(p, q))).collect()),
        all: participants
            .iter()
            .map(|p| mean(Question::ALL.iter().flat_map(|&q| lens(p, q))))
            .collect(),
    }
}

impl CountTable {
    pub fn render(&self) -> String {
        let width = self.participants.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = format!("{:<9}", "question");
        for p in &self.participants {
            let _ = write!(out, " {p:>width$}");
        }
        out.push('\n');
        let mut row = |label: &str, values: &[Option<f64>]| {
            let _ = write!(out, "{label:<9}");
            for v in values {
                let _ = write!(out, " {:>width$}", v.map_or_else(|| "-".into(), |x| format!("{x:.2}")));
            }
            out.push('\n');
        };
        for (q, values) in self.questions.iter() {
            row(q.as_str(), values);
        }
        row("all", &self.all);
        out
    }
}
