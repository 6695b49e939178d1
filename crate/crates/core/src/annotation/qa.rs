//! Q&A prompt chaining: six extractive questions asked in order, where
//! earlier answers fill slots of later prompts when their confidence opens
//! the corresponding gate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::document::{AnnotatedDocument, QaAnswer};
use crate::error::{Error, Result};
use crate::question::{PerQuestion, Question};

pub trait QaProvider: Send + Sync {
    fn name(&self) -> &str;
    /// Best extractive answer to `question` in `context`, with confidence.
    fn answer(&self, context: &str, question: &str) -> Result<(String, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Who,
    What,
}

impl Slot {
    fn placeholder(self) -> &'static str {
        match self {
            Slot::Who => "{who_answer}",
            Slot::What => "{what_answer}",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptTemplate {
    pub template: String,
    #[serde(default)]
    pub requires: Vec<Slot>,
}

impl PromptTemplate {
    fn render(&self, who: &str, what: &str) -> String {
        self.template
            .replace(Slot::Who.placeholder(), who)
            .replace(Slot::What.placeholder(), what)
    }
}

/// Per-question ordered templates with their gates.
#[derive(Debug, Clone, PartialEq)]
pub struct QaPromptSet {
    prompts: PerQuestion<Vec<PromptTemplate>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PromptFile {
    who: Vec<PromptTemplate>,
    what: Vec<PromptTemplate>,
    when: Vec<PromptTemplate>,
    #[serde(rename = "where")]
    where_: Vec<PromptTemplate>,
    why: Vec<PromptTemplate>,
    how: Vec<PromptTemplate>,
}

impl QaPromptSet {
    pub fn new(prompts: PerQuestion<Vec<PromptTemplate>>) -> Result<Self> {
        let set = QaPromptSet { prompts };
        set.validate()?;
        Ok(set)
    }

    pub fn parse(src: &str) -> Result<Self> {
        let f: PromptFile = toml::from_str(src).map_err(|e| Error::from_toml(&e, src))?;
        Self::new(PerQuestion {
            who: f.who,
            what: f.what,
            when: f.when,
            where_: f.where_,
            why: f.why,
            how: f.how,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/qa_prompts.toml")).expect("shipped prompts are valid")
    }

    pub fn templates(&self, q: Question) -> &[PromptTemplate] {
        self.prompts.get(q)
    }

    fn validate(&self) -> Result<()> {
        for (q, templates) in self.prompts.iter() {
            let err = |m: String| Err(Error::Config(format!("qa prompts for '{q}': {m}")));
            let Some(last) = templates.last() else {
                return err("no templates".into());
            };
            if !last.requires.is_empty() {
                return err("the last template must be ungated".into());
            }
            let allowed: &[Slot] = match q {
                Question::Who => &[],
                Question::What => &[Slot::Who],
                _ => &[Slot::Who, Slot::What],
            };
            for t in templates {
                for slot in [Slot::Who, Slot::What] {
                    if t.template.contains(slot.placeholder()) && !t.requires.contains(&slot) {
                        return err(format!("{} used without its gate", slot.placeholder()));
                    }
                }
                if let Some(s) = t.requires.iter().find(|s| !allowed.contains(s)) {
                    return err(format!("{:?} is not answered before this question", s));
                }
            }
        }
        Ok(())
    }
}

/// Confidence thresholds of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaGates {
    /// Answers at or above this confidence are kept as annotations.
    #[serde(default = "half")]
    pub retention: f64,
    /// The who answer fills later prompts at or above this confidence.
    #[serde(default = "half")]
    pub who: f64,
    /// The what answer fills later prompts at or above this confidence.
    #[serde(default = "fifth")]
    pub what: f64,
}

fn half() -> f64 {
    0.5
}

fn fifth() -> f64 {
    0.2
}

impl Default for QaGates {
    fn default() -> Self {
        QaGates {
            retention: half(),
            who: half(),
            what: fifth(),
        }
    }
}

impl QaGates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("retention", self.retention), ("who", self.who), ("what", self.what)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("qa gate '{name}' = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// One provider call of the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaCall {
    pub question: Question,
    /// Index of the selected template within the question's list.
    pub template: usize,
    pub prompt: String,
    pub answer: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaChainOutcome {
    /// Retained answers, at most one per question.
    pub answers: Vec<QaAnswer>,
    pub calls: Vec<QaCall>,
    pub warning: Option<String>,
}

/// The context passed to the provider: title line, then body.
pub fn qa_context(doc: &AnnotatedDocument) -> String {
    format!("{}\n{}", doc.article.title, doc.article.body)
}

/// Runs the six prompts in order. A provider failure yields no answers and a
/// warning instead of an error.
pub fn run_qa_chain(
    doc: &AnnotatedDocument,
    provider: &dyn QaProvider,
    prompts: &QaPromptSet,
    gates: &QaGates,
) -> QaChainOutcome {
    let context = qa_context(doc);
    let mut calls: Vec<QaCall> = Vec::with_capacity(Question::ALL.len());
    let mut who: Option<(String, f64)> = None;
    let mut what: Option<(String, f64)> = None;
    for q in Question::ALL {
        let open = |slot: Slot| {
            let (answer, threshold) = match slot {
                Slot::Who => (&who, gates.who),
                Slot::What => (&what, gates.what),
            };
            answer
                .as_ref()
                .is_some_and(|(text, c)| *c >= threshold && !text.trim().is_empty())
        };
        let templates = prompts.templates(q);
        let chosen = templates
            .iter()
            .position(|t| t.requires.iter().all(|&s| open(s)))
            .unwrap_or(templates.len() - 1);
        let prompt = templates[chosen].render(
            who.as_ref().map_or("", |a| a.0.as_str()),
            what.as_ref().map_or("", |a| a.0.as_str()),
        );
        let result = provider.answer(&context, &prompt).and_then(|(text, c)| {
            if c.is_finite() && (0.0..=1.0).contains(&c) {
                Ok((text, c))
            } else {
                Err(Error::Invalid(format!("confidence {c} outside [0, 1]")))
            }
        });
        let (answer, confidence) = match result {
            Ok(r) => r,
            Err(e) => {
                let warning = format!(
                    "{}: qa provider '{}' failed on '{q}': {e}",
                    doc.article.id,
                    provider.name()
                );
                log::warn!("{warning}");
                return QaChainOutcome {
                    answers: Vec::new(),
                    calls,
                    warning: Some(warning),
                };
            }
        };
        match q {
            Question::Who => who = Some((answer.clone(), confidence)),
            Question::What => what = Some((answer.clone(), confidence)),
            _ => {}
        }
        calls.push(QaCall {
            question: q,
            template: chosen,
            prompt,
            answer,
            confidence,
        });
    }
    let answers = calls
        .iter()
        .filter(|c| c.confidence >= gates.retention && !c.answer.trim().is_empty())
        .map(|c| QaAnswer {
            question: c.question,
            text: c.answer.clone(),
            confidence: c.confidence,
        })
        .collect();
    QaChainOutcome {
        answers,
        calls,
        warning: None,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::document::{Layers, RawArticle};

    /// Answers every question from a fixed table and records prompts.
    struct Scripted {
        who: f64,
        what: f64,
        prompts: Mutex<Vec<String>>,
        fail_on: Option<usize>,
    }

    impl Scripted {
        fn new(who: f64, what: f64) -> Self {
            Scripted {
                who,
                what,
                prompts: Mutex::new(Vec::new()),
                fail_on: None,
            }
        }
    }

    impl QaProvider for Scripted {
        fn name(&self) -> &str {
            "scripted"
        }
        fn answer(&self, _: &str, question: &str) -> Result<(String, f64)> {
            let mut log = self.prompts.lock().unwrap();
            log.push(question.to_string());
            if self.fail_on == Some(log.len() - 1) {
                return Err(Error::Invalid("quota".into()));
            }
            Ok(match log.len() {
                1 => ("Justin Trudeau".into(), self.who),
                2 => ("annonce un plan".into(), self.what),
                _ => ("autre".into(), 0.9),
            })
        }
    }

    fn doc() -> AnnotatedDocument {
        AnnotatedDocument::from_parts(
            RawArticle {
                id: "q".into(),
                outlet: None,
                title: "T".into(),
                body: "B".into(),
            },
            Layers::default(),
        )
    }

    fn run(who: f64, what: f64) -> (QaChainOutcome, Vec<String>) {
        let p = Scripted::new(who, what);
        let out = run_qa_chain(&doc(), &p, &QaPromptSet::builtin(), &QaGates::default());
        let prompts = p.prompts.into_inner().unwrap();
        (out, prompts)
    }

    #[test]
    fn who_above_gate_fills_what_prompt() {
        let (_, prompts) = run(0.8, 0.0);
        assert_eq!(
            prompts[1],
            "What is happening to Justin Trudeau in this news article? The answer is in the opening sentences."
        );
    }

    #[test]
    fn who_below_gate_uses_generic_what() {
        let (_, prompts) = run(0.3, 0.0);
        assert_eq!(prompts[1], "What is the main event? The answer is in the opening sentences.");
    }

    #[test]
    fn sub_retention_what_still_fills_why() {
        let (out, prompts) = run(0.8, 0.3);
        assert_eq!(prompts[4], "Why annonce un plan?");
        assert_eq!(prompts[5], "How does Justin Trudeau do annonce un plan?");
        assert!(out.answers.iter().all(|a| a.question != Question::What));
    }

    #[test]
    fn all_zero_confidence_gives_generic_prompts() {
        struct Zero;
        impl QaProvider for Zero {
            fn name(&self) -> &str {
                "zero"
            }
            fn answer(&self, _: &str, _: &str) -> Result<(String, f64)> {
                Ok(("x".into(), 0.0))
            }
        }
        let set = QaPromptSet::builtin();
        let out = run_qa_chain(&doc(), &Zero, &set, &QaGates::default());
        assert_eq!(out.calls.len(), 6);
        assert!(out.answers.is_empty());
        for c in &out.calls {
            assert_eq!(c.template, set.templates(c.question).len() - 1);
        }
    }

    #[test]
    fn provider_failure_is_a_warning() {
        let mut p = Scripted::new(0.9, 0.9);
        p.fail_on = Some(3);
        let out = run_qa_chain(&doc(), &p, &QaPromptSet::builtin(), &QaGates::default());
        assert!(out.answers.is_empty());
        assert!(out.warning.unwrap().contains("where"));
    }

    #[test]
    fn ungated_slot_is_rejected() {
        let src = include_str!("../../data/qa_prompts.toml")
            .replace("requires = [\"who\", \"what\"]", "requires = [\"who\"]");
        assert!(matches!(QaPromptSet::parse(&src), Err(Error::Config(_))));
    }
}
