//! Gold-annotated corpus: one JSON file per article plus a manifest of ids.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::document::RawArticle;
use crate::error::{Error, Result};
use crate::question::{PerQuestion, Question};

/// One participant's answers to one article. `None` means the participant
/// did not annotate that question.
pub type ArticleAnswers = PerQuestion<Option<Vec<String>>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    who: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    what: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    when: Option<Vec<String>>,
    #[serde(default, rename = "where", skip_serializing_if = "Option::is_none")]
    where_: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    why: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    how: Option<Vec<String>>,
}

impl From<GoldFile> for ArticleAnswers {
    fn from(g: GoldFile) -> Self {
        PerQuestion {
            who: g.who,
            what: g.what,
            when: g.when,
            where_: g.where_,
            why: g.why,
            how: g.how,
        }
    }
}

impl From<&ArticleAnswers> for GoldFile {
    fn from(a: &ArticleAnswers) -> Self {
        GoldFile {
            who: a.who.clone(),
            what: a.what.clone(),
            when: a.when.clone(),
            where_: a.where_.clone(),
            why: a.why.clone(),
            how: a.how.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArticleFile {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outlet: Option<String>,
    title: String,
    body: String,
    #[serde(default)]
    annotations: BTreeMap<String, GoldFile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusArticle {
    pub article: RawArticle,
    /// Annotator id to answers.
    pub gold: BTreeMap<String, ArticleAnswers>,
}

impl CorpusArticle {
    pub fn parse(src: &str) -> Result<Self> {
        let f: ArticleFile = serde_json::from_str(src).map_err(|e| Error::from_json(&e))?;
        Ok(CorpusArticle {
            article: RawArticle {
                id: f.id,
                outlet: f.outlet,
                title: f.title,
                body: f.body,
            },
            gold: f.annotations.into_iter().map(|(k, v)| (k, v.into())).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let f = ArticleFile {
            id: self.article.id.clone(),
            outlet: self.article.outlet.clone(),
            title: self.article.title.clone(),
            body: self.article.body.clone(),
            annotations: self.gold.iter().map(|(k, v)| (k.clone(), v.into())).collect(),
        };
        let mut s = serde_json::to_string_pretty(&f).expect("corpus articles serialize");
        s.push('\n');
        s
    }
}

/// A problem found by [`AnnotatedCorpus::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusIssue {
    pub id: String,
    pub message: String,
}

impl std::fmt::Display for CorpusIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.id, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotatedCorpus {
    /// Sorted by article id.
    pub articles: Vec<CorpusArticle>,
}

pub const MANIFEST: &str = "manifest.txt";

/// Ids listed in a manifest: one per line, `#` comments.
pub fn read_manifest(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST);
    let src = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

pub fn article_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

impl AnnotatedCorpus {
    pub fn new(mut articles: Vec<CorpusArticle>) -> Self {
        articles.sort_by(|a, b| a.article.id.cmp(&b.article.id));
        AnnotatedCorpus { articles }
    }

    /// Loads every article of the manifest without checking invariants.
    /// Unreadable articles are returned as errors next to the loaded ones.
    pub fn load_partial(dir: &Path) -> Result<(Self, Vec<(String, Error)>)> {
        let ids = read_manifest(dir)?;
        let mut articles = Vec::new();
        let mut failures = Vec::new();
        for id in ids {
            let path = article_path(dir, &id);
            let parsed = std::fs::read_to_string(&path)
                .map_err(|e| Error::io(&path, e))
                .and_then(|src| CorpusArticle::parse(&src));
            match parsed {
                Ok(a) if a.article.id != id => failures.push((
                    id.clone(),
                    Error::Invalid(format!("{} declares id '{}'", path.display(), a.article.id)),
                )),
                Ok(a) => articles.push(a),
                Err(e) => failures.push((id, e)),
            }
        }
        Ok((Self::new(articles), failures))
    }

    /// Loads and validates; any unreadable article or invariant violation is
    /// an error.
    pub fn load(dir: &Path) -> Result<Self> {
        let (corpus, failures) = Self::load_partial(dir)?;
        if let Some((_, e)) = failures.into_iter().next() {
            return Err(e);
        }
        let issues = corpus.validate();
        if !issues.is_empty() {
            let list: Vec<String> = issues.iter().map(ToString::to_string).collect();
            return Err(Error::Invalid(format!("corpus is invalid: {}", list.join("; "))));
        }
        Ok(corpus)
    }

    pub fn get(&self, id: &str) -> Option<&CorpusArticle> {
        self.articles
            .binary_search_by(|a| a.article.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.articles[i])
    }

    pub fn ids(&self) -> Vec<&str> {
        self.articles.iter().map(|a| a.article.id.as_str()).collect()
    }

    pub fn annotators(&self) -> BTreeSet<&str> {
        self.articles
            .iter()
            .flat_map(|a| a.gold.keys().map(String::as_str))
            .collect()
    }

    pub fn has_gold(&self) -> bool {
        self.articles.iter().any(|a| !a.gold.is_empty())
    }

    /// Unique ids, non-empty title and body, and every gold answer copied
    /// verbatim from the title or body.
    pub fn validate(&self) -> Vec<CorpusIssue> {
        let mut issues = Vec::new();
        let mut issue = |id: &str, message: String| {
            issues.push(CorpusIssue {
                id: id.to_string(),
                message,
            })
        };
        for w in self.articles.windows(2) {
            if w[0].article.id == w[1].article.id {
                issue(&w[0].article.id, "duplicate article id".into());
            }
        }
        for a in &self.articles {
            let id = &a.article.id;
            if a.article.title.trim().is_empty() {
                issue(id, "empty title".into());
            }
            if a.article.body.trim().is_empty() {
                issue(id, "empty body".into());
            }
            for (annotator, answers) in &a.gold {
                for q in Question::ALL {
                    for s in answers.get(q).iter().flatten() {
                        if !a.article.title.contains(s.as_str()) && !a.article.body.contains(s.as_str()) {
                            issue(id, format!("{annotator}/{q}: {s:?} does not occur in the article"));
                        }
                    }
                }
            }
        }
        issues
    }
}

/// A named set of answers over the corpus: an annotator, the system or the
/// baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Participant {
    pub id: String,
    /// Article id to answers; articles absent from the map are unanswered.
    pub answers: BTreeMap<String, ArticleAnswers>,
}

impl Participant {
    pub fn annotator(corpus: &AnnotatedCorpus, id: &str) -> Result<Self> {
        if !corpus.annotators().contains(id) {
            return Err(Error::UnknownParticipant(id.to_string()));
        }
        Ok(Participant {
            id: id.to_string(),
            answers: corpus
                .articles
                .iter()
                .filter_map(|a| a.gold.get(id).map(|g| (a.article.id.clone(), g.clone())))
                .collect(),
        })
    }

    /// A participant answering every question of every listed article.
    pub fn complete(id: &str, answers: BTreeMap<String, PerQuestion<Vec<String>>>) -> Self {
        Participant {
            id: id.to_string(),
            answers: answers
                .into_iter()
                .map(|(k, v)| (k, PerQuestion::from_fn(|q| Some(v.get(q).clone()))))
                .collect(),
        }
    }

    pub fn answers_to(&self, article: &str, q: Question) -> Option<&[String]> {
        self.answers.get(article).and_then(|a| a.get(q).as_deref())
    }
}

/// Resolves participant ids: system participants first, then annotators.
pub fn resolve_participants(
    corpus: &AnnotatedCorpus,
    ids: &[String],
    systems: &[Participant],
) -> Result<Vec<Participant>> {
    if ids.is_empty() {
        return Err(Error::Invalid("no participants given".into()));
    }
    ids.iter()
        .map(|id| match systems.iter().find(|p| &p.id == id) {
            Some(p) => Ok(p.clone()),
            None => Participant::annotator(corpus, id),
        })
        .collect()
}
