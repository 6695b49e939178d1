use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::document::{Span, Token};
use crate::error::{Error, Result};
use crate::text::{normalize_surface, CharIndex};
use crate::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MatchOn {
    #[default]
    Surface,
    Lemma,
}

/// A named set of lowercase entries, possibly multiword.
#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    entries: BTreeSet<String>,
    match_on: MatchOn,
    // first word -> (entry words, entry), longest first
    index: HashMap<String, Vec<(Vec<String>, String)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconMatch {
    pub span: Span,
    pub entry: String,
    /// Position of the first matched token in the slice given to the matcher.
    pub first_token: usize,
    pub token_count: usize,
}

impl Lexicon {
    pub fn new<I, S>(name: &str, entries: I, match_on: MatchOn) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: BTreeSet<String> = entries
            .into_iter()
            .map(|e| normalize_entry(e.as_ref()))
            .filter(|e| !e.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(Error::Lexicon {
                name: name.to_string(),
                message: "no entries".into(),
            });
        }
        Ok(Self::from_set(name, entries, match_on))
    }

    fn from_set(name: &str, entries: BTreeSet<String>, match_on: MatchOn) -> Self {
        let mut index: HashMap<String, Vec<(Vec<String>, String)>> = HashMap::new();
        for entry in &entries {
            let words = tokenize::words(entry);
            if let Some(first) = words.first() {
                index
                    .entry(first.clone())
                    .or_default()
                    .push((words.clone(), entry.clone()));
            }
        }
        for seqs in index.values_mut() {
            seqs.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.1.cmp(&b.1)));
        }
        Lexicon {
            name: name.to_string(),
            entries,
            match_on,
            index,
        }
    }

    /// Parses the lexicon file format: one entry per line, `#` comments,
    /// blank lines ignored, optional `match_on: lemma` header. Returns the
    /// lexicon and warnings for duplicate entries.
    pub fn parse(name: &str, src: &str) -> Result<(Self, Vec<String>)> {
        let mut match_on = MatchOn::Surface;
        let mut entries = BTreeSet::new();
        let mut warnings = Vec::new();
        let mut first_line = true;
        for (lineno, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if first_line {
                first_line = false;
                if let Some(mode) = line.strip_prefix("match_on:") {
                    match_on = match mode.trim().to_lowercase().as_str() {
                        "lemma" => MatchOn::Lemma,
                        "surface" => MatchOn::Surface,
                        other => {
                            return Err(Error::Lexicon {
                                name: name.to_string(),
                                message: format!("unknown match_on mode '{other}'"),
                            })
                        }
                    };
                    continue;
                }
            }
            let entry = normalize_entry(line);
            if !entries.insert(entry.clone()) {
                let warning = format!("{name}:{}: duplicate entry '{entry}'", lineno + 1);
                log::warn!("{warning}");
                warnings.push(warning);
            }
        }
        if entries.is_empty() {
            return Err(Error::Lexicon {
                name: name.to_string(),
                message: "file has no entries".into(),
            });
        }
        Ok((Self::from_set(name, entries, match_on), warnings))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::parse(&name, &src)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn match_on(&self) -> MatchOn {
        self.match_on
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, entry: &str) -> bool {
        self.entries.contains(&normalize_entry(entry))
    }

    /// Longest-match-first, non-overlapping matches over a token sequence.
    pub fn match_tokens(&self, tokens: &[&Token], body: &CharIndex<'_>) -> Vec<LexiconMatch> {
        let keys: Vec<String> = tokens
            .iter()
            .map(|t| match self.match_on {
                MatchOn::Surface => normalize_surface(&t.span.text),
                MatchOn::Lemma => normalize_surface(&t.lemma),
            })
            .collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let hit = self.index.get(&keys[i]).and_then(|seqs| {
                seqs.iter().find(|(words, _)| {
                    i + words.len() <= keys.len()
                        && words.iter().zip(&keys[i..]).all(|(w, k)| w == k)
                })
            });
            match hit {
                Some((words, entry)) => {
                    let last = tokens[i + words.len() - 1];
                    let start = tokens[i].span.start;
                    if let Some(span) = Span::over(body, start, last.span.end) {
                        out.push(LexiconMatch {
                            span,
                            entry: entry.clone(),
                            first_token: i,
                            token_count: words.len(),
                        });
                    }
                    i += words.len();
                }
                None => i += 1,
            }
        }
        out
    }

    /// Union with the synonyms of existing entries. Original entries are kept.
    pub fn expand_with_synonyms(&self, table: &SynonymTable) -> Lexicon {
        let mut entries = self.entries.clone();
        for entry in &self.entries {
            if let Some(syns) = table.synonyms(entry) {
                entries.extend(syns.iter().cloned());
            }
        }
        Self::from_set(&self.name, entries, self.match_on)
    }
}

fn normalize_entry(s: &str) -> String {
    normalize_surface(s)
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Offline synonym table: `entry<TAB>syn1,syn2` per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynonymTable {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymTable {
    pub fn parse(src: &str) -> Result<Self> {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (lineno, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let (entry, syns) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                column: 1,
                message: "expected 'entry<TAB>syn1,syn2'".into(),
            })?;
            let set = map.entry(normalize_entry(entry)).or_default();
            set.extend(
                syns.split(',')
                    .map(normalize_entry)
                    .filter(|s| !s.is_empty()),
            );
        }
        Ok(SynonymTable { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }

    pub fn synonyms(&self, entry: &str) -> Option<&BTreeSet<String>> {
        self.map.get(entry)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
