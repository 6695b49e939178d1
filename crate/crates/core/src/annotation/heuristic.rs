//! Model-free annotation provider: rule-based sentence splitting, a
//! closed-class and suffix POS tagger with verb lemmas and tenses, a flat
//! NP/VP chunker, and lexicon/gazetteer NER over capitalized runs.

use std::collections::{HashMap, HashSet};

use crate::annotation::{AnnotationProvider, Capabilities};
use crate::document::{
    Chunk, ChunkKind, EntityLabel, EntitySpan, Layers, Pos, RawArticle, RootKind, Sentence, Span,
    Tense, Token,
};
use crate::error::Result;
use crate::resources::Gazetteer;
use crate::text::{fold, normalize_surface, CharIndex};
use crate::tokenize::{tokenize, RawToken, TokenClass};

const CLOSED_CLASS: &str = include_str!("../../data/heuristic/closed_class.tsv");
const IRREGULAR_VERBS: &str = include_str!("../../data/heuristic/irregular_verbs.tsv");
const VERB_LEMMAS: &str = include_str!("../../data/heuristic/verb_lemmas.txt");
const GIVEN_NAMES: &str = include_str!("../../data/ner/given_names.txt");
const PERSON_TITLES: &str = include_str!("../../data/ner/person_titles.txt");
const ORG_KEYWORDS: &str = include_str!("../../data/ner/org_keywords.txt");
const ORGANIZATIONS: &str = include_str!("../../data/ner/organizations.txt");

const ADJECTIVES: &[&str] = &[
    "grand", "grande", "grands", "grandes", "petit", "petite", "petits", "petites", "nouveau",
    "nouvel", "nouvelle", "nouveaux", "nouvelles", "premier", "première", "premiers",
    "premières", "dernier", "dernière", "derniers", "dernières", "ancien", "ancienne", "jeune",
    "jeunes", "vieux", "vieille", "bon", "bonne", "bons", "bonnes", "mauvais", "mauvaise", "gros",
    "grosse", "haut", "haute", "long", "longue", "court", "courte", "seul", "seule", "seuls",
    "seules", "autre", "autres", "prochain", "prochaine", "prochains", "prochaines", "important",
    "importante", "importants", "importantes", "grave", "graves", "fort", "forte", "forts",
    "fortes", "faible", "faibles", "large", "larges", "principal", "principale", "principaux",
    "principales", "public", "publique", "publics", "publiques", "certain", "certaine", "plein",
    "pleine", "entier", "entière", "propre", "propres", "libre", "libres", "simple", "simples",
    "nombreux", "nombreuses", "différent", "différente", "différents", "différentes", "québécois",
    "québécoise", "québécoises", "canadien", "canadienne", "canadiens", "canadiennes", "français",
    "française", "françaises", "américain", "américaine", "américains", "américaines", "russe",
    "russes", "ukrainien", "ukrainienne", "fermé", "fermée", "fermés", "fermées",
];

const ADJ_SUFFIXES: &[&str] = &[
    "ique", "iques", "able", "ables", "ible", "ibles", "al", "ale", "ales", "el", "elle", "elles",
    "if", "ive", "ives", "ifs", "eux", "euse", "euses",
];

/// Words ending in "-er" that are not infinitives.
const ER_NOUNS: &[&str] = &["hiver", "mer", "fer", "cher", "enfer", "super", "hier", "amer", "hier"];

const SUBJECT_CLITICS: &[&str] = &[
    "il", "elle", "ils", "elles", "on", "je", "j'", "tu", "nous", "vous", "se", "s'", "ne", "n'",
    "qui", "y", "me", "m'", "te", "t'", "lui",
];

const SUBORDINATORS: &[&str] = &[
    "qui", "que", "qu'", "dont", "où", "lorsque", "lorsqu'", "quand", "si", "parce", "puisque",
    "puisqu'", "comme",
];

const NAME_CONNECTORS: &[&str] = &["de", "d'", "du", "des", "la", "l'"];

#[derive(Debug, Clone, Copy)]
struct ClosedEntry {
    pos: Pos,
    verb: Option<Tense>,
}

#[derive(Debug, Clone)]
struct VerbForm {
    lemma: String,
    tense: Tense,
}

/// Rule-based provider that needs no models; used by tests and as a
/// fallback.
#[derive(Debug, Clone)]
pub struct HeuristicProvider {
    closed: HashMap<String, (ClosedEntry, String)>,
    verbs: HashMap<String, VerbForm>,
    given_names: HashSet<String>,
    titles: HashSet<String>,
    org_keywords: HashSet<String>,
    organizations: HashSet<String>,
    gazetteer: Gazetteer,
}

impl Default for HeuristicProvider {
    fn default() -> Self {
        Self::new(Gazetteer::builtin())
    }
}

fn data_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_tense(s: &str) -> Tense {
    match s {
        "PRESENT" => Tense::Present,
        "FUTURE" => Tense::Future,
        "PAST" => Tense::Past,
        "PARTICIPLE_PRESENT" => Tense::ParticiplePresent,
        _ => Tense::Other,
    }
}

fn parse_pos(s: &str) -> Pos {
    match s {
        "DET" => Pos::Det,
        "ADP" => Pos::Adp,
        "PRON" => Pos::Pron,
        "CONJ" => Pos::Conj,
        "ADV" => Pos::Adv,
        "NUM" => Pos::Num,
        "AUX" => Pos::Aux,
        _ => Pos::Other,
    }
}

impl HeuristicProvider {
    pub fn new(gazetteer: Gazetteer) -> Self {
        let mut closed = HashMap::new();
        for line in data_lines(CLOSED_CLASS) {
            let cols: Vec<&str> = line.split('\t').collect();
            let pos = parse_pos(cols[1]);
            let lemma = cols.get(2).copied().unwrap_or(cols[0]).to_string();
            let verb = cols.get(3).map(|t| parse_tense(t));
            closed
                .entry(cols[0].to_string())
                .or_insert((ClosedEntry { pos, verb }, lemma));
        }
        let mut verbs = HashMap::new();
        for line in data_lines(IRREGULAR_VERBS) {
            let cols: Vec<&str> = line.split('\t').collect();
            verbs.entry(cols[0].to_string()).or_insert(VerbForm {
                lemma: cols[1].to_string(),
                tense: parse_tense(cols[2]),
            });
        }
        for lemma in data_lines(VERB_LEMMAS) {
            for (form, tense) in conjugate(lemma) {
                verbs.entry(form).or_insert(VerbForm {
                    lemma: lemma.to_string(),
                    tense,
                });
            }
        }
        let set = |src: &str| data_lines(src).map(fold).collect::<HashSet<_>>();
        HeuristicProvider {
            closed,
            verbs,
            given_names: set(GIVEN_NAMES),
            titles: data_lines(PERSON_TITLES).map(normalize_surface).collect(),
            org_keywords: set(ORG_KEYWORDS),
            organizations: set(ORGANIZATIONS),
            gazetteer,
        }
    }

    /// Lemma and tense of a known verb form.
    pub fn verb_form(&self, word: &str) -> Option<(&str, Tense)> {
        self.verbs
            .get(&normalize_surface(word))
            .map(|v| (v.lemma.as_str(), v.tense))
    }
}

/// Inflected forms of a verb lemma with their coarse tense.
fn conjugate(lemma: &str) -> Vec<(String, Tense)> {
    use Tense::*;
    let mut out: Vec<(String, Tense)> = Vec::new();
    let mut add = |stem: &str, endings: &[&str], tense: Tense| {
        for e in endings {
            out.push((format!("{stem}{e}"), tense));
        }
    };
    if let Some(prefix) = lemma.strip_suffix("prendre") {
        let s = format!("{prefix}pren");
        add(&s, &["d", "ds", "nent"], Present);
        add(&s, &["ait", "aient"], Past);
        add(&s, &["dra", "dront"], Future);
        add(&s, &["drait", "draient", "dre"], Other);
        add(&s, &["ant"], ParticiplePresent);
        add(prefix, &["pris", "prise", "prises", "prit", "prirent"], Past);
    } else if let Some(s) = lemma.strip_suffix("uire") {
        add(s, &["uit", "uisent"], Present);
        add(s, &["uisait", "uisaient", "uite", "uits", "uites", "uisit"], Past);
        add(s, &["uira", "uiront"], Future);
        add(s, &["uirait", "uiraient", "uire"], Other);
        add(s, &["uisant"], ParticiplePresent);
    } else if let Some(s) = lemma
        .strip_suffix("venir")
        .map(|p| format!("{p}v"))
        .or_else(|| lemma.strip_suffix("tenir").map(|p| format!("{p}t")))
    {
        add(&s, &["ient", "iens", "iennent"], Present);
        add(&s, &["enait", "enaient", "enu", "enue", "enus", "enues", "int", "inrent"], Past);
        add(&s, &["iendra", "iendront"], Future);
        add(&s, &["iendrait", "iendraient", "enir"], Other);
        add(&s, &["enant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("tre").filter(|s| s.ends_with('t')) {
        // battre, mettre families: stem keeps one t
        let base = &s[..s.len() - 1];
        add(base, &["t", "ts", "ttent"], Present);
        add(base, &["ttait", "ttaient"], Past);
        add(base, &["ttra", "ttront"], Future);
        add(base, &["ttrait", "ttraient", "ttre"], Other);
        add(base, &["ttant"], ParticiplePresent);
        if let Some(p) = lemma.strip_suffix("mettre") {
            add(p, &["mis", "mise", "mises", "mit", "mirent"], Past);
        } else {
            add(base, &["ttu", "ttue", "ttus", "ttit"], Past);
        }
    } else if let Some(s) = lemma.strip_suffix("ndre").filter(|s| s.ends_with("ai") || s.ends_with("ei") || s.ends_with("oi")) {
        add(s, &["nt", "ns", "gnent"], Present);
        add(s, &["gnait", "gnaient", "nte", "nts", "ntes", "gnit"], Past);
        add(s, &["ndra", "ndront"], Future);
        add(s, &["ndrait", "ndraient", "ndre"], Other);
        add(s, &["gnant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("clure") {
        let s = format!("{s}clu");
        add(&s, &["t", "ent"], Present);
        add(&s, &["ait", "aient", "", "e", "s", "es"], Past);
        add(&s, &["ra", "ront"], Future);
        add(&s, &["rait", "raient", "re"], Other);
        add(&s, &["ant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("aître").or_else(|| lemma.strip_suffix("aitre")) {
        add(s, &["aît", "ait", "aissent"], Present);
        add(s, &["aissait", "aissaient", "u", "ue", "us", "ues", "ut", "urent"], Past);
        add(s, &["aîtra", "aîtront", "aitra"], Future);
        add(s, &["aîtrait", "aître"], Other);
        add(s, &["aissant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("rir").filter(|s| s.ends_with("v") || s.ends_with("ff")) {
        add(s, &["re", "res", "rent"], Present);
        add(s, &["rait", "raient", "ert", "erte", "erts", "ertes", "rit", "rirent"], Past);
        add(s, &["rira", "riront"], Future);
        add(s, &["rirait", "rir"], Other);
        add(s, &["rant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("dre") {
        let s = format!("{s}d");
        add(&s, &["", "s", "ent"], Present);
        add(&s, &["ait", "aient", "u", "ue", "us", "ues", "it", "irent"], Past);
        add(&s, &["ra", "ront"], Future);
        add(&s, &["rait", "raient", "re"], Other);
        add(&s, &["ant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("ir") {
        add(s, &["it", "is", "issent", "issons", "issez"], Present);
        add(s, &["issait", "issaient", "i", "ie", "ies", "irent"], Past);
        add(s, &["ira", "iront", "irai", "irons"], Future);
        add(s, &["irait", "iraient", "ir"], Other);
        add(s, &["issant"], ParticiplePresent);
    } else if let Some(s) = lemma.strip_suffix("er") {
        // soft stem before a/o: annonçons, mangeant
        let soft = if let Some(p) = s.strip_suffix('c') {
            format!("{p}ç")
        } else if s.ends_with('g') {
            format!("{s}e")
        } else {
            s.to_string()
        };
        let mut stems = vec![s.to_string()];
        // lève, cède, appelle, paie
        let chars: Vec<char> = s.chars().collect();
        if chars.len() >= 2 {
            let pen = chars.len() - 2;
            if matches!(chars[pen], 'e' | 'é') {
                let mut v = chars.clone();
                v[pen] = 'è';
                stems.push(v.into_iter().collect());
            }
        }
        if s.ends_with("el") || s.ends_with("et") {
            stems.push(format!("{s}{}", s.chars().last().unwrap()));
        }
        if let Some(p) = s.strip_suffix('y') {
            stems.push(format!("{p}i"));
        }
        for st in &stems {
            add(st, &["e", "es", "ent"], Present);
            add(st, &["era", "eront"], Future);
        }
        add(&soft, &["ons"], Present);
        add(s, &["ez"], Present);
        add(&soft, &["ait", "ais", "aient", "a"], Past);
        add(s, &["èrent", "é", "ée", "és", "ées"], Past);
        add(s, &["erai", "erons", "erez"], Future);
        add(s, &["erait", "eraient", "er"], Other);
        add(&soft, &["ant"], ParticiplePresent);
    }
    out
}

/// Tagging state of one token before chunking.
#[derive(Debug, Clone)]
struct Tagged {
    raw: RawToken,
    surface: String,
    norm: String,
    pos: Pos,
    lemma: String,
    tense: Option<Tense>,
    capitalized: bool,
    sentence_initial: bool,
    /// Lexically a verb form, before context rules.
    verb_candidate: Option<VerbForm>,
}

fn ends_with_any(w: &str, suffixes: &[&str]) -> bool {
    suffixes.iter().any(|s| w.ends_with(s) && w.len() > s.len() + 1)
}

fn is_participle(w: &str) -> bool {
    ends_with_any(
        w,
        &["é", "ée", "és", "ées", "i", "ie", "is", "it", "u", "ue", "us", "ert", "erte", "int", "uit"],
    )
}

fn guess_verb(w: &str) -> VerbForm {
    let (lemma, tense) = if let Some(s) = w.strip_suffix("ant") {
        (format!("{s}er"), Tense::ParticiplePresent)
    } else if let Some(s) = w.strip_suffix("eront").or_else(|| w.strip_suffix("era")) {
        (format!("{s}er"), Tense::Future)
    } else if let Some(s) = w.strip_suffix("iront").or_else(|| w.strip_suffix("ira")) {
        (format!("{s}ir"), Tense::Future)
    } else if let Some(s) = w.strip_suffix("ront") {
        (format!("{s}re"), Tense::Future)
    } else if let Some(s) = w.strip_suffix("raient").or_else(|| w.strip_suffix("rait")) {
        (format!("{s}r"), Tense::Other)
    } else if let Some(s) = w.strip_suffix("aient").or_else(|| w.strip_suffix("ait")) {
        (format!("{s}er"), Tense::Past)
    } else if let Some(s) = ["ées", "és", "ée", "é"].iter().find_map(|e| w.strip_suffix(e)) {
        (format!("{s}er"), Tense::Past)
    } else if w.ends_with("er") || w.ends_with("ir") || w.ends_with("re") {
        (w.to_string(), Tense::Other)
    } else if let Some(s) = w.strip_suffix("ent").or_else(|| w.strip_suffix('e')) {
        (format!("{s}er"), Tense::Present)
    } else {
        (w.to_string(), Tense::Present)
    };
    VerbForm { lemma, tense }
}

impl HeuristicProvider {
    fn split_sentences(&self, body: &str, raw: &[RawToken]) -> Vec<(usize, usize)> {
        let chars: Vec<char> = body.chars().collect();
        let text = |t: &RawToken| chars[t.start..t.end].iter().collect::<String>();
        let mut out = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < raw.len() {
            if i > start && chars[raw[i - 1].end..raw[i].start].contains(&'\n') {
                out.push((start, i));
                start = i;
            }
            let t = text(&raw[i]);
            let terminal = matches!(t.as_str(), "." | "!" | "?" | "…");
            if !terminal {
                i += 1;
                continue;
            }
            // "J. Martin": a single capital letter before the period
            if t == "." && i > 0 {
                let prev = text(&raw[i - 1]);
                if raw[i - 1].end == raw[i].start
                    && prev.chars().count() == 1
                    && prev.chars().all(char::is_uppercase)
                {
                    i += 1;
                    continue;
                }
            }
            let mut j = i + 1;
            while j < raw.len() {
                let n = text(&raw[j]);
                if matches!(n.as_str(), "." | "!" | "?" | "…" | "»" | "\"" | "”" | ")" | "’") {
                    j += 1;
                } else {
                    break;
                }
            }
            let boundary = match raw.get(j) {
                None => true,
                Some(next) => {
                    let first = chars[next.start];
                    first.is_uppercase()
                        || first.is_ascii_digit()
                        || matches!(first, '«' | '"' | '“' | '-' | '—' | '–')
                        || chars[raw[j - 1].end..next.start].contains(&'\n')
                }
            };
            if boundary {
                out.push((start, j));
                start = j;
            }
            i = j;
        }
        if start < raw.len() {
            out.push((start, raw.len()));
        }
        out
    }

    fn lexical(&self, t: &mut Tagged, capitalized_elsewhere: &HashSet<String>) {
        match t.raw.class {
            TokenClass::Punct => {
                t.pos = Pos::Punct;
                return;
            }
            TokenClass::Number => {
                t.pos = Pos::Num;
                return;
            }
            TokenClass::Word => {}
        }
        let w = t.norm.as_str();
        if self.titles.contains(w) && !self.closed.contains_key(w) {
            t.pos = Pos::Noun;
            return;
        }
        if t.capitalized && !t.sentence_initial {
            if w.chars().count() > 1 || !self.closed.contains_key(w) {
                t.pos = Pos::Propn;
                return;
            }
        }
        if t.capitalized && t.sentence_initial {
            let folded = fold(w);
            let known = self.given_names.contains(&folded)
                || self.organizations.contains(&folded)
                || (capitalized_elsewhere.contains(w) && !self.closed.contains_key(w));
            if known {
                t.pos = Pos::Propn;
                return;
            }
        }
        if let Some((entry, lemma)) = self.closed.get(w) {
            t.pos = entry.pos;
            t.lemma = lemma.clone();
            t.tense = entry.verb;
            return;
        }
        if let Some(v) = self.verbs.get(w) {
            t.pos = Pos::Verb;
            t.verb_candidate = Some(v.clone());
            return;
        }
        if ends_with_any(w, &["eront", "iront"]) || (w.ends_with("ront") && w.chars().count() >= 8) {
            t.pos = Pos::Verb;
            t.verb_candidate = Some(guess_verb(w));
        } else if w.ends_with("ment") && w.chars().count() > 6 {
            t.pos = Pos::Adv;
        } else if ADJECTIVES.contains(&w) || ends_with_any(w, ADJ_SUFFIXES) {
            t.pos = Pos::Adj;
        } else {
            t.pos = Pos::Noun;
        }
    }

    fn contextual(&self, toks: &mut [Tagged]) {
        for i in 0..toks.len() {
            let prev = i.checked_sub(1).map(|p| (toks[p].pos, toks[p].norm.clone()));
            let prev2 = i.checked_sub(2).map(|p| toks[p].pos);
            let prev_pos = prev.as_ref().map(|p| p.0);
            let prev_norm = prev.as_ref().map(|p| p.1.as_str()).unwrap_or("");
            let next_pos = toks.get(i + 1).map(|n| n.pos);
            let next_finite = toks.get(i + 1).is_some_and(|n| {
                n.pos == Pos::Aux
                    || n.verb_candidate
                        .as_ref()
                        .is_some_and(|v| matches!(v.tense, Tense::Present | Tense::Past | Tense::Future))
            });
            let t = &mut toks[i];
            let w = t.norm.clone();
            let after_det = prev_pos == Some(Pos::Det)
                || (prev_pos == Some(Pos::Adj) && prev2 == Some(Pos::Det));
            match t.pos {
                Pos::Verb if after_det => {
                    t.pos = Pos::Noun;
                    t.verb_candidate = None;
                }
                Pos::Verb => {
                    if let Some(v) = t.verb_candidate.take() {
                        t.lemma = v.lemma;
                        t.tense = Some(v.tense);
                    }
                }
                Pos::Det if matches!(w.as_str(), "le" | "la" | "les" | "l'") => {
                    if next_pos == Some(Pos::Aux)
                        || (next_finite && matches!(prev_pos, Some(Pos::Pron)))
                        || (next_finite && matches!(prev_norm, "ne" | "n'"))
                    {
                        t.pos = Pos::Pron;
                    }
                }
                Pos::Adp if w == "en" && next_finite => t.pos = Pos::Pron,
                Pos::Adv if w.ends_with("ment") && after_det => t.pos = Pos::Noun,
                Pos::Noun | Pos::Adj | Pos::Adv => {
                    let after_aux = prev_pos == Some(Pos::Aux)
                        || (prev_pos == Some(Pos::Adv) && prev2 == Some(Pos::Aux));
                    let after_clitic = SUBJECT_CLITICS.contains(&prev_norm)
                        && matches!(prev_pos, Some(Pos::Pron) | Some(Pos::Adv));
                    let after_infinitive_prep =
                        matches!(prev_norm, "de" | "d'" | "à" | "pour" | "sans" | "afin");
                    if t.pos != Pos::Adv && prev_norm == "en" && prev_pos == Some(Pos::Adp) && w.ends_with("ant") {
                        let v = guess_verb(&w);
                        t.pos = Pos::Verb;
                        t.lemma = v.lemma;
                        t.tense = Some(Tense::ParticiplePresent);
                    } else if after_aux && is_participle(&w) && t.pos != Pos::Adv {
                        let v = guess_verb(&w);
                        t.pos = Pos::Verb;
                        t.lemma = v.lemma;
                        t.tense = Some(Tense::Past);
                    } else if after_clitic
                        && t.pos != Pos::Adv
                        && ends_with_any(&w, &["e", "ent", "ait", "aient", "era", "eront", "ira", "iront", "it"])
                    {
                        let v = guess_verb(&w);
                        t.pos = Pos::Verb;
                        t.lemma = v.lemma;
                        t.tense = Some(v.tense);
                    } else if after_infinitive_prep
                        && t.pos == Pos::Noun
                        && w.ends_with("er")
                        && !w.ends_with("ier")
                        && !ER_NOUNS.contains(&w.as_str())
                    {
                        t.pos = Pos::Verb;
                        t.lemma = w.clone();
                        t.tense = Some(Tense::Other);
                    }
                }
                _ => {}
            }
        }
        for t in toks.iter_mut() {
            if t.pos == Pos::Verb && t.tense.is_none() {
                let v = guess_verb(&t.norm);
                t.lemma = v.lemma;
                t.tense = Some(v.tense);
            }
            if !matches!(t.pos, Pos::Verb | Pos::Aux) {
                t.tense = None;
            }
        }
    }

    fn classify_run(&self, toks: &[Tagged], run: &[usize], persons: &HashSet<String>) -> EntityLabel {
        let text: Vec<&str> = run.iter().map(|&i| toks[i].surface.as_str()).collect();
        let joined = text.join(" ");
        let folded = fold(&joined);
        if self.organizations.contains(&folded) {
            return EntityLabel::Org;
        }
        if self.gazetteer.lookup(&joined).is_some() {
            return EntityLabel::Loc;
        }
        if run.iter().any(|&i| self.org_keywords.contains(&fold(&toks[i].norm))) {
            return EntityLabel::Org;
        }
        let first = run[0];
        let titled = first
            .checked_sub(1)
            .is_some_and(|p| self.titles.contains(&toks[p].norm));
        if titled || self.given_names.contains(&fold(&toks[first].norm)) {
            return EntityLabel::Per;
        }
        if run.len() == 1 {
            let s = &toks[first].surface;
            if s.chars().count() >= 2 && s.chars().all(|c| c.is_uppercase() || c == '-') {
                return EntityLabel::Org;
            }
            if persons.contains(&fold(s)) {
                return EntityLabel::Per;
            }
        }
        EntityLabel::Misc
    }

    fn entities(&self, toks: &[Tagged]) -> Vec<Vec<usize>> {
        let is_name = |t: &Tagged| t.pos == Pos::Propn;
        let mut runs = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            if !is_name(&toks[i]) {
                i += 1;
                continue;
            }
            let mut run = vec![i];
            let mut j = i + 1;
            loop {
                if j < toks.len() && is_name(&toks[j]) && toks[j].raw.class == TokenClass::Word {
                    run.push(j);
                    j += 1;
                    continue;
                }
                // "Banque du Canada", "Ministère de la Santé"
                let mut k = j;
                while k < toks.len() && NAME_CONNECTORS.contains(&toks[k].norm.as_str()) && k - j < 2 {
                    k += 1;
                }
                if k > j && k < toks.len() && is_name(&toks[k]) {
                    run.extend(j..=k);
                    j = k + 1;
                    continue;
                }
                break;
            }
            runs.push(run);
            i = j;
        }
        runs
    }

    fn chunk(&self, toks: &[Tagged]) -> Vec<(ChunkKind, usize, usize, usize)> {
        let nominal = |p: Pos| matches!(p, Pos::Noun | Pos::Propn);
        let np_part = |p: Pos| matches!(p, Pos::Det | Pos::Adj | Pos::Num | Pos::Noun | Pos::Propn);
        let verbal = |p: Pos| matches!(p, Pos::Aux | Pos::Verb);
        let mut out = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let p = toks[i].pos;
            if np_part(p) {
                let mut j = i;
                let mut head: Option<usize> = None;
                let mut in_complement = false;
                let mut seen_nominal = false;
                while j < toks.len() {
                    let t = &toks[j];
                    if t.pos == Pos::Det && seen_nominal {
                        let after_de = j > i && matches!(toks[j - 1].norm.as_str(), "de" | "d'");
                        if after_de && toks.get(j + 1).is_some_and(|n| nominal(n.pos) || n.pos == Pos::Adj) {
                            j += 1;
                            continue;
                        }
                        if matches!(t.norm.as_str(), "du" | "des")
                            && toks.get(j + 1).is_some_and(|n| np_part(n.pos))
                        {
                            in_complement = true;
                            j += 1;
                            continue;
                        }
                        break;
                    }
                    if t.pos == Pos::Adp
                        && matches!(t.norm.as_str(), "de" | "d'")
                        && seen_nominal
                        && toks.get(j + 1).is_some_and(|n| np_part(n.pos))
                    {
                        in_complement = true;
                        j += 1;
                        continue;
                    }
                    if !np_part(t.pos) {
                        break;
                    }
                    if nominal(t.pos) {
                        seen_nominal = true;
                        if !in_complement {
                            head = Some(j);
                        }
                    }
                    j += 1;
                }
                // trailing determiners or prepositions never end a chunk
                while j > i && !matches!(toks[j - 1].pos, Pos::Noun | Pos::Propn | Pos::Adj | Pos::Num) {
                    j -= 1;
                }
                match head {
                    Some(h) if j > h => {
                        out.push((ChunkKind::Np, i, j, h));
                        i = j;
                    }
                    _ => i += 1,
                }
                continue;
            }
            let negation_start = matches!(toks[i].norm.as_str(), "ne" | "n'")
                && toks.get(i + 1).is_some_and(|n| verbal(n.pos));
            if verbal(p) || negation_start {
                let mut j = i;
                let mut last_verbal = i;
                while j < toks.len() {
                    let t = &toks[j];
                    if verbal(t.pos) {
                        last_verbal = j;
                        j += 1;
                    } else if t.pos == Pos::Adv || (j == i && negation_start) {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let end = last_verbal + 1;
                let head = (i..end)
                    .rev()
                    .find(|&k| toks[k].pos == Pos::Verb)
                    .unwrap_or(last_verbal);
                out.push((ChunkKind::Vp, i, end, head));
                i = end;
                continue;
            }
            i += 1;
        }
        out
    }
}

impl AnnotationProvider for HeuristicProvider {
    fn name(&self) -> &str {
        "heuristic"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            segmentation: true,
            pos: true,
            chunks: true,
            ner: true,
            coref: false,
            qa: false,
        }
    }

    fn annotate(&self, article: &RawArticle) -> Result<Layers> {
        let body = &article.body;
        let idx = CharIndex::new(body);
        let raw = tokenize(body);
        let bounds = self.split_sentences(body, &raw);
        let surface = |t: &RawToken| idx.slice(t.start, t.end).unwrap_or_default().to_string();

        let mut capitalized_elsewhere = HashSet::new();
        for &(s, e) in &bounds {
            for t in &raw[(s + 1).min(e)..e] {
                let text = surface(t);
                if t.class == TokenClass::Word && text.chars().next().is_some_and(char::is_uppercase) {
                    capitalized_elsewhere.insert(normalize_surface(&text));
                }
            }
        }

        let mut layers = Layers::default();
        let mut persons: HashSet<String> = HashSet::new();
        for (si, &(s, e)) in bounds.iter().enumerate() {
            let mut toks: Vec<Tagged> = raw[s..e]
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let text = surface(r);
                    let norm = normalize_surface(&text);
                    Tagged {
                        raw: *r,
                        capitalized: text.chars().next().is_some_and(char::is_uppercase),
                        sentence_initial: k == 0
                            || (k == 1 && raw[s].class == TokenClass::Punct),
                        lemma: norm.clone(),
                        norm,
                        surface: text,
                        pos: Pos::Other,
                        tense: None,
                        verb_candidate: None,
                    }
                })
                .collect();
            for t in toks.iter_mut() {
                self.lexical(t, &capitalized_elsewhere);
            }
            self.contextual(&mut toks);

            for run in self.entities(&toks) {
                let label = self.classify_run(&toks, &run, &persons);
                let (a, b) = (toks[run[0]].raw.start, toks[*run.last().unwrap()].raw.end);
                if label == EntityLabel::Per {
                    persons.insert(fold(&toks[*run.last().unwrap()].surface));
                }
                if let Some(span) = Span::over(&idx, a, b) {
                    layers.entities.push(EntitySpan { label, span });
                }
            }

            let offset = layers.tokens.len();
            let chunks = self.chunk(&toks);
            let root = chunks
                .iter()
                .filter(|c| c.0 == ChunkKind::Vp)
                .find(|c| {
                    let before = (0..c.1)
                        .rev()
                        .find(|&k| !matches!(toks[k].pos, Pos::Pron) && !matches!(toks[k].norm.as_str(), "ne" | "n'"));
                    let subordinate = before.is_some_and(|k| SUBORDINATORS.contains(&toks[k].norm.as_str()));
                    let head_tense = toks[c.3].tense;
                    !subordinate
                        && !matches!(head_tense, Some(Tense::ParticiplePresent))
                        && !(c.2 - c.1 == 1 && head_tense == Some(Tense::Other))
                })
                .or_else(|| chunks.iter().find(|c| c.0 == ChunkKind::Vp));
            let (root_kind, root_token) = match root {
                Some(c) => (RootKind::Vp, Some(offset + c.3)),
                None => match chunks.first() {
                    Some(c) => (RootKind::Np, Some(offset + c.3)),
                    None => (RootKind::Other, None),
                },
            };
            for (kind, a, b, head) in &chunks {
                if let Some(span) = Span::over(&idx, toks[*a].raw.start, toks[b - 1].raw.end) {
                    layers.chunks.push(Chunk {
                        kind: *kind,
                        span,
                        head_token: offset + head,
                    });
                }
            }
            let sentence_span = Span::over(&idx, toks[0].raw.start, toks[toks.len() - 1].raw.end)
                .expect("sentence tokens lie inside the body");
            layers.sentences.push(Sentence {
                index: si,
                span: sentence_span,
                root_kind,
                root_token,
            });
            for t in toks {
                layers.tokens.push(Token {
                    span: Span {
                        start: t.raw.start,
                        end: t.raw.end,
                        text: t.surface,
                    },
                    lemma: t.lemma,
                    pos: t.pos,
                    tense: t.tense,
                    sentence_index: si,
                });
            }
        }
        Ok(layers)
    }
}
