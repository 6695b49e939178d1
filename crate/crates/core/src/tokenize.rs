//! Rule-based French tokenizer shared by the heuristic provider and the
//! lexicon matcher, so multiword lexicon entries split the same way as text.

/// Elided prefixes split off before an apostrophe ("l'", "d'", "qu'").
const ELISIONS: &[&str] = &[
    "l", "d", "j", "m", "n", "s", "t", "c", "qu", "jusqu", "lorsqu", "puisqu", "quoiqu",
];

/// Abbreviations whose trailing period belongs to the token.
const ABBREVIATIONS: &[&str] = &[
    "m", "mm", "mme", "mmes", "mlle", "dr", "st", "ste", "me", "pr", "etc", "av", "boul", "no",
    "art", "env", "p", "vol", "gén", "lt", "sgt", "cie", "inc", "ltée",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawToken {
    /// Code-point offsets.
    pub start: usize,
    pub end: usize,
    pub class: TokenClass,
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Tokenizes `text` into code-point spans.
pub fn tokenize(text: &str) -> Vec<RawToken> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < n
                && (chars[i].is_ascii_digit()
                    || (matches!(chars[i], '.' | ',' | ':')
                        && i + 1 < n
                        && chars[i + 1].is_ascii_digit()
                        && i > start))
            {
                i += 1;
            }
            // "14h30" style clock times stay separate: digits, then word
            out.push(RawToken {
                start,
                end: i,
                class: TokenClass::Number,
            });
            continue;
        }
        if is_word_char(c) {
            let start = i;
            loop {
                while i < n && chars[i].is_alphabetic() {
                    i += 1;
                }
                if i + 1 < n && chars[i] == '-' && chars[i + 1].is_alphanumeric() {
                    i += 1;
                    continue;
                }
                if i + 1 < n && is_apostrophe(chars[i]) && chars[i + 1].is_alphabetic() {
                    let prefix: String = chars[start..i].iter().collect::<String>().to_lowercase();
                    if ELISIONS.contains(&prefix.as_str()) {
                        i += 1;
                        break;
                    }
                    i += 1;
                    continue;
                }
                break;
            }
            // a word that started with a letter but swallowed nothing else
            if i == start {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect::<String>().to_lowercase();
            if i < n && chars[i] == '.' && ABBREVIATIONS.contains(&word.as_str()) {
                i += 1;
            }
            out.push(RawToken {
                start,
                end: i,
                class: TokenClass::Word,
            });
            continue;
        }
        out.push(RawToken {
            start: i,
            end: i + 1,
            class: TokenClass::Punct,
        });
        i += 1;
    }
    out
}

/// Tokenizes and returns normalized (lowercase, straight apostrophe) strings.
pub fn words(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    tokenize(text)
        .into_iter()
        .map(|t| {
            crate::text::normalize_surface(&chars[t.start..t.end].iter().collect::<String>())
        })
        .collect()
}
