//! Code-point addressing and string normalization helpers.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Maps Unicode code-point offsets of a string onto byte offsets.
#[derive(Debug, Clone)]
pub struct CharIndex<'a> {
    text: &'a str,
    // byte offset of every code point, plus text.len() as sentinel
    bytes: Vec<usize>,
}

impl<'a> CharIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bytes.push(text.len());
        CharIndex { text, bytes }
    }

    /// Length in code points.
    pub fn len(&self) -> usize {
        self.bytes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Slice by code-point range, `None` when out of bounds or inverted.
    pub fn slice(&self, start: usize, end: usize) -> Option<&'a str> {
        if start > end || end > self.len() {
            return None;
        }
        Some(&self.text[self.bytes[start]..self.bytes[end]])
    }

    /// Code-point offset of a byte offset lying on a char boundary.
    pub fn char_offset(&self, byte: usize) -> usize {
        self.bytes.partition_point(|&b| b < byte)
    }
}

/// Code-point slice without building an index; fine for one-off lookups.
pub fn slice_chars(text: &str, start: usize, end: usize) -> Option<&str> {
    CharIndex::new(text).slice(start, end)
}

/// Lowercase, strip diacritics and unify apostrophes.
pub fn fold(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .map(unify_apostrophe)
        .flat_map(char::to_lowercase)
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lowercase and unify apostrophes, keeping diacritics.
pub fn normalize_surface(s: &str) -> String {
    s.chars()
        .map(unify_apostrophe)
        .flat_map(char::to_lowercase)
        .collect()
}

pub(crate) fn unify_apostrophe(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' | '\u{02BC}' | '`' => '\'',
        other => other,
    }
}

/// Lowercased words split on non-letter boundaries, diacritics kept.
pub fn letter_words(s: &str) -> impl Iterator<Item = String> + '_ {
    s.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}
