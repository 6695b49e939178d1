//! Reference implementations written independently of the library.

use std::collections::BTreeMap;

/// Dice coefficient over lowercase alphabetic words of at least four letters.
pub fn dice(a: &str, b: &str) -> f64 {
    fn bag(s: &str) -> BTreeMap<String, i64> {
        let mut m = BTreeMap::new();
        let mut word = String::new();
        for c in s.chars().chain(std::iter::once(' ')) {
            if c.is_alphabetic() {
                word.extend(c.to_lowercase());
            } else {
                if word.chars().count() >= 4 {
                    *m.entry(std::mem::take(&mut word)).or_insert(0) += 1;
                }
                word.clear();
            }
        }
        m
    }
    let (x, y) = (bag(a), bag(b));
    let (nx, ny): (i64, i64) = (x.values().sum(), y.values().sum());
    if nx + ny == 0 {
        return 1.0;
    }
    let common: i64 = x.iter().map(|(w, c)| (*c).min(*y.get(w).unwrap_or(&0))).sum();
    2.0 * common as f64 / (nx + ny) as f64
}

fn long_word_count(s: &str) -> usize {
    s.split(|c: char| !c.is_alphabetic()).filter(|w| w.chars().count() >= 4).count()
}

fn plain(s: &str) -> String {
    const FROM: &str = "àâäáãçéèêëíìîïñóòôöõúùûüýÿ’‘";
    const TO: &str = "aaaaaceeeeiiiinooooouuuuyy''";
    let lower: String = s.to_lowercase();
    let mapped: String = lower
        .chars()
        .map(|c| FROM.chars().position(|f| f == c).map_or(c, |i| TO.chars().nth(i).unwrap()))
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Two answers are the same when their Dice is high enough, or, when neither
/// has a long word, when they are equal ignoring case and accents.
pub fn same(a: &str, b: &str, threshold: f64) -> bool {
    if long_word_count(a) == 0 && long_word_count(b) == 0 {
        let (x, y) = (plain(a), plain(b));
        return !x.is_empty() && x == y;
    }
    dice(a, b) >= threshold
}

/// Size of a maximum one-to-one matching, by exhaustive search.
pub fn max_matching(a: &[String], b: &[String], edge: &dyn Fn(&str, &str) -> bool) -> usize {
    fn go(i: usize, a: &[String], b: &[String], used: &mut Vec<bool>, edge: &dyn Fn(&str, &str) -> bool) -> usize {
        if i == a.len() {
            return 0;
        }
        let mut best = go(i + 1, a, b, used, edge);
        for j in 0..b.len() {
            if !used[j] && edge(&a[i], &b[j]) {
                used[j] = true;
                best = best.max(1 + go(i + 1, a, b, used, edge));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], edge)
}

/// Agreement from the exhaustive matching with a Dice threshold.
pub fn agreement(a: &[String], b: &[String], threshold: f64) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let m = max_matching(a, b, &|x, y| same(x, y, threshold));
    2.0 * m as f64 / (a.len() + b.len()) as f64
}
