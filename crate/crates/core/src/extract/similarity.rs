//! Word-overlap similarity on words of four letters or more.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::text::{fold, letter_words};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// 2·|A ∩ B| / (|A| + |B|)
    #[default]
    Dice,
    /// |A ∩ B| / |A ∪ B|
    Jaccard,
}

/// Similarity measure plus the threshold above which two answers are the
/// same answer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityConfig {
    #[serde(default)]
    pub measure: Measure,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.5
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            measure: Measure::Dice,
            threshold: default_threshold(),
        }
    }
}

/// Lowercased words of at least four letters, as a multiset.
pub fn long_words(s: &str) -> HashMap<String, usize> {
    let mut bag = HashMap::new();
    for w in letter_words(s).filter(|w| w.chars().count() >= 4) {
        *bag.entry(w).or_insert(0) += 1;
    }
    bag
}

fn bag_similarity(measure: Measure, a: &HashMap<String, usize>, b: &HashMap<String, usize>) -> f64 {
    let size_a: usize = a.values().sum();
    let size_b: usize = b.values().sum();
    match (size_a, size_b) {
        (0, 0) => return 1.0,
        (0, _) | (_, 0) => return 0.0,
        _ => {}
    }
    let inter: usize = a
        .iter()
        .map(|(w, &n)| b.get(w).map_or(0, |&m| n.min(m)))
        .sum();
    match measure {
        Measure::Dice => 2.0 * inter as f64 / (size_a + size_b) as f64,
        Measure::Jaccard => inter as f64 / (size_a + size_b - inter) as f64,
    }
}

/// Dice similarity of the long-word multisets of `a` and `b`.
pub fn similarity(a: &str, b: &str) -> f64 {
    similarity_with(Measure::Dice, a, b)
}

pub fn similarity_with(measure: Measure, a: &str, b: &str) -> f64 {
    bag_similarity(measure, &long_words(a), &long_words(b))
}

impl SimilarityConfig {
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        similarity_with(self.measure, a, b)
    }

    /// Whether two answers count as the same. Strings without any long word
    /// ("Il", "ONU") fall back to case- and accent-insensitive equality.
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        let (wa, wb) = (long_words(a), long_words(b));
        if wa.is_empty() && wb.is_empty() {
            let (fa, fb) = (fold(a), fold(b));
            return !fa.is_empty() && fa == fb;
        }
        bag_similarity(self.measure, &wa, &wb) >= self.threshold
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(crate::Error::Config(format!(
                "similarity threshold {} must be a non-negative number",
                self.threshold
            )));
        }
        Ok(())
    }
}
