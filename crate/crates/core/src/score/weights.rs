//! Per-question factor weights.

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::question::{PerQuestion, Question};

pub const FREQUENCY: &str = "frequency";
pub const POSITION: &str = "position";
pub const TITLE_PRESENCE: &str = "title_presence";
pub const PER_TYPE: &str = "per_type";
pub const QA_SIMILARITY: &str = "qa_similarity";
pub const LENGTH: &str = "length";
pub const WHO_AVERAGE: &str = "who_average";
pub const ACTION_VERBS: &str = "action_verbs";
pub const NP_VP_NP: &str = "np_vp_np";
pub const TEMPORAL_PRECISION: &str = "temporal_precision";
pub const CONTAINMENT: &str = "containment";
pub const SIZE: &str = "size";
pub const MAJOR_CAUSAL: &str = "major_causal";
pub const MINOR_CAUSAL: &str = "minor_causal";
pub const CAUSAL_VERBS: &str = "causal_verbs";
pub const VERB_TENSE: &str = "verb_tense";
pub const COPULATIVE_PHRASES: &str = "copulative_phrases";
pub const PREPOSITIONS: &str = "prepositions";

/// Default factors and weights of each question, in display order.
pub fn default_factors(q: Question) -> &'static [(&'static str, f64)] {
    match q {
        Question::Who => &[
            (FREQUENCY, 0.40),
            (POSITION, 0.25),
            (TITLE_PRESENCE, 0.20),
            (PER_TYPE, 0.10),
            (QA_SIMILARITY, 0.05),
        ],
        Question::What => &[
            (POSITION, 0.50),
            (LENGTH, 0.15),
            (WHO_AVERAGE, 0.15),
            (ACTION_VERBS, 0.08),
            (NP_VP_NP, 0.07),
            (QA_SIMILARITY, 0.05),
        ],
        Question::When => &[
            (TEMPORAL_PRECISION, 0.40),
            (FREQUENCY, 0.30),
            (POSITION, 0.25),
            (QA_SIMILARITY, 0.05),
        ],
        Question::Where => &[
            (POSITION, 0.32),
            (FREQUENCY, 0.30),
            (CONTAINMENT, 0.30),
            (SIZE, 0.03),
            (QA_SIMILARITY, 0.05),
        ],
        Question::Why => &[
            (MAJOR_CAUSAL, 0.35),
            (MINOR_CAUSAL, 0.25),
            (POSITION, 0.20),
            (CAUSAL_VERBS, 0.15),
            (QA_SIMILARITY, 0.05),
        ],
        Question::How => &[
            (VERB_TENSE, 0.45),
            (COPULATIVE_PHRASES, 0.30),
            (PREPOSITIONS, 0.20),
            (QA_SIMILARITY, 0.05),
        ],
    }
}

/// Weight of every factor, per question.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorWeights {
    per: PerQuestion<IndexMap<String, f64>>,
}

impl Default for FactorWeights {
    fn default() -> Self {
        FactorWeights {
            per: PerQuestion::from_fn(|q| {
                default_factors(q)
                    .iter()
                    .map(|&(name, w)| (name.to_string(), w))
                    .collect()
            }),
        }
    }
}

impl FactorWeights {
    /// Weights with some questions replaced. Each replacement must list the
    /// question's full factor set.
    pub fn with(mut self, q: Question, weights: IndexMap<String, f64>) -> Result<Self> {
        *self.per.get_mut(q) = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn get(&self, q: Question) -> &IndexMap<String, f64> {
        self.per.get(q)
    }

    /// Factor sets must match the known factors; weights must be
    /// non-negative and sum to 1 within 1e-9.
    pub fn validate(&self) -> Result<()> {
        for (q, weights) in self.per.iter() {
            let mismatch = |message: String| {
                Err(Error::FactorMismatch {
                    question: q.to_string(),
                    message,
                })
            };
            let known = default_factors(q);
            if let Some(extra) = weights.keys().find(|k| !known.iter().any(|(n, _)| n == k)) {
                return mismatch(format!("unknown factor '{extra}'"));
            }
            if let Some((missing, _)) = known.iter().find(|(n, _)| !weights.contains_key(*n)) {
                return mismatch(format!("missing factor '{missing}'"));
            }
            if let Some((name, w)) = weights.iter().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
                return mismatch(format!("weight of '{name}' is {w}"));
            }
            let sum: f64 = weights.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return mismatch(format!("weights sum to {sum}, expected 1"));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    who: Option<IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    what: Option<IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    when: Option<IndexMap<String, f64>>,
    #[serde(default, rename = "where", skip_serializing_if = "Option::is_none")]
    where_: Option<IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    why: Option<IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    how: Option<IndexMap<String, f64>>,
}

impl Serialize for FactorWeights {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.per.serialize(s)
    }
}

/// Questions absent from the input keep their default weights.
impl<'de> Deserialize<'de> for FactorWeights {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = WeightsFile::deserialize(d)?;
        let mut w = FactorWeights::default();
        for (q, o) in [
            (Question::Who, f.who),
            (Question::What, f.what),
            (Question::When, f.when),
            (Question::Where, f.where_),
            (Question::Why, f.why),
            (Question::How, f.how),
        ] {
            if let Some(map) = o {
                *w.per.get_mut(q) = map;
            }
        }
        Ok(w)
    }
}

/// Weighted sum of factor scores. The factor names of `weights` and
/// `scores` must match exactly.
pub fn aggregate(question: Question, weights: &IndexMap<String, f64>, scores: &IndexMap<String, f64>) -> Result<f64> {
    let mismatch = |message: String| Error::FactorMismatch {
        question: question.to_string(),
        message,
    };
    if let Some(extra) = scores.keys().find(|k| !weights.contains_key(*k)) {
        return Err(mismatch(format!("score for unweighted factor '{extra}'")));
    }
    weights
        .iter()
        .map(|(name, w)| {
            scores
                .get(name)
                .map(|s| w * s)
                .ok_or_else(|| mismatch(format!("no score for factor '{name}'")))
        })
        .sum()
}
