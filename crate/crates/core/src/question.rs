use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the six journalistic questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Question {
    Who,
    What,
    When,
    Where,
    Why,
    How,
}

impl Question {
    /// Processing order of the pipeline and of the Q&A chain.
    pub const ALL: [Question; 6] = [
        Question::Who,
        Question::What,
        Question::When,
        Question::Where,
        Question::Why,
        Question::How,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Question::Who => "who",
            Question::What => "what",
            Question::When => "when",
            Question::Where => "where",
            Question::Why => "why",
            Question::How => "how",
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Question {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Question::ALL
            .into_iter()
            .find(|q| q.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| crate::Error::Invalid(format!("unknown question '{s}'")))
    }
}

/// A value for each of the six questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerQuestion<T> {
    pub who: T,
    pub what: T,
    pub when: T,
    #[serde(rename = "where")]
    pub where_: T,
    pub why: T,
    pub how: T,
}

impl<T> PerQuestion<T> {
    pub fn from_fn(mut f: impl FnMut(Question) -> T) -> Self {
        PerQuestion {
            who: f(Question::Who),
            what: f(Question::What),
            when: f(Question::When),
            where_: f(Question::Where),
            why: f(Question::Why),
            how: f(Question::How),
        }
    }

    pub fn get(&self, q: Question) -> &T {
        match q {
            Question::Who => &self.who,
            Question::What => &self.what,
            Question::When => &self.when,
            Question::Where => &self.where_,
            Question::Why => &self.why,
            Question::How => &self.how,
        }
    }

    pub fn get_mut(&mut self, q: Question) -> &mut T {
        match q {
            Question::Who => &mut self.who,
            Question::What => &mut self.what,
            Question::When => &mut self.when,
            Question::Where => &mut self.where_,
            Question::Why => &mut self.why,
            Question::How => &mut self.how,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Question, &T)> {
        Question::ALL.into_iter().map(move |q| (q, self.get(q)))
    }
}

impl<T: Default> Default for PerQuestion<T> {
    fn default() -> Self {
        PerQuestion::from_fn(|_| T::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case_insensitively() {
        assert_eq!("WHERE".parse::<Question>().unwrap(), Question::Where);
        assert!("whom".parse::<Question>().is_err());
    }

    #[test]
    fn per_question_serializes_where_key() {
        let pq = PerQuestion::from_fn(|q| q.as_str().len());
        let json = serde_json::to_value(&pq).unwrap();
        assert_eq!(json["where"], 5);
    }
}
