//! Identifiers for worlds, local states, points and coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};

/// An identifier as it appears in input files: an integer, a string, or a
/// tuple of identifiers (global states, blocks, framings).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
    Tuple(Vec<Label>),
}

impl Label {
    /// Parses a command-line token: integers become `Int`, everything else `Str`.
    pub fn from_token(token: &str) -> Label {
        let token = token.trim();
        match token.parse::<i64>() {
            Ok(n) => Label::Int(n),
            Err(_) => Label::Str(token.to_string()),
        }
    }

    pub fn tuple<I: IntoIterator<Item = Label>>(items: I) -> Label {
        Label::Tuple(items.into_iter().collect())
    }
}

impl From<i64> for Label {
    fn from(n: i64) -> Self {
        Label::Int(n)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Str(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Str(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Str(s) => write!(f, "{s}"),
            Label::Tuple(items) => {
                write!(f, "(")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}
