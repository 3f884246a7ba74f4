use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Coarse part-of-speech tag.
///
/// The first five variants form the perturbable set; `Other` covers
/// determiners, pronouns, auxiliaries, punctuation and unknown words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Prep,
    Other,
}

impl Pos {
    /// The perturbable classes, in report order.
    pub const PERTURBABLE: [Pos; 5] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::Prep];

    /// Open classes that have entries in the lexical database.
    pub const LEXICAL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn is_perturbable(self) -> bool {
        !matches!(self, Pos::Other)
    }

    pub fn is_lexical(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Adv)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
            Pos::Prep => "prep",
            Pos::Other => "other",
        }
    }

    /// Suffix used by the WordNet database files (`data.adj`, `index.noun`, ...).
    pub fn wordnet_suffix(self) -> Option<&'static str> {
        match self {
            Pos::Noun => Some("noun"),
            Pos::Verb => Some("verb"),
            Pos::Adj => Some("adj"),
            Pos::Adv => Some("adv"),
            _ => None,
        }
    }

    /// Maps a WordNet synset type character. Satellites (`s`) fold into adjectives.
    pub fn from_wordnet_char(c: &str) -> Option<Pos> {
        match c {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            "a" | "s" => Some(Pos::Adj),
            "r" => Some(Pos::Adv),
            _ => None,
        }
    }

    /// Maps a tag from pre-tagged input. Accepts this crate's own names and
    /// the universal coarse tag set.
    pub fn from_tag(tag: &str) -> Pos {
        match tag {
            "noun" | "NOUN" | "PROPN" => Pos::Noun,
            "verb" | "VERB" | "AUX" => Pos::Verb,
            "adj" | "ADJ" => Pos::Adj,
            "adv" | "ADV" => Pos::Adv,
            "prep" | "ADP" => Pos::Prep,
            _ => Pos::Other,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            "adj" | "adjective" => Ok(Pos::Adj),
            "adv" | "adverb" => Ok(Pos::Adv),
            "prep" | "preposition" => Ok(Pos::Prep),
            "other" => Ok(Pos::Other),
            _ => Err(crate::Error::InvalidArgument(format!("unknown part of speech `{s}`"))),
        }
    }
}
