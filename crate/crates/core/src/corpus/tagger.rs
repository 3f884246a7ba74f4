//! Deterministic part-of-speech tagger: closed-class lists first, then the
//! dominant lexicon class of the lemma, then suffix rules.

use serde::{Deserialize, Serialize};

use super::tokenize::is_punct_token;
use crate::lexicon::Lexicon;
use crate::Pos;

pub const PREPOSITIONS: &[&str] = &[
    "aboard",
    "about",
    "above",
    "across",
    "after",
    "against",
    "along",
    "alongside",
    "amid",
    "among",
    "around",
    "at",
    "atop",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "besides",
    "between",
    "beyond",
    "by",
    "despite",
    "down",
    "during",
    "except",
    "for",
    "from",
    "in",
    "inside",
    "into",
    "like",
    "near",
    "of",
    "off",
    "on",
    "onto",
    "opposite",
    "out",
    "outside",
    "over",
    "past",
    "per",
    "round",
    "since",
    "than",
    "through",
    "throughout",
    "till",
    "to",
    "toward",
    "towards",
    "under",
    "underneath",
    "unlike",
    "until",
    "up",
    "upon",
    "via",
    "with",
    "within",
    "without",
];

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every", "no", "another", "either",
    "neither", "all", "both", "my", "your", "his", "her", "its", "our", "their",
];

const PRONOUNS: &[&str] = &[
    "i",
    "me",
    "you",
    "he",
    "him",
    "she",
    "it",
    "we",
    "us",
    "they",
    "them",
    "myself",
    "yourself",
    "himself",
    "herself",
    "itself",
    "ourselves",
    "themselves",
    "who",
    "whom",
    "whose",
    "which",
    "what",
    "someone",
    "somebody",
    "something",
    "anyone",
    "anybody",
    "anything",
    "everyone",
    "everybody",
    "everything",
    "nobody",
    "nothing",
    "there",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "yet", "so", "because", "although", "though", "if", "whether", "while", "as", "when",
    "where", "whereas", "unless",
];

const AUXILIARIES: &[&str] = &[
    "be", "is", "are", "was", "were", "am", "been", "being", "do", "does", "did", "has", "have", "had", "having",
    "can", "could", "will", "would", "shall", "should", "may", "might", "must", "'s", "'re", "'m",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(String, String, String)", into = "(String, String, String)")]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
}

impl Token {
    pub fn new(surface: impl Into<String>, lemma: impl Into<String>, pos: Pos) -> Self {
        Self {
            surface: surface.into(),
            lemma: lemma.into(),
            pos,
        }
    }
}

impl From<(String, String, String)> for Token {
    fn from((surface, lemma, pos): (String, String, String)) -> Self {
        Token {
            surface,
            lemma,
            pos: Pos::from_tag(&pos),
        }
    }
}

impl From<Token> for (String, String, String) {
    fn from(t: Token) -> Self {
        (t.surface, t.lemma, t.pos.as_str().to_string())
    }
}

/// Candidate lemmas for `word` in `pos` by regular suffix rules; the surface
/// form comes first. No irregular-form lists are consulted.
pub fn lemma_candidates(word: &str, pos: Pos) -> Vec<String> {
    let rules: &[(&str, &str)] = match pos {
        Pos::Noun => &[
            ("s", ""),
            ("ses", "s"),
            ("xes", "x"),
            ("zes", "z"),
            ("ches", "ch"),
            ("shes", "sh"),
            ("men", "man"),
            ("ies", "y"),
        ],
        Pos::Verb => &[
            ("s", ""),
            ("ies", "y"),
            ("es", "e"),
            ("es", ""),
            ("ed", "e"),
            ("ed", ""),
            ("ing", "e"),
            ("ing", ""),
        ],
        Pos::Adj => &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
        _ => &[],
    };
    let mut out = vec![word.to_string()];
    for (suffix, replacement) in rules {
        let Some(stem) = word.strip_suffix(suffix) else {
            continue;
        };
        if stem.is_empty() {
            continue;
        }
        let candidate = format!("{stem}{replacement}");
        if replacement.is_empty() && matches!(pos, Pos::Verb | Pos::Adj) {
            // running -> runn -> run, bigger -> bigg -> big
            let b = stem.as_bytes();
            if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] && !b"aeiou".contains(&b[b.len() - 1]) {
                out.push(stem[..stem.len() - 1].to_string());
            }
        }
        out.push(candidate);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|c| seen.insert(c.clone()));
    out
}

pub struct Tagger<'a> {
    lexicon: &'a Lexicon,
}

impl<'a> Tagger<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        Self { lexicon }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    /// Best-supported lemma for `word` in `pos` together with its sense count.
    fn best_lemma(&self, word: &str, pos: Pos) -> Option<(String, usize)> {
        let mut best: Option<(String, usize)> = None;
        for candidate in lemma_candidates(word, pos) {
            let n = self.lexicon.sense_count(&candidate, pos);
            if n > 0 && best.as_ref().is_none_or(|(_, m)| n > *m) {
                best = Some((candidate, n));
            }
        }
        best
    }

    pub fn tag_word(&self, surface: &str) -> Token {
        let word = surface.to_lowercase();
        let closed = |list: &[&str]| list.contains(&word.as_str());
        if closed(PREPOSITIONS) {
            return Token::new(surface, word, Pos::Prep);
        }
        if closed(DETERMINERS) || closed(PRONOUNS) || closed(CONJUNCTIONS) || closed(AUXILIARIES) {
            return Token::new(surface, word, Pos::Other);
        }
        if is_punct_token(&word) || !word.chars().any(char::is_alphabetic) {
            return Token::new(surface, word, Pos::Other);
        }

        // Pos::LEXICAL order is the tie-break: noun > verb > adj > adv.
        let mut best: Option<(Pos, String, usize)> = None;
        for pos in Pos::LEXICAL {
            if let Some((lemma, n)) = self.best_lemma(&word, pos) {
                if best.as_ref().is_none_or(|(_, _, m)| n > *m) {
                    best = Some((pos, lemma, n));
                }
            }
        }
        if let Some((pos, lemma, _)) = best {
            return Token::new(surface, lemma, pos);
        }

        if word.len() > 3 && word.ends_with("ly") {
            return Token::new(surface, word, Pos::Adv);
        }
        for suffix in ["ing", "ed"] {
            if let Some(stem) = word.strip_suffix(suffix) {
                for candidate in [stem.to_string(), format!("{stem}e")] {
                    if self.lexicon.contains(&candidate, Pos::Verb) {
                        return Token::new(surface, candidate, Pos::Verb);
                    }
                }
            }
        }
        Token::new(surface, word, Pos::Other)
    }

    pub fn tag_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Token> {
        tokens.iter().map(|t| self.tag_word(t.as_ref())).collect()
    }
}

/// Free-function form of [`Tagger::tag_tokens`].
pub fn tag_tokens<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> Vec<Token> {
    Tagger::new(lex).tag_tokens(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;

    fn tiny() -> Lexicon {
        let noun = "\
00000001 00 n 01 boy 0 000 | g
00000002 00 n 01 t-shirt 0 000 | g
00000003 00 n 01 wearing 0 000 | g
00000004 00 n 01 black 0 000 | g
00000005 00 n 01 run 0 000 | g
";
        let verb = "\
00000001 00 v 01 wear 0 000 | g
00000002 00 v 01 wear 0 000 | g
00000003 00 v 01 run 0 000 | g
00000004 00 v 01 run 0 000 | g
";
        let adj = "\
00000001 00 a 01 black 0 000 | g
00000002 00 a 01 black 0 000 | g
";
        let adv = "00000001 00 r 01 slowly 0 000 | g\n";
        let index_noun = "black n 1 0 1 0 00000004\nboy n 1 0 1 0 00000001\nrun n 1 0 1 0 00000005\nt-shirt n 1 0 1 0 00000002\nwearing n 1 0 1 0 00000003\n";
        let index_verb = "run v 2 0 2 0 00000003 00000004\nwear v 2 0 2 0 00000001 00000002\n";
        let index_adj = "black a 2 0 2 0 00000001 00000002\n";
        let index_adv = "slowly r 1 0 1 0 00000001\n";
        parse_lexicon(
            [
                (Pos::Noun, index_noun.as_bytes()),
                (Pos::Verb, index_verb.as_bytes()),
                (Pos::Adj, index_adj.as_bytes()),
                (Pos::Adv, index_adv.as_bytes()),
            ],
            [
                (Pos::Noun, noun.as_bytes()),
                (Pos::Verb, verb.as_bytes()),
                (Pos::Adj, adj.as_bytes()),
                (Pos::Adv, adv.as_bytes()),
            ],
        )
        .unwrap()
    }

    fn tags(tokens: &[Token]) -> Vec<Pos> {
        tokens.iter().map(|t| t.pos).collect()
    }

    #[test]
    fn caption_tags_and_lemmas() {
        let lex = tiny();
        let toks = tag_tokens(&["a", "boy", "wearing", "a", "black", "t-shirt"], &lex);
        assert_eq!(
            tags(&toks),
            vec![Pos::Other, Pos::Noun, Pos::Verb, Pos::Other, Pos::Adj, Pos::Noun]
        );
        assert_eq!(toks[2].lemma, "wear");
    }

    #[test]
    fn closed_classes_win() {
        let lex = tiny();
        assert_eq!(tag_tokens(&["under"], &lex)[0].pos, Pos::Prep);
        assert_eq!(tag_tokens(&["the"], &lex)[0].pos, Pos::Other);
        assert_eq!(tag_tokens(&["is"], &lex)[0].pos, Pos::Other);
    }

    #[test]
    fn suffix_fallbacks() {
        let lex = Lexicon::empty();
        assert_eq!(tag_tokens(&["slowly"], &lex)[0].pos, Pos::Adv);
        assert_eq!(tag_tokens(&["qwzx"], &lex)[0].pos, Pos::Other);
        assert_eq!(tag_tokens(&[","], &lex)[0].pos, Pos::Other);
        let lex = tiny();
        assert_eq!(tag_tokens(&["slowly"], &lex)[0].pos, Pos::Adv);
    }

    #[test]
    fn doubled_consonant_stems() {
        let lex = tiny();
        let t = &tag_tokens(&["running"], &lex)[0];
        assert_eq!((t.pos, t.lemma.as_str()), (Pos::Verb, "run"));
        let t = &tag_tokens(&["runs"], &lex)[0];
        assert_eq!((t.pos, t.lemma.as_str()), (Pos::Verb, "run"));
    }

    #[test]
    fn candidates_start_with_surface() {
        let c = lemma_candidates("women", Pos::Noun);
        assert_eq!(c[0], "women");
        assert!(c.contains(&"woman".to_string()));
        assert!(lemma_candidates("bigger", Pos::Adj).contains(&"big".to_string()));
    }

    #[test]
    fn tagging_is_deterministic() {
        let lex = tiny();
        let words = ["a", "boy", "runs", "slowly", "in", "black"];
        assert_eq!(tag_tokens(&words, &lex), tag_tokens(&words, &lex));
    }

    #[test]
    fn preposition_list_size() {
        assert!((55..=70).contains(&PREPOSITIONS.len()));
    }
}
