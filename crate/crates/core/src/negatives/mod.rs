//! Hard-negative caption generation.
//!
//! A negative swaps one token (word level) or two adjacent tokens (phrase
//! level) for a substitute of the same class. Substitutes are drawn in
//! priority order: direct antonyms, then antonyms one hop away in the
//! lexicon, then the corpus vocabulary of that class.

mod suite;

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use suite::{EvalSuite, PhraseSuite};

use crate::corpus::{detokenize, tokenize, PosVocabulary, TaggedCaption, Tagger, Token};
use crate::error::{Error, Result};
use crate::lexicon::{is_single_word, Lexicon};
use crate::rng::{Rng, SeedKey};
use crate::Pos;

/// Default number of negatives per (caption, class) set.
pub const DEFAULT_K: usize = 20;

/// Default number of training negatives per class.
pub const DEFAULT_TRAINING_NEGATIVES: usize = 16;

/// Tries per requested negative before a set is declared exhausted.
pub const RETRY_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementSource {
    Antonym,
    RelatedAntonym,
    Vocab,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    #[serde(rename = "index")]
    pub token_index: usize,
    #[serde(rename = "orig")]
    pub original: String,
    #[serde(rename = "sub")]
    pub substitute: String,
    pub source: ReplacementSource,
}

/// One perturbed caption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negative {
    pub text: String,
    pub replacements: Vec<Replacement>,
}

/// Word-level negatives for one (caption, class) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeSet {
    pub caption_id: String,
    pub pos: Pos,
    pub negatives: Vec<Negative>,
}

/// Phrase-level negatives for one caption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseNegative {
    pub caption_id: String,
    pub negatives: Vec<Negative>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabSampling {
    /// Proportional to corpus frequency.
    Frequency,
    Uniform,
}

impl FromStr for VocabSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(VocabSampling::Frequency),
            "uniform" => Ok(VocabSampling::Uniform),
            _ => Err(Error::InvalidArgument(format!("unknown vocab sampling `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeLevel {
    Word,
    Phrase,
}

impl FromStr for NegativeLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(NegativeLevel::Word),
            "phrase" => Ok(NegativeLevel::Phrase),
            _ => Err(Error::InvalidArgument(format!("unknown negative level `{s}`"))),
        }
    }
}

struct ClassSampler {
    words: Vec<String>,
    weights: Vec<u64>,
    dist: Option<WeightedIndex<u64>>,
}

impl ClassSampler {
    fn new(entries: &[(String, u64)], sampling: VocabSampling) -> Self {
        let words: Vec<String> = entries.iter().map(|(w, _)| w.clone()).collect();
        let weights: Vec<u64> = match sampling {
            VocabSampling::Frequency => entries.iter().map(|(_, n)| *n).collect(),
            VocabSampling::Uniform => vec![1; entries.len()],
        };
        let dist = WeightedIndex::new(weights.iter().copied()).ok();
        Self { words, weights, dist }
    }

    /// Draws a word outside `excluded` with probability proportional to its
    /// weight; `None` when every word is excluded.
    fn sample(&self, rng: &mut Rng, excluded: impl Fn(&str) -> bool) -> Option<&str> {
        let dist = self.dist.as_ref()?;
        for _ in 0..64 {
            let w = &self.words[dist.sample(rng)];
            if !excluded(w) {
                return Some(w);
            }
        }
        // Heavy exclusion: fall back to an explicit draw over what is left.
        let eligible: Vec<usize> = (0..self.words.len()).filter(|&i| !excluded(&self.words[i])).collect();
        let dist = WeightedIndex::new(eligible.iter().map(|&i| self.weights[i])).ok()?;
        Some(&self.words[eligible[dist.sample(rng)]])
    }
}

/// Lexical candidate lists for one token, already filtered for eligibility.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexicalPools {
    pub antonyms: Vec<String>,
    pub related: Vec<String>,
}

/// Generates negatives from an immutable lexicon and vocabulary.
pub struct Generator<'a> {
    tagger: Tagger<'a>,
    samplers: HashMap<Pos, ClassSampler>,
    sampling: VocabSampling,
}

fn splice(tokens: &[Token], replacements: &[Replacement]) -> String {
    let mut surfaces: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
    for r in replacements {
        surfaces[r.token_index] = &r.substitute;
    }
    detokenize(&surfaces)
}

impl<'a> Generator<'a> {
    pub fn new(lexicon: &'a Lexicon, vocab: &PosVocabulary, sampling: VocabSampling) -> Self {
        let samplers = Pos::PERTURBABLE
            .into_iter()
            .map(|pos| (pos, ClassSampler::new(vocab.words(pos), sampling)))
            .collect();
        Self {
            tagger: Tagger::new(lexicon),
            samplers,
            sampling,
        }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.tagger.lexicon()
    }

    pub fn sampling(&self) -> VocabSampling {
        self.sampling
    }

    /// A lexicon word may replace `token` only if it survives tokenization
    /// as one token and the built-in tagger assigns it the token's class.
    fn eligible(&self, candidate: &str, token: &Token) -> bool {
        is_single_word(candidate)
            && candidate != token.surface
            && candidate != token.lemma
            && tokenize(candidate) == [candidate]
            && self.tagger.tag_word(candidate).pos == token.pos
    }

    /// Antonym and related-antonym candidates for `token`. Prepositions and
    /// other closed classes have none.
    pub fn lexical_pools(&self, token: &Token) -> LexicalPools {
        if !token.pos.is_lexical() {
            return LexicalPools::default();
        }
        let lex = self.lexicon();
        let filter = |words: Vec<String>| {
            words
                .into_iter()
                .filter(|w| self.eligible(w, token))
                .collect::<Vec<_>>()
        };
        LexicalPools {
            antonyms: filter(lex.antonyms(&token.lemma, token.pos)),
            related: filter(lex.related_antonyms(&token.lemma, token.pos)),
        }
    }

    fn select_from(
        &self,
        token_index: usize,
        token: &Token,
        pools: &LexicalPools,
        rng: &mut Rng,
        exclude: &HashSet<String>,
    ) -> Option<Replacement> {
        let make = |substitute: &str, source| Replacement {
            token_index,
            original: token.surface.clone(),
            substitute: substitute.to_string(),
            source,
        };
        for (pool, source) in [
            (&pools.antonyms, ReplacementSource::Antonym),
            (&pools.related, ReplacementSource::RelatedAntonym),
        ] {
            let open: Vec<&String> = pool.iter().filter(|w| !exclude.contains(*w)).collect();
            if let Some(w) = open.choose(rng) {
                return Some(make(w, source));
            }
        }
        let sampler = self.samplers.get(&token.pos)?;
        sampler
            .sample(rng, |w| exclude.contains(w) || w == token.surface || w == token.lemma)
            .map(|w| make(w, ReplacementSource::Vocab))
    }

    /// Picks a substitute for the token at `token_index` avoiding `exclude`.
    pub fn select_replacement(
        &self,
        token_index: usize,
        token: &Token,
        rng: &mut Rng,
        exclude: &HashSet<String>,
    ) -> Option<Replacement> {
        if !token.pos.is_perturbable() {
            return None;
        }
        let pools = self.lexical_pools(token);
        self.select_from(token_index, token, &pools, rng, exclude)
    }

    /// Up to `k` distinct word-level negatives for `caption` at class `pos`.
    ///
    /// Each draw picks a token of the class uniformly and replaces it,
    /// avoiding substitutes already used at that position. Draw `i` is seeded
    /// from `(seed, caption_id, pos, i)`; at most `RETRY_FACTOR * k` draws are made.
    pub fn gen_word_level(&self, caption: &TaggedCaption, pos: Pos, k: usize, seed: u64) -> Result<NegativeSet> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        let positions = caption.positions_of(pos);
        if positions.is_empty() || !pos.is_perturbable() {
            return Err(Error::NoSuchPos {
                caption_id: caption.caption_id.clone(),
                pos,
            });
        }
        let key = SeedKey::new(seed).str(&caption.caption_id).str(pos.as_str());
        let mut pools: HashMap<usize, LexicalPools> = HashMap::new();
        let mut used: HashMap<usize, HashSet<String>> = HashMap::new();
        let mut exhausted: HashSet<usize> = HashSet::new();
        let mut texts: HashSet<String> = HashSet::from([caption.normalized_text()]);
        let mut negatives = Vec::new();

        for draw in 0..RETRY_FACTOR * k {
            if negatives.len() == k || exhausted.len() == positions.len() {
                break;
            }
            let mut rng = key.clone().num(draw as u64).rng();
            let index = positions[rng.random_range(0..positions.len())];
            let token = &caption.tokens[index];
            let pool = pools.entry(index).or_insert_with(|| self.lexical_pools(token));
            let exclude = used.entry(index).or_default();
            let Some(rep) = self.select_from(index, token, pool, &mut rng, exclude) else {
                exhausted.insert(index);
                continue;
            };
            exclude.insert(rep.substitute.clone());
            let text = splice(&caption.tokens, std::slice::from_ref(&rep));
            if texts.insert(text.clone()) {
                negatives.push(Negative {
                    text,
                    replacements: vec![rep],
                });
            }
        }
        Ok(NegativeSet {
            caption_id: caption.caption_id.clone(),
            pos,
            negatives,
        })
    }

    /// Up to `count` distinct negatives that each replace two adjacent
    /// perturbable tokens.
    pub fn gen_phrase_level(&self, caption: &TaggedCaption, count: usize, seed: u64) -> Result<PhraseNegative> {
        let tokens = &caption.tokens;
        let perturbable = |i: usize| tokens.get(i).is_some_and(|t| t.pos.is_perturbable());
        let anchors: Vec<usize> = (0..tokens.len()).filter(|&i| perturbable(i)).collect();
        if !anchors.iter().any(|&i| perturbable(i + 1)) {
            return Err(Error::NoAdjacentPair {
                caption_id: caption.caption_id.clone(),
            });
        }

        let key = SeedKey::new(seed).str(&caption.caption_id).str("phrase");
        let mut pools: HashMap<usize, LexicalPools> = HashMap::new();
        let mut used: HashMap<usize, HashSet<String>> = HashMap::new();
        let mut texts: HashSet<String> = HashSet::from([caption.normalized_text()]);
        let mut negatives = Vec::new();

        for draw in 0..RETRY_FACTOR * count.max(1) {
            if negatives.len() == count {
                break;
            }
            let mut rng = key.clone().num(draw as u64).rng();
            let first = anchors[rng.random_range(0..anchors.len())];
            let preceding = first.checked_sub(1).filter(|&i| perturbable(i));
            let following = Some(first + 1).filter(|&i| perturbable(i));
            let neighbour = if rng.random_bool(0.5) {
                preceding.or(following)
            } else {
                following.or(preceding)
            };
            let Some(second) = neighbour else {
                continue;
            };
            let (a, b) = (first.min(second), first.max(second));

            let mut reps = Vec::with_capacity(2);
            for i in [a, b] {
                let pool = pools.entry(i).or_insert_with(|| self.lexical_pools(&tokens[i]));
                let exclude = used.entry(i).or_default();
                match self.select_from(i, &tokens[i], pool, &mut rng, exclude) {
                    Some(rep) => reps.push(rep),
                    None => break,
                }
            }
            if reps.len() != 2 {
                continue;
            }
            let text = splice(tokens, &reps);
            if texts.insert(text.clone()) {
                for rep in &reps {
                    used.entry(rep.token_index).or_default().insert(rep.substitute.clone());
                }
                negatives.push(Negative {
                    text,
                    replacements: reps,
                });
            }
        }
        Ok(PhraseNegative {
            caption_id: caption.caption_id.clone(),
            negatives,
        })
    }

    /// Fresh negatives for one training step. Word level returns up to `n`
    /// per class present; phrase level returns up to `n` in total. The epoch
    /// enters the seed so each epoch sees new draws.
    pub fn gen_training_negatives(
        &self,
        caption: &TaggedCaption,
        n: usize,
        level: NegativeLevel,
        seed: u64,
        epoch: u64,
    ) -> Vec<String> {
        if n == 0 {
            return Vec::new();
        }
        let epoch_seed = SeedKey::new(seed).str("epoch").num(epoch).seed();
        match level {
            NegativeLevel::Word => Pos::PERTURBABLE
                .into_iter()
                .filter_map(|pos| self.gen_word_level(caption, pos, n, epoch_seed).ok())
                .flat_map(|set| set.negatives.into_iter().map(|neg| neg.text))
                .collect(),
            NegativeLevel::Phrase => self
                .gen_phrase_level(caption, n, epoch_seed)
                .map(|p| p.negatives.into_iter().map(|neg| neg.text).collect())
                .unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, Corpus};
    use crate::lexicon::parse_lexicon;
    use crate::rng::seeded_rng;

    fn lexicon() -> Lexicon {
        let adj = "\
00000001 00 a 01 slow 0 001 ! 00000002 a 0101 | g
00000002 00 a 01 fast 0 001 ! 00000001 a 0101 | g
00000003 00 a 02 black 0 dark 0 001 ! 00000004 a 0101 | g
00000004 00 a 01 white 0 001 ! 00000003 a 0101 | g
";
        let index = "black a 1 1 ! 1 0 00000003\nfast a 1 1 ! 1 0 00000002\nslow a 1 1 ! 1 0 00000001\nwhite a 1 1 ! 1 0 00000004\n";
        parse_lexicon([(Pos::Adj, index.as_bytes())], [(Pos::Adj, adj.as_bytes())]).unwrap()
    }

    fn caption(id: &str, words: &[(&str, Pos)]) -> TaggedCaption {
        let tokens: Vec<Token> = words.iter().map(|(w, p)| Token::new(*w, *w, *p)).collect();
        TaggedCaption {
            video_id: id.into(),
            caption_id: id.into(),
            text: detokenize(&tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>()),
            tokens,
        }
    }

    fn boy() -> TaggedCaption {
        use Pos::*;
        caption(
            "c1",
            &[
                ("a", Other),
                ("boy", Noun),
                ("wearing", Verb),
                ("a", Other),
                ("black", Adj),
                ("t-shirt", Noun),
            ],
        )
    }

    fn corpus() -> Corpus {
        use Pos::*;
        Corpus::from_captions(vec![
            boy(),
            caption(
                "c2",
                &[
                    ("a", Other),
                    ("red", Adj),
                    ("car", Noun),
                    ("drives", Verb),
                    ("under", Prep),
                    ("a", Other),
                    ("bridge", Noun),
                ],
            ),
            caption(
                "c3",
                &[
                    ("a", Other),
                    ("girl", Noun),
                    ("sings", Verb),
                    ("slowly", Adv),
                    ("on", Prep),
                    ("a", Other),
                    ("big", Adj),
                    ("stage", Noun),
                ],
            ),
            caption("c4", &[("a", Other), ("boy", Noun)]),
        ])
        .unwrap()
    }

    #[test]
    fn direct_antonym_first() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let tok = Token::new("slow", "slow", Pos::Adj);
        let rep = g
            .select_replacement(3, &tok, &mut seeded_rng(1), &HashSet::new())
            .unwrap();
        assert_eq!(rep.substitute, "fast");
        assert_eq!(rep.source, ReplacementSource::Antonym);
        assert_eq!(rep.token_index, 3);
    }

    #[test]
    fn prepositions_use_vocabulary() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let tok = Token::new("under", "under", Pos::Prep);
        let rep = g
            .select_replacement(0, &tok, &mut seeded_rng(1), &HashSet::new())
            .unwrap();
        assert_eq!(rep.substitute, "on");
        assert_eq!(rep.source, ReplacementSource::Vocab);
    }

    #[test]
    fn exhausted_pools_give_none() {
        let lex = Lexicon::empty();
        let vocab = PosVocabulary::from_counts([(Pos::Prep, "under".to_string(), 3)]);
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let tok = Token::new("under", "under", Pos::Prep);
        assert!(g
            .select_replacement(0, &tok, &mut seeded_rng(1), &HashSet::new())
            .is_none());
    }

    #[test]
    fn word_level_single_token_difference() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let set = g.gen_word_level(&boy(), Pos::Adj, 2, 7).unwrap();
        assert_eq!(set.negatives.len(), 2);
        assert_eq!(set.negatives[0].text, "a boy wearing a white t-shirt");
        for neg in &set.negatives {
            let toks = tokenize(&neg.text);
            let diff: Vec<usize> = (0..toks.len())
                .filter(|&i| toks[i] != boy().tokens[i].surface)
                .collect();
            assert_eq!(diff, vec![4]);
        }
        assert_ne!(set.negatives[0].text, set.negatives[1].text);
    }

    #[test]
    fn missing_class_is_an_error() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        assert!(matches!(
            g.gen_word_level(&boy(), Pos::Adv, 3, 7),
            Err(Error::NoSuchPos { pos: Pos::Adv, .. })
        ));
    }

    #[test]
    fn small_pools_return_fewer_than_k() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        // adjectives: antonym "white" plus vocabulary {black, red, big} minus "black"
        let set = g.gen_word_level(&boy(), Pos::Adj, 20, 7).unwrap();
        let mut subs: Vec<&str> = set
            .negatives
            .iter()
            .map(|n| n.replacements[0].substitute.as_str())
            .collect();
        subs.sort_unstable();
        assert_eq!(subs, vec!["big", "red", "white"]);
    }

    #[test]
    fn word_level_is_deterministic() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let a = g.gen_word_level(&boy(), Pos::Noun, 5, 11).unwrap();
        let b = g.gen_word_level(&boy(), Pos::Noun, 5, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phrase_level_replaces_adjacent_pair() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let p = g.gen_phrase_level(&boy(), 4, 3).unwrap();
        assert!(!p.negatives.is_empty());
        for neg in &p.negatives {
            let idx: Vec<usize> = neg.replacements.iter().map(|r| r.token_index).collect();
            assert_eq!(idx.len(), 2);
            assert_eq!(idx[1], idx[0] + 1);
            assert!(idx == vec![1, 2] || idx == vec![4, 5]);
        }
    }

    #[test]
    fn phrase_level_needs_adjacent_pair() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let c = corpus();
        assert!(matches!(
            g.gen_phrase_level(c.get("c4").unwrap(), 2, 1),
            Err(Error::NoAdjacentPair { .. })
        ));
    }

    #[test]
    fn training_negatives_change_with_epoch() {
        let lex = lexicon();
        let vocab = build_vocabulary(&corpus());
        let g = Generator::new(&lex, &vocab, VocabSampling::Uniform);
        let c = corpus();
        let cap = c.get("c3").unwrap();
        let e0 = g.gen_training_negatives(cap, 2, NegativeLevel::Word, 5, 0);
        let e0b = g.gen_training_negatives(cap, 2, NegativeLevel::Word, 5, 0);
        let e1 = g.gen_training_negatives(cap, 2, NegativeLevel::Word, 5, 1);
        assert_eq!(e0, e0b);
        assert_ne!(e0, e1);
        assert!(e0.len() <= 2 * 5);
        let nouns_only = caption("n", &[("boy", Pos::Noun)]);
        assert!(
            g.gen_training_negatives(&nouns_only, 16, NegativeLevel::Word, 5, 0)
                .len()
                <= 16
        );
        assert!(g
            .gen_training_negatives(&nouns_only, 16, NegativeLevel::Phrase, 5, 0)
            .is_empty());
    }
}
