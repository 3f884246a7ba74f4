#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use posrank::corpus::{load_corpus, tokenize, Corpus, CorpusFormat, TaggedCaption, Tagger};
use posrank::lexicon::Lexicon;
use posrank::negatives::{Generator, Negative, ReplacementSource};
use posrank::rng::SeedKey;
use posrank::Pos;
use rand::seq::IndexedRandom as _;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/wordnet")
}

pub fn fixture_lexicon() -> Lexicon {
    Lexicon::from_dir(&fixture_dir()).expect("fixture lexicon parses")
}

/// The full database named by `POSRANK_WORDNET_DIR`, if it is set and exists.
pub fn full_wordnet_dir() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("POSRANK_WORDNET_DIR")?);
    dir.join("data.noun").exists().then_some(dir)
}

const ADJS: &[&str] = &[
    "black", "white", "slow", "fast", "red", "big", "small", "young", "old", "happy", "sad", "wet",
];
const NOUNS: &[&str] = &[
    "boy", "girl", "man", "woman", "dog", "cat", "horse", "bird", "child", "ball",
];
const VERBS: &[&str] = &[
    "walks", "runs", "sings", "dances", "jumps", "sits", "stands", "wears", "opens", "plays",
];
const ADVS: &[&str] = &["slowly", "quickly", "happily", "badly", "well", "forward", "backward"];
const PREPS: &[&str] = &["in", "on", "under", "near", "behind", "across", "through", "into"];
const PLACES: &[&str] = &["park", "street", "stage", "water", "car"];

/// `n` templated captions, one per video, as TSV.
pub fn synthetic_tsv(n: usize, seed: u64) -> String {
    let mut rng = SeedKey::new(seed).str("synthetic-corpus").rng();
    let mut out = String::new();
    for i in 0..n {
        let pick = |words: &[&'static str], rng: &mut posrank::rng::Rng| *words.choose(rng).unwrap();
        let (adj, noun, verb) = (pick(ADJS, &mut rng), pick(NOUNS, &mut rng), pick(VERBS, &mut rng));
        let (adv, prep, place) = (pick(ADVS, &mut rng), pick(PREPS, &mut rng), pick(PLACES, &mut rng));
        let text = match i % 3 {
            0 => format!("a {adj} {noun} {verb} {adv} {prep} the {place}"),
            1 => format!("the {noun} {verb} {prep} a {adj} {place}"),
            _ => format!("a {noun} {verb} {adv}."),
        };
        out.push_str(&format!("vid{i:04}\t{text}\n"));
    }
    out
}

pub fn synthetic_corpus(lexicon: &Lexicon, n: usize, seed: u64) -> Corpus {
    let tsv = synthetic_tsv(n, seed);
    load_corpus(tsv.as_bytes(), CorpusFormat::Tsv, &Tagger::new(lexicon)).expect("synthetic corpus loads")
}

fn rank_of(source: ReplacementSource) -> u8 {
    match source {
        ReplacementSource::Antonym => 0,
        ReplacementSource::RelatedAntonym => 1,
        ReplacementSource::Vocab => 2,
    }
}

/// Positions where the token sequences of `a` and `b` differ, or `None`
/// when their lengths differ.
pub fn diff_positions(a: &[String], b: &[String]) -> Option<Vec<usize>> {
    (a.len() == b.len()).then(|| (0..a.len()).filter(|&i| a[i] != b[i]).collect())
}

/// Invariant violations in a list of negatives for `caption`, each of which
/// should replace `width` adjacent tokens (1 for word level).
pub fn violations(gen: &Generator, caption: &TaggedCaption, negatives: &[Negative], width: usize) -> Vec<String> {
    let tagger = Tagger::new(gen.lexicon());
    let original = tokenize(&caption.normalized_text());
    let mut out = Vec::new();
    let mut texts = HashSet::new();
    // per position: substitutes in order, with their sources
    let mut at: BTreeMap<usize, Vec<(String, ReplacementSource)>> = Default::default();
    for neg in negatives {
        let id = &caption.caption_id;
        if !texts.insert(neg.text.clone()) {
            out.push(format!("{id}: duplicate `{}`", neg.text));
        }
        if neg.text == caption.normalized_text() {
            out.push(format!("{id}: negative equals original"));
        }
        let expected: Vec<usize> = neg.replacements.iter().map(|r| r.token_index).collect();
        match diff_positions(&original, &tokenize(&neg.text)) {
            Some(d) if d == expected && d.len() == width && d.windows(2).all(|w| w[1] == w[0] + 1) => {}
            other => out.push(format!(
                "{id}: `{}` differs at {other:?}, expected {expected:?}",
                neg.text
            )),
        }
        for r in &neg.replacements {
            let token = &caption.tokens[r.token_index];
            if !token.pos.is_perturbable() {
                out.push(format!("{id}: replaced a {} token", token.pos));
            }
            let tag = tagger.tag_word(&r.substitute).pos;
            if tag != token.pos {
                out.push(format!("{id}: `{}` is {tag}, replaced {}", r.substitute, token.pos));
            }
            if r.substitute == token.surface || r.original != token.surface {
                out.push(format!("{id}: bad replacement {r:?}"));
            }
            at.entry(r.token_index)
                .or_default()
                .push((r.substitute.clone(), r.source));
        }
    }
    // antonym priority: at each position the lexical pools are used up, in
    // order, before anything else is drawn
    if width == 1 {
        for (index, subs) in at {
            let pools = gen.lexical_pools(&caption.tokens[index]);
            let (a, r) = (pools.antonyms.len(), pools.related.len());
            let n = subs.len();
            let want_a = a.min(n);
            let want_r = r.min(n - want_a);
            let got = |s: ReplacementSource| subs.iter().filter(|x| x.1 == s).count();
            let sorted = subs.windows(2).all(|w| rank_of(w[0].1) <= rank_of(w[1].1));
            if !sorted || got(ReplacementSource::Antonym) != want_a || got(ReplacementSource::RelatedAntonym) != want_r
            {
                out.push(format!(
                    "{}: priority broken at {index}: {subs:?} with pools {pools:?}",
                    caption.caption_id
                ));
            }
        }
    }
    out
}

pub fn caption(lexicon: &Lexicon, id: &str, text: &str) -> TaggedCaption {
    TaggedCaption {
        video_id: id.into(),
        caption_id: format!("{id}#0"),
        text: text.into(),
        tokens: Tagger::new(lexicon).tag_tokens(&tokenize(text)),
    }
}

pub fn count_pos(caption: &TaggedCaption, pos: Pos) -> usize {
    caption.positions_of(pos).len()
}
