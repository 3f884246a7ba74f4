//! Corpus diagnostics: how often captions collapse into duplicates once
//! words of one class are deleted, class proportions, and lexical nearest
//! neighbours.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{is_punct_token, Corpus, TaggedCaption};
use crate::error::{Error, Result};
use crate::rng::SeedKey;
use crate::similarity::Scorer;
use crate::Pos;

/// Result of one deletion experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuplicateStats {
    pub pos: Pos,
    pub n_removed: usize,
    /// Fraction of all captions whose residual matches another caption's.
    pub fraction: f64,
    /// Same fraction computed only over captions with at least `n_removed`
    /// tokens of the class; `None` when there are none.
    pub strict_fraction: Option<f64>,
    pub eligible: usize,
}

/// Surfaces left after deleting `n` tokens of `pos`.
///
/// Deletions happen one at a time. Each step picks uniformly among the
/// remaining tokens of the class, seeded by the residual itself, so the set
/// removed for `n` contains the set removed for `n - 1` and two captions that
/// agree after `n - 1` deletions still agree after `n`.
fn residual(caption: &TaggedCaption, pos: Pos, n: usize, seed: u64) -> Vec<String> {
    let mut tokens: Vec<(String, Pos)> = caption
        .tokens
        .iter()
        .map(|t| (t.surface.to_lowercase(), t.pos))
        .collect();
    for step in 0..n {
        let candidates: Vec<usize> = (0..tokens.len()).filter(|&i| tokens[i].1 == pos).collect();
        if candidates.is_empty() {
            break;
        }
        let mut key = SeedKey::new(seed).str(pos.as_str()).num(step as u64);
        for (surface, _) in &tokens {
            key = key.str(surface);
        }
        let pick = candidates[key.rng().random_range(0..candidates.len())];
        tokens.remove(pick);
    }
    tokens.into_iter().map(|(s, _)| s).collect()
}

fn duplicate_fraction(residuals: &[&Vec<String>]) -> Option<f64> {
    if residuals.is_empty() {
        return None;
    }
    let mut groups: HashMap<&Vec<String>, usize> = HashMap::new();
    for r in residuals {
        *groups.entry(r).or_default() += 1;
    }
    let dups = residuals.iter().filter(|r| groups[*r] > 1).count();
    Some(dups as f64 / residuals.len() as f64)
}

/// Deletes `n_removed` tokens of `pos` from every caption (all of them when
/// a caption has fewer) and measures how many residuals are shared.
pub fn pos_deletion_duplicates(corpus: &Corpus, pos: Pos, n_removed: usize, seed: u64) -> Result<DuplicateStats> {
    if n_removed == 0 {
        return Err(Error::InvalidArgument("n_removed must be at least 1".into()));
    }
    let rows: Vec<(Vec<String>, bool)> = corpus
        .captions()
        .par_iter()
        .map(|c| {
            let eligible = c.tokens.iter().filter(|t| t.pos == pos).count() >= n_removed;
            (residual(c, pos, n_removed, seed), eligible)
        })
        .collect();
    let all: Vec<&Vec<String>> = rows.iter().map(|(r, _)| r).collect();
    let strict: Vec<&Vec<String>> = rows.iter().filter(|(_, e)| *e).map(|(r, _)| r).collect();
    Ok(DuplicateStats {
        pos,
        n_removed,
        fraction: duplicate_fraction(&all).unwrap_or(0.0),
        strict_fraction: duplicate_fraction(&strict),
        eligible: strict.len(),
    })
}

/// Runs [`pos_deletion_duplicates`] for `n = 1..=max_n`.
pub fn deletion_sweep(corpus: &Corpus, pos: Pos, max_n: usize, seed: u64) -> Result<Vec<DuplicateStats>> {
    (1..=max_n)
        .map(|n| pos_deletion_duplicates(corpus, pos, n, seed))
        .collect()
}

/// Largest number of `pos` tokens in any caption.
pub fn max_tokens_of(corpus: &Corpus, pos: Pos) -> usize {
    corpus
        .captions()
        .iter()
        .map(|c| c.tokens.iter().filter(|t| t.pos == pos).count())
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub captions: usize,
    pub videos: usize,
    /// Mean tokens per caption, punctuation excluded.
    pub avg_len: f64,
    /// Fraction of captions containing at least one token of each class.
    pub proportions: BTreeMap<Pos, f64>,
    /// Distinct lowercased words.
    pub vocab_size: usize,
}

pub fn corpus_statistics(corpus: &Corpus) -> CorpusStats {
    let n = corpus.len();
    let mut words = HashSet::new();
    let mut total_len = 0usize;
    let mut containing: BTreeMap<Pos, usize> = Pos::PERTURBABLE.iter().map(|&p| (p, 0)).collect();
    for caption in corpus.captions() {
        let mut present = HashSet::new();
        for token in &caption.tokens {
            if is_punct_token(&token.surface) {
                continue;
            }
            total_len += 1;
            words.insert(token.surface.to_lowercase());
            present.insert(token.pos);
        }
        for (pos, count) in containing.iter_mut() {
            if present.contains(pos) {
                *count += 1;
            }
        }
    }
    let denom = n.max(1) as f64;
    CorpusStats {
        captions: n,
        videos: corpus.by_video().len(),
        avg_len: total_len as f64 / denom,
        proportions: containing.into_iter().map(|(p, c)| (p, c as f64 / denom)).collect(),
        vocab_size: words.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbour {
    pub caption_id: String,
    pub text: String,
    pub score: f64,
}

/// The `top_k` captions most similar to `caption_id`, excluding itself.
/// Sorted by score descending, then caption id.
pub fn nearest_captions(
    corpus: &Corpus,
    scorer: &dyn Scorer,
    caption_id: &str,
    top_k: usize,
) -> Result<Vec<Neighbour>> {
    let query = corpus
        .get(caption_id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown caption `{caption_id}`")))?;
    let text = query.normalized_text();
    let mut out: Vec<Neighbour> = corpus
        .captions()
        .par_iter()
        .filter(|c| c.caption_id != caption_id)
        .map(|c| {
            let other = c.normalized_text();
            Neighbour {
                caption_id: c.caption_id.clone(),
                score: scorer.score_pair(&text, &other),
                text: other,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.caption_id.cmp(&b.caption_id))
    });
    out.truncate(top_k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use crate::similarity::TfIdf;

    fn caption(id: &str, words: &[(&str, Pos)]) -> TaggedCaption {
        TaggedCaption {
            video_id: id.into(),
            caption_id: id.into(),
            text: words.iter().map(|w| w.0).collect::<Vec<_>>().join(" "),
            tokens: words.iter().map(|(w, p)| Token::new(*w, *w, *p)).collect(),
        }
    }

    fn corpus(captions: Vec<TaggedCaption>) -> Corpus {
        Corpus::from_captions(captions).unwrap()
    }

    use Pos::*;

    #[test]
    fn constructed_duplicate() {
        let c = corpus(vec![
            caption("a", &[("a", Other), ("man", Noun), ("runs", Verb)]),
            caption("b", &[("a", Other), ("man", Noun), ("runs", Verb), ("fast", Adv)]),
        ]);
        let s = pos_deletion_duplicates(&c, Adv, 1, 3).unwrap();
        assert_eq!(s.fraction, 1.0);
        assert_eq!(s.strict_fraction, Some(0.0));
        assert_eq!(s.eligible, 1);
    }

    #[test]
    fn disjoint_captions_never_collide() {
        let c = corpus(vec![
            caption("a", &[("a", Other), ("man", Noun), ("runs", Verb)]),
            caption("b", &[("the", Other), ("dog", Noun), ("sleeps", Verb)]),
        ]);
        for pos in Pos::PERTURBABLE {
            for n in 1..4 {
                assert_eq!(pos_deletion_duplicates(&c, pos, n, 1).unwrap().fraction, 0.0);
            }
        }
    }

    #[test]
    fn removal_sets_are_nested() {
        let cap = caption(
            "a",
            &[("red", Adj), ("big", Adj), ("old", Adj), ("car", Noun), ("fast", Adj)],
        );
        for seed in 0..20 {
            let r1 = residual(&cap, Adj, 1, seed);
            let r2 = residual(&cap, Adj, 2, seed);
            assert_eq!(r1.len(), 4);
            assert_eq!(r2.len(), 3);
            // r2 is r1 minus one element
            assert!(r2.iter().all(|w| r1.contains(w)));
        }
        assert_eq!(residual(&cap, Adj, 10, 0), vec!["car"]);
    }

    #[test]
    fn statistics_single_caption() {
        let c = corpus(vec![caption("a", &[("a", Other), ("boy", Noun), ("runs", Verb)])]);
        let s = corpus_statistics(&c);
        assert_eq!(s.captions, 1);
        assert_eq!(s.avg_len, 3.0);
        assert_eq!(s.proportions[&Noun], 1.0);
        assert_eq!(s.proportions[&Adv], 0.0);
        assert_eq!(s.vocab_size, 3);
    }

    #[test]
    fn nearest_with_duplicate_and_ties() {
        let c = corpus(vec![
            caption("a", &[("a", Other), ("man", Noun), ("runs", Verb)]),
            caption("b", &[("dogs", Noun), ("bark", Verb)]),
            caption("c", &[("a", Other), ("man", Noun), ("runs", Verb)]),
            caption("d", &[("cats", Noun), ("sleep", Verb)]),
        ]);
        let scorer = TfIdf::fit(&c).unwrap();
        let n = nearest_captions(&c, &scorer, "a", 10).unwrap();
        assert_eq!(n.len(), 3);
        assert_eq!(n[0].caption_id, "c");
        assert!((n[0].score - 1.0).abs() < 1e-12);
        assert_eq!((n[1].caption_id.as_str(), n[1].score), ("b", 0.0));
        assert_eq!(n[2].caption_id, "d");
        assert!(nearest_captions(&c, &scorer, "zzz", 1).is_err());
    }
}
