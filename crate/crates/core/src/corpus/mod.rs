//! Caption corpora: loading, tagging and per-class vocabularies.

mod tagger;
mod tokenize;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use tagger::{lemma_candidates, tag_tokens, Tagger, Token, PREPOSITIONS};
pub use tokenize::{detokenize, is_punct_token, normalize, tokenize, TERMINAL_PUNCT};

use crate::error::{Error, RecordError, Result};
use crate::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedCaption {
    pub video_id: String,
    pub caption_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl TaggedCaption {
    /// Token surfaces joined back into canonical text.
    pub fn normalized_text(&self) -> String {
        detokenize(&self.surfaces())
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    pub fn has_pos(&self, pos: Pos) -> bool {
        self.tokens.iter().any(|t| t.pos == pos)
    }

    pub fn positions_of(&self, pos: Pos) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.pos == pos)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            _ => Err(Error::InvalidArgument(format!("unknown corpus format `{s}`"))),
        }
    }
}

impl CorpusFormat {
    /// Guesses from a file extension; anything but `.tsv` is JSONL.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => CorpusFormat::Tsv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    video_id: Option<String>,
    caption_id: Option<String>,
    text: Option<String>,
    tokens: Option<Vec<Token>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    captions: Vec<TaggedCaption>,
    by_video: BTreeMap<String, Vec<String>>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from already tagged captions. Caption ids must be unique.
    pub fn from_captions(captions: Vec<TaggedCaption>) -> Result<Self> {
        let mut corpus = Corpus::default();
        let mut errors = Vec::new();
        for (i, caption) in captions.into_iter().enumerate() {
            if corpus.index.contains_key(&caption.caption_id) {
                errors.push(RecordError {
                    line: i + 1,
                    message: format!("duplicate caption_id `{}`", caption.caption_id),
                });
                continue;
            }
            corpus.push(caption);
        }
        if errors.is_empty() {
            Ok(corpus)
        } else {
            Err(Error::Records(errors))
        }
    }

    fn push(&mut self, caption: TaggedCaption) {
        self.index.insert(caption.caption_id.clone(), self.captions.len());
        self.by_video
            .entry(caption.video_id.clone())
            .or_default()
            .push(caption.caption_id.clone());
        self.captions.push(caption);
    }

    pub fn captions(&self) -> &[TaggedCaption] {
        &self.captions
    }

    pub fn len(&self) -> usize {
        self.captions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.captions.is_empty()
    }

    pub fn get(&self, caption_id: &str) -> Option<&TaggedCaption> {
        self.index.get(caption_id).map(|&i| &self.captions[i])
    }

    /// Video id to caption ids, in load order.
    pub fn by_video(&self) -> &BTreeMap<String, Vec<String>> {
        &self.by_video
    }

    /// Writes one JSON object per caption with tokens always present.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for caption in &self.captions {
            serde_json::to_writer(&mut out, caption)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Reads a line-delimited caption file. Records without tokens are tokenized
/// and tagged with `tagger`; pre-tagged tokens pass through unchanged.
/// Missing caption ids become `<video_id>#<ordinal>` where the ordinal counts
/// earlier records of the same video. All bad lines are collected before
/// failing.
pub fn load_corpus<R: BufRead>(stream: R, format: CorpusFormat, tagger: &Tagger) -> Result<Corpus> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in stream.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match format {
            CorpusFormat::Jsonl => serde_json::from_str::<RawRecord>(&line).map_err(|e| format!("invalid JSON: {e}")),
            CorpusFormat::Tsv => match line.split_once('\t') {
                Some((video, text)) => Ok(RawRecord {
                    video_id: Some(video.to_string()),
                    caption_id: None,
                    text: Some(text.to_string()),
                    tokens: None,
                }),
                None => Err("expected `video_id<TAB>text`".to_string()),
            },
        };
        match parsed {
            Ok(RawRecord {
                video_id: Some(video_id),
                caption_id,
                text: Some(text),
                tokens,
            }) if !video_id.is_empty() => records.push((lineno, video_id, caption_id, text, tokens)),
            Ok(r) => {
                let missing = match (&r.video_id, &r.text) {
                    (None, _) => "video_id",
                    (Some(v), _) if v.is_empty() => "video_id",
                    _ => "text",
                };
                errors.push(RecordError {
                    line: lineno,
                    message: format!("missing required field `{missing}`"),
                });
            }
            Err(message) => errors.push(RecordError { line: lineno, message }),
        }
    }

    let mut ordinals: HashMap<String, usize> = HashMap::new();
    let mut seen = HashSet::new();
    let mut pending = Vec::with_capacity(records.len());
    for (lineno, video_id, caption_id, text, tokens) in records {
        let ordinal = ordinals.entry(video_id.clone()).or_insert(0);
        let caption_id = caption_id.unwrap_or_else(|| format!("{video_id}#{ordinal}"));
        *ordinal += 1;
        if !seen.insert(caption_id.clone()) {
            errors.push(RecordError {
                line: lineno,
                message: format!("duplicate caption_id `{caption_id}`"),
            });
            continue;
        }
        pending.push((video_id, caption_id, text, tokens));
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(Error::Records(errors));
    }

    let captions: Vec<TaggedCaption> = pending
        .into_par_iter()
        .map(|(video_id, caption_id, text, tokens)| {
            let tokens = tokens.unwrap_or_else(|| tagger.tag_tokens(&tokenize(&text)));
            TaggedCaption {
                video_id,
                caption_id,
                text,
                tokens,
            }
        })
        .collect();
    Corpus::from_captions(captions)
}

/// Per-class word frequencies over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PosVocabulary {
    classes: BTreeMap<Pos, Vec<(String, u64)>>,
}

impl PosVocabulary {
    /// Words of `pos`, most frequent first, ties alphabetical.
    pub fn words(&self, pos: Pos) -> &[(String, u64)] {
        self.classes.get(&pos).map_or(&[], Vec::as_slice)
    }

    pub fn frequency(&self, pos: Pos, word: &str) -> u64 {
        self.words(pos).iter().find(|(w, _)| w == word).map_or(0, |(_, n)| *n)
    }

    /// Distinct words across all perturbable classes.
    pub fn distinct_words(&self) -> usize {
        self.classes
            .values()
            .flatten()
            .map(|(w, _)| w.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (Pos, String, u64)>) -> Self {
        let mut tallies: BTreeMap<Pos, HashMap<String, u64>> = BTreeMap::new();
        for (pos, word, n) in counts {
            if pos.is_perturbable() && n > 0 {
                *tallies.entry(pos).or_default().entry(word.to_lowercase()).or_default() += n;
            }
        }
        let classes = tallies
            .into_iter()
            .map(|(pos, words)| {
                let mut list: Vec<(String, u64)> = words.into_iter().collect();
                list.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                (pos, list)
            })
            .collect();
        PosVocabulary { classes }
    }
}

/// Counts the surface form of every perturbable token in the corpus.
pub fn build_vocabulary(corpus: &Corpus) -> PosVocabulary {
    PosVocabulary::from_counts(corpus.captions().iter().flat_map(|c| {
        c.tokens
            .iter()
            .filter(|t| t.pos.is_perturbable())
            .map(|t| (t.pos, t.surface.clone(), 1))
    }))
}
