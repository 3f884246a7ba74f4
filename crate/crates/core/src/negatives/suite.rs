//! Evaluation suites and their JSONL form.
//!
//! The first line of a suite file is a `{"config": {...}}` header holding
//! the generation parameters (at least `k` and `seed`). Every following line
//! is one negative set.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{Generator, Negative, NegativeSet, PhraseNegative, Replacement};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::Pos;

#[derive(Serialize, Deserialize)]
struct Header {
    config: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct WordNegativeLine {
    text: String,
    #[serde(flatten)]
    replacement: Replacement,
}

#[derive(Serialize, Deserialize)]
struct WordSetLine {
    caption_id: String,
    pos: Pos,
    negatives: Vec<WordNegativeLine>,
}

#[derive(Serialize, Deserialize)]
struct PhraseNegativeLine {
    text: String,
    replacements: Vec<Replacement>,
}

#[derive(Serialize, Deserialize)]
struct PhraseSetLine {
    caption_id: String,
    level: String,
    negatives: Vec<PhraseNegativeLine>,
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        file: "suite".into(),
        line,
        reason: reason.into(),
    }
}

fn read_header<R: BufRead>(lines: &mut std::iter::Enumerate<std::io::Lines<R>>) -> Result<Map<String, Value>> {
    let (_, first) = lines.next().ok_or_else(|| malformed(1, "missing config header"))?;
    let header: Header = serde_json::from_str(&first?).map_err(|e| malformed(1, e.to_string()))?;
    Ok(header.config)
}

fn write_header<W: Write>(out: &mut W, config: &Map<String, Value>) -> Result<()> {
    serde_json::to_writer(&mut *out, &Header { config: config.clone() })?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Negative sets for every (caption, class) pair present in a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSuite {
    config: Map<String, Value>,
    sets: Vec<NegativeSet>,
    /// Pairs skipped because the caption lacks the class.
    gaps: Vec<(String, Pos)>,
}

impl EvalSuite {
    pub fn new(k: usize, seed: u64, sets: Vec<NegativeSet>) -> Self {
        let mut config = Map::new();
        config.insert("k".into(), k.into());
        config.insert("seed".into(), seed.into());
        let mut suite = EvalSuite {
            config,
            sets,
            gaps: Vec::new(),
        };
        suite.canonicalize();
        suite
    }

    fn canonicalize(&mut self) {
        self.sets
            .sort_by(|a, b| a.caption_id.cmp(&b.caption_id).then(a.pos.cmp(&b.pos)));
        self.gaps.sort();
    }

    pub fn k(&self) -> usize {
        self.config.get("k").and_then(Value::as_u64).unwrap_or(0) as usize
    }

    pub fn seed(&self) -> u64 {
        self.config.get("seed").and_then(Value::as_u64).unwrap_or(0)
    }

    pub fn config(&self) -> &Map<String, Value> {
        &self.config
    }

    /// Adds provenance entries to the header. `k` and `seed` cannot be overridden.
    pub fn extend_config(&mut self, extra: Map<String, Value>) {
        for (key, value) in extra {
            if key != "k" && key != "seed" {
                self.config.insert(key, value);
            }
        }
    }

    pub fn sets(&self) -> &[NegativeSet] {
        &self.sets
    }

    pub fn sets_for(&self, pos: Pos) -> impl Iterator<Item = &NegativeSet> {
        self.sets.iter().filter(move |s| s.pos == pos)
    }

    pub fn get(&self, caption_id: &str, pos: Pos) -> Option<&NegativeSet> {
        self.sets
            .binary_search_by(|s| s.caption_id.as_str().cmp(caption_id).then(s.pos.cmp(&pos)))
            .ok()
            .map(|i| &self.sets[i])
    }

    pub fn gaps(&self) -> &[(String, Pos)] {
        &self.gaps
    }

    /// Total negatives of one class.
    pub fn negative_count(&self, pos: Pos) -> usize {
        self.sets_for(pos).map(|s| s.negatives.len()).sum()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        write_header(&mut out, &self.config)?;
        for set in &self.sets {
            let line = WordSetLine {
                caption_id: set.caption_id.clone(),
                pos: set.pos,
                negatives: set
                    .negatives
                    .iter()
                    .map(|n| WordNegativeLine {
                        text: n.text.clone(),
                        replacement: n.replacements[0].clone(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(buf)
    }

    pub fn read_jsonl<R: BufRead>(stream: R) -> Result<Self> {
        let mut lines = stream.lines().enumerate();
        let config = read_header(&mut lines)?;
        if config.get("k").and_then(Value::as_u64).is_none() || config.get("seed").and_then(Value::as_u64).is_none() {
            return Err(malformed(1, "config header lacks `k` or `seed`"));
        }
        let mut sets = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: WordSetLine = serde_json::from_str(&line).map_err(|e| malformed(i + 1, e.to_string()))?;
            sets.push(NegativeSet {
                caption_id: parsed.caption_id,
                pos: parsed.pos,
                negatives: parsed
                    .negatives
                    .into_iter()
                    .map(|n| Negative {
                        text: n.text,
                        replacements: vec![n.replacement],
                    })
                    .collect(),
            });
        }
        let mut suite = EvalSuite {
            config,
            sets,
            gaps: Vec::new(),
        };
        suite.canonicalize();
        Ok(suite)
    }
}

/// Phrase-level negatives for every caption that has an adjacent pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseSuite {
    config: Map<String, Value>,
    sets: Vec<PhraseNegative>,
    gaps: Vec<String>,
}

impl PhraseSuite {
    pub fn config(&self) -> &Map<String, Value> {
        &self.config
    }

    pub fn sets(&self) -> &[PhraseNegative] {
        &self.sets
    }

    pub fn gaps(&self) -> &[String] {
        &self.gaps
    }

    pub fn extend_config(&mut self, extra: Map<String, Value>) {
        for (key, value) in extra {
            if key != "k" && key != "seed" {
                self.config.insert(key, value);
            }
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        write_header(&mut out, &self.config)?;
        for set in &self.sets {
            let line = PhraseSetLine {
                caption_id: set.caption_id.clone(),
                level: "phrase".into(),
                negatives: set
                    .negatives
                    .iter()
                    .map(|n| PhraseNegativeLine {
                        text: n.text.clone(),
                        replacements: n.replacements.clone(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(buf)
    }

    pub fn read_jsonl<R: BufRead>(stream: R) -> Result<Self> {
        let mut lines = stream.lines().enumerate();
        let config = read_header(&mut lines)?;
        let mut sets = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: PhraseSetLine = serde_json::from_str(&line).map_err(|e| malformed(i + 1, e.to_string()))?;
            sets.push(PhraseNegative {
                caption_id: parsed.caption_id,
                negatives: parsed
                    .negatives
                    .into_iter()
                    .map(|n| Negative {
                        text: n.text,
                        replacements: n.replacements,
                    })
                    .collect(),
            });
        }
        Ok(PhraseSuite {
            config,
            sets,
            gaps: Vec::new(),
        })
    }
}

/// Sets and missing classes for one caption.
type CaptionSets = (Vec<NegativeSet>, Vec<(String, Pos)>);

impl Generator<'_> {
    /// One word-level set per (caption, class) where the class occurs.
    /// Generation runs in parallel; output order is canonical regardless.
    pub fn gen_eval_suite(&self, corpus: &Corpus, k: usize, seed: u64) -> Result<EvalSuite> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        let results: Vec<CaptionSets> = corpus
            .captions()
            .par_iter()
            .map(|caption| {
                let mut sets = Vec::new();
                let mut gaps = Vec::new();
                for pos in Pos::PERTURBABLE {
                    match self.gen_word_level(caption, pos, k, seed) {
                        Ok(set) => sets.push(set),
                        Err(_) => gaps.push((caption.caption_id.clone(), pos)),
                    }
                }
                (sets, gaps)
            })
            .collect();
        let mut suite = EvalSuite::new(k, seed, Vec::new());
        suite.config.insert("level".into(), "word".into());
        suite
            .config
            .insert("vocab_sampling".into(), serde_json::to_value(self.sampling())?);
        for (sets, gaps) in results {
            suite.sets.extend(sets);
            suite.gaps.extend(gaps);
        }
        suite.canonicalize();
        Ok(suite)
    }

    /// Phrase-level counterpart of [`Generator::gen_eval_suite`].
    pub fn gen_phrase_suite(&self, corpus: &Corpus, count: usize, seed: u64) -> Result<PhraseSuite> {
        if count == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        let results: Vec<Result<PhraseNegative, String>> = corpus
            .captions()
            .par_iter()
            .map(|c| self.gen_phrase_level(c, count, seed).map_err(|_| c.caption_id.clone()))
            .collect();
        let mut config = Map::new();
        config.insert("k".into(), count.into());
        config.insert("seed".into(), seed.into());
        config.insert("level".into(), "phrase".into());
        config.insert("vocab_sampling".into(), serde_json::to_value(self.sampling())?);
        let mut sets = Vec::new();
        let mut gaps = Vec::new();
        for r in results {
            match r {
                Ok(set) => sets.push(set),
                Err(id) => gaps.push(id),
            }
        }
        sets.sort_by(|a, b| a.caption_id.cmp(&b.caption_id));
        gaps.sort();
        Ok(PhraseSuite { config, sets, gaps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, load_corpus, CorpusFormat, Tagger};
    use crate::lexicon::Lexicon;
    use crate::negatives::VocabSampling;

    fn corpus(lex: &Lexicon) -> Corpus {
        let text = "v1\ta boy runs\nv2\ta girl walks slowly under a bridge\nv3\ta red car drives on a road\n";
        load_corpus(text.as_bytes(), CorpusFormat::Tsv, &Tagger::new(lex)).unwrap()
    }

    #[test]
    fn single_caption_suite_covers_present_classes_only() {
        let lex = Lexicon::empty();
        let text = "{\"video_id\":\"v1\",\"text\":\"a boy runs\",\"tokens\":[[\"a\",\"a\",\"other\"],[\"boy\",\"boy\",\"noun\"],[\"runs\",\"run\",\"verb\"]]}\n{\"video_id\":\"v2\",\"text\":\"a dog sits\",\"tokens\":[[\"a\",\"a\",\"other\"],[\"dog\",\"dog\",\"noun\"],[\"sits\",\"sit\",\"verb\"]]}";
        let c = load_corpus(text.as_bytes(), CorpusFormat::Jsonl, &Tagger::new(&lex)).unwrap();
        let vocab = build_vocabulary(&c);
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let suite = g.gen_eval_suite(&c, 3, 1).unwrap();
        let classes: Vec<Pos> = suite
            .sets()
            .iter()
            .filter(|s| s.caption_id == "v1#0")
            .map(|s| s.pos)
            .collect();
        assert_eq!(classes, vec![Pos::Noun, Pos::Verb]);
        assert_eq!(suite.gaps().iter().filter(|(c, _)| c == "v1#0").count(), 3);
    }

    #[test]
    fn suite_file_round_trips_bit_identically() {
        let lex = Lexicon::empty();
        let c = corpus(&lex);
        let vocab = build_vocabulary(&c);
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let suite = g.gen_eval_suite(&c, 4, 9).unwrap();
        let bytes = suite.to_jsonl_bytes().unwrap();
        let again = EvalSuite::read_jsonl(bytes.as_slice()).unwrap();
        assert_eq!(again.to_jsonl_bytes().unwrap(), bytes);
        assert_eq!(again.k(), 4);
        assert_eq!(again.seed(), 9);

        let regenerated = g.gen_eval_suite(&c, 4, 9).unwrap();
        assert_eq!(regenerated.to_jsonl_bytes().unwrap(), bytes);
    }

    #[test]
    fn set_line_format() {
        let lex = Lexicon::empty();
        let c = corpus(&lex);
        let vocab = build_vocabulary(&c);
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let suite = g.gen_eval_suite(&c, 1, 9).unwrap();
        let bytes = suite.to_jsonl_bytes().unwrap();
        let text = String::from_utf8(bytes).unwrap();
        // untagged words fall to `other`; only "under"/"on" and "slowly" are perturbable
        let line: Value = text
            .lines()
            .skip(1)
            .map(|l| serde_json::from_str::<Value>(l).unwrap())
            .find(|v| v["pos"] == "prep")
            .unwrap();
        let neg = &line["negatives"][0];
        for key in ["text", "index", "orig", "sub", "source"] {
            assert!(neg.get(key).is_some(), "missing {key}");
        }
        assert_eq!(neg["source"], "vocab");
    }

    #[test]
    fn phrase_suite_round_trip() {
        let lex = Lexicon::empty();
        let c = corpus(&lex);
        let vocab = build_vocabulary(&c);
        let g = Generator::new(&lex, &vocab, VocabSampling::Frequency);
        let suite = g.gen_phrase_suite(&c, 3, 2).unwrap();
        let bytes = suite.to_jsonl_bytes().unwrap();
        let again = PhraseSuite::read_jsonl(bytes.as_slice()).unwrap();
        assert_eq!(again.to_jsonl_bytes().unwrap(), bytes);
    }

    #[test]
    fn missing_header_is_malformed() {
        let err = EvalSuite::read_jsonl("".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }
}
