//! WordNet-format lexical database: parsing plus antonym lookups.
//!
//! Only four pointer relations are retained (antonym, hypernym, hyponym,
//! similar-to); everything else in the data files is parsed and dropped.
//! The lexicon is immutable once built.

mod parse;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Pos;

/// A synset is addressed by its byte offset within the data file of its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SynsetId {
    pub pos: Pos,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: Pos, offset: u32) -> Self {
        Self { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Antonym,
    Hypernym,
    Hyponym,
    Similar,
}

impl Relation {
    fn from_symbol(symbol: &str) -> Option<Self> {
        match symbol {
            "!" => Some(Relation::Antonym),
            "@" | "@i" => Some(Relation::Hypernym),
            "~" | "~i" => Some(Relation::Hyponym),
            "&" => Some(Relation::Similar),
            _ => None,
        }
    }
}

/// 1-based word numbers of a lexical (lemma-to-lemma) pointer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LemmaLink {
    pub source: u8,
    pub target: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pointer {
    pub relation: Relation,
    pub target: SynsetId,
    /// `None` for semantic pointers that relate whole synsets.
    pub lemma_link: Option<LemmaLink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Synset {
    pub id: SynsetId,
    /// Lowercased, underscore-joined for multi-word entries.
    pub lemmas: Vec<String>,
    pub pointers: Vec<Pointer>,
}

impl Synset {
    fn lemma_at(&self, number: u8) -> Option<&str> {
        let i = usize::from(number).checked_sub(1)?;
        self.lemmas.get(i).map(String::as_str)
    }

    /// Lemma targets of the antonym pointers leaving this synset. When
    /// `source` is given, lexical pointers are limited to that lemma.
    fn antonym_targets<'a>(&'a self, lex: &'a Lexicon, source: Option<&'a str>) -> impl Iterator<Item = &'a str> + 'a {
        self.pointers
            .iter()
            .filter(|p| p.relation == Relation::Antonym)
            .flat_map(move |p| {
                let Some(target) = lex.synsets.get(&p.target) else {
                    return Vec::new();
                };
                match p.lemma_link {
                    Some(link) => {
                        let from = self.lemma_at(link.source);
                        if source.is_some_and(|s| from != Some(s)) {
                            return Vec::new();
                        }
                        target.lemma_at(link.target).into_iter().collect()
                    }
                    None => target.lemmas.iter().map(String::as_str).collect(),
                }
            })
    }
}

/// Non-fatal problem found while building a lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconWarning {
    DanglingPointer { from: SynsetId, to: SynsetId },
    DanglingIndex { lemma: String, to: SynsetId },
}

/// True when `lemma` can stand in for a single caption token.
pub fn is_single_word(lemma: &str) -> bool {
    !lemma.is_empty() && !lemma.contains(['_', ' '])
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    synsets: HashMap<SynsetId, Synset>,
    lemma_index: HashMap<(String, Pos), Vec<SynsetId>>,
    warnings: Vec<LexiconWarning>,
}

/// Parses a lexicon from per-class `index` and `data` streams. Each stream
/// is named by its class; the class also determines the file name used in
/// error messages (`index.adj`, `data.noun`, ...).
pub fn parse_lexicon<I, D, R1, R2>(index_streams: I, data_streams: D) -> Result<Lexicon>
where
    I: IntoIterator<Item = (Pos, R1)>,
    D: IntoIterator<Item = (Pos, R2)>,
    R1: BufRead,
    R2: BufRead,
{
    let mut builder = LexiconBuilder::default();
    for (pos, stream) in data_streams {
        builder.read_data(pos, stream)?;
    }
    for (pos, stream) in index_streams {
        builder.read_index(pos, stream)?;
    }
    Ok(builder.build())
}

#[derive(Debug, Default)]
pub struct LexiconBuilder {
    synsets: HashMap<SynsetId, Synset>,
    lemma_index: HashMap<(String, Pos), Vec<SynsetId>>,
}

fn file_name(kind: &str, pos: Pos) -> Result<String> {
    pos.wordnet_suffix()
        .map(|s| format!("{kind}.{s}"))
        .ok_or_else(|| Error::InvalidArgument(format!("no lexicon file for {pos}")))
}

impl LexiconBuilder {
    pub fn read_data<R: BufRead>(&mut self, pos: Pos, stream: R) -> Result<&mut Self> {
        let file = file_name("data", pos)?;
        for (i, line) in stream.lines().enumerate() {
            let line = line?;
            if parse::is_skippable(&line) {
                continue;
            }
            let synset = parse::parse_data_line(&line, &file, i + 1)?;
            if synset.id.pos != pos {
                return Err(Error::MalformedLine {
                    file: file.clone(),
                    line: i + 1,
                    reason: format!("{} synset in {file}", synset.id.pos),
                });
            }
            self.synsets.insert(synset.id, synset);
        }
        Ok(self)
    }

    pub fn read_index<R: BufRead>(&mut self, pos: Pos, stream: R) -> Result<&mut Self> {
        let file = file_name("index", pos)?;
        for (i, line) in stream.lines().enumerate() {
            let line = line?;
            if parse::is_skippable(&line) {
                continue;
            }
            let entry = parse::parse_index_line(&line, &file, i + 1)?;
            let ids = entry.offsets.iter().map(|&o| SynsetId::new(pos, o)).collect::<Vec<_>>();
            self.lemma_index.entry((entry.lemma, pos)).or_default().extend(ids);
        }
        Ok(self)
    }

    /// Drops every pointer or index entry that does not resolve, recording a
    /// warning for each, and completes antonym pointers into symmetric pairs.
    pub fn build(self) -> Lexicon {
        let LexiconBuilder {
            mut synsets,
            mut lemma_index,
        } = self;
        let known: HashSet<SynsetId> = synsets.keys().copied().collect();
        let mut warnings = Vec::new();

        let mut ids: Vec<SynsetId> = known.iter().copied().collect();
        ids.sort_unstable();
        for id in ids {
            let synset = synsets.get_mut(&id).expect("id from key set");
            synset.pointers.retain(|p| {
                let ok = known.contains(&p.target);
                if !ok {
                    warnings.push(LexiconWarning::DanglingPointer { from: id, to: p.target });
                }
                ok
            });
        }

        let mut keys: Vec<(String, Pos)> = lemma_index.keys().cloned().collect();
        keys.sort_unstable();
        for key in keys {
            let list = lemma_index.get_mut(&key).expect("key from key set");
            list.retain(|id| {
                let ok = known.contains(id);
                if !ok {
                    warnings.push(LexiconWarning::DanglingIndex {
                        lemma: key.0.clone(),
                        to: *id,
                    });
                }
                ok
            });
            if list.is_empty() {
                lemma_index.remove(&key);
            }
        }

        // A handful of lexical antonym pointers in WordNet 3.0 have no
        // mirror image (have -> lack, but lack's pointer leaves from miss).
        // Antonymy is symmetric, so add the missing reverse pointers.
        let mut ids: Vec<SynsetId> = synsets.keys().copied().collect();
        ids.sort_unstable();
        let mut reverse = Vec::new();
        for &id in &ids {
            for p in synsets[&id].pointers.iter().filter(|p| p.relation == Relation::Antonym) {
                let back = Pointer {
                    relation: Relation::Antonym,
                    target: id,
                    lemma_link: p.lemma_link.map(|l| LemmaLink {
                        source: l.target,
                        target: l.source,
                    }),
                };
                if !synsets[&p.target].pointers.contains(&back) {
                    reverse.push((p.target, back));
                }
            }
        }
        for (id, pointer) in reverse {
            let pointers = &mut synsets.get_mut(&id).expect("resolved target").pointers;
            if !pointers.contains(&pointer) {
                pointers.push(pointer);
            }
        }

        Lexicon {
            synsets,
            lemma_index,
            warnings,
        }
    }
}

impl Lexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Reads `index.{noun,verb,adj,adv}` and `data.{noun,verb,adj,adv}` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut builder = LexiconBuilder::default();
        for pos in Pos::LEXICAL {
            let suffix = pos.wordnet_suffix().expect("lexical class");
            let data = dir.join(format!("data.{suffix}"));
            builder.read_data(pos, crate::io::open(&data)?)?;
        }
        for pos in Pos::LEXICAL {
            let suffix = pos.wordnet_suffix().expect("lexical class");
            let index = dir.join(format!("index.{suffix}"));
            builder.read_index(pos, crate::io::open(&index)?)?;
        }
        Ok(builder.build())
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    pub fn warnings(&self) -> &[LexiconWarning] {
        &self.warnings
    }

    /// Synsets of `lemma` in `pos`, ordered by id.
    pub fn synsets_of(&self, lemma: &str, pos: Pos) -> Vec<&Synset> {
        let mut ids = self
            .lemma_index
            .get(&(lemma.to_lowercase(), pos))
            .cloned()
            .unwrap_or_default();
        ids.sort_unstable();
        ids.dedup();
        ids.iter().filter_map(|id| self.synsets.get(id)).collect()
    }

    /// Number of senses listed for `lemma` in `pos`; zero when unknown.
    pub fn sense_count(&self, lemma: &str, pos: Pos) -> usize {
        self.lemma_index.get(&(lemma.to_string(), pos)).map_or(0, Vec::len)
    }

    pub fn contains(&self, lemma: &str, pos: Pos) -> bool {
        self.sense_count(lemma, pos) > 0
    }

    /// All indexed lemmas of a class, sorted.
    pub fn lemmas(&self, pos: Pos) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .lemma_index
            .keys()
            .filter(|(_, p)| *p == pos)
            .map(|(l, _)| l.as_str())
            .collect();
        out.sort_unstable();
        out
    }

    /// Direct antonyms of `lemma` over all of its senses in `pos`.
    ///
    /// Lexical pointers only count when their source word is `lemma`;
    /// semantic antonym pointers contribute every word of the target synset.
    /// Multi-word entries and the query itself are dropped. Order follows
    /// synset id, then pointer order within the synset.
    pub fn antonyms(&self, lemma: &str, pos: Pos) -> Vec<String> {
        let lemma = lemma.to_lowercase();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for synset in self.synsets_of(&lemma, pos) {
            for target in synset.antonym_targets(self, Some(&lemma)) {
                if target != lemma && is_single_word(target) && seen.insert(target) {
                    out.push(target.to_string());
                }
            }
        }
        out
    }

    /// Antonyms found one hop away from `lemma`'s senses.
    ///
    /// Nouns and verbs step along hypernym and hyponym pointers. Adjectives
    /// and adverbs carry no hypernyms in the database, so they step along
    /// similar-to instead. Every antonym pointer leaving a neighbour synset
    /// contributes. Direct antonyms and the query are excluded, so the result
    /// never overlaps [`Lexicon::antonyms`].
    pub fn related_antonyms(&self, lemma: &str, pos: Pos) -> Vec<String> {
        let lemma = lemma.to_lowercase();
        let mut excluded: HashSet<String> = self.antonyms(&lemma, pos).into_iter().collect();
        excluded.insert(lemma.clone());

        let mut out = Vec::new();
        let mut visited = BTreeSet::new();
        for synset in self.synsets_of(&lemma, pos) {
            let neighbours = synset
                .pointers
                .iter()
                .filter(|p| matches!(p.relation, Relation::Hypernym | Relation::Hyponym | Relation::Similar));
            for pointer in neighbours {
                if !visited.insert(pointer.target) {
                    continue;
                }
                let Some(neighbour) = self.synsets.get(&pointer.target) else {
                    continue;
                };
                for target in neighbour.antonym_targets(self, None) {
                    if is_single_word(target) && !excluded.contains(target) {
                        excluded.insert(target.to_string());
                        out.push(target.to_string());
                    }
                }
            }
        }
        out
    }
}
