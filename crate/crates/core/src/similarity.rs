//! Caption scorers and score-file ingestion.
//!
//! Lexical scorers have no video input; they use the ground-truth caption
//! as a stand-in for the video it describes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Read};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{is_punct_token, normalize, tokenize, Corpus};
use crate::error::{Error, Result};
use crate::negatives::EvalSuite;
use crate::Pos;

/// Similarity between a video (or its proxy caption) and a candidate caption.
pub trait Scorer: Sync {
    fn score_pair(&self, video_proxy: &str, candidate: &str) -> f64;
}

/// Scores 1 for an exact match with the proxy after normalization, else 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityScorer;

impl Scorer for IdentityScorer {
    fn score_pair(&self, video_proxy: &str, candidate: &str) -> f64 {
        if normalize(video_proxy) == normalize(candidate) {
            1.0
        } else {
            0.0
        }
    }
}

/// Tf-idf cosine similarity with smoothed idf `ln((1+D)/(1+df)) + 1`.
#[derive(Debug, Clone, Default)]
pub struct TfIdf {
    df: HashMap<String, usize>,
    docs: usize,
}

fn terms(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| !is_punct_token(t)).collect()
}

impl TfIdf {
    pub fn fit(corpus: &Corpus) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut df: HashMap<String, usize> = HashMap::new();
        for caption in corpus.captions() {
            let unique: HashSet<String> = caption
                .tokens
                .iter()
                .filter(|t| !is_punct_token(&t.surface))
                .map(|t| t.surface.to_lowercase())
                .collect();
            for term in unique {
                *df.entry(term).or_default() += 1;
            }
        }
        Ok(TfIdf { df, docs: corpus.len() })
    }

    pub fn idf(&self, term: &str) -> f64 {
        let df = self.df.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + self.docs as f64) / (1.0 + df)).ln() + 1.0
    }

    fn vector(&self, text: &str) -> BTreeMap<String, f64> {
        let mut tf: BTreeMap<String, f64> = BTreeMap::new();
        for term in terms(text) {
            *tf.entry(term).or_default() += 1.0;
        }
        for (term, w) in tf.iter_mut() {
            *w *= self.idf(term);
        }
        tf
    }
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(t, w)| b.get(t).map(|v| w * v)).sum();
    let na: f64 = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|w| w * w).sum::<f64>().sqrt();
    // an empty float sum is -0.0
    if na == 0.0 || nb == 0.0 || dot <= 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).min(1.0)
}

impl Scorer for TfIdf {
    fn score_pair(&self, video_proxy: &str, candidate: &str) -> f64 {
        cosine(&self.vector(video_proxy), &self.vector(candidate))
    }
}

/// Scores of the ground truth (index 0) and its negatives, in suite order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScores {
    pub caption_id: String,
    pub pos: Pos,
    pub scores: Vec<f64>,
}

/// Scores every set of a suite with a lexical scorer; the ground-truth
/// caption text comes from `corpus`.
pub fn score_suite(suite: &EvalSuite, corpus: &Corpus, scorer: &dyn Scorer) -> Result<Vec<CandidateScores>> {
    suite
        .sets()
        .par_iter()
        .enumerate()
        .map(|(row, set)| {
            let caption = corpus.get(&set.caption_id).ok_or_else(|| Error::UnknownCaption {
                row: row + 1,
                caption_id: set.caption_id.clone(),
                pos: set.pos.to_string(),
            })?;
            let truth = caption.normalized_text();
            let scores = std::iter::once(truth.as_str())
                .chain(set.negatives.iter().map(|n| n.text.as_str()))
                .map(|text| scorer.score_pair(&truth, text))
                .collect();
            Ok(CandidateScores {
                caption_id: set.caption_id.clone(),
                pos: set.pos,
                scores,
            })
        })
        .collect()
}

/// Reads `caption_id,pos,s0,s1,...,sK` rows, validating each against the
/// suite. A leading header row whose first cell is `caption_id` is skipped.
pub fn load_external_scores<R: Read>(stream: R, suite: &EvalSuite) -> Result<Vec<CandidateScores>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(stream);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if row == 1 && record.get(0) == Some("caption_id") {
            continue;
        }
        if record.len() < 3 {
            return Err(Error::MalformedLine {
                file: "scores".into(),
                line: row,
                reason: "expected caption_id,pos,s0,...".into(),
            });
        }
        let caption_id = record[0].to_string();
        let unknown = || Error::UnknownCaption {
            row,
            caption_id: caption_id.clone(),
            pos: record[1].to_string(),
        };
        let pos: Pos = record[1].parse().map_err(|_| unknown())?;
        let set = suite.get(&caption_id, pos).ok_or_else(unknown)?;
        let expected = 1 + set.negatives.len();
        let found = record.len() - 2;
        if found != expected {
            return Err(Error::LengthMismatch {
                row,
                caption_id,
                expected,
                found,
            });
        }
        let mut scores = Vec::with_capacity(found);
        for (j, cell) in record.iter().skip(2).enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::MalformedLine {
                file: "scores".into(),
                line: row,
                reason: format!("column {} is not a number: `{cell}`", j + 2),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteScore {
                    row,
                    caption_id,
                    column: j + 2,
                });
            }
            scores.push(value);
        }
        out.push(CandidateScores {
            caption_id,
            pos,
            scores,
        });
    }
    Ok(out)
}

/// Dense video-by-caption similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    values: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != row_ids.len() * col_ids.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} values for {}x{} ids",
                values.len(),
                row_ids.len(),
                col_ids.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteScore {
                row: i / col_ids.len().max(1) + 1,
                caption_id: col_ids[i % col_ids.len()].clone(),
                column: i % col_ids.len(),
            });
        }
        Ok(ScoreMatrix {
            row_ids,
            col_ids,
            values,
        })
    }

    /// Builds from a closure over (row, column) indices.
    pub fn from_fn(row_ids: Vec<String>, col_ids: Vec<String>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let cols = col_ids.len();
        let values = (0..row_ids.len() * cols).map(|i| f(i / cols, i % cols)).collect();
        Self::new(row_ids, col_ids, values)
    }

    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.col_ids.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.col_ids.len();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    /// Header row `<label>,caption_1,...`, then one `video_id,s_1,...` row per video.
    pub fn read_csv<R: BufRead>(stream: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(stream);
        let mut records = reader.records();
        let header = records.next().ok_or(Error::EmptyInput)??;
        let col_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        for (i, record) in records.enumerate() {
            let record = record?;
            row_ids.push(record[0].to_string());
            for (j, cell) in record.iter().skip(1).enumerate() {
                let v: f64 = cell.parse().map_err(|_| Error::MalformedLine {
                    file: "matrix".into(),
                    line: i + 2,
                    reason: format!("column {} is not a number: `{cell}`", j + 1),
                })?;
                values.push(v);
            }
        }
        Self::new(row_ids, col_ids, values)
    }
}
