//! Evaluates an outside model: writes its scores as CSV, reads them back
//! against the suite and reports PoSRank and coarse retrieval metrics.
//!
//! ```text
//! cargo run --example external_scores
//! ```
//!
//! The "model" here is word overlap with the video's first caption, a
//! stand-in for any system that can score (video, caption) pairs.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use posrank::corpus::{build_vocabulary, load_corpus, CorpusFormat, Tagger};
use posrank::lexicon::Lexicon;
use posrank::metrics::{CoarseReport, Direction, GroundTruth, PoSRankReport, TieMode};
use posrank::negatives::{Generator, VocabSampling};
use posrank::similarity::{load_external_scores, ScoreMatrix};

fn overlap(a: &str, b: &str) -> f64 {
    let words: HashSet<&str> = a.split_whitespace().collect();
    b.split_whitespace().filter(|w| words.contains(w)).count() as f64
}

fn main() -> posrank::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lexicon = Lexicon::from_dir(&root.join("tests/fixtures/wordnet"))?;
    let captions = std::fs::read(root.join("examples/data/captions.tsv"))?;
    let corpus = load_corpus(&captions[..], CorpusFormat::Tsv, &Tagger::new(&lexicon))?;
    let suite = Generator::new(&lexicon, &build_vocabulary(&corpus), VocabSampling::Frequency)
        .gen_eval_suite(&corpus, 10, 1)?;

    // the video is represented by its other caption, so the model never sees
    // the ground truth text itself
    let proxy = |caption_id: &str| {
        let video = &corpus.get(caption_id).expect("known caption").video_id;
        let ids = &corpus.by_video()[video];
        let other = ids.iter().find(|id| id.as_str() != caption_id).unwrap_or(&ids[0]);
        corpus.get(other).unwrap().normalized_text()
    };

    let mut csv = String::from("caption_id,pos,s0,s1,s2,s3,s4,s5,s6,s7,s8,s9,s10\n");
    for set in suite.sets() {
        let video = proxy(&set.caption_id);
        let truth = corpus.get(&set.caption_id).unwrap().normalized_text();
        let scores: Vec<String> = std::iter::once(truth.as_str())
            .chain(set.negatives.iter().map(|n| n.text.as_str()))
            .map(|t| overlap(&video, t).to_string())
            .collect();
        writeln!(csv, "{},{},{}", set.caption_id, set.pos, scores.join(",")).unwrap();
    }
    let report = PoSRankReport::from_sets(&load_external_scores(csv.as_bytes(), &suite)?, TieMode::Mid)?;
    let classes: Vec<String> = report
        .classes
        .iter()
        .map(|(p, e)| format!("{p} {:.3}", e.value))
        .collect();
    println!("PoSRank mean {:.3}  {}", report.mean, classes.join("  "));

    let videos: Vec<String> = corpus.by_video().keys().cloned().collect();
    let caption_ids: Vec<String> = corpus.captions().iter().map(|c| c.caption_id.clone()).collect();
    let matrix = ScoreMatrix::from_fn(videos.clone(), caption_ids.clone(), |v, c| {
        let first = &corpus.by_video()[&videos[v]][0];
        overlap(
            &corpus.get(first).unwrap().normalized_text(),
            &corpus.get(&caption_ids[c]).unwrap().normalized_text(),
        )
    })?;
    let truth = GroundTruth::from_ids(&matrix, |id| corpus.get(id).map(|c| c.video_id.clone()));
    for direction in [Direction::V2t, Direction::T2v] {
        let r = CoarseReport::compute(&matrix, &truth, direction, TieMode::Mid)?;
        println!(
            "{direction:?}: R@1 {:.1} R@5 {:.1} R@10 {:.1} mean rank {:.2}",
            r.r1, r.r5, r.r10, r.avg_rank
        );
    }
    Ok(())
}
