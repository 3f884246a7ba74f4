//! Corpus statistics, deletion duplicates and nearest neighbours for a
//! caption file (TSV or JSONL).
//!
//! ```text
//! cargo run --example corpus_analysis -- [captions] [wordnet-dir]
//! ```

use std::path::PathBuf;

use posrank::analysis::{corpus_statistics, deletion_sweep, nearest_captions};
use posrank::corpus::{load_corpus, CorpusFormat, Tagger};
use posrank::lexicon::Lexicon;
use posrank::similarity::TfIdf;
use posrank::Pos;

fn main() -> posrank::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map_or_else(|| root.join("examples/data/captions.tsv"), PathBuf::from);
    let dir = args
        .next()
        .map_or_else(|| root.join("tests/fixtures/wordnet"), PathBuf::from);

    let lexicon = Lexicon::from_dir(&dir)?;
    let stream = std::io::BufReader::new(std::fs::File::open(&path)?);
    let corpus = load_corpus(stream, CorpusFormat::from_path(&path), &Tagger::new(&lexicon))?;

    let stats = corpus_statistics(&corpus);
    println!(
        "{} captions, {} videos, {} words, mean length {:.2}",
        stats.captions, stats.videos, stats.vocab_size, stats.avg_len
    );
    for (pos, share) in &stats.proportions {
        println!("  {pos:<5} in {:>5.1}% of captions", 100.0 * share);
    }

    println!("captions that collide after deleting n words of a class:");
    for pos in Pos::PERTURBABLE {
        let sweep = deletion_sweep(&corpus, pos, 3, 0)?;
        let cells: Vec<String> = sweep
            .iter()
            .map(|d| format!("n={} {:.1}%", d.n_removed, 100.0 * d.fraction))
            .collect();
        println!("  {pos:<5} {}", cells.join("  "));
    }

    let first = &corpus.captions()[0];
    println!("nearest to `{}`:", first.text);
    for n in nearest_captions(&corpus, &TfIdf::fit(&corpus)?, &first.caption_id, 3)? {
        println!("  {:.3}  {}", n.score, n.text);
    }
    Ok(())
}
