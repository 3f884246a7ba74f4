//! Builds an evaluation suite from the sample captions and scores it with the
//! built-in scorers.
//!
//! ```text
//! cargo run --example tfidf_evaluation -- [k] [seed]
//! ```

use std::path::PathBuf;

use posrank::corpus::{build_vocabulary, load_corpus, CorpusFormat, Tagger};
use posrank::lexicon::Lexicon;
use posrank::metrics::{random_baseline, PoSRankReport, TieMode};
use posrank::negatives::{Generator, VocabSampling};
use posrank::similarity::{score_suite, IdentityScorer, Scorer, TfIdf};

fn main() -> posrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map_or(20, |a| a.parse().expect("k"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));

    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lexicon = Lexicon::from_dir(&root.join("tests/fixtures/wordnet"))?;
    let captions = std::fs::read(root.join("examples/data/captions.tsv"))?;
    let corpus = load_corpus(&captions[..], CorpusFormat::Tsv, &Tagger::new(&lexicon))?;
    let suite = Generator::new(&lexicon, &build_vocabulary(&corpus), VocabSampling::Frequency)
        .gen_eval_suite(&corpus, k, seed)?;
    println!(
        "{} candidate sets, K = {k}, random baseline {:.3}",
        suite.sets().len(),
        random_baseline(k)
    );

    let tfidf = TfIdf::fit(&corpus)?;
    let scorers: [(&str, &dyn Scorer); 2] = [("identity", &IdentityScorer), ("tfidf", &tfidf)];
    for (name, scorer) in scorers {
        let report = PoSRankReport::from_sets(&score_suite(&suite, &corpus, scorer)?, TieMode::Mid)?;
        let classes: Vec<String> = report
            .classes
            .iter()
            .map(|(p, e)| format!("{p} {:.3}", e.value))
            .collect();
        println!("{name:<8} mean {:.3}  {}", report.mean, classes.join("  "));
    }
    Ok(())
}
