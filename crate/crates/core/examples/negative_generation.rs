//! Tags one caption and prints its word-level and phrase-level negatives.
//!
//! ```text
//! cargo run --example negative_generation -- "a boy wearing a black t-shirt" [k] [seed]
//! ```

use std::path::PathBuf;

use posrank::corpus::{build_vocabulary, load_corpus, tokenize, CorpusFormat, TaggedCaption, Tagger};
use posrank::lexicon::Lexicon;
use posrank::negatives::{Generator, VocabSampling};
use posrank::Pos;

fn main() -> posrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args
        .next()
        .unwrap_or_else(|| "a boy wearing a black t-shirt runs quickly in the park".into());
    let k: usize = args.next().map_or(5, |a| a.parse().expect("k"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));

    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lexicon = Lexicon::from_dir(&root.join("tests/fixtures/wordnet"))?;
    let tagger = Tagger::new(&lexicon);
    // the sample captions supply the vocabulary for prepositions and fallbacks
    let captions = std::fs::read(root.join("examples/data/captions.tsv"))?;
    let corpus = load_corpus(&captions[..], CorpusFormat::Tsv, &tagger)?;
    let generator = Generator::new(&lexicon, &build_vocabulary(&corpus), VocabSampling::Frequency);

    let caption = TaggedCaption {
        video_id: "query".into(),
        caption_id: "query#0".into(),
        text: text.clone(),
        tokens: tagger.tag_tokens(&tokenize(&text)),
    };
    let tags: Vec<String> = caption
        .tokens
        .iter()
        .map(|t| format!("{}/{}", t.surface, t.pos))
        .collect();
    println!("{}\n", tags.join(" "));

    for pos in Pos::PERTURBABLE {
        match generator.gen_word_level(&caption, pos, k, seed) {
            Ok(set) => {
                println!("{pos}:");
                for n in &set.negatives {
                    println!("  {:<60} {:?}", n.text, n.replacements[0].source);
                }
            }
            Err(e) => println!("{pos}: {e}"),
        }
    }
    println!("phrase:");
    match generator.gen_phrase_level(&caption, k, seed) {
        Ok(p) => p.negatives.iter().for_each(|n| println!("  {}", n.text)),
        Err(e) => println!("  {e}"),
    }
    Ok(())
}
