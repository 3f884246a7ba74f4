//! Looks up a lemma's senses, antonyms and related antonyms.
//!
//! ```text
//! cargo run --example lexicon_lookup -- slow adj [wordnet-dir]
//! ```
//!
//! Without a directory, `POSRANK_WORDNET_DIR` is used, then the bundled
//! excerpt under `tests/fixtures/wordnet`.

use std::path::PathBuf;

use posrank::lexicon::Lexicon;
use posrank::Pos;

fn main() -> posrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let lemma = args.next().unwrap_or_else(|| "slow".into());
    let pos: Pos = args
        .next()
        .as_deref()
        .unwrap_or("adj")
        .parse()
        .expect("pos is noun, verb, adj or adv");
    let dir = args
        .next()
        .or_else(|| std::env::var("POSRANK_WORDNET_DIR").ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/wordnet"));

    let lexicon = Lexicon::from_dir(&dir)?;
    println!("{} synsets loaded from {}", lexicon.synset_count(), dir.display());
    println!("{lemma} ({pos}): {} senses", lexicon.sense_count(&lemma, pos));
    println!("  antonyms:         {:?}", lexicon.antonyms(&lemma, pos));
    println!("  related antonyms: {:?}", lexicon.related_antonyms(&lemma, pos));
    Ok(())
}
