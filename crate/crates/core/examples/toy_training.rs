//! Trains the toy model under each strategy and prints held-out metrics.
//!
//! ```text
//! cargo run --release --example toy_training -- [epochs] [seed]
//! ```

use posrank::toytrain::{train_toy, Strategy, SyntheticDataset, TrainConfig};

fn main() -> posrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().map_or(Ok(40), |a| a.parse()).expect("epochs");
    let seed = args.next().map_or(Ok(0), |a| a.parse()).expect("seed");
    let base = TrainConfig {
        epochs,
        seed,
        ..TrainConfig::default()
    };
    let data = SyntheticDataset::generate(&base.dataset)?;
    println!(
        "{:<8} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>8} {:>8}",
        "strategy", "noun", "verb", "adj", "adv", "prep", "mean", "v2t MR", "t2v MR"
    );
    for strategy in Strategy::ALL {
        let (_, trace) = train_toy(&data, &TrainConfig { strategy, ..base })?;
        let last = trace.last().expect("at least one epoch");
        let pr: Vec<String> = last.eval.posrank.values().map(|v| format!("{v:>7.3}")).collect();
        println!(
            "{:<8} {} {:>7.3} {:>8.2} {:>8.2}",
            strategy,
            pr.join(" "),
            last.eval.posrank_mean,
            last.eval.v2t.mean_recall,
            last.eval.t2v.mean_recall
        );
    }
    Ok(())
}
