//! Command-line front end.
//!
//! Every subcommand writes its outputs atomically and embeds the resolved
//! configuration, so a run can be repeated from its own output. Errors are
//! reported on one line as `error[<kind>]: <message>`; validation failures
//! exit with 1 and I/O failures with 2.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{corpus_statistics, max_tokens_of, nearest_captions, pos_deletion_duplicates};
use crate::corpus::{build_vocabulary, load_corpus, Corpus, CorpusFormat, Tagger};
use crate::error::{Error, Result};
use crate::io::{open, write_atomic};
use crate::lexicon::Lexicon;
use crate::metrics::{CoarseReport, Direction, GroundTruth, PoSRankReport, TieMode};
use crate::negatives::{EvalSuite, Generator, VocabSampling, DEFAULT_K};
use crate::similarity::{load_external_scores, score_suite, IdentityScorer, ScoreMatrix, Scorer, TfIdf};
use crate::toytrain::{train_toy, DatasetConfig, Optimizer, Strategy, SyntheticDataset, TrainConfig};
use crate::Pos;

#[derive(Debug, Parser)]
#[command(
    name = "posrank",
    version,
    about = "Fine-grained hard negatives and PoSRank evaluation"
)]
struct Cli {
    /// Report format on stdout and in `--out` report files.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a word- or phrase-level negative suite from a caption corpus.
    GenerateNegatives(GenerateArgs),
    /// Score a suite and report PoSRank, and optionally coarse recall.
    Evaluate(EvaluateArgs),
    /// Corpus statistics and deletion-duplicate fractions.
    AnalyzeCorpus(AnalyzeArgs),
    /// Train the toy model on synthetic data.
    TrainToy(TrainArgs),
    /// Look up senses and antonyms of a lemma.
    InspectLexicon(InspectArgs),
}

#[derive(Debug, Args)]
struct LexiconArgs {
    /// Directory with WordNet `index.*` and `data.*` files.
    #[arg(long, env = "POSRANK_WORDNET_DIR")]
    wordnet_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Caption file, JSONL or TSV.
    #[arg(long)]
    corpus: PathBuf,

    /// Overrides format detection from the file extension.
    #[arg(long, value_enum)]
    corpus_format: Option<CorpusFormatArg>,

    /// Also write the tagged corpus as JSONL.
    #[arg(long)]
    tagged_out: Option<PathBuf>,

    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorpusFormatArg {
    Jsonl,
    Tsv,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: CorpusArgs,

    /// Negatives per set.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = LevelArg::Word)]
    level: LevelArg,

    #[arg(long, value_enum, default_value_t = SamplingArg::Frequency)]
    vocab_sampling: SamplingArg,

    /// Suite output (JSONL).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Word,
    Phrase,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    Frequency,
    Uniform,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Word-level suite to score.
    #[arg(long)]
    suite: Option<PathBuf>,

    /// External scores CSV (`caption_id,pos,s0,...`).
    #[arg(long, conflicts_with = "scorer")]
    scores: Option<PathBuf>,

    /// Built-in lexical scorer; needs `--corpus` for ground-truth text.
    #[arg(long, value_enum)]
    scorer: Option<ScorerArg>,

    /// Caption corpus for ground-truth text and video ids.
    #[arg(long)]
    corpus: Option<PathBuf>,

    #[arg(long, value_enum)]
    corpus_format: Option<CorpusFormatArg>,

    /// Video-by-caption score matrix CSV for coarse recall.
    #[arg(long)]
    matrix: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = TiesArg::Mid)]
    ties: TiesArg,

    #[command(flatten)]
    lexicon: LexiconArgs,

    /// Report file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScorerArg {
    Tfidf,
    Identity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TiesArg {
    Mid,
    Best,
    Worst,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: CorpusArgs,

    /// Classes to delete; all five when omitted.
    #[arg(long, value_delimiter = ',')]
    pos: Vec<Pos>,

    /// Tokens removed: `4` or a range `1..6`. Defaults to `1..max`.
    #[arg(long)]
    n: Option<String>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Also list tf-idf nearest neighbours of this caption.
    #[arg(long)]
    nearest: Option<String>,

    #[arg(long, default_value_t = 10)]
    top: usize,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Coarse)]
    strategy: StrategyArg,

    #[arg(long, default_value_t = 0.2)]
    lambda: f64,

    /// Fine-grained negatives per class.
    #[arg(long, default_value_t = 16)]
    negatives: usize,

    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: usize,

    #[arg(long, default_value_t = TrainConfig::default().lr)]
    lr: f64,

    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    optimizer: OptimizerArg,

    #[arg(long, default_value_t = 64)]
    batch_size: usize,

    #[arg(long, default_value_t = 32)]
    dim: usize,

    #[arg(long, default_value_t = 512)]
    videos: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Leave the positive out of the fine-loss denominator.
    #[arg(long)]
    exclusive_denominator: bool,

    /// Trace output (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Coarse,
    Word,
    Phrase,
    Prompt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Sgd,
    Adam,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    lemma: String,

    /// Restrict to one class.
    #[arg(long)]
    pos: Option<Pos>,

    #[command(flatten)]
    lexicon: LexiconArgs,
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Error::InvalidArgument("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli))),
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), one_line(&e.to_string()));
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: &Cli) -> Result<()> {
    let report = match &cli.command {
        Command::GenerateNegatives(a) => generate(a)?,
        Command::Evaluate(a) => evaluate(a)?,
        Command::AnalyzeCorpus(a) => analyze(a)?,
        Command::TrainToy(a) => train(a)?,
        Command::InspectLexicon(a) => inspect(a)?,
    };
    let text = render(&report, cli.format);
    if let Some(out) = report.out.as_deref() {
        write_atomic(out, text.as_bytes())?;
    } else {
        std::io::stdout().write_all(text.as_bytes())?;
    }
    Ok(())
}

/// A JSON report with an optional destination and a table rendering.
struct Report {
    value: Value,
    table: String,
    out: Option<PathBuf>,
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.value).expect("report is valid JSON");
            s.push('\n');
            s
        }
        Format::Table => report.table.clone(),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_lexicon(args: &LexiconArgs) -> Result<Lexicon> {
    match &args.wordnet_dir {
        Some(dir) => Lexicon::from_dir(dir),
        None => {
            eprintln!("warning: no --wordnet-dir given; tagging and antonyms use an empty lexicon");
            Ok(Lexicon::empty())
        }
    }
}

fn corpus_format(path: &Path, arg: Option<CorpusFormatArg>) -> CorpusFormat {
    match arg {
        Some(CorpusFormatArg::Jsonl) => CorpusFormat::Jsonl,
        Some(CorpusFormatArg::Tsv) => CorpusFormat::Tsv,
        None => CorpusFormat::from_path(path),
    }
}

fn read_corpus(path: &Path, format: Option<CorpusFormatArg>, lexicon: &Lexicon) -> Result<Corpus> {
    load_corpus(open(path)?, corpus_format(path, format), &Tagger::new(lexicon))
}

fn load_input(args: &CorpusArgs) -> Result<(Lexicon, Corpus)> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let corpus = read_corpus(&args.corpus, args.corpus_format, &lexicon)?;
    if let Some(out) = &args.tagged_out {
        let mut buf = Vec::new();
        corpus.write_jsonl(&mut buf)?;
        write_atomic(out, &buf)?;
    }
    Ok((lexicon, corpus))
}

fn input_config(args: &CorpusArgs) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("corpus".into(), path_str(&args.corpus).into());
    m.insert(
        "wordnet_dir".into(),
        args.lexicon.wordnet_dir.as_deref().map(path_str).into(),
    );
    m
}

fn generate(a: &GenerateArgs) -> Result<Report> {
    let (lexicon, corpus) = load_input(&a.input)?;
    let vocab = build_vocabulary(&corpus);
    let sampling = match a.vocab_sampling {
        SamplingArg::Frequency => VocabSampling::Frequency,
        SamplingArg::Uniform => VocabSampling::Uniform,
    };
    let generator = Generator::new(&lexicon, &vocab, sampling);
    let extra = input_config(&a.input);
    let (bytes, config, summary) = match a.level {
        LevelArg::Word => {
            let mut suite = generator.gen_eval_suite(&corpus, a.k, a.seed)?;
            suite.extend_config(extra);
            let mut per_pos = Map::new();
            for pos in Pos::PERTURBABLE {
                per_pos.insert(
                    pos.to_string(),
                    json!({
                        "sets": suite.sets_for(pos).count(),
                        "negatives": suite.negative_count(pos),
                    }),
                );
            }
            (
                suite.to_jsonl_bytes()?,
                suite.config().clone(),
                json!({ "classes": per_pos, "gaps": suite.gaps().len() }),
            )
        }
        LevelArg::Phrase => {
            let mut suite = generator.gen_phrase_suite(&corpus, a.k, a.seed)?;
            suite.extend_config(extra);
            let negatives: usize = suite.sets().iter().map(|s| s.negatives.len()).sum();
            (
                suite.to_jsonl_bytes()?,
                suite.config().clone(),
                json!({ "sets": suite.sets().len(), "negatives": negatives, "gaps": suite.gaps().len() }),
            )
        }
    };
    write_atomic(&a.out, &bytes)?;
    let mut table = format!("suite written to {}\n", a.out.display());
    if let Some(classes) = summary.get("classes").and_then(Value::as_object) {
        let _ = writeln!(table, "{:<6} {:>8} {:>10}", "pos", "sets", "negatives");
        for (pos, c) in classes {
            let _ = writeln!(table, "{:<6} {:>8} {:>10}", pos, c["sets"], c["negatives"]);
        }
    } else {
        let _ = writeln!(table, "sets {}  negatives {}", summary["sets"], summary["negatives"]);
    }
    let _ = writeln!(table, "gaps {}", summary["gaps"]);
    Ok(Report {
        value: json!({ "config": config, "summary": summary }),
        table,
        out: None,
    })
}

fn coarse_json(r: &CoarseReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn evaluate(a: &EvaluateArgs) -> Result<Report> {
    if a.suite.is_none() && a.matrix.is_none() {
        return Err(Error::InvalidArgument(
            "nothing to evaluate: give --suite and/or --matrix".into(),
        ));
    }
    let ties = match a.ties {
        TiesArg::Mid => TieMode::Mid,
        TiesArg::Best => TieMode::Best,
        TiesArg::Worst => TieMode::Worst,
    };
    let corpus = match &a.corpus {
        Some(path) => Some(read_corpus(
            path,
            a.corpus_format,
            &match &a.lexicon.wordnet_dir {
                Some(dir) => Lexicon::from_dir(dir)?,
                None => Lexicon::empty(),
            },
        )?),
        None => None,
    };

    let mut config = Map::new();
    config.insert("ties".into(), serde_json::to_value(ties)?);
    config.insert("corpus".into(), a.corpus.as_deref().map(path_str).into());
    let mut value = Map::new();
    let mut table = String::new();

    if let Some(suite_path) = &a.suite {
        let suite = EvalSuite::read_jsonl(open(suite_path)?)?;
        if suite.config().get("level").and_then(Value::as_str) == Some("phrase") {
            return Err(Error::InvalidArgument("PoSRank needs a word-level suite".into()));
        }
        config.insert("suite".into(), path_str(suite_path).into());
        config.insert("suite_config".into(), Value::Object(suite.config().clone()));
        let sets = match (&a.scores, a.scorer) {
            (Some(path), _) => {
                config.insert("scores".into(), path_str(path).into());
                load_external_scores(open(path)?, &suite)?
            }
            (None, Some(kind)) => {
                let corpus = corpus
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("--scorer needs --corpus".into()))?;
                let scorer: Box<dyn Scorer> = match kind {
                    ScorerArg::Tfidf => Box::new(TfIdf::fit(corpus)?),
                    ScorerArg::Identity => Box::new(IdentityScorer),
                };
                config.insert(
                    "scorer".into(),
                    match kind {
                        ScorerArg::Tfidf => "tfidf",
                        ScorerArg::Identity => "identity",
                    }
                    .into(),
                );
                score_suite(&suite, corpus, scorer.as_ref())?
            }
            (None, None) => return Err(Error::InvalidArgument("give --scores or --scorer".into())),
        };
        let report = PoSRankReport::from_sets(&sets, ties)?;
        let counts: Map<String, Value> = report
            .classes
            .iter()
            .map(|(p, e)| (p.to_string(), e.sets.into()))
            .collect();
        value.insert("posrank".into(), report.to_json());
        value.insert("sets".into(), Value::Object(counts));
        let _ = writeln!(table, "{:<6} {:>8} {:>8}", "pos", "posrank", "sets");
        for (pos, e) in &report.classes {
            let _ = writeln!(table, "{:<6} {:>8.4} {:>8}", pos, e.value, e.sets);
        }
        let _ = writeln!(table, "{:<6} {:>8.4}", "mean", report.mean);
    }

    if let Some(matrix_path) = &a.matrix {
        let matrix = ScoreMatrix::read_csv(open(matrix_path)?)?;
        config.insert("matrix".into(), path_str(matrix_path).into());
        let gt = match &corpus {
            Some(c) => {
                let gt = GroundTruth::from_ids(&matrix, |cap| c.get(cap).map(|x| x.video_id.clone()));
                if gt.pairs().is_empty() {
                    return Err(Error::InvalidArgument(
                        "no matrix row/column pair matches a corpus (video, caption) pair".into(),
                    ));
                }
                gt
            }
            None if matrix.rows() == matrix.cols() => GroundTruth::diagonal(matrix.rows()),
            None => {
                return Err(Error::InvalidArgument(
                    "a non-square matrix needs --corpus for ground truth".into(),
                ))
            }
        };
        let v2t = CoarseReport::compute(&matrix, &gt, Direction::V2t, ties)?;
        let t2v = CoarseReport::compute(&matrix, &gt, Direction::T2v, ties)?;
        value.insert(
            "coarse".into(),
            json!({ "v2t": coarse_json(&v2t), "t2v": coarse_json(&t2v) }),
        );
        let _ = writeln!(
            table,
            "\n{:<4} {:>7} {:>7} {:>7} {:>7} {:>9}",
            "dir", "R@1", "R@5", "R@10", "MR", "avg rank"
        );
        for r in [&v2t, &t2v] {
            let dir = if r.direction == Direction::V2t { "v2t" } else { "t2v" };
            let _ = writeln!(
                table,
                "{:<4} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>9.2}",
                dir, r.r1, r.r5, r.r10, r.mean_recall, r.avg_rank
            );
        }
    }
    value.insert("config".into(), Value::Object(config));
    Ok(Report {
        value: Value::Object(value),
        table,
        out: a.out.clone(),
    })
}

fn parse_range(spec: &str) -> Result<(usize, Option<usize>)> {
    let bad = || Error::InvalidArgument(format!("--n expects `k` or `a..b`, got `{spec}`"));
    match spec.split_once("..") {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi = if hi.trim().is_empty() || hi.trim() == "max" {
                None
            } else {
                Some(hi.trim().parse().map_err(|_| bad())?)
            };
            Ok((lo, hi))
        }
        None => {
            let n: usize = spec.trim().parse().map_err(|_| bad())?;
            Ok((n, Some(n)))
        }
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<Report> {
    let (_, corpus) = load_input(&a.input)?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput);
    }
    let classes: Vec<Pos> = if a.pos.is_empty() {
        Pos::PERTURBABLE.to_vec()
    } else {
        a.pos.clone()
    };
    if let Some(bad) = classes.iter().find(|p| !p.is_perturbable()) {
        return Err(Error::InvalidArgument(format!("cannot delete class `{bad}`")));
    }
    let (lo, hi) = parse_range(a.n.as_deref().unwrap_or("1..max"))?;
    if lo == 0 {
        return Err(Error::InvalidArgument("--n starts at 1".into()));
    }

    let stats = corpus_statistics(&corpus);
    let mut rows = Vec::new();
    for &pos in &classes {
        let top = hi.unwrap_or_else(|| max_tokens_of(&corpus, pos).max(lo));
        for n in lo..=top {
            rows.push(pos_deletion_duplicates(&corpus, pos, n, a.seed)?);
        }
    }

    let mut config = input_config(&a.input);
    config.insert("seed".into(), a.seed.into());
    config.insert(
        "pos".into(),
        json!(classes.iter().map(|p| p.as_str()).collect::<Vec<_>>()),
    );
    config.insert("n".into(), json!({ "from": lo, "to": hi }));
    let mut value = json!({
        "config": config,
        "statistics": stats,
        "duplicates": rows,
    });

    let mut table = format!(
        "captions {}  videos {}  avg length {:.2}  vocabulary {}\n",
        stats.captions, stats.videos, stats.avg_len, stats.vocab_size
    );
    for (pos, f) in &stats.proportions {
        let _ = writeln!(table, "  {:<5} {:>6.2}%", pos, 100.0 * f);
    }
    let _ = writeln!(
        table,
        "\n{:<5} {:>3} {:>9} {:>9} {:>8}",
        "pos", "n", "dup %", "strict %", "eligible"
    );
    for r in &rows {
        let strict = r
            .strict_fraction
            .map_or("-".to_string(), |f| format!("{:.3}", 100.0 * f));
        let _ = writeln!(
            table,
            "{:<5} {:>3} {:>9.3} {:>9} {:>8}",
            r.pos,
            r.n_removed,
            100.0 * r.fraction,
            strict,
            r.eligible
        );
    }

    if let Some(id) = &a.nearest {
        let scorer = TfIdf::fit(&corpus)?;
        let neighbours = nearest_captions(&corpus, &scorer, id, a.top)?;
        let _ = writeln!(table, "\nnearest to {id}:");
        for n in &neighbours {
            let _ = writeln!(table, "  {:.4}  {}  {}", n.score, n.caption_id, n.text);
        }
        value["config"]["nearest"] = json!({ "caption_id": id, "top": a.top });
        value["nearest"] = serde_json::to_value(neighbours)?;
    }
    Ok(Report {
        value,
        table,
        out: a.out.clone(),
    })
}

#[derive(Serialize)]
struct TraceFile<'a> {
    config: &'a TrainConfig,
    epochs: &'a [crate::toytrain::EpochRecord],
}

fn train(a: &TrainArgs) -> Result<Report> {
    let config = TrainConfig {
        strategy: match a.strategy {
            StrategyArg::Coarse => Strategy::Coarse,
            StrategyArg::Word => Strategy::Word,
            StrategyArg::Phrase => Strategy::Phrase,
            StrategyArg::Prompt => Strategy::Prompt,
        },
        lambda: a.lambda,
        negatives: a.negatives,
        epochs: a.epochs,
        lr: a.lr,
        optimizer: match a.optimizer {
            OptimizerArg::Sgd => Optimizer::Sgd,
            OptimizerArg::Adam => Optimizer::Adam,
        },
        batch_size: a.batch_size,
        dim: a.dim,
        exclusive_denominator: a.exclusive_denominator,
        seed: a.seed,
        dataset: DatasetConfig {
            videos: a.videos,
            seed: a.seed,
            ..DatasetConfig::default()
        },
        ..TrainConfig::default()
    };
    config.validate()?;
    let data = SyntheticDataset::generate(&config.dataset)?;
    let (_, trace) = train_toy(&data, &config)?;
    let value = serde_json::to_value(TraceFile {
        config: &trace.config,
        epochs: &trace.epochs,
    })?;
    let mut table = format!(
        "{:>5} {:>9} {:>9} {:>8} {:>8}",
        "epoch", "loss", "posrank", "v2t MR", "t2v MR"
    );
    for pos in Pos::PERTURBABLE {
        let _ = write!(table, " {:>6}", pos.as_str());
    }
    table.push('\n');
    for r in &trace.epochs {
        let _ = write!(
            table,
            "{:>5} {:>9.4} {:>9.4} {:>8.2} {:>8.2}",
            r.epoch, r.loss.total, r.eval.posrank_mean, r.eval.v2t.mean_recall, r.eval.t2v.mean_recall
        );
        for pos in Pos::PERTURBABLE {
            let v = r.eval.posrank.get(&pos).map_or("-".into(), |v| format!("{v:.3}"));
            let _ = write!(table, " {v:>6}");
        }
        table.push('\n');
    }
    Ok(Report {
        value,
        table,
        out: a.out.clone(),
    })
}

fn inspect(a: &InspectArgs) -> Result<Report> {
    if a.lexicon.wordnet_dir.is_none() {
        return Err(Error::InvalidArgument(
            "inspect-lexicon needs --wordnet-dir or POSRANK_WORDNET_DIR".into(),
        ));
    }
    let lexicon = load_lexicon(&a.lexicon)?;
    let lemma = a.lemma.to_lowercase();
    let classes: Vec<Pos> = match a.pos {
        Some(p) if p.is_lexical() => vec![p],
        Some(p) => return Err(Error::InvalidArgument(format!("`{p}` is not a lexicon class"))),
        None => Pos::LEXICAL.to_vec(),
    };
    let mut entries = Map::new();
    let mut table = String::new();
    for pos in classes {
        let senses = lexicon.sense_count(&lemma, pos);
        if senses == 0 {
            continue;
        }
        let antonyms = lexicon.antonyms(&lemma, pos);
        let related = lexicon.related_antonyms(&lemma, pos);
        let _ = writeln!(table, "{pos} ({senses} senses)");
        let _ = writeln!(table, "  antonyms: {}", antonyms.join(", "));
        let _ = writeln!(table, "  related:  {}", related.join(", "));
        entries.insert(
            pos.to_string(),
            json!({ "senses": senses, "antonyms": antonyms, "related_antonyms": related }),
        );
    }
    if entries.is_empty() {
        let _ = writeln!(table, "`{lemma}` not found");
    }
    Ok(Report {
        value: json!({
            "config": { "lemma": lemma, "wordnet_dir": a.lexicon.wordnet_dir.as_deref().map(path_str) },
            "entries": entries,
        }),
        table,
        out: None,
    })
}
