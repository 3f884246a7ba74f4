//! Desk-scale training of the coarse and fine contrastive objectives on
//! synthetic data.
//!
//! Four strategies are supported:
//!
//! * `coarse`: in-batch video/text contrastive loss only.
//! * `word`: the coarse loss plus `lambda` times a loss against word-level
//!   negatives of each caption, both on the coarse head.
//! * `phrase`: as `word` with phrase-level negatives.
//! * `prompt`: the coarse loss on the coarse head and the word-level term
//!   on a separate fine head, so one model serves both granularities.
//!
//! The fine loss keeps the positive in its denominator unless
//! `exclusive_denominator` is set, in which case the loss can go negative.

mod data;
mod model;

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use data::{DatasetConfig, SyntheticDataset, Video, SLOTS};
pub use model::{
    coarse_loss, coarse_loss_grad, combined_loss, fine_loss, fine_loss_exclusive, fine_loss_grad, grad_check,
    log_sum_exp, Batch, Head, LossParts, Objective, ToyModel,
};

use crate::corpus::build_vocabulary;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::metrics::{CoarseReport, Direction, GroundTruth, PoSRankReport, TieMode};
use crate::negatives::{EvalSuite, Generator, NegativeLevel, VocabSampling};
use crate::rng::SeedKey;
use crate::similarity::{CandidateScores, ScoreMatrix};
use crate::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Coarse,
    Word,
    Phrase,
    Prompt,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Coarse, Strategy::Word, Strategy::Phrase, Strategy::Prompt];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Coarse => "coarse",
            Strategy::Word => "word",
            Strategy::Phrase => "phrase",
            Strategy::Prompt => "prompt",
        }
    }

    pub fn objective(self, lambda: f64, exclusive: bool) -> Objective {
        let fine_head = match self {
            Strategy::Coarse => None,
            Strategy::Word | Strategy::Phrase => Some(Head::Coarse),
            Strategy::Prompt => Some(Head::Fine),
        };
        Objective {
            coarse_head: Head::Coarse,
            fine_head,
            lambda,
            exclusive,
        }
    }

    pub fn negative_level(self) -> Option<NegativeLevel> {
        match self {
            Strategy::Coarse => None,
            Strategy::Word | Strategy::Prompt => Some(NegativeLevel::Word),
            Strategy::Phrase => Some(NegativeLevel::Phrase),
        }
    }

    /// Head whose scores are used for PoSRank.
    pub fn fine_eval_head(self) -> Head {
        match self {
            Strategy::Prompt => Head::Fine,
            _ => Head::Coarse,
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    /// Adam with the usual `beta1 = 0.9`, `beta2 = 0.999`.
    Adam,
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::Adam),
            _ => Err(Error::InvalidArgument(format!("unknown optimizer `{s}`"))),
        }
    }
}

struct Stepper {
    kind: Optimizer,
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Stepper {
    fn new(kind: Optimizer, lr: f64, n: usize) -> Self {
        let n = if kind == Optimizer::Adam { n } else { 0 };
        Self {
            kind,
            lr,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        match self.kind {
            Optimizer::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= self.lr * g;
                }
            }
            Optimizer::Adam => {
                const B1: f64 = 0.9;
                const B2: f64 = 0.999;
                self.t += 1;
                let c1 = 1.0 - B1.powi(self.t);
                let c2 = 1.0 - B2.powi(self.t);
                for i in 0..params.len() {
                    self.m[i] = B1 * self.m[i] + (1.0 - B1) * grad[i];
                    self.v[i] = B2 * self.v[i] + (1.0 - B2) * grad[i] * grad[i];
                    params[i] -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + 1e-8);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub strategy: Strategy,
    pub lambda: f64,
    /// Fine-grained negatives per class (word level) or per caption (phrase level).
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub optimizer: Optimizer,
    pub batch_size: usize,
    pub dim: usize,
    pub tau: f64,
    pub exclusive_denominator: bool,
    /// Negatives per set in the held-out evaluation suite.
    pub eval_k: usize,
    pub seed: u64,
    pub dataset: DatasetConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Coarse,
            lambda: 0.2,
            negatives: 16,
            epochs: 40,
            lr: 0.003,
            optimizer: Optimizer::Adam,
            batch_size: 64,
            dim: 32,
            tau: 0.05,
            exclusive_denominator: false,
            eval_k: 20,
            seed: 0,
            dataset: DatasetConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be a finite non-negative number");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if self.dim < 2 {
            return bad("dimension must be at least 2");
        }
        if self.tau.is_nan() || self.tau <= 0.0 {
            return bad("temperature must be positive");
        }
        if self.eval_k == 0 {
            return bad("eval K must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub posrank: BTreeMap<Pos, f64>,
    pub posrank_mean: f64,
    pub v2t: CoarseReport,
    pub t2v: CoarseReport,
}

impl Evaluation {
    /// Mean of the v2t and t2v mean recalls.
    pub fn coarse_mean_recall(&self) -> f64 {
        (self.v2t.mean_recall + self.t2v.mean_recall) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: LossParts,
    #[serde(flatten)]
    pub eval: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub config: TrainConfig,
    pub epochs: Vec<EpochRecord>,
}

impl Trace {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }
}

/// Held-out word-level suite over the test split, drawn from the test
/// split's own vocabulary.
pub fn test_suite(data: &SyntheticDataset, k: usize, seed: u64) -> Result<EvalSuite> {
    let corpus = data.corpus(data.test());
    let vocab = build_vocabulary(&corpus);
    let lexicon = Lexicon::empty();
    Generator::new(&lexicon, &vocab, VocabSampling::Frequency).gen_eval_suite(&corpus, k, seed)
}

/// PoSRank on `suite` with `fine_head` and coarse recall with the coarse
/// head, both over the test split.
pub fn evaluate(model: &ToyModel, data: &SyntheticDataset, suite: &EvalSuite, fine_head: Head) -> Result<Evaluation> {
    let test = data.test();
    if test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let video_index: BTreeMap<&str, usize> = test
        .iter()
        .map(|&v| (data.captions()[v].caption_id.as_str(), v))
        .collect();
    let sets: Vec<CandidateScores> = suite
        .sets()
        .par_iter()
        .map(|set| {
            let v = *video_index.get(set.caption_id.as_str()).ok_or_else(|| {
                Error::InvalidArgument(format!("suite caption `{}` is not in the test split", set.caption_id))
            })?;
            let video = model.encode_video(&data.videos()[v].attrs, fine_head);
            let mut scores = vec![model.similarity(&video, &model.encode_caption(data.caption_tokens(v)))];
            for neg in &set.negatives {
                scores.push(model.similarity(&video, &model.encode_caption(&data.encode(&neg.text))));
            }
            Ok(CandidateScores {
                caption_id: set.caption_id.clone(),
                pos: set.pos,
                scores,
            })
        })
        .collect::<Result<_>>()?;
    let report = PoSRankReport::from_sets(&sets, TieMode::Mid)?;

    let videos: Vec<Vec<f64>> = test
        .iter()
        .map(|&v| model.encode_video(&data.videos()[v].attrs, Head::Coarse))
        .collect();
    let captions: Vec<Vec<f64>> = test
        .iter()
        .map(|&v| model.encode_caption(data.caption_tokens(v)))
        .collect();
    let ids: Vec<String> = test.iter().map(|&v| data.videos()[v].id.clone()).collect();
    let matrix = ScoreMatrix::from_fn(ids.clone(), ids, |i, j| model.similarity(&videos[i], &captions[j]))?;
    let gt = GroundTruth::diagonal(test.len());
    Ok(Evaluation {
        posrank: report.classes.iter().map(|(p, e)| (*p, e.value)).collect(),
        posrank_mean: report.mean,
        v2t: CoarseReport::compute(&matrix, &gt, Direction::V2t, TieMode::Mid)?,
        t2v: CoarseReport::compute(&matrix, &gt, Direction::T2v, TieMode::Mid)?,
    })
}

/// Minibatch gradient descent on the strategy's objective, evaluating on
/// the held-out split after every epoch.
pub fn train_toy(data: &SyntheticDataset, config: &TrainConfig) -> Result<(ToyModel, Trace)> {
    config.validate()?;
    let model = ToyModel::new(
        data.vocab_size(),
        config.dim,
        config.tau,
        SeedKey::new(config.seed).str("init").seed(),
    );
    train_from(model, data, config)
}

/// Continues training an existing model.
pub fn train_from(mut model: ToyModel, data: &SyntheticDataset, config: &TrainConfig) -> Result<(ToyModel, Trace)> {
    config.validate()?;
    if model.vocab() != data.vocab_size() {
        return Err(Error::InvalidArgument("model and dataset vocabularies differ".into()));
    }
    let objective = config.strategy.objective(config.lambda, config.exclusive_denominator);
    let train_corpus = data.corpus(data.train());
    let vocab = build_vocabulary(&train_corpus);
    let lexicon = Lexicon::empty();
    let generator = Generator::new(&lexicon, &vocab, VocabSampling::Frequency);
    let suite = test_suite(data, config.eval_k, SeedKey::new(config.seed).str("suite").seed())?;
    let eval_head = config.strategy.fine_eval_head();

    let mut stepper = Stepper::new(config.optimizer, config.lr, model.params().len());
    let mut records = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut order = data.train().to_vec();
        order.shuffle(&mut SeedKey::new(config.seed).str("order").num(epoch as u64).rng());
        let mut totals = LossParts::default();
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let batch = Batch {
                videos: chunk.iter().map(|&v| data.videos()[v].attrs.clone()).collect(),
                captions: chunk.iter().map(|&v| data.caption_tokens(v).to_vec()).collect(),
                negatives: chunk
                    .iter()
                    .map(|&v| match config.strategy.negative_level() {
                        None => Vec::new(),
                        Some(level) => generator
                            .gen_training_negatives(
                                &data.captions()[v],
                                config.negatives,
                                level,
                                config.seed,
                                epoch as u64,
                            )
                            .iter()
                            .map(|t| data.encode(t))
                            .collect(),
                    })
                    .collect(),
            };
            let (loss, grad) = model.loss_and_grad(&batch, &objective);
            if !loss.total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::DivergenceDetected { epoch });
            }
            stepper.step(model.params_mut(), &grad);
            totals.coarse += loss.coarse;
            totals.fine += loss.fine;
            totals.total += loss.total;
            batches += 1;
        }
        let n = batches.max(1) as f64;
        let loss = LossParts {
            coarse: totals.coarse / n,
            fine: totals.fine / n,
            total: totals.total / n,
        };
        let eval = evaluate(&model, data, &suite, eval_head)?;
        records.push(EpochRecord { epoch, loss, eval });
    }
    Ok((
        model,
        Trace {
            config: *config,
            epochs: records,
        },
    ))
}
