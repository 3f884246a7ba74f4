//! Dual-head bag-of-words model with hand-written gradients.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::seeded_rng;

/// Stable `ln Σ exp(x)`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn softmax(xs: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(xs);
    xs.iter().map(|x| (x - lse).exp()).collect()
}

/// Symmetric in-batch contrastive loss over a row-major `b × b` matrix whose
/// diagonal holds the matching pairs.
pub fn coarse_loss(s: &[f64], b: usize) -> f64 {
    coarse_loss_grad(s, b).0
}

/// Loss plus its gradient with respect to `s`.
pub fn coarse_loss_grad(s: &[f64], b: usize) -> (f64, Vec<f64>) {
    assert_eq!(s.len(), b * b, "similarity matrix must be square");
    let mut grad = vec![0.0; b * b];
    let mut loss = 0.0;
    let inv = 1.0 / b as f64;
    for i in 0..b {
        let row = &s[i * b..(i + 1) * b];
        let p = softmax(row);
        loss -= row[i] - log_sum_exp(row);
        for j in 0..b {
            grad[i * b + j] += inv * (p[j] - if i == j { 1.0 } else { 0.0 });
        }
    }
    for j in 0..b {
        let col: Vec<f64> = (0..b).map(|i| s[i * b + j]).collect();
        let p = softmax(&col);
        loss -= col[j] - log_sum_exp(&col);
        for i in 0..b {
            grad[i * b + j] += inv * (p[i] - if i == j { 1.0 } else { 0.0 });
        }
    }
    (loss * inv, grad)
}

/// `-ln(e^pos / (e^pos + Σ e^neg))`.
pub fn fine_loss(pos: f64, negs: &[f64]) -> f64 {
    fine_loss_grad(pos, negs, false).0
}

/// `-ln(e^pos / Σ e^neg)`, the variant whose denominator leaves out the
/// positive. Can be negative.
pub fn fine_loss_exclusive(pos: f64, negs: &[f64]) -> f64 {
    fine_loss_grad(pos, negs, true).0
}

/// Loss and gradient with respect to `[pos, negs...]`.
pub fn fine_loss_grad(pos: f64, negs: &[f64], exclusive: bool) -> (f64, Vec<f64>) {
    assert!(!negs.is_empty(), "fine loss needs at least one negative");
    let mut logits = Vec::with_capacity(negs.len() + 1);
    if !exclusive {
        logits.push(pos);
    }
    logits.extend_from_slice(negs);
    let lse = log_sum_exp(&logits);
    let p = softmax(&logits);
    let mut grad = vec![0.0; negs.len() + 1];
    grad[0] = -1.0;
    let offset = usize::from(exclusive);
    for (k, pk) in p.iter().enumerate() {
        grad[k + offset] += pk;
    }
    (lse - pos, grad)
}

pub fn combined_loss(coarse: f64, fine: f64, lambda: f64) -> f64 {
    coarse + lambda * fine
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Coarse,
    Fine,
}

/// One training batch, as token ids. `negatives[i]` are the fine-grained
/// negatives of caption `i`; they are not used as in-batch negatives.
#[derive(Debug, Clone, Default)]
pub struct Batch {
    pub videos: Vec<Vec<usize>>,
    pub captions: Vec<Vec<usize>>,
    pub negatives: Vec<Vec<Vec<usize>>>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.videos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }
}

/// Which terms enter the loss and on which head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub coarse_head: Head,
    /// `None` disables the fine term.
    pub fine_head: Option<Head>,
    pub lambda: f64,
    pub exclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LossParts {
    pub coarse: f64,
    pub fine: f64,
    pub total: f64,
}

/// Word and visual-attribute embedding tables, video bias and two `d × d`
/// heads in one flat buffer. Both tables are indexed by word id.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    vocab: usize,
    dim: usize,
    tau: f64,
    params: Vec<f64>,
}

struct Encoded {
    unit: Vec<f64>,
    norm: f64,
}

fn normalize(raw: Vec<f64>) -> Encoded {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    let unit = raw.iter().map(|x| x / norm).collect();
    Encoded { unit, norm }
}

/// Backward through `x / |x|`.
fn normalize_backward(e: &Encoded, g: &[f64]) -> Vec<f64> {
    let dot: f64 = e.unit.iter().zip(g).map(|(u, g)| u * g).sum();
    e.unit.iter().zip(g).map(|(u, g)| (g - u * dot) / e.norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ToyModel {
    /// Embeddings and heads drawn from `N(0, 1/d)`; bias starts at zero.
    pub fn new(vocab: usize, dim: usize, tau: f64, seed: u64) -> Self {
        assert!(dim >= 2, "dimension must be at least 2");
        assert!(vocab > 0 && tau > 0.0);
        let mut rng = seeded_rng(seed);
        let normal = Normal::new(0.0, 1.0 / (dim as f64).sqrt()).expect("valid scale");
        let mut params: Vec<f64> = (0..2 * vocab * dim + dim + 2 * dim * dim)
            .map(|_| normal.sample(&mut rng))
            .collect();
        params[2 * vocab * dim..2 * vocab * dim + dim].fill(0.0);
        Self {
            vocab,
            dim,
            tau,
            params,
        }
    }

    pub fn vocab(&self) -> usize {
        self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    fn visual_offset(&self) -> usize {
        self.vocab * self.dim
    }

    fn bias_offset(&self) -> usize {
        2 * self.vocab * self.dim
    }

    pub fn head_offset(&self, head: Head) -> usize {
        let base = self.bias_offset() + self.dim;
        match head {
            Head::Coarse => base,
            Head::Fine => base + self.dim * self.dim,
        }
    }

    /// Parameter index range of a head.
    pub fn head_range(&self, head: Head) -> std::ops::Range<usize> {
        let start = self.head_offset(head);
        start..start + self.dim * self.dim
    }

    fn mean_embedding(&self, ids: &[usize]) -> Vec<f64> {
        self.mean_rows(0, ids)
    }

    fn mean_rows(&self, table: usize, ids: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &id in ids {
            let start = table + id * self.dim;
            for (o, e) in out.iter_mut().zip(&self.params[start..start + self.dim]) {
                *o += e;
            }
        }
        let n = ids.len().max(1) as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }

    fn video_input(&self, attrs: &[usize]) -> Vec<f64> {
        let b = &self.params[self.bias_offset()..self.bias_offset() + self.dim];
        self.mean_rows(self.visual_offset(), attrs)
            .into_iter()
            .zip(b)
            .map(|(m, b)| m + b)
            .collect()
    }

    fn apply_head(&self, head: Head, u: &[f64]) -> Vec<f64> {
        let w = &self.params[self.head_range(head)];
        (0..self.dim)
            .map(|k| dot(&w[k * self.dim..(k + 1) * self.dim], u))
            .collect()
    }

    /// Unit video vector under `head`.
    pub fn encode_video(&self, attrs: &[usize], head: Head) -> Vec<f64> {
        normalize(self.apply_head(head, &self.video_input(attrs))).unit
    }

    /// Unit caption vector.
    pub fn encode_caption(&self, tokens: &[usize]) -> Vec<f64> {
        normalize(self.mean_embedding(tokens)).unit
    }

    /// Scaled cosine similarity of two encoded vectors.
    pub fn similarity(&self, video: &[f64], caption: &[f64]) -> f64 {
        dot(video, caption) / self.tau
    }

    /// Adds to the rows of `ids` in `table` as if `g` were the gradient of
    /// their mean.
    fn scatter_mean(&self, grad: &mut [f64], table: usize, ids: &[usize], g: &[f64]) {
        let n = ids.len().max(1) as f64;
        for &id in ids {
            for (k, gk) in g.iter().enumerate() {
                grad[table + id * self.dim + k] += gk / n;
            }
        }
    }

    /// Loss terms and the gradient of `total` with respect to every parameter.
    pub fn loss_and_grad(&self, batch: &Batch, obj: &Objective) -> (LossParts, Vec<f64>) {
        let b = batch.len();
        let d = self.dim;
        let mut grad = vec![0.0; self.params.len()];
        if b == 0 {
            return (LossParts::default(), grad);
        }
        let inputs: Vec<Vec<f64>> = batch.videos.iter().map(|v| self.video_input(v)).collect();
        let captions: Vec<Encoded> = batch
            .captions
            .iter()
            .map(|c| normalize(self.mean_embedding(c)))
            .collect();

        let mut heads = vec![obj.coarse_head];
        if let Some(h) = obj.fine_head {
            if h != obj.coarse_head {
                heads.push(h);
            }
        }
        let videos: Vec<(Head, Vec<Encoded>)> = heads
            .iter()
            .map(|&h| (h, inputs.iter().map(|u| normalize(self.apply_head(h, u))).collect()))
            .collect();
        let video_of = |h: Head| &videos.iter().find(|(x, _)| *x == h).unwrap().1;
        // gradient w.r.t. unit video vectors per head and unit caption vectors
        let mut g_video: Vec<Vec<Vec<f64>>> = heads.iter().map(|_| vec![vec![0.0; d]; b]).collect();
        let mut g_caption = vec![vec![0.0; d]; b];

        let coarse_videos = video_of(obj.coarse_head);
        let s: Vec<f64> = (0..b * b)
            .map(|ij| self.similarity(&coarse_videos[ij / b].unit, &captions[ij % b].unit))
            .collect();
        let (coarse, g_s) = coarse_loss_grad(&s, b);
        for i in 0..b {
            for j in 0..b {
                let g = g_s[i * b + j] / self.tau;
                if g == 0.0 {
                    continue;
                }
                for k in 0..d {
                    g_video[0][i][k] += g * captions[j].unit[k];
                    g_caption[j][k] += g * coarse_videos[i].unit[k];
                }
            }
        }

        let mut fine = 0.0;
        let mut neg_grads: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
        if let Some(fh) = obj.fine_head {
            let hi = heads.iter().position(|&h| h == fh).unwrap();
            let fv = video_of(fh);
            for i in 0..b {
                let negs = &batch.negatives[i];
                if negs.is_empty() {
                    continue;
                }
                let encoded: Vec<Encoded> = negs.iter().map(|n| normalize(self.mean_embedding(n))).collect();
                let pos = self.similarity(&fv[i].unit, &captions[i].unit);
                let neg_s: Vec<f64> = encoded.iter().map(|e| self.similarity(&fv[i].unit, &e.unit)).collect();
                let (l, g) = fine_loss_grad(pos, &neg_s, obj.exclusive);
                fine += l / b as f64;
                let scale = obj.lambda / b as f64 / self.tau;
                for k in 0..d {
                    g_video[hi][i][k] += scale * g[0] * captions[i].unit[k];
                    g_caption[i][k] += scale * g[0] * fv[i].unit[k];
                }
                for (n, e) in encoded.iter().enumerate() {
                    let gn = scale * g[n + 1];
                    let mut gu = vec![0.0; d];
                    for k in 0..d {
                        g_video[hi][i][k] += gn * e.unit[k];
                        gu[k] = gn * fv[i].unit[k];
                    }
                    neg_grads.push((negs[n].clone(), normalize_backward(e, &gu)));
                }
            }
        }

        for (ids, g) in &neg_grads {
            self.scatter_mean(&mut grad, 0, ids, g);
        }
        for (j, e) in captions.iter().enumerate() {
            let g = normalize_backward(e, &g_caption[j]);
            self.scatter_mean(&mut grad, 0, &batch.captions[j], &g);
        }
        for (hi, (h, encoded)) in videos.iter().enumerate() {
            let range = self.head_range(*h);
            let w = &self.params[range.clone()];
            for i in 0..b {
                let gz = normalize_backward(&encoded[i], &g_video[hi][i]);
                let u = &inputs[i];
                // z = W u
                let mut gu = vec![0.0; d];
                for r in 0..d {
                    for c in 0..d {
                        grad[range.start + r * d + c] += gz[r] * u[c];
                        gu[c] += w[r * d + c] * gz[r];
                    }
                }
                let bo = self.bias_offset();
                for k in 0..d {
                    grad[bo + k] += gu[k];
                }
                self.scatter_mean(&mut grad, self.visual_offset(), &batch.videos[i], &gu);
            }
        }

        let total = combined_loss(coarse, fine, if obj.fine_head.is_some() { obj.lambda } else { 0.0 });
        (LossParts { coarse, fine, total }, grad)
    }

    pub fn loss(&self, batch: &Batch, obj: &Objective) -> LossParts {
        self.loss_and_grad(batch, obj).0
    }
}

/// Largest relative error between the analytic gradient and central
/// differences of step `epsilon`, over every parameter.
pub fn grad_check(model: &ToyModel, batch: &Batch, obj: &Objective, epsilon: f64) -> f64 {
    assert!((1e-7..=1e-3).contains(&epsilon), "epsilon outside [1e-7, 1e-3]");
    let (_, analytic) = model.loss_and_grad(batch, obj);
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (p, &a) in analytic.iter().enumerate() {
        let orig = probe.params[p];
        probe.params[p] = orig + epsilon;
        let up = probe.loss(batch, obj).total;
        probe.params[p] = orig - epsilon;
        let down = probe.loss(batch, obj).total;
        probe.params[p] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(err);
    }
    worst
}
