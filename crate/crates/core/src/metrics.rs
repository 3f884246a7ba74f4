//! PoSRank and coarse retrieval metrics.
//!
//! Ties between the ground truth and other candidates are resolved by a
//! [`TieMode`]; the default mid-rank rule places the ground truth halfway
//! through its tie group, which is the expected rank under uniformly random
//! tie-breaking.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::similarity::{CandidateScores, ScoreMatrix};
use crate::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieMode {
    #[default]
    Mid,
    /// Ground truth wins every tie.
    Best,
    /// Ground truth loses every tie.
    Worst,
}

impl FromStr for TieMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mid" => Ok(TieMode::Mid),
            "best" => Ok(TieMode::Best),
            "worst" => Ok(TieMode::Worst),
            _ => Err(Error::InvalidArgument(format!("unknown tie mode `{s}`"))),
        }
    }
}

/// Rank of a target scoring `target` among `others`, where `tied_targets`
/// further candidates are also relevant and score exactly `target`.
///
/// With `t` irrelevant candidates tied with the target, the first relevant
/// item lands on average `t / (tied_targets + 2)` places into the group.
fn rank_with_ties(target: f64, others: impl Iterator<Item = f64>, tied_targets: usize, ties: TieMode) -> f64 {
    let (mut greater, mut equal) = (0usize, 0usize);
    for s in others {
        if s > target {
            greater += 1;
        } else if s == target {
            equal += 1;
        }
    }
    let tie_share = match ties {
        TieMode::Best => 0.0,
        TieMode::Worst => equal as f64,
        TieMode::Mid => equal as f64 / (tied_targets + 2) as f64,
    };
    1.0 + greater as f64 + tie_share
}

/// Rank of the ground truth (index 0) among its negatives.
pub fn rank(cs: &CandidateScores, ties: TieMode) -> f64 {
    let (truth, negatives) = cs.scores.split_first().expect("candidate set has a ground truth");
    rank_with_ties(*truth, negatives.iter().copied(), 0, ties)
}

pub fn reciprocal_rank(cs: &CandidateScores, ties: TieMode) -> f64 {
    1.0 / rank(cs, ties)
}

/// Mean reciprocal rank over the sets of one class.
pub fn posrank(sets: &[CandidateScores], pos: Pos, ties: TieMode) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = sets.iter().find(|s| s.pos != pos) {
        return Err(Error::InvalidArgument(format!(
            "set `{}` is {} but PoSRank was requested for {pos}",
            bad.caption_id, bad.pos
        )));
    }
    let total: f64 = sets.iter().map(|s| reciprocal_rank(s, ties)).sum();
    Ok(total / sets.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosEntry {
    pub value: f64,
    pub sets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoSRankReport {
    pub classes: BTreeMap<Pos, PosEntry>,
    /// Mean over the classes that had at least one set.
    pub mean: f64,
}

impl PoSRankReport {
    pub fn from_sets(sets: &[CandidateScores], ties: TieMode) -> Result<Self> {
        let mut classes = BTreeMap::new();
        for pos in Pos::PERTURBABLE {
            let of_pos: Vec<CandidateScores> = sets.iter().filter(|s| s.pos == pos).cloned().collect();
            if of_pos.is_empty() {
                continue;
            }
            let value = posrank(&of_pos, pos, ties)?;
            classes.insert(
                pos,
                PosEntry {
                    value,
                    sets: of_pos.len(),
                },
            );
        }
        if classes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mean = classes.values().map(|e| e.value).sum::<f64>() / classes.len() as f64;
        Ok(PoSRankReport { classes, mean })
    }

    pub fn get(&self, pos: Pos) -> Option<f64> {
        self.classes.get(&pos).map(|e| e.value)
    }

    /// `{"noun": x, ..., "mean": m}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (pos, entry) in &self.classes {
            map.insert(pos.to_string(), entry.value.into());
        }
        map.insert("mean".into(), self.mean.into());
        serde_json::Value::Object(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Videos query, captions are candidates.
    V2t,
    /// Captions query, videos are candidates.
    T2v,
}

/// Ground-truth (row, column) pairs of a score matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pairs: Vec<(usize, usize)>,
}

impl GroundTruth {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        GroundTruth { pairs }
    }

    /// Row `i` matches column `i`.
    pub fn diagonal(n: usize) -> Self {
        Self::new((0..n).map(|i| (i, i)))
    }

    /// Pairs each caption column with the row of its video.
    pub fn from_ids(matrix: &ScoreMatrix, video_of: impl Fn(&str) -> Option<String>) -> Self {
        let rows: std::collections::HashMap<&str, usize> = matrix
            .row_ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        Self::new(matrix.col_ids().iter().enumerate().filter_map(|(c, cap)| {
            let video = video_of(cap)?;
            rows.get(video.as_str()).map(|&r| (r, c))
        }))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Rank of the best-placed ground truth for every query.
pub fn query_ranks(matrix: &ScoreMatrix, gt: &GroundTruth, direction: Direction, ties: TieMode) -> Result<Vec<f64>> {
    let (queries, ids) = match direction {
        Direction::V2t => (matrix.rows(), matrix.row_ids()),
        Direction::T2v => (matrix.cols(), matrix.col_ids()),
    };
    let mut relevant: Vec<Vec<usize>> = vec![Vec::new(); queries];
    for &(r, c) in gt.pairs() {
        if r >= matrix.rows() || c >= matrix.cols() {
            return Err(Error::InvalidArgument(format!(
                "ground truth ({r}, {c}) outside matrix"
            )));
        }
        match direction {
            Direction::V2t => relevant[r].push(c),
            Direction::T2v => relevant[c].push(r),
        }
    }
    (0..queries)
        .map(|q| {
            let targets = &relevant[q];
            if targets.is_empty() {
                return Err(Error::MissingGroundTruth { query: ids[q].clone() });
            }
            let scores: Vec<f64> = match direction {
                Direction::V2t => matrix.row(q).to_vec(),
                Direction::T2v => matrix.column(q),
            };
            let best = targets.iter().map(|&i| scores[i]).fold(f64::NEG_INFINITY, f64::max);
            let tied_targets = targets.iter().filter(|&&i| scores[i] == best).count() - 1;
            let others = scores
                .iter()
                .enumerate()
                .filter(|(i, _)| !targets.contains(i))
                .map(|(_, s)| *s);
            Ok(rank_with_ties(best, others, tied_targets, ties))
        })
        .collect()
}

/// Percentage of queries whose ground truth ranks within the top `k`.
pub fn recall_at_k(
    matrix: &ScoreMatrix,
    gt: &GroundTruth,
    k: usize,
    direction: Direction,
    ties: TieMode,
) -> Result<f64> {
    let ranks = query_ranks(matrix, gt, direction, ties)?;
    Ok(recall_from_ranks(&ranks, k))
}

fn recall_from_ranks(ranks: &[f64], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    let hits = ranks.iter().filter(|&&r| r <= k as f64).count();
    100.0 * hits as f64 / ranks.len() as f64
}

pub fn average_rank(matrix: &ScoreMatrix, gt: &GroundTruth, direction: Direction, ties: TieMode) -> Result<f64> {
    let ranks = query_ranks(matrix, gt, direction, ties)?;
    if ranks.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(ranks.iter().sum::<f64>() / ranks.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoarseReport {
    pub direction: Direction,
    pub r1: f64,
    pub r5: f64,
    pub r10: f64,
    /// Mean of R@1, R@5 and R@10.
    pub mean_recall: f64,
    pub avg_rank: f64,
}

impl CoarseReport {
    pub fn compute(matrix: &ScoreMatrix, gt: &GroundTruth, direction: Direction, ties: TieMode) -> Result<Self> {
        let ranks = query_ranks(matrix, gt, direction, ties)?;
        if ranks.is_empty() {
            return Err(Error::EmptyInput);
        }
        let (r1, r5, r10) = (
            recall_from_ranks(&ranks, 1),
            recall_from_ranks(&ranks, 5),
            recall_from_ranks(&ranks, 10),
        );
        Ok(CoarseReport {
            direction,
            r1,
            r5,
            r10,
            mean_recall: (r1 + r5 + r10) / 3.0,
            avg_rank: ranks.iter().sum::<f64>() / ranks.len() as f64,
        })
    }
}

/// Expected PoSRank of a scorer that ranks the ground truth uniformly at
/// random among `k + 1` candidates: `H_{k+1} / (k + 1)`.
pub fn random_baseline(k: usize) -> f64 {
    let n = k + 1;
    (1..=n).map(|r| 1.0 / r as f64).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(scores: &[f64]) -> CandidateScores {
        CandidateScores {
            caption_id: "c".into(),
            pos: Pos::Noun,
            scores: scores.to_vec(),
        }
    }

    #[test]
    fn reciprocal_rank_examples() {
        assert_eq!(reciprocal_rank(&cs(&[0.9, 0.1, 0.2]), TieMode::Mid), 1.0);
        assert_eq!(reciprocal_rank(&cs(&[0.5, 0.9, 0.2]), TieMode::Mid), 0.5);
        assert_eq!(reciprocal_rank(&cs(&[0.5, 0.5, 0.5]), TieMode::Mid), 0.5);
        assert_eq!(reciprocal_rank(&cs(&[0.5, 0.5, 0.5]), TieMode::Best), 1.0);
        assert_eq!(reciprocal_rank(&cs(&[0.5, 0.5, 0.5]), TieMode::Worst), 1.0 / 3.0);
    }

    #[test]
    fn posrank_checks_input() {
        assert!(matches!(posrank(&[], Pos::Noun, TieMode::Mid), Err(Error::EmptyInput)));
        assert!(posrank(&[cs(&[1.0, 0.0])], Pos::Verb, TieMode::Mid).is_err());
        let v = posrank(&[cs(&[1.0, 0.0]), cs(&[0.0, 1.0])], Pos::Noun, TieMode::Mid).unwrap();
        assert_eq!(v, 0.75);
    }

    #[test]
    fn adversarial_scorer_floor() {
        let sets: Vec<_> = (0..10)
            .map(|_| cs(&[0.0; 1].iter().chain([1.0; 20].iter()).copied().collect::<Vec<_>>()))
            .collect();
        assert!((posrank(&sets, Pos::Noun, TieMode::Mid).unwrap() - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn report_mean_over_present_classes() {
        let mut a = cs(&[1.0, 0.0]);
        a.pos = Pos::Adj;
        let b = cs(&[0.0, 1.0]);
        let r = PoSRankReport::from_sets(&[a, b], TieMode::Mid).unwrap();
        assert_eq!(r.classes.len(), 2);
        assert_eq!(r.mean, 0.75);
        assert_eq!(r.to_json()["adj"], 1.0);
    }

    fn matrix(values: &[&[f64]]) -> ScoreMatrix {
        let rows = values.len();
        let cols = values[0].len();
        ScoreMatrix::new(
            (0..rows).map(|i| format!("v{i}")).collect(),
            (0..cols).map(|i| format!("c{i}")).collect(),
            values.iter().flat_map(|r| r.iter().copied()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_dominant() {
        let m = matrix(&[&[0.9, 0.1, 0.2], &[0.1, 0.8, 0.3], &[0.0, 0.2, 0.7]]);
        let gt = GroundTruth::diagonal(3);
        for d in [Direction::V2t, Direction::T2v] {
            assert_eq!(recall_at_k(&m, &gt, 1, d, TieMode::Mid).unwrap(), 100.0);
            assert_eq!(average_rank(&m, &gt, d, TieMode::Mid).unwrap(), 1.0);
        }
        assert_eq!(recall_at_k(&m, &gt, 10, Direction::V2t, TieMode::Mid).unwrap(), 100.0);
    }

    #[test]
    fn ground_truth_at_rank_two() {
        let m = matrix(&[&[0.5, 0.9, 0.1], &[0.1, 0.5, 0.9], &[0.9, 0.1, 0.5]]);
        let gt = GroundTruth::diagonal(3);
        let r = CoarseReport::compute(&m, &gt, Direction::V2t, TieMode::Mid).unwrap();
        assert_eq!((r.r1, r.r5, r.r10), (0.0, 100.0, 100.0));
        assert_eq!(r.avg_rank, 2.0);
    }

    #[test]
    fn reversed_and_flat_scores() {
        let m = matrix(&[&[0.1, 0.5, 0.9], &[0.9, 0.1, 0.5], &[0.5, 0.9, 0.1]]);
        let gt = GroundTruth::diagonal(3);
        assert_eq!(average_rank(&m, &gt, Direction::V2t, TieMode::Mid).unwrap(), 3.0);
        let flat = matrix(&[&[0.3; 4], &[0.3; 4], &[0.3; 4], &[0.3; 4]]);
        assert_eq!(
            average_rank(&flat, &GroundTruth::diagonal(4), Direction::T2v, TieMode::Mid).unwrap(),
            2.5
        );
    }

    #[test]
    fn any_ground_truth_counts_for_v2t() {
        // video 0 has captions 0 and 1; caption 1 is top-ranked
        let m = matrix(&[&[0.1, 0.9, 0.5], &[0.2, 0.3, 0.8]]);
        let gt = GroundTruth::new([(0, 0), (0, 1), (1, 2)]);
        assert_eq!(recall_at_k(&m, &gt, 1, Direction::V2t, TieMode::Mid).unwrap(), 100.0);
    }

    #[test]
    fn missing_ground_truth() {
        let m = matrix(&[&[0.1, 0.9], &[0.2, 0.3]]);
        let gt = GroundTruth::new([(0, 0)]);
        assert!(matches!(
            recall_at_k(&m, &gt, 1, Direction::V2t, TieMode::Mid),
            Err(Error::MissingGroundTruth { .. })
        ));
    }

    #[test]
    fn random_baseline_for_twenty_negatives() {
        assert!((random_baseline(20) - 0.173_588_509_750_606).abs() < 1e-12);
        assert_eq!(random_baseline(0), 1.0);
    }
}
