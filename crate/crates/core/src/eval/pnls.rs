//! Partial normalized Levenshtein similarity.
//!
//! The ground truth is aligned against the best-matching contiguous substring
//! of the prediction (semi-global alignment: leading and trailing prediction
//! characters are free). With `d` the edit distance of that alignment and
//! `len` the matched substring length, the score is `1 - d / max(|gt|, len)`.
//! Among substrings reaching the minimal distance the longest wins, then the
//! earliest.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("PNLS is undefined for an empty ground truth")]
    EmptyGroundTruth,
}

/// Best partial alignment of a ground truth inside a prediction, in chars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    pub distance: usize,
    pub start: usize,
    pub len: usize,
}

/// Incremental partial aligner: fix the ground truth with [`Aligner::reset`],
/// then [`push`](Aligner::push) and [`pop`](Aligner::pop) prediction
/// characters. Each push costs `O(|gt|)`.
///
/// DP cells pack `(cost, start)` as `cost << 32 | start`, so the integer
/// minimum is the lexicographic one: lowest cost, then earliest start (the
/// longest substring for a given end).
#[derive(Debug, Default, Clone)]
pub struct Aligner {
    gt: Vec<char>,
    /// One column of `|gt| + 1` cells per prediction prefix, the empty one first.
    cols: Vec<u64>,
    /// Best alignment over every prefix length pushed so far.
    best: Vec<Alignment>,
}

const COST: u64 = 1 << 32;

/// Orders alignments by distance, then longer match, then earlier start.
fn better(a: Alignment, b: Alignment) -> bool {
    (a.distance, std::cmp::Reverse(a.len), a.start) < (b.distance, std::cmp::Reverse(b.len), b.start)
}

/// Fills the column for prediction prefix length `j` ending in `c`.
fn advance(gt: &[char], prev: &[u64], next: &mut [u64], j: usize, c: char) {
    next[0] = j as u64;
    for (i, &g) in gt.iter().enumerate() {
        let sub = prev[i] + COST * u64::from(g != c);
        let skip_pred = prev[i + 1] + COST;
        let skip_gt = next[i] + COST;
        next[i + 1] = sub.min(skip_pred).min(skip_gt);
    }
}

fn end_alignment(cell: u64, end: usize) -> Alignment {
    let start = (cell % COST) as usize;
    Alignment {
        distance: (cell / COST) as usize,
        start,
        len: end - start,
    }
}

impl Aligner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts over with `gt` and an empty prediction.
    pub fn reset(&mut self, gt: &[char]) {
        self.gt.clear();
        self.gt.extend_from_slice(gt);
        self.cols.clear();
        self.cols.extend((0..=gt.len() as u64).map(|i| i * COST));
        self.best.clear();
        self.best.push(end_alignment(self.cols[gt.len()], 0));
    }

    pub fn push(&mut self, c: char) {
        let rows = self.gt.len() + 1;
        let j = self.best.len();
        assert!(j < u32::MAX as usize, "prediction too long to align");
        self.cols.resize(self.cols.len() + rows, 0);
        let (done, next) = self.cols.split_at_mut(j * rows);
        advance(&self.gt, &done[(j - 1) * rows..], next, j, c);
        let cand = end_alignment(next[rows - 1], j);
        let prev = self.best[j - 1];
        self.best.push(if better(cand, prev) { cand } else { prev });
    }

    pub fn pop(&mut self) {
        assert!(self.best.len() > 1, "pop on an empty prediction");
        self.best.pop();
        self.cols.truncate(self.cols.len() - self.gt.len() - 1);
    }

    /// Best alignment of the ground truth inside the current prediction.
    pub fn best(&self) -> Alignment {
        *self.best.last().expect("reset before use")
    }

    /// One-shot alignment in `O(|gt|·|pred|)` time and `O(|gt|)` space.
    pub fn align(&mut self, gt: &[char], pred: &[char]) -> Alignment {
        let rows = gt.len() + 1;
        self.cols.clear();
        self.cols.extend((0..rows as u64).map(|i| i * COST));
        self.cols.resize(2 * rows, 0);
        let mut best = end_alignment(self.cols[rows - 1], 0);
        for (j, &c) in pred.iter().enumerate() {
            let (prev, next) = self.cols.split_at_mut(rows);
            advance(gt, prev, next, j + 1, c);
            let cand = end_alignment(next[rows - 1], j + 1);
            if better(cand, best) {
                best = cand;
            }
            prev.copy_from_slice(next);
        }
        // Leave a consistent empty state behind for push/pop users.
        self.gt.clear();
        self.best.clear();
        self.cols.clear();
        best
    }
}

pub fn partial_alignment(gt: &[char], pred: &[char]) -> Alignment {
    Aligner::new().align(gt, pred)
}

fn score(gt_len: usize, a: Alignment) -> f64 {
    1.0 - a.distance as f64 / gt_len.max(a.len) as f64
}

/// PNLS on raw strings, no normalization.
pub fn pnls_raw(gt: &str, pred: &str) -> Result<f64, MetricError> {
    let gt: Vec<char> = gt.chars().collect();
    if gt.is_empty() {
        return Err(MetricError::EmptyGroundTruth);
    }
    let pred: Vec<char> = pred.chars().collect();
    Ok(score(gt.len(), partial_alignment(&gt, &pred)))
}

/// PNLS after trimming and lowercasing both strings.
pub fn pnls(gt: &str, pred: &str) -> Result<f64, MetricError> {
    pnls_raw(&gt.trim().to_lowercase(), &pred.trim().to_lowercase())
}
