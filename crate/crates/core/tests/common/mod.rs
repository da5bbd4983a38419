//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use scoresynth::engrave::Toolchain;
use scoresynth::eval::pnls::{Aligner, Alignment};
use scoresynth::ir::NoteEvent;
use scoresynth::theory::{NoteValue, Pitch};

/// Textbook Levenshtein distance, full matrix.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// `(distance, -len, start)` ordering: lowest distance, longest, earliest.
fn better(a: Alignment, b: Alignment) -> bool {
    (a.distance, std::cmp::Reverse(a.len), a.start) < (b.distance, std::cmp::Reverse(b.len), b.start)
}

/// Minimum over every contiguous substring of `pred`, by enumeration.
pub fn brute_force_alignment(gt: &[char], pred: &[char]) -> Alignment {
    let mut best = Alignment {
        distance: gt.len(),
        start: 0,
        len: 0,
    };
    for start in 0..=pred.len() {
        for end in start..=pred.len() {
            let cand = Alignment {
                distance: levenshtein(gt, &pred[start..end]),
                start,
                len: end - start,
            };
            if better(cand, best) {
                best = cand;
            }
        }
    }
    best
}

pub fn brute_force_pnls(gt: &str, pred: &str) -> f64 {
    let gt: Vec<char> = gt.chars().collect();
    let pred: Vec<char> = pred.chars().collect();
    let a = brute_force_alignment(&gt, &pred);
    1.0 - a.distance as f64 / gt.len().max(a.len) as f64
}

const ALPHABET: [char; 3] = ['a', 'b', 'c'];

/// Strings over `{a,b,c}` of length `1..=max_len` up to relabeling of the
/// alphabet: letters appear in first-occurrence order `a`, `b`, `c`.
pub fn canonical_strings(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
    while let Some(s) = stack.pop() {
        if !s.is_empty() {
            out.push(s.clone());
        }
        if s.len() == max_len {
            continue;
        }
        let next_new = s.iter().max().map_or(0, |&m| m + 1).min(2);
        for c in 0..=next_new {
            let mut t = s.clone();
            t.push(c);
            stack.push(t);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn relabelings() -> Vec<[u8; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

#[derive(Debug, Default)]
pub struct ExhaustiveOutcome {
    pub pairs: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
}

/// Ids of all strings over the alphabet of length `0..=max_len`: length
/// offset plus base-3 value, so a string's parent (drop the last char)
/// always has a smaller id.
struct StringIds {
    offsets: Vec<usize>,
}

impl StringIds {
    fn new(max_len: usize) -> Self {
        let mut offsets = vec![0usize; max_len + 2];
        for len in 0..=max_len {
            offsets[len + 1] = offsets[len] + 3usize.pow(len as u32);
        }
        StringIds { offsets }
    }

    fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn id(&self, len: usize, value: usize) -> usize {
        self.offsets[len] + value
    }
}

/// `lev(gt, s)` for every string `s`, one row per ground-truth prefix.
/// Row `r` follows from row `r - 1` by the textbook recurrence with `s`
/// extended one char at a time.
fn next_row(ids: &StringIds, prev: &[u8], g: u8, r: usize) -> Vec<u8> {
    let mut row = vec![0u8; ids.total()];
    row[0] = r as u8;
    for len in 1..ids.offsets.len() - 1 {
        for v in 0..3usize.pow(len as u32) {
            let (id, parent) = (ids.id(len, v), ids.id(len - 1, v / 3));
            let c = (v % 3) as u8;
            let sub = prev[parent] + u8::from(g != c);
            row[id] = sub.min(prev[id] + 1).min(row[parent] + 1);
        }
    }
    row
}

struct Walk<'a> {
    gt: &'a [char],
    ids: &'a StringIds,
    dist: &'a [u8],
    aligner: Aligner,
    depth: usize,
    max_pred: usize,
    outcome: &'a mut ExhaustiveOutcome,
}

impl Walk<'_> {
    /// `suffixes[i]` is the base-3 value of `pred[i..]` for the current
    /// prediction of length `depth`; `best` is the oracle optimum over all
    /// its substrings.
    fn visit(&mut self, suffixes: &[usize], best: Alignment) {
        self.outcome.pairs += 1;
        let got = self.aligner.best();
        if got != best {
            self.outcome.mismatches += 1;
            if self.outcome.first_mismatch.is_none() {
                let pred: String = (0..self.depth)
                    .map(|i| {
                        // Recover pred from the value of its full suffix.
                        let v = suffixes[0] / 3usize.pow((self.depth - 1 - i) as u32) % 3;
                        ALPHABET[v]
                    })
                    .collect();
                self.outcome.first_mismatch = Some(format!(
                    "gt={:?} pred={pred:?}: dp {got:?}, oracle {best:?}",
                    self.gt.iter().collect::<String>()
                ));
            }
        }
        if self.depth == self.max_pred {
            return;
        }
        let j = self.depth;
        let mut next = [0usize; 16];
        for (c, &letter) in ALPHABET.iter().enumerate() {
            // Same order as `better`, packed: distance, then 255 - len, then start.
            let key = |d: usize, len: usize, start: usize| (d << 16) | ((255 - len) << 8) | start;
            let mut child = key(best.distance, best.len, best.start);
            for (i, &v) in suffixes.iter().enumerate() {
                let value = v * 3 + c;
                next[i] = value;
                let len = j + 1 - i;
                child = child.min(key(self.dist[self.ids.id(len, value)] as usize, len, i));
            }
            let len = 255 - ((child >> 8) & 0xff);
            let child_best = Alignment {
                distance: child >> 16,
                start: child & 0xff,
                len,
            };
            next[j + 1] = 0;
            self.aligner.push(letter);
            self.depth += 1;
            self.visit(&next[..j + 2], child_best);
            self.depth -= 1;
            self.aligner.pop();
        }
    }
}

fn walk_ground_truths(
    ids: &StringIds,
    gt: &mut Vec<u8>,
    row: &[u8],
    max_gt: usize,
    max_pred: usize,
    outcome: &mut ExhaustiveOutcome,
) {
    if !gt.is_empty() {
        let gt_chars: Vec<char> = gt.iter().map(|&c| ALPHABET[c as usize]).collect();
        let mut aligner = Aligner::new();
        aligner.reset(&gt_chars);
        let empty = Alignment {
            distance: gt.len(),
            start: 0,
            len: 0,
        };
        Walk {
            gt: &gt_chars,
            ids,
            dist: row,
            aligner,
            depth: 0,
            max_pred,
            outcome: &mut *outcome,
        }
        .visit(&[0], empty);
    }
    if gt.len() == max_gt {
        return;
    }
    let next_new = gt.iter().max().map_or(0, |&m| m + 1).min(2);
    for g in 0..=next_new {
        let child = next_row(ids, row, g, gt.len() + 1);
        gt.push(g);
        walk_ground_truths(ids, gt, &child, max_gt, max_pred, outcome);
        gt.pop();
    }
}

/// Compares the incremental DP against substring enumeration for every
/// ground truth of length `1..=max_gt` (up to alphabet relabeling, which the
/// DP cannot observe since it only tests characters for equality) and every
/// prediction of length `0..=max_pred`.
pub fn exhaustive_pnls_check(max_gt: usize, max_pred: usize) -> ExhaustiveOutcome {
    assert!(max_pred < 16 && max_gt < 200);
    let ids = StringIds::new(max_pred);
    let mut row0 = vec![0u8; ids.total()];
    for len in 0..=max_pred {
        for v in 0..3usize.pow(len as u32) {
            row0[ids.id(len, v)] = len as u8;
        }
    }
    let mut outcome = ExhaustiveOutcome::default();
    walk_ground_truths(&ids, &mut Vec::new(), &row0, max_gt, max_pred, &mut outcome);
    outcome
}

pub fn fake_toolchain_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fake-toolchain")
}

pub fn fake_toolchain() -> Toolchain {
    let d = fake_toolchain_dir();
    Toolchain::new(d.join("pdftex"), d.join("musixflx"), d.join("pdftoppm"))
}

pub fn all_pitches() -> Vec<Pitch> {
    let mut out = Vec::new();
    for letter in ['C', 'D', 'E', 'F', 'G', 'A', 'B'] {
        for acc in ["b", "", "#"] {
            for octave in 1..=6 {
                if let Ok(p) = format!("{letter}{acc}{octave}").parse::<Pitch>() {
                    out.push(p);
                }
            }
        }
    }
    out
}

pub fn all_values() -> Vec<NoteValue> {
    [1u8, 2, 4, 8, 16]
        .iter()
        .flat_map(|&b| (0..=2).filter_map(move |d| NoteValue::new(b, d).ok()))
        .collect()
}

/// Valid note sequences: contiguous onsets, ties only onto an equal pitch,
/// never on the last note.
pub fn note_sequence(max_len: usize) -> impl Strategy<Value = Vec<NoteEvent>> {
    let pitches = all_pitches();
    let values = all_values();
    prop::collection::vec(
        (prop::sample::select(pitches), prop::sample::select(values), any::<bool>()),
        1..=max_len,
    )
    .prop_map(|raw| {
        let mut notes: Vec<NoteEvent> = Vec::with_capacity(raw.len());
        let mut onset = 0;
        for (i, &(pitch, value, tie)) in raw.iter().enumerate() {
            // A tied note forces its successor onto the same pitch.
            let pitch = match notes.last() {
                Some(prev) if prev.tie_to_next => prev.pitch,
                _ => pitch,
            };
            notes.push(NoteEvent {
                pitch,
                value,
                tie_to_next: tie && i + 1 < raw.len(),
                beam_group: None,
                onset_bin: onset,
            });
            onset += value.bins();
        }
        notes
    })
}
