//! Seeded sampling of sheet configurations and bar contents.
//!
//! Every sheet owns a 64-bit seed derived from the corpus seed and its index.
//! Metadata, notes and questions each read a separate ChaCha stream of that
//! seed, so a sheet can be regenerated on its own and in any order.

use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{Bar, NoteEvent, ScoreDoc};
use crate::theory::{Chord, Clef, NoteValue, Pitch, Scale, TheoryError, TimeSignature};

pub const TEMPO_RANGE: RangeInclusive<u32> = 50..=140;
pub const BAR_COUNT_RANGE: RangeInclusive<u32> = 10..=20;
pub const SPACING_RANGE: RangeInclusive<u8> = 1..=4;

const META_STREAM: u64 = 0;
const SCORE_STREAM: u64 = 1;
pub(crate) const QA_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("cannot split {bins} bins into {n} segments")]
    InfeasiblePartition { bins: u32, n: u32 },
    #[error("malformed bar: {0}")]
    MalformedBar(String),
    #[error("no realization of chord {chord} inside the {clef} clef range")]
    EmptyCandidates { chord: String, clef: Clef },
    #[error("invalid override: {0}")]
    Override(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClefConfig {
    Treble,
    Bass,
    Grand,
}

impl ClefConfig {
    pub const ALL: [ClefConfig; 3] = [ClefConfig::Treble, ClefConfig::Bass, ClefConfig::Grand];

    /// Active clefs, upper staff first.
    pub fn clefs(self) -> &'static [Clef] {
        match self {
            ClefConfig::Treble => &[Clef::Treble],
            ClefConfig::Bass => &[Clef::Bass],
            ClefConfig::Grand => &[Clef::Treble, Clef::Bass],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoteSize {
    Regular,
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMode {
    BeatGrouped,
    Separated,
}

/// Repeat section, 1-based inclusive bar indices with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepeatSpan {
    pub start: u32,
    pub end: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetMeta {
    pub title: String,
    pub composer: String,
    pub tempo_bpm: u32,
    pub time_signature: TimeSignature,
    pub scale: Scale,
    pub clef_config: ClefConfig,
    pub bar_count: u32,
    pub repeat_span: Option<RepeatSpan>,
    pub show_chord_labels: bool,
    pub show_bar_indices: bool,
    /// 1 is the most compact setting, 4 the loosest.
    pub spacing: u8,
    pub note_size: NoteSize,
    pub seed: u64,
}

/// Fixed choices for controlled sampling. Loaded from a TOML key-value file:
///
/// ```toml
/// scale = "D major"
/// clef_config = "grand"
/// time_signature = "3/4"
/// bar_count = 12
/// spacing = 2
/// note_size = "small"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub scale: Option<Scale>,
    pub clef_config: Option<ClefConfig>,
    pub time_signature: Option<TimeSignature>,
    pub bar_count: Option<u32>,
    pub spacing: Option<u8>,
    pub note_size: Option<NoteSize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self, SampleError> {
        let o: Overrides = toml::from_str(text).map_err(|e| SampleError::Override(e.to_string()))?;
        o.check()?;
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self, SampleError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SampleError::Override(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn check(&self) -> Result<(), SampleError> {
        if let Some(n) = self.bar_count {
            if !BAR_COUNT_RANGE.contains(&n) {
                return Err(SampleError::Override(format!("bar_count {n} outside 10..=20")));
            }
        }
        if let Some(s) = self.spacing {
            if !SPACING_RANGE.contains(&s) {
                return Err(SampleError::Override(format!("spacing {s} outside 1..=4")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub sheet_count: usize,
    pub overrides: Overrides,
}

impl GenConfig {
    pub fn new(seed: u64, sheet_count: usize) -> Self {
        GenConfig {
            seed,
            sheet_count,
            overrides: Overrides::default(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sheet seed for sheet `index` of a corpus.
pub fn derive_sheet_seed(corpus_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(corpus_seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn sheet_id(index: usize, sheet_seed: u64) -> String {
    format!("{index:05}-{:08x}", sheet_seed >> 32)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Metadata stream of a sheet seed.
pub fn sheet_rng(seed: u64) -> ChaCha8Rng {
    stream(seed, META_STREAM)
}

pub(crate) fn qa_rng(seed: u64) -> ChaCha8Rng {
    stream(seed, QA_STREAM)
}

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwz";
const VOWELS: &[u8] = b"aeiou";

fn random_word<R: Rng + ?Sized>(rng: &mut R) -> String {
    let len = rng.random_range(3..=8);
    let mut consonant = rng.random_bool(0.7);
    let mut word = String::with_capacity(len);
    for _ in 0..len {
        let pool = if consonant { CONSONANTS } else { VOWELS };
        word.push(pool[rng.random_range(0..pool.len())] as char);
        consonant = !consonant;
    }
    let mut chars = word.chars();
    let first = chars.next().unwrap().to_ascii_uppercase();
    std::iter::once(first).chain(chars).collect()
}

fn random_phrase<R: Rng + ?Sized>(rng: &mut R, words: RangeInclusive<usize>) -> String {
    let n = rng.random_range(words);
    (0..n).map(|_| random_word(rng)).collect::<Vec<_>>().join(" ")
}

pub fn sample_sheet_meta<R: Rng + ?Sized>(
    rng: &mut R,
    overrides: &Overrides,
    seed: u64,
) -> Result<SheetMeta, SampleError> {
    overrides.check()?;
    let title = random_phrase(rng, 1..=10);
    let composer = random_phrase(rng, 1..=3);
    let tempo_bpm = rng.random_range(TEMPO_RANGE);
    let time_signature = match overrides.time_signature {
        Some(t) => t,
        None => TimeSignature::new(rng.random_range(2..=4))?,
    };
    let scale = match overrides.scale {
        Some(s) => s,
        None => {
            let all = Scale::all();
            all[rng.random_range(0..all.len())]
        }
    };
    let clef_config = match overrides.clef_config {
        Some(c) => c,
        None => ClefConfig::ALL[rng.random_range(0..3)],
    };
    let bar_count = match overrides.bar_count {
        Some(n) => n,
        None => rng.random_range(BAR_COUNT_RANGE),
    };
    let picks = sample(rng, bar_count as usize, 2);
    let (a, b) = (picks.index(0) as u32 + 1, picks.index(1) as u32 + 1);
    let repeat_span = Some(RepeatSpan {
        start: a.min(b),
        end: a.max(b),
    });
    let show_chord_labels = rng.random_bool(0.5);
    let show_bar_indices = rng.random_bool(0.5);
    let spacing = match overrides.spacing {
        Some(s) => s,
        None => rng.random_range(SPACING_RANGE),
    };
    let note_size = match overrides.note_size {
        Some(s) => s,
        None if rng.random_bool(0.5) => NoteSize::Small,
        None => NoteSize::Regular,
    };
    Ok(SheetMeta {
        title,
        composer,
        tempo_bpm,
        time_signature,
        scale,
        clef_config,
        bar_count,
        repeat_span,
        show_chord_labels,
        show_bar_indices,
        spacing,
        note_size,
        seed,
    })
}

/// Number of sampled notes for one bar, uniform on `1..=3·beats`.
pub fn sample_note_count<R: Rng + ?Sized>(rng: &mut R, time_signature: TimeSignature) -> u32 {
    rng.random_range(1..=3 * time_signature.numerator() as u32)
}

/// Splits a bar into `n` positive segment lengths, uniform over compositions.
pub fn sample_bar_rhythm<R: Rng + ?Sized>(
    rng: &mut R,
    time_signature: TimeSignature,
    n: u32,
) -> Result<Vec<u32>, SampleError> {
    let bins = time_signature.bins_per_bar();
    if n == 0 || n > bins {
        return Err(SampleError::InfeasiblePartition { bins, n });
    }
    let mut cuts: Vec<u32> = sample(rng, bins as usize - 1, n as usize - 1)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(bins);
    let mut last = 0;
    Ok(cuts
        .into_iter()
        .map(|c| {
            let len = c - last;
            last = c;
            len
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TiedValue {
    pub value: NoteValue,
    pub tie_to_next: bool,
}

/// Writes a duration as one note, or greedily as tied pieces (largest
/// representable value first) when no single value spans `bins`.
pub fn split_duration(bins: u32) -> Result<Vec<TiedValue>, SampleError> {
    NoteValue::representable(bins)?;
    let mut pieces = Vec::new();
    let mut left = bins;
    while left > 0 {
        let (len, value) = (1..=left)
            .rev()
            .find_map(|b| NoteValue::representable(b).ok().flatten().map(|v| (b, v)))
            .expect("a sixteenth always fits");
        pieces.push(TiedValue {
            value,
            tie_to_next: true,
        });
        left -= len;
    }
    pieces.last_mut().unwrap().tie_to_next = false;
    Ok(pieces)
}

fn check_bar(notes: &[NoteEvent], time_signature: TimeSignature) -> Result<(), SampleError> {
    let mut cursor = 0;
    for (i, n) in notes.iter().enumerate() {
        if n.onset_bin != cursor {
            return Err(SampleError::MalformedBar(format!(
                "note {i} starts at bin {} instead of {cursor}",
                n.onset_bin
            )));
        }
        cursor += n.bins();
    }
    if cursor != time_signature.bins_per_bar() {
        return Err(SampleError::MalformedBar(format!(
            "durations sum to {cursor} bins, bar holds {}",
            time_signature.bins_per_bar()
        )));
    }
    Ok(())
}

/// Beat grouping: splits beat-crossing notes into tied pieces at each beat
/// boundary and beams runs of short notes inside a beat. Separated mode
/// returns the notes untouched.
pub fn apply_grouping(
    notes: Vec<NoteEvent>,
    mode: GroupingMode,
    time_signature: TimeSignature,
) -> Result<Vec<NoteEvent>, SampleError> {
    check_bar(&notes, time_signature)?;
    if mode == GroupingMode::Separated {
        return Ok(notes);
    }
    let mut out = Vec::with_capacity(notes.len());
    for note in notes {
        let end = note.end_bin();
        if note.onset_bin / 4 == (end - 1) / 4 {
            out.push(NoteEvent {
                beam_group: None,
                ..note
            });
            continue;
        }
        let mut start = note.onset_bin;
        while start < end {
            let stop = ((start / 4 + 1) * 4).min(end);
            for piece in split_duration(stop - start)? {
                out.push(NoteEvent {
                    pitch: note.pitch,
                    value: piece.value,
                    tie_to_next: true,
                    beam_group: None,
                    onset_bin: start,
                });
                start += piece.value.bins();
            }
        }
        out.last_mut().unwrap().tie_to_next = note.tie_to_next;
    }
    let mut group = 0;
    let mut i = 0;
    while i < out.len() {
        let beat = out[i].onset_bin / 4;
        let j = i + out[i..].iter().take_while(|n| n.onset_bin / 4 == beat).count();
        if j - i >= 2 && out[i..j].iter().all(|n| n.value.is_beamable()) {
            for n in &mut out[i..j] {
                n.beam_group = Some(group);
            }
            group += 1;
        }
        i = j;
    }
    Ok(out)
}

/// Tonic triad for bar 1, a uniformly drawn diatonic triad afterwards.
pub fn sample_bar_chord<R: Rng + ?Sized>(rng: &mut R, scale: Scale, bar_index: u32) -> Chord {
    let degree = if bar_index <= 1 {
        1
    } else {
        rng.random_range(1..=7)
    };
    Chord::new(scale, degree).expect("degree within 1..=7")
}

/// Every octave realization of every chord tone inside the clef range.
pub fn chord_candidates(chord: Chord, clef: Clef) -> Vec<Pitch> {
    let mut out: Vec<Pitch> = chord
        .tones()
        .iter()
        .flat_map(|&t| clef.realizations(t))
        .collect();
    out.sort_by_key(|p| p.position());
    out
}

pub fn sample_bar_pitches<R: Rng + ?Sized>(
    rng: &mut R,
    chord: Chord,
    clef: Clef,
    n: usize,
) -> Result<Vec<Pitch>, SampleError> {
    let candidates = chord_candidates(chord, clef);
    if candidates.is_empty() {
        return Err(SampleError::EmptyCandidates {
            chord: chord.label(),
            clef,
        });
    }
    Ok((0..n)
        .map(|_| candidates[rng.random_range(0..candidates.len())])
        .collect())
}

fn sample_voice<R: Rng + ?Sized>(
    rng: &mut R,
    meta: &SheetMeta,
    chord: Chord,
    clef: Clef,
    mode: GroupingMode,
) -> Result<Vec<NoteEvent>, SampleError> {
    let ts = meta.time_signature;
    let n = sample_note_count(rng, ts);
    let segments = sample_bar_rhythm(rng, ts, n)?;
    let pitches = sample_bar_pitches(rng, chord, clef, n as usize)?;
    let mut notes = Vec::new();
    let mut onset = 0;
    for (len, pitch) in segments.into_iter().zip(pitches) {
        for piece in split_duration(len)? {
            notes.push(NoteEvent {
                pitch,
                value: piece.value,
                tie_to_next: piece.tie_to_next,
                beam_group: None,
                onset_bin: onset,
            });
            onset += piece.value.bins();
        }
    }
    apply_grouping(notes, mode, ts)
}

/// Builds the full score for `meta`. Pure in `meta` (including its seed).
pub fn generate_score(meta: &SheetMeta, sheet_id: &str) -> Result<ScoreDoc, SampleError> {
    let mut rng = stream(meta.seed, SCORE_STREAM);
    let mut bars = Vec::with_capacity(meta.bar_count as usize);
    for index in 1..=meta.bar_count {
        let chord = sample_bar_chord(&mut rng, meta.scale, index);
        let grouping_mode = if rng.random_bool(0.5) {
            GroupingMode::BeatGrouped
        } else {
            GroupingMode::Separated
        };
        let mut voices = std::collections::BTreeMap::new();
        for &clef in meta.clef_config.clefs() {
            voices.insert(clef, sample_voice(&mut rng, meta, chord, clef, grouping_mode)?);
        }
        bars.push(Bar {
            index,
            chord,
            grouping_mode,
            voices,
        });
    }
    Ok(ScoreDoc {
        sheet_id: sheet_id.to_string(),
        meta: meta.clone(),
        bars,
    })
}

/// Generates sheet `index` of a corpus.
pub fn generate_sheet(config: &GenConfig, index: usize) -> Result<ScoreDoc, SampleError> {
    let seed = derive_sheet_seed(config.seed, index as u64);
    let meta = sample_sheet_meta(&mut sheet_rng(seed), &config.overrides, seed)?;
    generate_score(&meta, &sheet_id(index, seed))
}

/// All sheets of a corpus in index order. Sheets are generated in parallel.
pub fn generate_corpus(config: &GenConfig) -> Result<Vec<ScoreDoc>, SampleError> {
    config.overrides.check()?;
    (0..config.sheet_count)
        .into_par_iter()
        .map(|i| generate_sheet(config, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{EIGHTH, QUARTER, SIXTEENTH};

    fn ts(n: u8) -> TimeSignature {
        TimeSignature::new(n).unwrap()
    }

    fn v(base: u8, dots: u8) -> NoteValue {
        NoteValue::new(base, dots).unwrap()
    }

    fn note(value: NoteValue, onset: u32) -> NoteEvent {
        NoteEvent {
            pitch: "C4".parse().unwrap(),
            value,
            tie_to_next: false,
            beam_group: None,
            onset_bin: onset,
        }
    }

    #[test]
    fn meta_fields_in_range() {
        let seed = 7;
        let m = sample_sheet_meta(&mut sheet_rng(seed), &Overrides::default(), seed).unwrap();
        assert!(TEMPO_RANGE.contains(&m.tempo_bpm));
        assert!(BAR_COUNT_RANGE.contains(&m.bar_count));
        let span = m.repeat_span.unwrap();
        assert!(1 <= span.start && span.start < span.end && span.end <= m.bar_count);
        let words: Vec<_> = m.title.split(' ').collect();
        assert!((1..=10).contains(&words.len()));
        for w in words.iter().chain(m.composer.split(' ').collect::<Vec<_>>().iter()) {
            assert!((3..=8).contains(&w.len()), "{w}");
            assert!(w.chars().next().unwrap().is_ascii_uppercase());
            assert!(w.chars().skip(1).all(|c| c.is_ascii_lowercase()));
        }
        assert!((1..=3).contains(&m.composer.split(' ').count()));
        assert!(SPACING_RANGE.contains(&m.spacing));
    }

    #[test]
    fn scale_override_forces_natural_signature() {
        let o = Overrides::from_toml("scale = \"C major\"").unwrap();
        for seed in 0..200 {
            let m = sample_sheet_meta(&mut sheet_rng(seed), &o, seed).unwrap();
            assert_eq!(m.scale.key_signature().count, 0);
        }
    }

    #[test]
    fn contradictory_overrides_rejected() {
        assert!(Overrides::from_toml("bar_count = 25").is_err());
        assert!(Overrides::from_toml("spacing = 0").is_err());
        assert!(Overrides::from_toml("scale = \"H major\"").is_err());
        assert!(Overrides::from_toml("tempo = 3").is_err());
        let o = Overrides {
            bar_count: Some(9),
            ..Default::default()
        };
        assert!(sample_sheet_meta(&mut sheet_rng(1), &o, 1).is_err());
        let o = Overrides::from_toml(
            "scale = \"D major\"\nclef_config = \"grand\"\ntime_signature = \"3/4\"\n\
             bar_count = 12\nspacing = 2\nnote_size = \"small\"",
        )
        .unwrap();
        let m = sample_sheet_meta(&mut sheet_rng(1), &o, 1).unwrap();
        assert_eq!(m.bar_count, 12);
        assert_eq!(m.clef_config, ClefConfig::Grand);
        assert_eq!(m.time_signature, ts(3));
        assert_eq!(m.note_size, NoteSize::Small);
        assert_eq!(m.spacing, 2);
    }

    #[test]
    fn note_count_bounds_and_mean() {
        let mut rng = sheet_rng(11);
        let mut counts = [0u32; 13];
        for _ in 0..12_000 {
            counts[sample_note_count(&mut rng, ts(4)) as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        // Each of 12 outcomes: p = 1/12, n = 12000, σ ≈ 30.3.
        for &c in &counts[1..] {
            assert!((c as f64 - 1000.0).abs() < 4.0 * 30.3, "{counts:?}");
        }
        for _ in 0..1000 {
            assert!((1..=6).contains(&sample_note_count(&mut rng, ts(2))));
        }
        let draws = 100_000;
        let mean: f64 =
            (0..draws).map(|_| sample_note_count(&mut rng, ts(3)) as f64).sum::<f64>() / draws as f64;
        assert!((mean - 5.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn rhythm_edge_cases() {
        let mut rng = sheet_rng(3);
        assert_eq!(sample_bar_rhythm(&mut rng, ts(4), 1).unwrap(), vec![16]);
        assert_eq!(sample_bar_rhythm(&mut rng, ts(4), 16).unwrap(), vec![1; 16]);
        assert!(matches!(
            sample_bar_rhythm(&mut rng, ts(4), 17),
            Err(SampleError::InfeasiblePartition { bins: 16, n: 17 })
        ));
        assert!(sample_bar_rhythm(&mut rng, ts(2), 0).is_err());
    }

    #[test]
    fn rhythm_is_uniform_over_compositions() {
        // Compositions of 12 into 3 positive parts: C(11, 2) = 55, uniform.
        let mut rng = sheet_rng(5);
        let mut counts = std::collections::HashMap::<Vec<u32>, u32>::new();
        let draws = 100_000;
        for _ in 0..draws {
            let r = sample_bar_rhythm(&mut rng, ts(3), 3).unwrap();
            assert_eq!(r.iter().sum::<u32>(), 12);
            *counts.entry(r).or_default() += 1;
        }
        assert_eq!(counts.len(), 55);
        let expected = draws as f64 / 55.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // χ²(54) critical value at α = 0.01.
        assert!(chi2 < 81.07, "chi2 = {chi2}");
    }

    #[test]
    fn split_examples() {
        let s = split_duration(4).unwrap();
        assert_eq!(s, vec![TiedValue { value: QUARTER, tie_to_next: false }]);
        let s = split_duration(5).unwrap();
        assert_eq!(
            s,
            vec![
                TiedValue { value: QUARTER, tie_to_next: true },
                TiedValue { value: SIXTEENTH, tie_to_next: false },
            ]
        );
        let s = split_duration(15).unwrap();
        assert_eq!(
            s,
            vec![
                TiedValue { value: v(2, 2), tie_to_next: true },
                TiedValue { value: SIXTEENTH, tie_to_next: false },
            ]
        );
        assert!(split_duration(0).is_err());
        assert!(split_duration(17).is_err());
    }

    /// Brute-force oracle: the shortest chain of representable values for
    /// `bins`, ties broken toward the lexicographically largest first piece.
    fn greedy_oracle(bins: u32) -> Vec<u32> {
        let set = [16, 14, 12, 8, 7, 6, 4, 3, 2, 1];
        let mut left = bins;
        let mut out = vec![];
        while left > 0 {
            let take = *set.iter().find(|&&s| s <= left).unwrap();
            out.push(take);
            left -= take;
        }
        out
    }

    #[test]
    fn split_exhaustive() {
        for bins in 1..=16 {
            let pieces = split_duration(bins).unwrap();
            let lens: Vec<u32> = pieces.iter().map(|p| p.value.bins()).collect();
            assert_eq!(lens, greedy_oracle(bins), "{bins}");
            assert_eq!(lens.iter().sum::<u32>(), bins);
            for (i, p) in pieces.iter().enumerate() {
                assert_eq!(p.tie_to_next, i + 1 < pieces.len());
                assert_eq!(NoteValue::representable(p.value.bins()).unwrap(), Some(p.value));
            }
            assert!(pieces.len() <= 2);
        }
    }

    #[test]
    fn grouping_separated_is_identity() {
        let notes = vec![note(QUARTER, 0), note(v(2, 1), 4)];
        assert_eq!(
            apply_grouping(notes.clone(), GroupingMode::Separated, ts(4)).unwrap(),
            notes
        );
    }

    #[test]
    fn grouping_splits_beat_crossing_note() {
        // 2 + 4 (crossing bins 2..6) + 2 + 8
        let notes = vec![note(EIGHTH, 0), note(QUARTER, 2), note(EIGHTH, 6), note(HALF_, 8)];
        let out = apply_grouping(notes, GroupingMode::BeatGrouped, ts(4)).unwrap();
        let summary: Vec<(u32, u32, bool)> =
            out.iter().map(|n| (n.onset_bin, n.bins(), n.tie_to_next)).collect();
        assert_eq!(
            summary,
            vec![
                (0, 2, false),
                (2, 2, true),
                (4, 2, false),
                (6, 2, false),
                (8, 4, true),
                (12, 4, false),
            ]
        );
        assert_eq!(out[0].beam_group, Some(0));
        assert_eq!(out[1].beam_group, Some(0));
        assert_eq!(out[2].beam_group, Some(1));
        assert_eq!(out[3].beam_group, Some(1));
        assert_eq!(out[4].beam_group, None);
    }

    const HALF_: NoteValue = crate::theory::HALF;

    #[test]
    fn grouping_beams_two_eighths_in_first_beat() {
        let notes = vec![note(EIGHTH, 0), note(EIGHTH, 2), note(QUARTER, 4), note(HALF_, 8)];
        let out = apply_grouping(notes, GroupingMode::BeatGrouped, ts(4)).unwrap();
        assert_eq!(out[0].beam_group, Some(0));
        assert_eq!(out[1].beam_group, Some(0));
        assert!(out[2..].iter().filter(|n| n.bins() == 4).all(|n| n.beam_group.is_none()));
    }

    #[test]
    fn grouping_keeps_trailing_tie() {
        // A 5-bin note already split as q tied s, with the sixteenth starting a beat.
        let mut a = note(QUARTER, 0);
        a.tie_to_next = true;
        let notes = vec![a, note(SIXTEENTH, 4), note(v(4, 2), 5), note(QUARTER, 12)];
        let out = apply_grouping(notes, GroupingMode::BeatGrouped, ts(4)).unwrap();
        let total: u32 = out.iter().map(|n| n.bins()).sum();
        assert_eq!(total, 16);
        assert!(out[0].tie_to_next);
        for n in &out {
            assert_eq!(n.onset_bin / 4, (n.end_bin() - 1) / 4);
        }
    }

    #[test]
    fn grouping_rejects_malformed_bar() {
        let notes = vec![note(QUARTER, 0), note(QUARTER, 4)];
        assert!(matches!(
            apply_grouping(notes, GroupingMode::Separated, ts(4)),
            Err(SampleError::MalformedBar(_))
        ));
        let notes = vec![note(QUARTER, 0), note(QUARTER, 5)];
        assert!(apply_grouping(notes, GroupingMode::BeatGrouped, ts(2)).is_err());
    }

    #[test]
    fn bar_chord_rules() {
        let mut rng = sheet_rng(9);
        let c = sample_bar_chord(&mut rng, "C major".parse().unwrap(), 1);
        assert_eq!(c.tones().map(|t| t.to_string()), ["C", "E", "G"]);
        let a = sample_bar_chord(&mut rng, "A minor".parse().unwrap(), 1);
        assert_eq!(a.tones().map(|t| t.to_string()), ["A", "C", "E"]);
        let scale: Scale = "Eb major".parse().unwrap();
        let draws = 100_000;
        let mut counts = [0u32; 8];
        for _ in 0..draws {
            counts[sample_bar_chord(&mut rng, scale, 5).degree() as usize] += 1;
        }
        let p = 1.0 / 7.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn pitch_candidates() {
        let chord = Chord::new("C major".parse().unwrap(), 1).unwrap();
        let names: Vec<String> =
            chord_candidates(chord, Clef::Treble).iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["C4", "E4", "G4", "C5", "E5", "G5", "C6", "E6"]);
        let mut rng = sheet_rng(2);
        for p in sample_bar_pitches(&mut rng, chord, Clef::Treble, 50).unwrap() {
            assert!(Clef::Treble.contains(p));
            assert!(chord.tones().contains(&p.class));
        }
        assert!(sample_bar_pitches(&mut rng, chord, Clef::Bass, 0).unwrap().is_empty());
    }

    #[test]
    fn sharp_spelling_in_bass() {
        // C# major, degree 7: B# D# F#. B# keeps its own octave number.
        let chord = Chord::new("C# major".parse().unwrap(), 7).unwrap();
        let bs: Vec<String> = chord_candidates(chord, Clef::Bass)
            .iter()
            .filter(|p| p.class.to_string() == "B#")
            .map(|p| p.to_string())
            .collect();
        assert_eq!(bs, ["B#1", "B#2"]);
        let treble: Vec<String> = chord_candidates(chord, Clef::Treble)
            .iter()
            .filter(|p| p.class.to_string() == "B#")
            .map(|p| p.to_string())
            .collect();
        assert_eq!(treble, ["B#3", "B#4", "B#5"]);
    }

    #[test]
    fn generate_score_invariants_and_determinism() {
        let config = GenConfig {
            seed: 42,
            sheet_count: 30,
            overrides: Overrides::default(),
        };
        let a = generate_corpus(&config).unwrap();
        let b = generate_corpus(&config).unwrap();
        assert_eq!(a, b);
        for doc in &a {
            let want = doc.meta.time_signature.bins_per_bar();
            for bar in &doc.bars {
                for notes in bar.voices.values() {
                    assert_eq!(notes.iter().map(|n| n.bins()).sum::<u32>(), want);
                    for n in notes {
                        assert!(doc.meta.scale.contains(n.pitch.class));
                    }
                }
            }
        }
    }

    #[test]
    fn grand_staff_share() {
        let config = GenConfig {
            seed: 99,
            sheet_count: 200,
            overrides: Overrides::default(),
        };
        let docs = generate_corpus(&config).unwrap();
        let grand = docs.iter().filter(|d| d.meta.clef_config == ClefConfig::Grand).count();
        let sigma = (200.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        assert!((grand as f64 - 200.0 / 3.0).abs() < 3.0 * sigma, "{grand}");
    }

    #[test]
    fn sheet_seeds_are_distinct() {
        let mut seeds: Vec<u64> = (0..10_000).map(|i| derive_sheet_seed(1, i)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 10_000);
    }
}
