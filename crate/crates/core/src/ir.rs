//! The score intermediate representation: one [`ScoreDoc`] per sheet, consumed
//! by engraving, question generation and the note codecs.
//!
//! # Record schema
//!
//! A persisted document is a single-line JSON object:
//!
//! ```text
//! {"version":1,"sheet_id":"…","meta":{…},"bars":[{"index":1,"chord":{"scale":"C major","degree":1},
//!   "grouping_mode":"beat_grouped","voices":{"treble":[{"pitch":"C4","value":"4","tie_to_next":false,
//!   "beam_group":null,"onset_bin":0}, …]}}, …]}
//! ```
//!
//! `version` is [`IR_VERSION`]; readers reject newer versions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::{GroupingMode, SheetMeta, BAR_COUNT_RANGE, TEMPO_RANGE};
use crate::theory::{Chord, Clef, NoteValue, Pitch};

pub const IR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoteEvent {
    pub pitch: Pitch,
    pub value: NoteValue,
    pub tie_to_next: bool,
    pub beam_group: Option<u32>,
    pub onset_bin: u32,
}

impl NoteEvent {
    pub fn bins(&self) -> u32 {
        self.value.bins()
    }

    pub fn end_bin(&self) -> u32 {
        self.onset_bin + self.bins()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bar {
    /// 1-based.
    pub index: u32,
    pub chord: Chord,
    pub grouping_mode: GroupingMode,
    pub voices: BTreeMap<Clef, Vec<NoteEvent>>,
}

impl Bar {
    pub fn voice(&self, clef: Clef) -> Option<&[NoteEvent]> {
        self.voices.get(&clef).map(Vec::as_slice)
    }

    pub fn note_count(&self) -> usize {
        self.voices.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreDoc {
    pub sheet_id: String,
    pub meta: SheetMeta,
    pub bars: Vec<Bar>,
}

impl ScoreDoc {
    pub fn bar(&self, index: u32) -> Option<&Bar> {
        self.bars.iter().find(|b| b.index == index)
    }

    pub fn note_count(&self) -> usize {
        self.bars.iter().map(Bar::note_count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BarCountOutOfRange(u32),
    BarCountMismatch { declared: u32, actual: usize },
    BarIndex { position: usize, index: u32 },
    TempoOutOfRange(u32),
    TitleWords(usize),
    ComposerWords(usize),
    WordLength(String),
    SpacingOutOfRange(u8),
    RepeatSpan { start: u32, end: u32 },
    Voices { bar: u32, expected: Vec<Clef>, actual: Vec<Clef> },
    ChordScale { bar: u32 },
    FirstChordNotTonic(u8),
    DurationSum { bar: u32, clef: Clef, bins: u32, expected: u32 },
    NonContiguous { bar: u32, clef: Clef, note: usize },
    EmptyVoice { bar: u32, clef: Clef },
    NotDiatonic { bar: u32, clef: Clef, pitch: Pitch },
    OutOfClefRange { bar: u32, clef: Clef, pitch: Pitch },
    TiePitch { bar: u32, clef: Clef, note: usize },
    DanglingTie { bar: u32, clef: Clef },
    Beam { bar: u32, clef: Clef, note: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            BarCountOutOfRange(n) => write!(f, "bar count {n} outside 10..=20"),
            BarCountMismatch { declared, actual } => {
                write!(f, "meta declares {declared} bars but document has {actual}")
            }
            BarIndex { position, index } => {
                write!(f, "bar at position {position} has index {index}")
            }
            TempoOutOfRange(t) => write!(f, "tempo {t} outside 50..=140"),
            TitleWords(n) => write!(f, "title has {n} words, expected 1..=10"),
            ComposerWords(n) => write!(f, "composer has {n} words, expected 1..=3"),
            WordLength(w) => write!(f, "word {w:?} not 3..=8 characters"),
            SpacingOutOfRange(s) => write!(f, "spacing setting {s} outside 1..=4"),
            RepeatSpan { start, end } => write!(f, "invalid repeat span {start}..{end}"),
            Voices { bar, expected, actual } => {
                write!(f, "bar {bar}: voices {actual:?}, clef config needs {expected:?}")
            }
            ChordScale { bar } => write!(f, "bar {bar}: chord not from the sheet's scale"),
            FirstChordNotTonic(d) => write!(f, "bar 1 chord has degree {d}, expected tonic"),
            DurationSum { bar, clef, bins, expected } => {
                write!(f, "bar {bar} {clef}: {bins} bins, expected {expected} (duration sum)")
            }
            NonContiguous { bar, clef, note } => {
                write!(f, "bar {bar} {clef}: note {note} onset not contiguous")
            }
            EmptyVoice { bar, clef } => write!(f, "bar {bar} {clef}: empty voice"),
            NotDiatonic { bar, clef, pitch } => {
                write!(f, "bar {bar} {clef}: {pitch} not in scale (diatonic purity)")
            }
            OutOfClefRange { bar, clef, pitch } => {
                write!(f, "bar {bar} {clef}: {pitch} outside clef range")
            }
            TiePitch { bar, clef, note } => {
                write!(f, "bar {bar} {clef}: note {note} tied to a different pitch")
            }
            DanglingTie { bar, clef } => write!(f, "bar {bar} {clef}: tie on last note"),
            Beam { bar, clef, note } => write!(f, "bar {bar} {clef}: note {note} badly beamed"),
        }
    }
}

fn check_words(text: &str, range: std::ops::RangeInclusive<usize>) -> Result<(), usize> {
    let n = text.split_whitespace().count();
    if range.contains(&n) {
        Ok(())
    } else {
        Err(n)
    }
}

/// Checks every structural invariant. An empty result means the document is valid.
pub fn validate(doc: &ScoreDoc) -> Vec<Violation> {
    let mut out = Vec::new();
    let meta = &doc.meta;

    if !BAR_COUNT_RANGE.contains(&meta.bar_count) {
        out.push(Violation::BarCountOutOfRange(meta.bar_count));
    }
    if doc.bars.len() != meta.bar_count as usize {
        out.push(Violation::BarCountMismatch {
            declared: meta.bar_count,
            actual: doc.bars.len(),
        });
    }
    if !TEMPO_RANGE.contains(&meta.tempo_bpm) {
        out.push(Violation::TempoOutOfRange(meta.tempo_bpm));
    }
    if let Err(n) = check_words(&meta.title, 1..=10) {
        out.push(Violation::TitleWords(n));
    }
    if let Err(n) = check_words(&meta.composer, 1..=3) {
        out.push(Violation::ComposerWords(n));
    }
    for word in meta.title.split_whitespace().chain(meta.composer.split_whitespace()) {
        if !(3..=8).contains(&word.chars().count()) {
            out.push(Violation::WordLength(word.to_string()));
        }
    }
    if !(1..=4).contains(&meta.spacing) {
        out.push(Violation::SpacingOutOfRange(meta.spacing));
    }
    if let Some(span) = meta.repeat_span {
        if span.start < 1 || span.start >= span.end || span.end as usize > doc.bars.len() {
            out.push(Violation::RepeatSpan {
                start: span.start,
                end: span.end,
            });
        }
    }

    let clefs = meta.clef_config.clefs();
    let bins_per_bar = meta.time_signature.bins_per_bar();
    for (position, bar) in doc.bars.iter().enumerate() {
        if bar.index as usize != position + 1 {
            out.push(Violation::BarIndex {
                position,
                index: bar.index,
            });
        }
        let present: Vec<Clef> = bar.voices.keys().copied().collect();
        if present != clefs {
            out.push(Violation::Voices {
                bar: bar.index,
                expected: clefs.to_vec(),
                actual: present,
            });
        }
        if bar.chord.scale() != meta.scale {
            out.push(Violation::ChordScale { bar: bar.index });
        }
        if position == 0 && bar.chord.degree() != 1 {
            out.push(Violation::FirstChordNotTonic(bar.chord.degree()));
        }
        for (&clef, notes) in &bar.voices {
            check_voice(&mut out, doc, bar, clef, notes, bins_per_bar);
        }
    }
    out
}

fn check_voice(
    out: &mut Vec<Violation>,
    doc: &ScoreDoc,
    bar: &Bar,
    clef: Clef,
    notes: &[NoteEvent],
    bins_per_bar: u32,
) {
    let b = bar.index;
    if notes.is_empty() {
        out.push(Violation::EmptyVoice { bar: b, clef });
        return;
    }
    let mut cursor = 0;
    for (i, note) in notes.iter().enumerate() {
        if note.onset_bin != cursor {
            out.push(Violation::NonContiguous { bar: b, clef, note: i });
        }
        cursor = note.onset_bin + note.bins();
        if !doc.meta.scale.contains(note.pitch.class) {
            out.push(Violation::NotDiatonic { bar: b, clef, pitch: note.pitch });
        }
        if !clef.contains(note.pitch) {
            out.push(Violation::OutOfClefRange { bar: b, clef, pitch: note.pitch });
        }
        if note.tie_to_next {
            match notes.get(i + 1) {
                Some(next) if next.pitch == note.pitch => {}
                Some(_) => out.push(Violation::TiePitch { bar: b, clef, note: i }),
                None => out.push(Violation::DanglingTie { bar: b, clef }),
            }
        }
        if note.beam_group.is_some() {
            let same_beat = note.onset_bin / 4 == (note.end_bin() - 1) / 4;
            if bar.grouping_mode != GroupingMode::BeatGrouped
                || !note.value.is_beamable()
                || !same_beat
            {
                out.push(Violation::Beam { bar: b, clef, note: i });
            }
        }
    }
    let total: u32 = notes.iter().map(NoteEvent::bins).sum();
    if total != bins_per_bar {
        out.push(Violation::DurationSum {
            bar: b,
            clef,
            bins: total,
            expected: bins_per_bar,
        });
    }
    // Notes sharing a beam group must sit in one beat and come in runs of two or more.
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, note) in notes.iter().enumerate() {
        if let Some(g) = note.beam_group {
            groups.entry(g).or_default().push(i);
        }
    }
    for members in groups.values() {
        let beat = notes[members[0]].onset_bin / 4;
        let contiguous = members.windows(2).all(|w| w[1] == w[0] + 1);
        if members.len() < 2
            || !contiguous
            || members.iter().any(|&i| notes[i].onset_bin / 4 != beat)
        {
            out.push(Violation::Beam { bar: b, clef, note: members[0] });
        }
    }
}

#[derive(Debug, Error)]
pub enum IrError {
    #[error("malformed IR record at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported IR version {0} (this build reads {IR_VERSION})")]
    Version(u32),
}

#[derive(Serialize)]
struct RecordOut<'a> {
    version: u32,
    #[serde(flatten)]
    doc: &'a ScoreDoc,
}

#[derive(Deserialize)]
struct RecordIn {
    version: u32,
    #[serde(flatten)]
    doc: ScoreDoc,
}

/// One-line JSON record for `doc`.
pub fn serialize_ir(doc: &ScoreDoc) -> String {
    serde_json::to_string(&RecordOut {
        version: IR_VERSION,
        doc,
    })
    .expect("IR types serialize infallibly")
}

pub fn deserialize_ir(text: &str) -> Result<ScoreDoc, IrError> {
    let record: RecordIn = serde_json::from_str(text).map_err(|e| IrError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if record.version > IR_VERSION {
        return Err(IrError::Version(record.version));
    }
    Ok(record.doc)
}
