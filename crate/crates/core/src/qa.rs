//! Ground-truth extraction, question templates, manifests, splits and
//! corpus statistics.
//!
//! # Manifest schema
//!
//! JSON lines, one question per line:
//!
//! ```text
//! {"version":1,"id":"00003-1a2b3c4d-05","sheet_id":"00003-1a2b3c4d","image":"sheets/00003-1a2b3c4d.png",
//!  "family":"omr","template_id":"omr.pitch.2","question":"…","answer":"…","answer_format":"kern+",
//!  "target":{"bar":4,"clef":"bass","fields":"pitch"},"split":"train","ir_ref":"ir.jsonl#00003-1a2b3c4d"}
//! ```
//!
//! `target` is present only for per-bar questions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{
    decode_json_fields, decode_kernplus_fields, encode_json_fields, encode_kernplus_fields,
    NoteFields, PartialNote,
};
use crate::ir::{NoteEvent, ScoreDoc};
use crate::sampler::{qa_rng, ClefConfig, RepeatSpan};
use crate::theory::{Chord, Clef, KeySignature, TimeSignature};

pub const MANIFEST_VERSION: u32 = 1;
pub const DEFAULT_TRAIN_RATIO: f64 = 0.9;

#[derive(Debug, Error)]
pub enum QaError {
    #[error("cannot split an empty set of QA pairs")]
    Empty,
    #[error("train ratio {0} outside 0..=1")]
    Ratio(f64),
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("manifest version {0} is newer than supported ({MANIFEST_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ocr,
    Omr,
    Layout,
    Chord,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Ocr, Family::Omr, Family::Layout, Family::Chord];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ocr => "OCR",
            Family::Omr => "OMR",
            Family::Layout => "Layout",
            Family::Chord => "Chord",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerFormat {
    #[serde(rename = "plain")]
    Plain,
    #[serde(rename = "json")]
    Json,
    #[serde(rename = "kern+")]
    KernPlus,
}

/// Notation used for note-sequence answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NoteFormat {
    #[default]
    #[serde(rename = "json")]
    Json,
    #[serde(rename = "kern+")]
    KernPlus,
}

impl NoteFormat {
    pub fn answer_format(self) -> AnswerFormat {
        match self {
            NoteFormat::Json => AnswerFormat::Json,
            NoteFormat::KernPlus => AnswerFormat::KernPlus,
        }
    }

    pub fn encode(self, notes: &[NoteEvent], fields: NoteFields) -> String {
        match self {
            NoteFormat::Json => encode_json_fields(notes, fields),
            NoteFormat::KernPlus => encode_kernplus_fields(notes, fields),
        }
    }

    pub fn decode(
        self,
        text: &str,
        fields: NoteFields,
    ) -> Result<Vec<PartialNote>, crate::codec::CodecError> {
        match self {
            NoteFormat::Json => decode_json_fields(text, fields),
            NoteFormat::KernPlus => decode_kernplus_fields(text, fields),
        }
    }
}

impl std::str::FromStr for NoteFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(NoteFormat::Json),
            "kern+" | "kern" => Ok(NoteFormat::KernPlus),
            _ => Err(format!("unknown note format {s:?} (expected json or kern+)")),
        }
    }
}

/// The (bar, clef) a per-bar question is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub bar: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clef: Option<Clef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<NoteFields>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub id: String,
    pub sheet_id: String,
    pub image: String,
    pub family: Family,
    pub template_id: String,
    pub question: String,
    pub answer: String,
    pub answer_format: AnswerFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
}

/// Everything a question can ask about, read straight off the IR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub title: String,
    pub composer: String,
    pub tempo_bpm: u32,
    pub time_signature: TimeSignature,
    pub key_signature: KeySignature,
    pub clef_config: ClefConfig,
    pub bar_count: u32,
    pub repeat_span: Option<RepeatSpan>,
    pub chords: Vec<Chord>,
    pub chord_labels: Vec<String>,
    pub chord_labels_shown: bool,
    pub voices: BTreeMap<(u32, Clef), Vec<NoteEvent>>,
}

pub fn ground_truth(doc: &ScoreDoc) -> GroundTruth {
    let meta = &doc.meta;
    let mut voices = BTreeMap::new();
    for bar in &doc.bars {
        for (&clef, notes) in &bar.voices {
            voices.insert((bar.index, clef), notes.clone());
        }
    }
    GroundTruth {
        title: meta.title.clone(),
        composer: meta.composer.clone(),
        tempo_bpm: meta.tempo_bpm,
        time_signature: meta.time_signature,
        key_signature: meta.scale.key_signature(),
        clef_config: meta.clef_config,
        bar_count: doc.bars.len() as u32,
        repeat_span: meta.repeat_span,
        chords: doc.bars.iter().map(|b| b.chord).collect(),
        chord_labels: doc.bars.iter().map(|b| b.chord.label()).collect(),
        chord_labels_shown: meta.show_chord_labels,
        voices,
    }
}

impl GroundTruth {
    pub fn voice(&self, bar: u32, clef: Clef) -> Option<&[NoteEvent]> {
        self.voices.get(&(bar, clef)).map(Vec::as_slice)
    }

    pub fn voice_answer(
        &self,
        bar: u32,
        clef: Clef,
        fields: NoteFields,
        format: NoteFormat,
    ) -> Option<String> {
        self.voice(bar, clef).map(|v| format.encode(v, fields))
    }

    pub fn title_answer(&self) -> String {
        format!("title: {}, composer: {}", self.title, self.composer)
    }

    pub fn tempo_answer(&self) -> String {
        format!("{} BPM", self.tempo_bpm)
    }

    pub fn clef_answer(&self) -> String {
        match self.clef_config {
            ClefConfig::Treble => "1 clef: treble".to_string(),
            ClefConfig::Bass => "1 clef: bass".to_string(),
            ClefConfig::Grand => "2 clefs: treble and bass".to_string(),
        }
    }

    pub fn repeat_answer(&self) -> String {
        match self.repeat_span {
            Some(r) => format!("repeat from bar {} to bar {}", r.start, r.end),
            None => "no repeat".to_string(),
        }
    }
}

const TITLE_COMPOSER: [&str; 3] = [
    "What are the title and the composer of this music sheet?",
    "Read the title and the composer's name printed on the sheet.",
    "What is this piece called, and who wrote it?",
];
const TEMPO: [&str; 3] = [
    "What is the tempo marking of this piece in BPM?",
    "At how many beats per minute should this piece be played?",
    "Read the metronome marking shown above the first bar.",
];
const TIME_SIGNATURE: [&str; 3] = [
    "What is the time signature of this music?",
    "Which meter is written at the beginning of the staff?",
    "Identify the time signature of the piece.",
];
const CHORD_LABELS: [&str; 3] = [
    "List the chord names labeled above the bars, in order.",
    "Which chord symbols are written over the bars?",
    "Read all chord labels on the sheet from the first bar to the last.",
];
const CLEFS: [&str; 3] = [
    "How many clefs are used in this sheet, and which ones?",
    "Identify the number and type of clefs in the music.",
    "Which clefs appear at the start of each system?",
];
const BAR_COUNT: [&str; 3] = [
    "How many bars does this music sheet contain?",
    "Count the total number of measures in the piece.",
    "What is the total number of bars on this page?",
];
const REPEAT: [&str; 3] = [
    "Is there a repeated section? If so, which bars does it span?",
    "Locate any repeat signs and give the bars they enclose.",
    "Which bars are repeated, if any?",
];
const KEY_SIGNATURE: [&str; 3] = [
    "What is the key signature of this piece?",
    "How many sharps or flats are in the key signature, and which notes do they alter?",
    "Describe the key signature shown next to the clef.",
];
const DURATIONS: [&str; 3] = [
    "List the note durations in bar {bar} of the {clef} clef.",
    "What are the durations of the notes in measure {bar}, {clef} staff?",
    "Extract the rhythm of bar {bar} on the {clef} staff, including dots and ties.",
];
const PITCHES: [&str; 3] = [
    "List the pitches of the notes in bar {bar} of the {clef} clef.",
    "Which notes are played in measure {bar} on the {clef} staff?",
    "Extract the pitch of every note in bar {bar}, {clef} clef.",
];
const COMBINED: [&str; 3] = [
    "Transcribe the notes in bar {bar} of the {clef} clef with pitch and duration.",
    "Give the pitch and duration of every note in measure {bar}, {clef} staff.",
    "Extract all notes of bar {bar} on the {clef} staff, including pitch and duration.",
];
const CHORD_ESTIMATION: [&str; 3] = [
    "Which chord underlies bar {bar}?",
    "Infer the chord implied by the notes in bar {bar}.",
    "Based on its notes, what is the harmony of measure {bar}?",
];

fn format_hint(format: NoteFormat) -> &'static str {
    match format {
        NoteFormat::Json => " Answer as a JSON list without indentation.",
        NoteFormat::KernPlus => " Answer in kern+ notation.",
    }
}

struct Builder<'a> {
    doc: &'a ScoreDoc,
    pairs: Vec<QaPair>,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        family: Family,
        task: &str,
        template: usize,
        question: String,
        answer: String,
        answer_format: AnswerFormat,
        target: Option<Target>,
    ) {
        let id = format!("{}-{:02}", self.doc.sheet_id, self.pairs.len());
        self.pairs.push(QaPair {
            id,
            sheet_id: self.doc.sheet_id.clone(),
            image: image_path(&self.doc.sheet_id),
            family,
            template_id: format!("{}.{task}.{template}", family_key(family)),
            question,
            answer,
            answer_format,
            target,
        });
    }
}

fn family_key(f: Family) -> &'static str {
    match f {
        Family::Ocr => "ocr",
        Family::Omr => "omr",
        Family::Layout => "layout",
        Family::Chord => "chord",
    }
}

/// Image location of a sheet, relative to the corpus root.
pub fn image_path(sheet_id: &str) -> String {
    format!("sheets/{sheet_id}.png")
}

fn pick<R: Rng + ?Sized>(rng: &mut R, templates: &[&'static str; 3]) -> (usize, &'static str) {
    let i = rng.random_range(0..templates.len());
    (i, templates[i])
}

/// Questions for one sheet: 3–4 OCR, 3 layout, 7 OMR and, when chord labels
/// are hidden, one chord-estimation question.
pub fn generate_qa<R: Rng + ?Sized>(doc: &ScoreDoc, rng: &mut R, format: NoteFormat) -> Vec<QaPair> {
    let gt = ground_truth(doc);
    let mut b = Builder {
        doc,
        pairs: Vec::new(),
    };
    let plain = AnswerFormat::Plain;

    let (t, q) = pick(rng, &TITLE_COMPOSER);
    b.push(Family::Ocr, "title_composer", t, q.into(), gt.title_answer(), plain, None);
    let (t, q) = pick(rng, &TEMPO);
    b.push(Family::Ocr, "tempo", t, q.into(), gt.tempo_answer(), plain, None);
    let (t, q) = pick(rng, &TIME_SIGNATURE);
    b.push(Family::Ocr, "time_signature", t, q.into(), gt.time_signature.to_string(), plain, None);
    if gt.chord_labels_shown {
        let (t, q) = pick(rng, &CHORD_LABELS);
        b.push(Family::Ocr, "chord_labels", t, q.into(), gt.chord_labels.join(", "), plain, None);
    }

    let (t, q) = pick(rng, &CLEFS);
    b.push(Family::Layout, "clefs", t, q.into(), gt.clef_answer(), plain, None);
    let (t, q) = pick(rng, &BAR_COUNT);
    b.push(Family::Layout, "bar_count", t, q.into(), gt.bar_count.to_string(), plain, None);
    let (t, q) = pick(rng, &REPEAT);
    b.push(Family::Layout, "repeat", t, q.into(), gt.repeat_answer(), plain, None);

    let (t, q) = pick(rng, &KEY_SIGNATURE);
    b.push(Family::Omr, "key_signature", t, q.into(), gt.key_signature.to_string(), plain, None);
    let clefs = gt.clef_config.clefs();
    let tasks = [
        ("duration", NoteFields::Duration, &DURATIONS),
        ("pitch", NoteFields::Pitch, &PITCHES),
        ("notes", NoteFields::Both, &COMBINED),
    ];
    for (task, fields, templates) in tasks {
        for _ in 0..2 {
            let bar = rng.random_range(1..=gt.bar_count);
            let clef = clefs[rng.random_range(0..clefs.len())];
            let (t, q) = pick(rng, templates);
            let question = q.replace("{bar}", &bar.to_string()).replace("{clef}", clef.name())
                + format_hint(format);
            let answer = gt
                .voice_answer(bar, clef, fields, format)
                .expect("target drawn from existing bars and clefs");
            let target = Target {
                bar,
                clef: Some(clef),
                fields: Some(fields),
            };
            b.push(Family::Omr, task, t, question, answer, format.answer_format(), Some(target));
        }
    }

    if !gt.chord_labels_shown {
        let bar = rng.random_range(1..=gt.bar_count);
        let (t, q) = pick(rng, &CHORD_ESTIMATION);
        let question = q.replace("{bar}", &bar.to_string());
        let answer = gt.chords[bar as usize - 1].name();
        let target = Target {
            bar,
            clef: None,
            fields: None,
        };
        b.push(Family::Chord, "estimate", t, question, answer, plain, Some(target));
    }
    b.pairs
}

/// Questions for a sheet using its own stored seed; reproducible.
pub fn generate_sheet_qa(doc: &ScoreDoc, format: NoteFormat) -> Vec<QaPair> {
    generate_qa(doc, &mut qa_rng(doc.meta.seed), format)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub version: u32,
    #[serde(flatten)]
    pub qa: QaPair,
    pub split: Split,
    pub ir_ref: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub records: Vec<ManifestRecord>,
}

/// Reference of a sheet's IR record inside the corpus.
pub fn ir_ref(sheet_id: &str) -> String {
    format!("ir.jsonl#{sheet_id}")
}

/// Number of test sheets out of `sheets`: `floor(sheets · (1 − ratio))`, so
/// a single sheet always lands in train.
pub fn test_sheet_count(sheets: usize, ratio: f64) -> usize {
    ((sheets as f64) * (1.0 - ratio) + 1e-9).floor() as usize
}

/// Assigns whole sheets to train/test: shuffle sheet ids with `seed`, put the
/// first `sheets − test_sheet_count` into train.
pub fn split_manifest(pairs: Vec<QaPair>, ratio: f64, seed: u64) -> Result<Manifest, QaError> {
    if pairs.is_empty() {
        return Err(QaError::Empty);
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(QaError::Ratio(ratio));
    }
    let mut sheets: Vec<&str> = pairs
        .iter()
        .map(|p| p.sheet_id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    sheets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train = sheets.len() - test_sheet_count(sheets.len(), ratio);
    let split: HashMap<String, Split> = sheets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.to_string(), if i < train { Split::Train } else { Split::Test }))
        .collect();
    let records = pairs
        .into_iter()
        .map(|qa| ManifestRecord {
            version: MANIFEST_VERSION,
            split: split[&qa.sheet_id],
            ir_ref: ir_ref(&qa.sheet_id),
            qa,
        })
        .collect();
    Ok(Manifest { records })
}

impl Manifest {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Manifest, QaError> {
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ManifestRecord = serde_json::from_str(&line).map_err(|e| QaError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if record.version > MANIFEST_VERSION {
                return Err(QaError::Version(record.version));
            }
            records.push(record);
        }
        Ok(Manifest { records })
    }

    pub fn sheet_split(&self) -> BTreeMap<&str, Split> {
        self.records
            .iter()
            .map(|r| (r.qa.sheet_id.as_str(), r.split))
            .collect()
    }
}

/// Checks that an OMR or chord answer is consistent with the IR it points to.
/// Returns a description of the first mismatch.
pub fn check_answer(doc: &ScoreDoc, qa: &QaPair) -> Result<(), String> {
    let Some(target) = qa.target else {
        return Ok(());
    };
    let bar = doc
        .bar(target.bar)
        .ok_or_else(|| format!("{}: bar {} not in sheet", qa.id, target.bar))?;
    match (target.clef, target.fields) {
        (Some(clef), Some(fields)) => {
            let voice = bar
                .voice(clef)
                .ok_or_else(|| format!("{}: no {clef} voice", qa.id))?;
            let format = match qa.answer_format {
                AnswerFormat::Json => NoteFormat::Json,
                AnswerFormat::KernPlus => NoteFormat::KernPlus,
                AnswerFormat::Plain => return Err(format!("{}: note answer in plain text", qa.id)),
            };
            let decoded = format
                .decode(&qa.answer, fields)
                .map_err(|e| format!("{}: {e}", qa.id))?;
            let want: Vec<PartialNote> =
                voice.iter().map(|n| PartialNote::project(n, fields)).collect();
            if decoded != want {
                return Err(format!("{}: answer does not match bar {} {clef}", qa.id, target.bar));
            }
            Ok(())
        }
        _ if qa.family == Family::Chord => {
            if qa.answer == bar.chord.name() {
                Ok(())
            } else {
                Err(format!("{}: chord answer differs from bar {} chord", qa.id, target.bar))
            }
        }
        _ => Err(format!("{}: incomplete target", qa.id)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    /// Linear-interpolation quantiles. `None` for empty input.
    pub fn of(values: &[f64]) -> Option<Quartiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Quartiles {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub sheets: usize,
    pub total_bars: usize,
    pub total_notes: usize,
    pub notes_per_image: Option<Quartiles>,
    pub bars_per_image: Option<Quartiles>,
    pub scale_counts: BTreeMap<String, usize>,
    pub clef_config_shares: BTreeMap<String, f64>,
    pub family_counts: BTreeMap<Family, usize>,
    pub family_per_sheet: BTreeMap<Family, f64>,
    pub split_sheets: BTreeMap<String, usize>,
}

/// Corpus statistics from the IR documents and their manifest.
pub fn compute_stats(docs: &[ScoreDoc], manifest: &Manifest) -> StatsReport {
    let notes: Vec<f64> = docs.iter().map(|d| d.note_count() as f64).collect();
    let bars: Vec<f64> = docs.iter().map(|d| d.bars.len() as f64).collect();
    let mut scale_counts: BTreeMap<String, usize> = crate::theory::Scale::all()
        .into_iter()
        .map(|s| (s.to_string(), 0))
        .collect();
    let mut clef_counts: BTreeMap<String, usize> = BTreeMap::new();
    for d in docs {
        *scale_counts.entry(d.meta.scale.to_string()).or_default() += 1;
        let key = serde_json::to_value(d.meta.clef_config)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        *clef_counts.entry(key).or_default() += 1;
    }
    let n = docs.len().max(1) as f64;
    let mut family_counts: BTreeMap<Family, usize> = Family::ALL.iter().map(|&f| (f, 0)).collect();
    for r in &manifest.records {
        *family_counts.entry(r.qa.family).or_default() += 1;
    }
    let manifest_sheets = manifest.sheet_split();
    let per_sheet_base = manifest_sheets.len().max(1) as f64;
    let family_per_sheet = family_counts
        .iter()
        .map(|(&f, &c)| (f, c as f64 / per_sheet_base))
        .collect();
    let mut split_sheets = BTreeMap::new();
    for split in manifest_sheets.values() {
        let key = match split {
            Split::Train => "train",
            Split::Test => "test",
        };
        *split_sheets.entry(key.to_string()).or_default() += 1;
    }
    StatsReport {
        sheets: docs.len(),
        total_bars: bars.iter().sum::<f64>() as usize,
        total_notes: notes.iter().sum::<f64>() as usize,
        notes_per_image: Quartiles::of(&notes),
        bars_per_image: Quartiles::of(&bars),
        scale_counts,
        clef_config_shares: clef_counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
        family_counts,
        family_per_sheet,
        split_sheets,
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sheets: {}  bars: {}  notes: {}", self.sheets, self.total_bars, self.total_notes)?;
        writeln!(f, "{:<16} {:>8} {:>8} {:>8} {:>8} {:>8}", "per image", "min", "q1", "median", "q3", "max")?;
        for (name, q) in [("notes", &self.notes_per_image), ("bars", &self.bars_per_image)] {
            if let Some(q) = q {
                writeln!(
                    f,
                    "{name:<16} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
                    q.min, q.q1, q.median, q.q3, q.max
                )?;
            }
        }
        writeln!(f, "\n{:<16} {:>8} {:>10}", "QA family", "pairs", "per sheet")?;
        for (fam, count) in &self.family_counts {
            writeln!(f, "{:<16} {:>8} {:>10.2}", fam.name(), count, self.family_per_sheet[fam])?;
        }
        writeln!(f, "\n{:<16} {:>8}", "clef config", "share")?;
        for (k, share) in &self.clef_config_shares {
            writeln!(f, "{k:<16} {share:>8.3}")?;
        }
        writeln!(f, "\n{:<16} {:>8}", "split", "sheets")?;
        for (k, c) in &self.split_sheets {
            writeln!(f, "{k:<16} {c:>8}")?;
        }
        writeln!(f, "\n{:<16} {:>8}", "scale", "sheets")?;
        for (k, c) in &self.scale_counts {
            writeln!(f, "{k:<16} {c:>8}")?;
        }
        Ok(())
    }
}
