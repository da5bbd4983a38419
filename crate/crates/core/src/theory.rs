//! Pitch spelling, scales, key signatures, diatonic triads and the
//! sixteenth-note bin algebra used by the rest of the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("invalid scale: {0}")]
    InvalidScale(String),
    #[error("scale degree {0} out of range 1..=7")]
    DegreeOutOfRange(u8),
    #[error("unconstructible duration: base {base} with {dots} dot(s)")]
    UnconstructibleDuration { base: u8, dots: u8 },
    #[error("bin count {0} out of range 1..=16")]
    BinsOutOfRange(u32),
    #[error("pitch {0} outside the range Ab1..F#6")]
    PitchOutOfRange(String),
    #[error("cannot parse pitch {0:?}")]
    BadPitch(String),
    #[error("time signature numerator {0} not in {{2, 3, 4}}")]
    BadTimeSignature(u8),
}

/// Letter names in diatonic order starting from C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    C,
    D,
    E,
    F,
    G,
    A,
    B,
}

impl Letter {
    pub const ALL: [Letter; 7] = [
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::A,
        Letter::B,
    ];

    /// Diatonic index with C = 0.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Letter {
        Letter::ALL[(i % 7) as usize]
    }

    /// Semitones above C of the natural note.
    pub fn natural_semitone(self) -> i32 {
        [0, 2, 4, 5, 7, 9, 11][self as usize]
    }

    pub fn as_char(self) -> char {
        ['C', 'D', 'E', 'F', 'G', 'A', 'B'][self as usize]
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'C' => Some(Letter::C),
            'D' => Some(Letter::D),
            'E' => Some(Letter::E),
            'F' => Some(Letter::F),
            'G' => Some(Letter::G),
            'A' => Some(Letter::A),
            'B' => Some(Letter::B),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Accidental {
    Flat,
    Natural,
    Sharp,
}

impl Accidental {
    pub fn offset(self) -> i32 {
        match self {
            Accidental::Flat => -1,
            Accidental::Natural => 0,
            Accidental::Sharp => 1,
        }
    }

    fn from_offset(offset: i32) -> Option<Accidental> {
        match offset {
            -1 => Some(Accidental::Flat),
            0 => Some(Accidental::Natural),
            1 => Some(Accidental::Sharp),
            _ => None,
        }
    }

    /// ASCII suffix: `#`, `b` or nothing.
    pub fn ascii(self) -> &'static str {
        match self {
            Accidental::Flat => "b",
            Accidental::Natural => "",
            Accidental::Sharp => "#",
        }
    }
}

/// A spelled pitch class. Double accidentals are not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PitchClass {
    pub letter: Letter,
    pub accidental: Accidental,
}

impl PitchClass {
    pub const fn new(letter: Letter, accidental: Accidental) -> Self {
        PitchClass { letter, accidental }
    }

    pub const fn natural(letter: Letter) -> Self {
        PitchClass::new(letter, Accidental::Natural)
    }

    /// Chromatic class 0..12 with C = 0.
    pub fn semitone(self) -> i32 {
        (self.letter.natural_semitone() + self.accidental.offset()).rem_euclid(12)
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter.as_char(), self.accidental.ascii())
    }
}

impl FromStr for PitchClass {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let letter = chars
            .next()
            .and_then(Letter::from_char)
            .ok_or_else(|| TheoryError::BadPitch(s.to_string()))?;
        let accidental = match chars.as_str() {
            "" => Accidental::Natural,
            "#" | "♯" => Accidental::Sharp,
            "b" | "♭" => Accidental::Flat,
            _ => return Err(TheoryError::BadPitch(s.to_string())),
        };
        Ok(PitchClass::new(letter, accidental))
    }
}

/// Chromatic position (MIDI numbering) of the global lowest pitch, Ab1.
pub const LOWEST_POSITION: i32 = 32;
/// Chromatic position of the global highest pitch, F#6.
pub const HIGHEST_POSITION: i32 = 90;

/// A spelled pitch in scientific pitch notation. The octave belongs to the
/// letter, so B#3 sounds like C4 but keeps octave 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Pitch {
    pub class: PitchClass,
    pub octave: i8,
}

impl Pitch {
    /// Builds a pitch, rejecting anything outside Ab1..=F#6.
    pub fn new(class: PitchClass, octave: i8) -> Result<Self, TheoryError> {
        let p = Pitch { class, octave };
        if !(LOWEST_POSITION..=HIGHEST_POSITION).contains(&p.position()) {
            return Err(TheoryError::PitchOutOfRange(p.to_string()));
        }
        Ok(p)
    }

    /// Chromatic position; C4 = 60.
    pub fn position(self) -> i32 {
        12 * (self.octave as i32 + 1)
            + self.class.letter.natural_semitone()
            + self.class.accidental.offset()
    }

    /// Diatonic staff step counted from C0.
    pub fn diatonic_step(self) -> i32 {
        7 * self.octave as i32 + self.class.letter.index() as i32
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.class, self.octave)
    }
}

impl FromStr for Pitch {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TheoryError::BadPitch(s.to_string());
        let digit_at = s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
        let (class, octave) = s.split_at(digit_at);
        if octave.len() != 1 {
            return Err(bad());
        }
        let octave: i8 = octave.parse().map_err(|_| bad())?;
        if !(1..=6).contains(&octave) {
            return Err(bad());
        }
        Pitch::new(class.parse().map_err(|_| bad())?, octave)
    }
}

impl TryFrom<String> for Pitch {
    type Error = TheoryError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Pitch> for String {
    fn from(p: Pitch) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Major,
    Minor,
}

impl Mode {
    fn pattern(self) -> [i32; 7] {
        match self {
            Mode::Major => [0, 2, 4, 5, 7, 9, 11],
            Mode::Minor => [0, 2, 3, 5, 7, 8, 10],
        }
    }
}

/// One of the 30 supported scales: 15 major and 15 minor keys whose
/// signatures need at most seven single sharps or flats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Scale {
    root: PitchClass,
    mode: Mode,
}

use Accidental::{Flat, Natural, Sharp};
use Letter::{A, B, C, D, E, F, G};

const fn pc(letter: Letter, accidental: Accidental) -> PitchClass {
    PitchClass::new(letter, accidental)
}

/// Signed signature per scale: positive = sharps, negative = flats.
const SCALE_TABLE: [(PitchClass, Mode, i8); 30] = [
    (pc(C, Natural), Mode::Major, 0),
    (pc(G, Natural), Mode::Major, 1),
    (pc(D, Natural), Mode::Major, 2),
    (pc(A, Natural), Mode::Major, 3),
    (pc(E, Natural), Mode::Major, 4),
    (pc(B, Natural), Mode::Major, 5),
    (pc(F, Sharp), Mode::Major, 6),
    (pc(C, Sharp), Mode::Major, 7),
    (pc(F, Natural), Mode::Major, -1),
    (pc(B, Flat), Mode::Major, -2),
    (pc(E, Flat), Mode::Major, -3),
    (pc(A, Flat), Mode::Major, -4),
    (pc(D, Flat), Mode::Major, -5),
    (pc(G, Flat), Mode::Major, -6),
    (pc(C, Flat), Mode::Major, -7),
    (pc(A, Natural), Mode::Minor, 0),
    (pc(E, Natural), Mode::Minor, 1),
    (pc(B, Natural), Mode::Minor, 2),
    (pc(F, Sharp), Mode::Minor, 3),
    (pc(C, Sharp), Mode::Minor, 4),
    (pc(G, Sharp), Mode::Minor, 5),
    (pc(D, Sharp), Mode::Minor, 6),
    (pc(A, Sharp), Mode::Minor, 7),
    (pc(D, Natural), Mode::Minor, -1),
    (pc(G, Natural), Mode::Minor, -2),
    (pc(C, Natural), Mode::Minor, -3),
    (pc(F, Natural), Mode::Minor, -4),
    (pc(B, Flat), Mode::Minor, -5),
    (pc(E, Flat), Mode::Minor, -6),
    (pc(A, Flat), Mode::Minor, -7),
];

impl Scale {
    pub fn new(root: PitchClass, mode: Mode) -> Result<Self, TheoryError> {
        if SCALE_TABLE.iter().any(|&(r, m, _)| r == root && m == mode) {
            Ok(Scale { root, mode })
        } else {
            Err(TheoryError::InvalidScale(format!("{root} {mode:?}")))
        }
    }

    /// All 30 scales, majors first, each in circle-of-fifths table order.
    pub fn all() -> Vec<Scale> {
        SCALE_TABLE
            .iter()
            .map(|&(root, mode, _)| Scale { root, mode })
            .collect()
    }

    pub fn root(self) -> PitchClass {
        self.root
    }

    pub fn mode(self) -> Mode {
        self.mode
    }

    fn signed_signature(self) -> i8 {
        SCALE_TABLE
            .iter()
            .find(|&&(r, m, _)| r == self.root && m == self.mode)
            .map(|&(_, _, s)| s)
            .expect("scale constructed through Scale::new")
    }

    /// Root through seventh degree, one pitch class per letter.
    pub fn notes(self) -> [PitchClass; 7] {
        let pattern = self.mode.pattern();
        let root_semitone = self.root.letter.natural_semitone() + self.root.accidental.offset();
        std::array::from_fn(|i| {
            let letter = Letter::from_index(self.root.letter.index() + i as u8);
            let target = root_semitone + pattern[i];
            let offset = (target - letter.natural_semitone() + 6).rem_euclid(12) - 6;
            let accidental = Accidental::from_offset(offset)
                .expect("supported scales never need double accidentals");
            PitchClass::new(letter, accidental)
        })
    }

    pub fn contains(self, class: PitchClass) -> bool {
        self.notes().contains(&class)
    }

    pub fn key_signature(self) -> KeySignature {
        KeySignature::from_signed(self.signed_signature())
    }

    /// The triad on `degree` (1-based) built from scale tones only.
    pub fn triad(self, degree: u8) -> Result<Chord, TheoryError> {
        Chord::new(self, degree)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Major => "major",
            Mode::Minor => "minor",
        };
        write!(f, "{} {}", self.root, mode)
    }
}

impl FromStr for Scale {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || TheoryError::InvalidScale(s.to_string());
        let (root, mode) = s.trim().split_once(' ').ok_or_else(invalid)?;
        let mode = match mode.trim().to_ascii_lowercase().as_str() {
            "major" => Mode::Major,
            "minor" => Mode::Minor,
            _ => return Err(invalid()),
        };
        let root: PitchClass = root.parse().map_err(|_| invalid())?;
        Scale::new(root, mode)
    }
}

impl TryFrom<String> for Scale {
    type Error = TheoryError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Scale> for String {
    fn from(s: Scale) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureKind {
    Sharps,
    Flats,
    None,
}

const SHARP_ORDER: [Letter; 7] = [F, C, G, D, A, E, B];
const FLAT_ORDER: [Letter; 7] = [B, E, A, D, G, C, F];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeySignature {
    pub kind: SignatureKind,
    pub count: u8,
    pub altered_letters: Vec<Letter>,
}

impl KeySignature {
    fn from_signed(signed: i8) -> Self {
        let count = signed.unsigned_abs();
        let (kind, order) = match signed {
            0 => (SignatureKind::None, &SHARP_ORDER),
            s if s > 0 => (SignatureKind::Sharps, &SHARP_ORDER),
            _ => (SignatureKind::Flats, &FLAT_ORDER),
        };
        KeySignature {
            kind,
            count,
            altered_letters: order[..count as usize].to_vec(),
        }
    }

    /// Positive for sharps, negative for flats.
    pub fn signed(&self) -> i8 {
        match self.kind {
            SignatureKind::Flats => -(self.count as i8),
            _ => self.count as i8,
        }
    }

    pub fn altered_classes(&self) -> Vec<PitchClass> {
        let accidental = match self.kind {
            SignatureKind::Sharps => Sharp,
            SignatureKind::Flats => Flat,
            SignatureKind::None => Natural,
        };
        self.altered_letters
            .iter()
            .map(|&l| PitchClass::new(l, accidental))
            .collect()
    }
}

impl fmt::Display for KeySignature {
    /// `2 sharps (F#, C#)`, `1 flat (Bb)` or `no sharps or flats`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match (self.kind, self.count) {
            (SignatureKind::None, _) | (_, 0) => return f.write_str("no sharps or flats"),
            (SignatureKind::Sharps, 1) => "sharp",
            (SignatureKind::Sharps, _) => "sharps",
            (SignatureKind::Flats, 1) => "flat",
            (SignatureKind::Flats, _) => "flats",
        };
        let names: Vec<String> = self.altered_classes().iter().map(|c| c.to_string()).collect();
        write!(f, "{} {} ({})", self.count, word, names.join(", "))
    }
}

/// Simple meter with a quarter-note beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TimeSignature {
    numerator: u8,
}

impl TimeSignature {
    pub const DENOMINATOR: u8 = 4;

    pub fn new(numerator: u8) -> Result<Self, TheoryError> {
        if (2..=4).contains(&numerator) {
            Ok(TimeSignature { numerator })
        } else {
            Err(TheoryError::BadTimeSignature(numerator))
        }
    }

    pub fn numerator(self) -> u8 {
        self.numerator
    }

    pub fn bins_per_bar(self) -> u32 {
        self.numerator as u32 * 4
    }
}

impl fmt::Display for TimeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, Self::DENOMINATOR)
    }
}

impl FromStr for TimeSignature {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = s
            .trim()
            .split_once('/')
            .ok_or(TheoryError::BadTimeSignature(0))?;
        let num: u8 = num.trim().parse().map_err(|_| TheoryError::BadTimeSignature(0))?;
        if den.trim() != "4" {
            return Err(TheoryError::BadTimeSignature(num));
        }
        TimeSignature::new(num)
    }
}

impl TryFrom<String> for TimeSignature {
    type Error = TheoryError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<TimeSignature> for String {
    fn from(t: TimeSignature) -> String {
        t.to_string()
    }
}

/// A written note value: reciprocal base (1 = whole … 16 = sixteenth) plus
/// up to two dots. Only values spanning a whole number of bins exist.
///
/// Text form is the reciprocal followed by one `.` per dot, e.g. `8.`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NoteValue {
    base: u8,
    dots: u8,
}

pub const WHOLE: NoteValue = NoteValue { base: 1, dots: 0 };
pub const HALF: NoteValue = NoteValue { base: 2, dots: 0 };
pub const QUARTER: NoteValue = NoteValue { base: 4, dots: 0 };
pub const EIGHTH: NoteValue = NoteValue { base: 8, dots: 0 };
pub const SIXTEENTH: NoteValue = NoteValue { base: 16, dots: 0 };

impl NoteValue {
    pub fn new(base: u8, dots: u8) -> Result<Self, TheoryError> {
        let err = TheoryError::UnconstructibleDuration { base, dots };
        if ![1, 2, 4, 8, 16].contains(&base) || dots > 2 {
            return Err(err);
        }
        // units·(2 − 2^−dots) must be integral: units ≥ 2^dots.
        let units = 16 / base as u32;
        if !units.is_multiple_of(1 << dots) {
            return Err(err);
        }
        Ok(NoteValue { base, dots })
    }

    pub fn base(self) -> u8 {
        self.base
    }

    pub fn dots(self) -> u8 {
        self.dots
    }

    /// Length in sixteenth-note bins.
    pub fn bins(self) -> u32 {
        let units = 16 / self.base as u32;
        units * ((2 << self.dots) - 1) / (1 << self.dots)
    }

    /// Eighths and shorter carry beams when grouped.
    pub fn is_beamable(self) -> bool {
        self.base >= 8
    }

    /// The unique value spanning `bins` sixteenths, if one exists.
    pub fn representable(bins: u32) -> Result<Option<NoteValue>, TheoryError> {
        if !(1..=16).contains(&bins) {
            return Err(TheoryError::BinsOutOfRange(bins));
        }
        let found = [1u8, 2, 4, 8, 16]
            .iter()
            .flat_map(|&base| (0..=2).map(move |dots| (base, dots)))
            .filter_map(|(base, dots)| NoteValue::new(base, dots).ok())
            .find(|v| v.bins() == bins);
        Ok(found)
    }
}

impl fmt::Display for NoteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for _ in 0..self.dots {
            f.write_str(".")?;
        }
        Ok(())
    }
}

impl FromStr for NoteValue {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim_end_matches('.');
        let dots = (s.len() - digits.len()) as u8;
        let base: u8 = digits
            .parse()
            .map_err(|_| TheoryError::UnconstructibleDuration { base: 0, dots })?;
        NoteValue::new(base, dots)
    }
}

impl TryFrom<String> for NoteValue {
    type Error = TheoryError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<NoteValue> for String {
    fn from(v: NoteValue) -> String {
        v.to_string()
    }
}

/// Bin count of a note value; free-function form of [`NoteValue::bins`].
pub fn bins(value: NoteValue) -> u32 {
    value.bins()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordQuality {
    Major,
    Minor,
    Diminished,
    Augmented,
}

/// A diatonic triad on a scale degree. Persisted as `{scale, degree}`;
/// the tones are always recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ChordRecord", into = "ChordRecord")]
pub struct Chord {
    scale: Scale,
    degree: u8,
    tones: [PitchClass; 3],
}

#[derive(Serialize, Deserialize)]
struct ChordRecord {
    scale: Scale,
    degree: u8,
}

impl TryFrom<ChordRecord> for Chord {
    type Error = TheoryError;

    fn try_from(r: ChordRecord) -> Result<Self, Self::Error> {
        Chord::new(r.scale, r.degree)
    }
}

impl From<Chord> for ChordRecord {
    fn from(c: Chord) -> Self {
        ChordRecord {
            scale: c.scale,
            degree: c.degree,
        }
    }
}

impl Chord {
    pub fn new(scale: Scale, degree: u8) -> Result<Self, TheoryError> {
        if !(1..=7).contains(&degree) {
            return Err(TheoryError::DegreeOutOfRange(degree));
        }
        let notes = scale.notes();
        let d = (degree - 1) as usize;
        let tones = [notes[d], notes[(d + 2) % 7], notes[(d + 4) % 7]];
        Ok(Chord {
            scale,
            degree,
            tones,
        })
    }

    pub fn scale(self) -> Scale {
        self.scale
    }

    pub fn degree(self) -> u8 {
        self.degree
    }

    pub fn tones(self) -> [PitchClass; 3] {
        self.tones
    }

    pub fn root(self) -> PitchClass {
        self.tones[0]
    }

    pub fn quality(self) -> ChordQuality {
        let [r, t, f] = self.tones.map(|p| p.semitone());
        let lower = (t - r).rem_euclid(12);
        let upper = (f - t).rem_euclid(12);
        match (lower, upper) {
            (4, 3) => ChordQuality::Major,
            (3, 4) => ChordQuality::Minor,
            (3, 3) => ChordQuality::Diminished,
            (4, 4) => ChordQuality::Augmented,
            _ => unreachable!("tertian stacks only yield 3- or 4-semitone thirds"),
        }
    }

    /// Short lead-sheet label, e.g. `C`, `F#m`, `Bdim`.
    pub fn label(self) -> String {
        let suffix = match self.quality() {
            ChordQuality::Major => "",
            ChordQuality::Minor => "m",
            ChordQuality::Diminished => "dim",
            ChordQuality::Augmented => "aug",
        };
        format!("{}{}", self.root(), suffix)
    }

    /// Spoken name, e.g. `D minor chord`.
    pub fn name(self) -> String {
        let quality = match self.quality() {
            ChordQuality::Major => "major",
            ChordQuality::Minor => "minor",
            ChordQuality::Diminished => "diminished",
            ChordQuality::Augmented => "augmented",
        };
        format!("{} {} chord", self.root(), quality)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clef {
    Treble,
    Bass,
}

impl Clef {
    /// Inclusive pitch range: treble C4..=F#6, bass Ab1..=B3. The ranges
    /// partition the global range by chromatic position.
    pub fn pitch_range(self) -> (Pitch, Pitch) {
        match self {
            Clef::Treble => (
                Pitch { class: pc(C, Natural), octave: 4 },
                Pitch { class: pc(F, Sharp), octave: 6 },
            ),
            Clef::Bass => (
                Pitch { class: pc(A, Flat), octave: 1 },
                Pitch { class: pc(B, Natural), octave: 3 },
            ),
        }
    }

    pub fn contains(self, pitch: Pitch) -> bool {
        let (lo, hi) = self.pitch_range();
        (lo.position()..=hi.position()).contains(&pitch.position())
    }

    /// Every octave realization of `class` inside this clef's range, low to high.
    pub fn realizations(self, class: PitchClass) -> Vec<Pitch> {
        (0..=8)
            .map(|octave| Pitch { class, octave })
            .filter(|&p| self.contains(p))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Clef::Treble => "treble",
            Clef::Bass => "bass",
        }
    }
}

impl fmt::Display for Clef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
