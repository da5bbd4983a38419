//! Text codecs for note sequences.
//!
//! `kern+` writes one token per note: an optional `_` (tie starts here), a
//! duration code `w h q e s`, zero to two `.` and the pitch with octave:
//! `qC4`, `e.F#5`, `_hG3 sG3`.
//!
//! The JSON form is a compact array of `{"pitch":…,"duration":…}` objects,
//! duration written as the reciprocal value plus dots (`"4."`) and a tie
//! start marked by `_` on the pitch (`"_E5"`).
//!
//! Both codecs also have partial variants encoding only durations or only
//! pitches, used for single-attribute questions. In a partial JSON object
//! the tie marker goes on the duration; pitch-only forms carry no ties.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::NoteEvent;
use crate::theory::{NoteValue, Pitch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("token {index}: unknown duration code in {token:?}")]
    UnknownDuration { index: usize, token: String },
    #[error("token {index}: bad pitch or octave in {token:?}")]
    BadPitch { index: usize, token: String },
    #[error("token {index}: tie to a note of different pitch")]
    TieMismatch { index: usize },
    #[error("token {index}: tie on the last note has no successor")]
    DanglingTie { index: usize },
    #[error("token {index}: missing field {field}")]
    MissingField { index: usize, field: &'static str },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Which attributes of a note an encoding carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteFields {
    Both,
    Duration,
    Pitch,
}

/// One decoded note of a possibly partial encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialNote {
    pub pitch: Option<Pitch>,
    pub value: Option<NoteValue>,
    pub tie_to_next: bool,
}

impl PartialNote {
    /// Projection of a full note onto `fields`.
    pub fn project(note: &NoteEvent, fields: NoteFields) -> PartialNote {
        PartialNote {
            pitch: (fields != NoteFields::Duration).then_some(note.pitch),
            value: (fields != NoteFields::Pitch).then_some(note.value),
            tie_to_next: fields != NoteFields::Pitch && note.tie_to_next,
        }
    }
}

fn duration_code(value: NoteValue) -> char {
    match value.base() {
        1 => 'w',
        2 => 'h',
        4 => 'q',
        8 => 'e',
        16 => 's',
        _ => unreachable!("NoteValue bases are 1, 2, 4, 8, 16"),
    }
}

fn code_base(c: char) -> Option<u8> {
    match c {
        'w' => Some(1),
        'h' => Some(2),
        'q' => Some(4),
        'e' => Some(8),
        's' => Some(16),
        _ => None,
    }
}

fn kern_duration(value: NoteValue) -> String {
    let mut s = String::new();
    s.push(duration_code(value));
    for _ in 0..value.dots() {
        s.push('.');
    }
    s
}

fn kern_token(note: &PartialNote) -> String {
    let mut s = String::new();
    if note.tie_to_next {
        s.push('_');
    }
    if let Some(v) = note.value {
        s.push_str(&kern_duration(v));
    }
    if let Some(p) = note.pitch {
        s.push_str(&p.to_string());
    }
    s
}

pub fn encode_kernplus(notes: &[NoteEvent]) -> String {
    encode_kernplus_fields(notes, NoteFields::Both)
}

pub fn encode_kernplus_fields(notes: &[NoteEvent], fields: NoteFields) -> String {
    notes
        .iter()
        .map(|n| kern_token(&PartialNote::project(n, fields)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_kern_token(index: usize, token: &str, fields: NoteFields) -> Result<PartialNote, CodecError> {
    let dur_err = || CodecError::UnknownDuration {
        index,
        token: token.to_string(),
    };
    let (tie, rest) = match token.strip_prefix('_') {
        Some(rest) if fields != NoteFields::Pitch => (true, rest),
        Some(_) => return Err(CodecError::BadPitch { index, token: token.to_string() }),
        None => (false, token),
    };
    let (value, rest) = if fields == NoteFields::Pitch {
        (None, rest)
    } else {
        let mut chars = rest.chars();
        let base = chars.next().and_then(code_base).ok_or_else(dur_err)?;
        let after = chars.as_str();
        let body = after.trim_start_matches('.');
        let dots = (after.len() - body.len()) as u8;
        let value = NoteValue::new(base, dots).map_err(|_| dur_err())?;
        (Some(value), body)
    };
    let pitch = if fields == NoteFields::Duration {
        if !rest.is_empty() {
            return Err(dur_err());
        }
        None
    } else {
        Some(rest.parse::<Pitch>().map_err(|_| CodecError::BadPitch {
            index,
            token: token.to_string(),
        })?)
    };
    Ok(PartialNote {
        pitch,
        value,
        tie_to_next: tie,
    })
}

fn check_ties(notes: &[PartialNote]) -> Result<(), CodecError> {
    for (i, n) in notes.iter().enumerate() {
        if !n.tie_to_next {
            continue;
        }
        match notes.get(i + 1) {
            None => return Err(CodecError::DanglingTie { index: i + 1 }),
            Some(next) if n.pitch.is_some() && next.pitch != n.pitch => {
                return Err(CodecError::TieMismatch { index: i + 1 })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Decodes a partial kern+ string. Token indices in errors are 1-based.
pub fn decode_kernplus_fields(text: &str, fields: NoteFields) -> Result<Vec<PartialNote>, CodecError> {
    let notes = text
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| parse_kern_token(i + 1, tok, fields))
        .collect::<Result<Vec<_>, _>>()?;
    check_ties(&notes)?;
    Ok(notes)
}

fn into_events(notes: Vec<PartialNote>) -> Vec<NoteEvent> {
    let mut onset = 0;
    notes
        .into_iter()
        .map(|n| {
            let value = n.value.expect("full decode carries durations");
            let event = NoteEvent {
                pitch: n.pitch.expect("full decode carries pitches"),
                value,
                tie_to_next: n.tie_to_next,
                beam_group: None,
                onset_bin: onset,
            };
            onset += value.bins();
            event
        })
        .collect()
}

/// Decodes kern+ into events with onsets counted from bin 0 and no beams.
pub fn decode_kernplus(text: &str) -> Result<Vec<NoteEvent>, CodecError> {
    decode_kernplus_fields(text, NoteFields::Both).map(into_events)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNote {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration: Option<String>,
}

pub fn encode_json_notes(notes: &[NoteEvent]) -> String {
    encode_json_fields(notes, NoteFields::Both)
}

pub fn encode_json_fields(notes: &[NoteEvent], fields: NoteFields) -> String {
    let objects: Vec<JsonNote> = notes
        .iter()
        .map(|n| {
            let p = PartialNote::project(n, fields);
            let tie = if p.tie_to_next { "_" } else { "" };
            let (pitch, duration) = match (p.pitch, p.value) {
                (Some(pitch), Some(v)) => (Some(format!("{tie}{pitch}")), Some(v.to_string())),
                (None, Some(v)) => (None, Some(format!("{tie}{v}"))),
                (Some(pitch), None) => (Some(pitch.to_string()), None),
                (None, None) => (None, None),
            };
            JsonNote { pitch, duration }
        })
        .collect();
    serde_json::to_string(&objects).expect("plain strings serialize")
}

pub fn decode_json_fields(text: &str, fields: NoteFields) -> Result<Vec<PartialNote>, CodecError> {
    let objects: Vec<JsonNote> = serde_json::from_str(text).map_err(|e| CodecError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let notes = objects
        .into_iter()
        .enumerate()
        .map(|(i, obj)| {
            let index = i + 1;
            let mut tie = false;
            let value = if fields == NoteFields::Pitch {
                None
            } else {
                let raw = obj.duration.ok_or(CodecError::MissingField {
                    index,
                    field: "duration",
                })?;
                let raw = match raw.strip_prefix('_') {
                    Some(rest) if fields == NoteFields::Duration => {
                        tie = true;
                        rest.to_string()
                    }
                    _ => raw,
                };
                Some(raw.parse::<NoteValue>().map_err(|_| CodecError::UnknownDuration {
                    index,
                    token: raw.clone(),
                })?)
            };
            let pitch = if fields == NoteFields::Duration {
                None
            } else {
                let raw = obj.pitch.ok_or(CodecError::MissingField {
                    index,
                    field: "pitch",
                })?;
                let raw = match raw.strip_prefix('_') {
                    Some(rest) if fields == NoteFields::Both => {
                        tie = true;
                        rest.to_string()
                    }
                    _ => raw,
                };
                Some(raw.parse::<Pitch>().map_err(|_| CodecError::BadPitch {
                    index,
                    token: raw.clone(),
                })?)
            };
            Ok(PartialNote {
                pitch,
                value,
                tie_to_next: tie,
            })
        })
        .collect::<Result<Vec<_>, CodecError>>()?;
    check_ties(&notes)?;
    Ok(notes)
}

pub fn decode_json_notes(text: &str) -> Result<Vec<NoteEvent>, CodecError> {
    decode_json_fields(text, NoteFields::Both).map(into_events)
}
