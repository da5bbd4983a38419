// The two note notations: compact kern+ tokens and JSON records.
//
// ```bash
// cargo run --example note_codecs
// ```

use scoresynth::codec::{
    decode_json_notes, decode_kernplus, decode_kernplus_fields, encode_json_fields, encode_json_notes,
    encode_kernplus, NoteFields,
};
use scoresynth::sampler::{generate_sheet, GenConfig};
use scoresynth::theory::Clef;

pub fn run_example() -> anyhow::Result<()> {
    let doc = generate_sheet(&GenConfig::new(3, 1), 0)?;
    let bar = &doc.bars[1];
    let clef = *bar.voices.keys().next().unwrap_or(&Clef::Treble);
    let notes = bar.voice(clef).unwrap_or_default();

    let kern = encode_kernplus(notes);
    let json = encode_json_notes(notes);
    println!("kern+ ({} chars): {kern}", kern.len());
    println!("JSON  ({} chars): {json}", json.len());

    let strip = |v: Vec<scoresynth::ir::NoteEvent>| {
        v.into_iter().map(|n| (n.pitch, n.value, n.tie_to_next)).collect::<Vec<_>>()
    };
    let original = strip(notes.to_vec());
    anyhow::ensure!(strip(decode_kernplus(&kern)?) == original);
    anyhow::ensure!(strip(decode_json_notes(&json)?) == original);
    println!("both decode back to the same {} notes", notes.len());

    println!("durations only: {}", encode_json_fields(notes, NoteFields::Duration));
    let pitches = decode_kernplus_fields(&scoresynth::codec::encode_kernplus_fields(notes, NoteFields::Pitch), NoteFields::Pitch)?;
    println!("pitches only:   {:?}", pitches.iter().filter_map(|p| p.pitch).map(|p| p.to_string()).collect::<Vec<_>>());

    match decode_kernplus("qC4 xD4") {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => anyhow::bail!("expected a decode error"),
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
