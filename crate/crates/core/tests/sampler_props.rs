use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scoresynth::ir::{deserialize_ir, serialize_ir, validate, NoteEvent};
use scoresynth::sampler::{
    apply_grouping, generate_sheet, sample_bar_rhythm, sample_note_count, split_duration, GenConfig, GroupingMode,
};
use scoresynth::theory::{Pitch, TimeSignature};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_sheets_validate(seed in any::<u64>(), index in 0usize..1000) {
        let doc = generate_sheet(&GenConfig::new(seed, 1000), index).unwrap();
        prop_assert_eq!(validate(&doc), vec![]);
    }

    #[test]
    fn ir_round_trip(seed in any::<u64>(), index in 0usize..1000) {
        let doc = generate_sheet(&GenConfig::new(seed, 1000), index).unwrap();
        prop_assert_eq!(deserialize_ir(&serialize_ir(&doc)).unwrap(), doc);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), index in 0usize..1000) {
        let cfg = GenConfig::new(seed, 1000);
        prop_assert_eq!(generate_sheet(&cfg, index).unwrap(), generate_sheet(&cfg, index).unwrap());
    }

    #[test]
    fn bars_hold_exactly_their_bins(seed in any::<u64>(), index in 0usize..1000) {
        let doc = generate_sheet(&GenConfig::new(seed, 1000), index).unwrap();
        let bins = 4 * doc.meta.time_signature.numerator() as u32;
        for bar in &doc.bars {
            for notes in bar.voices.values() {
                prop_assert_eq!(notes.iter().map(NoteEvent::bins).sum::<u32>(), bins);
            }
        }
    }

    /// Splitting and grouping only add tied continuations: every sampled
    /// note ends exactly one tie chain.
    #[test]
    fn written_notes_never_fewer_than_sampled(seed in any::<u64>(), numerator in 2u8..=4, grouped in any::<bool>()) {
        let ts = TimeSignature::new(numerator).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = sample_note_count(&mut rng, ts);
        let pitch: Pitch = "C4".parse().unwrap();
        let mut notes = Vec::new();
        let mut onset = 0;
        for len in sample_bar_rhythm(&mut rng, ts, n).unwrap() {
            for piece in split_duration(len).unwrap() {
                notes.push(NoteEvent { pitch, value: piece.value, tie_to_next: piece.tie_to_next, beam_group: None, onset_bin: onset });
                onset += piece.value.bins();
            }
        }
        let mode = if grouped { GroupingMode::BeatGrouped } else { GroupingMode::Separated };
        let written = apply_grouping(notes, mode, ts).unwrap();
        prop_assert!(written.len() >= n as usize);
        prop_assert_eq!(written.iter().filter(|w| !w.tie_to_next).count(), n as usize);
    }
}

#[test]
fn split_duration_is_exhaustively_sound() {
    for bins in 1..=16 {
        let pieces = split_duration(bins).unwrap();
        assert_eq!(pieces.iter().map(|p| p.value.bins()).sum::<u32>(), bins);
        assert!(!pieces.last().unwrap().tie_to_next);
        assert!(pieces[..pieces.len() - 1].iter().all(|p| p.tie_to_next));
    }
    assert!(split_duration(0).is_err());
    assert!(split_duration(17).is_err());
}
