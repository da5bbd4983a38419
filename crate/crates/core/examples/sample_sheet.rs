// Sample one sheet and look at its structure.
//
// ```bash
// cargo run --example sample_sheet
// ```

use scoresynth::codec::encode_kernplus;
use scoresynth::ir::validate;
use scoresynth::sampler::{generate_sheet, GenConfig};

pub fn run_example() -> anyhow::Result<()> {
    let config = GenConfig::new(7, 1);
    let doc = generate_sheet(&config, 0)?;
    let m = &doc.meta;
    println!("sheet {}", doc.sheet_id);
    println!("  \"{}\" by {}", m.title, m.composer);
    println!(
        "  {} in {} ({}), {} BPM, {:?} staff, {} bars",
        m.time_signature,
        m.scale,
        m.scale.key_signature(),
        m.tempo_bpm,
        m.clef_config,
        m.bar_count
    );
    for bar in doc.bars.iter().take(3) {
        println!("  bar {} over {}:", bar.index, bar.chord.label());
        for (clef, notes) in &bar.voices {
            println!("    {clef:<6} {}", encode_kernplus(notes));
        }
    }
    let violations = validate(&doc);
    anyhow::ensure!(violations.is_empty(), "invalid sheet: {violations:?}");
    println!("  {} notes, no violations", doc.note_count());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
