// MusiXTeX source for a sheet; with a TeX installation, the fitted PDF and
// page image too.
//
// ```bash
// cargo run --example engrave_sheet
// ```

use scoresynth::engrave::{emit_musixtex, engrave_sheet, png_dimensions, Toolchain};
use scoresynth::sampler::{generate_sheet, GenConfig};

pub fn run_example() -> anyhow::Result<()> {
    let doc = generate_sheet(&GenConfig::new(11, 1), 0)?;
    let tex = emit_musixtex(&doc)?;
    for line in tex.lines().take_while(|l| !l.starts_with("% bar 2")) {
        println!("{line}");
    }
    println!("... ({} lines)", tex.lines().count());

    match Toolchain::probe() {
        Ok(toolchain) => {
            let out = tempfile::tempdir()?;
            let (fitted, result) = engrave_sheet(&toolchain, &doc, out.path(), 150)?;
            let (w, h) = png_dimensions(&result.image_paths[0])?;
            println!(
                "engraved {}: {} page, {} of {} bars after {} compiles, image {w}x{h}",
                fitted.sheet_id,
                result.page_count,
                result.final_bar_count,
                doc.meta.bar_count,
                result.fit_iterations
            );
        }
        Err(e) => println!("skipping PDF and PNG output: {e}"),
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
