// Scoring predictions with partial normalized Levenshtein similarity.
//
// ```bash
// cargo run --example pnls_scoring
// ```

use scoresynth::eval::{evaluate_predictions, pnls, Prediction, Scope};
use scoresynth::qa::{generate_sheet_qa, split_manifest, NoteFormat};
use scoresynth::sampler::{generate_corpus, GenConfig};

pub fn run_example() -> anyhow::Result<()> {
    for (gt, pred) in [
        ("abc", "abc"),
        ("abc", "the answer is abc."),
        ("abc", "abd"),
        ("4/4", "  4/4 "),
        ("120 BPM", "around 112 bpm"),
    ] {
        println!("pnls({gt:?}, {pred:?}) = {:.3}", pnls(gt, pred)?);
    }

    let docs = generate_corpus(&GenConfig::new(5, 10))?;
    let pairs: Vec<_> = docs.iter().flat_map(|d| generate_sheet_qa(d, NoteFormat::Json)).collect();
    let manifest = split_manifest(pairs, 0.0, 5)?;
    // A model that echoes every other answer and garbles the rest.
    let predictions: Vec<Prediction> = manifest
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| Prediction {
            qa_id: r.qa.id.clone(),
            answer: if i % 2 == 0 { r.qa.answer.clone() } else { r.qa.answer.chars().rev().collect() },
            model: Some("half-right".into()),
        })
        .collect();
    let report = evaluate_predictions(&manifest, &predictions, Scope::Test)?;
    print!("{report}");
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
