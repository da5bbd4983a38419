// A whole corpus directory: generate, render (when TeX is installed), QA,
// statistics and evaluation.
//
// ```bash
// cargo run --example corpus_pipeline
// ```

use scoresynth::corpus::{read_manifest, run, Command, JudgeKind, RunConfig};
use scoresynth::engrave::Toolchain;
use scoresynth::eval::Prediction;

pub fn run_example() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let cfg = RunConfig {
        seed: 42,
        sheets: 6,
        dpi: 150,
        split_ratio: 0.5,
        skip_render: Toolchain::probe().is_err(),
        ..RunConfig::new(dir.path())
    };
    if cfg.skip_render {
        println!("no TeX toolchain found; skipping render");
    }
    println!("{}", run(Command::Pipeline, &cfg)?);

    let manifest = read_manifest(dir.path())?;
    let predictions: String = manifest
        .records
        .iter()
        .map(|r| Prediction {
            qa_id: r.qa.id.clone(),
            answer: r.qa.answer.clone(),
            model: Some("oracle".into()),
        })
        .map(|p| serde_json::to_string(&p).map(|s| s + "\n"))
        .collect::<Result<_, _>>()?;
    let path = dir.path().join("predictions.jsonl");
    std::fs::write(&path, predictions)?;
    let eval = RunConfig {
        predictions: Some(path),
        judge: JudgeKind::Stub,
        ..cfg
    };
    println!("{}", run(Command::Eval, &eval)?);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
