// Question-answer pairs for a small corpus, split 90/10 by sheet.
//
// ```bash
// cargo run --example qa_manifest
// ```

use std::collections::BTreeMap;

use scoresynth::qa::{check_answer, generate_sheet_qa, split_manifest, NoteFormat, Split};
use scoresynth::sampler::{generate_corpus, GenConfig};

pub fn run_example() -> anyhow::Result<()> {
    let docs = generate_corpus(&GenConfig::new(2024, 20))?;
    let pairs: Vec<_> = docs.iter().flat_map(|d| generate_sheet_qa(d, NoteFormat::KernPlus)).collect();
    for p in pairs.iter().filter(|p| p.sheet_id == docs[0].sheet_id).take(8) {
        println!("[{}] {}\n    -> {}", p.family.name(), p.question, p.answer);
    }

    let manifest = split_manifest(pairs, 0.9, 2024)?;
    for r in &manifest.records {
        let doc = docs.iter().find(|d| d.sheet_id == r.qa.sheet_id).expect("sheet exists");
        check_answer(doc, &r.qa).map_err(anyhow::Error::msg)?;
    }
    let mut per_split: BTreeMap<&str, usize> = BTreeMap::new();
    for s in manifest.sheet_split().values() {
        *per_split.entry(if *s == Split::Train { "train" } else { "test" }).or_default() += 1;
    }
    println!("{} pairs, sheets per split {per_split:?}, all answers match the IR", manifest.records.len());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
