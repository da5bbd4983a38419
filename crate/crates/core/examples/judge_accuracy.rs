// Binary semantic judgments through the pluggable judge client.
//
// Runs offline with the stub judge. Set `SCORESYNTH_JUDGE_URL` (and
// optionally `SCORESYNTH_JUDGE_API_KEY`, `SCORESYNTH_JUDGE_MODEL`) to also
// query a chat-completion endpoint.
//
// ```bash
// cargo run --example judge_accuracy
// ```

use std::sync::Arc;
use std::time::Duration;

use scoresynth::eval::judge::{HttpJudge, JudgeClient, JudgePool, StubJudge, ENV_URL};
use scoresynth::eval::{evaluate_with_judge, Prediction, Scope};
use scoresynth::qa::{generate_sheet_qa, split_manifest, NoteFormat};
use scoresynth::sampler::{generate_sheet, GenConfig};

pub fn run_example() -> anyhow::Result<()> {
    let doc = generate_sheet(&GenConfig::new(8, 1), 0)?;
    let manifest = split_manifest(generate_sheet_qa(&doc, NoteFormat::Json), 0.0, 0)?;
    let predictions: Vec<Prediction> = manifest
        .records
        .iter()
        .map(|r| Prediction {
            qa_id: r.qa.id.clone(),
            answer: if r.qa.family == scoresynth::qa::Family::Omr { "[]".into() } else { r.qa.answer.to_uppercase() },
            model: Some("shouty".into()),
        })
        .collect();

    let mut clients: Vec<(&str, Arc<dyn JudgeClient>)> = vec![("stub", Arc::new(StubJudge))];
    if std::env::var(ENV_URL).is_ok() {
        clients.push(("http", Arc::new(HttpJudge::from_env()?)));
    }
    for (name, client) in clients {
        let pool = JudgePool::new(client)
            .with_max_in_flight(4)
            .with_min_interval(Duration::from_millis(5));
        let report = evaluate_with_judge(&manifest, &predictions, Scope::Test, &pool)?;
        println!("judge: {name}");
        print!("{report}");
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
