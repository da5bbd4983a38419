mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scoresynth::corpus::{read_info, read_manifest, IR_FILE, MANIFEST_FILE, SHEETS_DIR};

fn scoresynth(corpus: &Path, args: &[&str]) -> Command {
    let dir = common::fake_toolchain_dir();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scoresynth"));
    cmd.arg("--corpus")
        .arg(corpus)
        .args(["--dpi", "40", "--workers", "1"])
        .args(args)
        .env("RUST_LOG", "warn")
        .env("SCORESYNTH_TEX", dir.join("pdftex"))
        .env("SCORESYNTH_MUSIXFLX", dir.join("musixflx"))
        .env("SCORESYNTH_RASTERIZER", dir.join("pdftoppm"));
    cmd
}

fn ok(mut cmd: Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(mut cmd: Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(!out.status.success());
    out
}

#[test]
fn generate_twice_gives_identical_ir() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        ok(scoresynth(dir, &["generate", "--sheets", "10", "--seed", "42"]));
    }
    let ir_a = fs::read(a.path().join(IR_FILE)).unwrap();
    assert_eq!(ir_a, fs::read(b.path().join(IR_FILE)).unwrap());
    assert_eq!(String::from_utf8(ir_a).unwrap().lines().count(), 10);
    let info = read_info(a.path()).unwrap();
    assert_eq!((info.seed, info.sheets), (42, 10));
}

#[test]
fn rerunning_generate_and_qa_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let gen = ["generate", "--sheets", "4", "--seed", "3"];
    ok(scoresynth(dir.path(), &gen));
    let ir = fs::read(dir.path().join(IR_FILE)).unwrap();
    assert!(ok(scoresynth(dir.path(), &gen)).contains("already generated"));
    assert_eq!(fs::read(dir.path().join(IR_FILE)).unwrap(), ir);

    ok(scoresynth(dir.path(), &["qa", "--seed", "3"]));
    let manifest = fs::read(dir.path().join(MANIFEST_FILE)).unwrap();
    ok(scoresynth(dir.path(), &["qa", "--seed", "3"]));
    assert_eq!(fs::read(dir.path().join(MANIFEST_FILE)).unwrap(), manifest);
}

#[test]
fn generate_refuses_a_different_corpus_in_place() {
    let dir = tempfile::tempdir().unwrap();
    ok(scoresynth(dir.path(), &["generate", "--sheets", "2", "--seed", "1"]));
    let out = fails(scoresynth(dir.path(), &["generate", "--sheets", "2", "--seed", "2"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_renders_every_sheet_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    ok(scoresynth(dir.path(), &["pipeline", "--sheets", "5", "--seed", "9"]));
    let sheets = dir.path().join(SHEETS_DIR);
    let pngs = fs::read_dir(&sheets)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "png"))
        .count();
    assert_eq!(pngs, 5);
    let manifest = read_manifest(dir.path()).unwrap();
    let with_qa: std::collections::BTreeSet<_> = manifest.records.iter().map(|r| r.qa.sheet_id.clone()).collect();
    assert_eq!(with_qa.len(), 5);
    assert!(dir.path().join("stats.json").is_file());

    let again = ok(scoresynth(dir.path(), &["render", "--sheets", "5", "--seed", "9"]));
    assert!(again.contains("rendered 0 sheets (5 already complete)"), "{again}");

    // Deleting one PNG re-renders exactly that sheet.
    let png = fs::read_dir(&sheets)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "png"))
        .unwrap();
    fs::remove_file(png).unwrap();
    let resumed = ok(scoresynth(dir.path(), &["render", "--sheets", "5", "--seed", "9"]));
    assert!(resumed.contains("rendered 1 sheets (4 already complete)"), "{resumed}");
}

#[test]
fn missing_toolchain_is_an_environment_error_naming_the_program() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = scoresynth(dir.path(), &["pipeline", "--sheets", "2"]);
    cmd.env("SCORESYNTH_MUSIXFLX", "no-such-musixflx");
    let out = fails(cmd);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no-such-musixflx"), "{stderr}");
    assert!(stderr.contains("SCORESYNTH_MUSIXFLX"), "{stderr}");
    assert!(!dir.path().join(IR_FILE).exists());
}

#[test]
fn commands_out_of_order_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = fails(scoresynth(dir.path(), &["qa"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scoresynth generate"));
}

#[test]
fn eval_scores_a_predictions_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(scoresynth(dir.path(), &["pipeline", "--no-render", "--sheets", "10", "--seed", "5"]));
    let manifest = read_manifest(dir.path()).unwrap();
    let preds: String = manifest
        .records
        .iter()
        .map(|r| serde_json::json!({"qa_id": r.qa.id, "answer": r.qa.answer}).to_string() + "\n")
        .collect();
    let path = dir.path().join("preds.jsonl");
    fs::write(&path, preds).unwrap();
    let report = ok(scoresynth(
        dir.path(),
        &["eval", "--predictions", path.to_str().unwrap(), "--judge", "stub"],
    ));
    assert!(report.contains("100.0"), "{report}");
    assert!(dir.path().join("eval.json").is_file());

    fs::write(&path, "{\"qa_id\": \"nope\", \"answer\": \"x\"}\n").unwrap();
    let out = fails(scoresynth(dir.path(), &["eval", "--predictions", path.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(5));
}
