//! Corpus directory orchestration behind the `scoresynth` subcommands.
//!
//! Layout of a corpus directory:
//!
//! ```text
//! corpus.json        seed, sheet count, overrides and artifact versions
//! ir.jsonl           one IR record per sheet (fitted once rendered)
//! sheets/<id>.tex    MusiXTeX source
//! sheets/<id>.pdf    single-page PDF
//! sheets/<id>.png    page image
//! sheets/<id>.done   completion marker with content hashes
//! manifest.jsonl     QA pairs with split assignment
//! stats.json         corpus statistics (also stats.txt)
//! eval.json          last evaluation report
//! ```

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engrave::{engrave_sheet, EngraveError, Toolchain};
use crate::eval::judge::{HttpJudge, JudgeClient, JudgeError, JudgePool, StubJudge};
use crate::eval::{evaluate_predictions, evaluate_with_judge, read_predictions, EvalError, Scope};
use crate::ir::{deserialize_ir, serialize_ir, validate, ScoreDoc, IR_VERSION};
use crate::qa::{compute_stats, generate_sheet_qa, split_manifest, Manifest, NoteFormat, MANIFEST_VERSION};
use crate::sampler::{generate_corpus, GenConfig, Overrides};

pub const CORPUS_VERSION: u32 = 1;
pub const CORPUS_FILE: &str = "corpus.json";
pub const IR_FILE: &str = "ir.jsonl";
pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const SHEETS_DIR: &str = "sheets";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("environment: {0}")]
    Environment(String),
    #[error("compile: {0}")]
    Compile(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io { .. } => 1,
            RunError::Config(_) => 2,
            RunError::Environment(_) => 3,
            RunError::Compile(_) => 4,
            RunError::Parse(_) => 5,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Io { context, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Render,
    Qa,
    Stats,
    Eval,
    Pipeline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JudgeKind {
    #[default]
    None,
    Stub,
    Http,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub seed: u64,
    pub sheets: usize,
    pub overrides: Option<PathBuf>,
    pub dpi: u32,
    pub workers: usize,
    pub split_ratio: f64,
    pub format: NoteFormat,
    pub predictions: Option<PathBuf>,
    pub judge: JudgeKind,
    pub judge_interval: Duration,
    pub scope: Scope,
    /// Pipeline only: stop after QA generation without engraving.
    pub skip_render: bool,
    /// Explicit programs; probed from the environment when absent.
    pub toolchain: Option<Toolchain>,
}

impl RunConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        RunConfig {
            corpus: corpus.into(),
            seed: 0,
            sheets: 10,
            overrides: None,
            dpi: crate::engrave::DEFAULT_DPI,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            split_ratio: crate::qa::DEFAULT_TRAIN_RATIO,
            format: NoteFormat::Json,
            predictions: None,
            judge: JudgeKind::None,
            judge_interval: Duration::ZERO,
            scope: Scope::Test,
            skip_render: false,
            toolchain: None,
        }
    }

    fn check(&self, command: Command) -> Result<(), RunError> {
        if self.corpus.as_os_str().is_empty() {
            return Err(RunError::Config("--corpus must name a directory".into()));
        }
        if self.corpus.exists() && !self.corpus.is_dir() {
            return Err(RunError::Config(format!("{} is not a directory", self.corpus.display())));
        }
        if self.workers == 0 {
            return Err(RunError::Config("--workers must be at least 1".into()));
        }
        if matches!(command, Command::Generate | Command::Pipeline) && self.sheets == 0 {
            return Err(RunError::Config("--sheets must be at least 1".into()));
        }
        if matches!(command, Command::Render | Command::Pipeline) && self.dpi == 0 {
            return Err(RunError::Config("--dpi must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.split_ratio) {
            return Err(RunError::Config(format!("--split-ratio {} outside 0..=1", self.split_ratio)));
        }
        if let Some(p) = &self.overrides {
            if !p.is_file() {
                return Err(RunError::Config(format!("override file {} not found", p.display())));
            }
        }
        if command == Command::Eval {
            match &self.predictions {
                None => return Err(RunError::Config("eval needs --predictions".into())),
                Some(p) if !p.is_file() => {
                    return Err(RunError::Config(format!("predictions file {} not found", p.display())))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Contents of `corpus.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub version: u32,
    pub ir_version: u32,
    pub manifest_version: u32,
    pub seed: u64,
    pub sheets: usize,
    pub overrides: Overrides,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(io_err(format!("writing {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_err(format!("writing {}", path.display())))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_info(dir: &Path) -> Result<CorpusInfo, RunError> {
    let path = dir.join(CORPUS_FILE);
    let text = fs::read_to_string(&path).map_err(|_| {
        RunError::Config(format!("{} has no {CORPUS_FILE}; run `scoresynth generate` first", dir.display()))
    })?;
    let info: CorpusInfo =
        serde_json::from_str(&text).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))?;
    if info.version > CORPUS_VERSION {
        return Err(RunError::Parse(format!("{} has unsupported version {}", path.display(), info.version)));
    }
    Ok(info)
}

pub fn read_ir_corpus(dir: &Path) -> Result<Vec<ScoreDoc>, RunError> {
    let path = dir.join(IR_FILE);
    let text = fs::read_to_string(&path).map_err(|_| {
        RunError::Config(format!("{} is missing; run `scoresynth generate` first", path.display()))
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| deserialize_ir(l).map_err(|e| RunError::Parse(format!("{}:{}: {e}", path.display(), i + 1))))
        .collect()
}

fn ir_jsonl(docs: &[ScoreDoc]) -> String {
    docs.iter().map(|d| serialize_ir(d) + "\n").collect()
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, RunError> {
    let path = dir.join(MANIFEST_FILE);
    let file = fs::File::open(&path)
        .map_err(|_| RunError::Config(format!("{} is missing; run `scoresynth qa` first", path.display())))?;
    Manifest::read_jsonl(BufReader::new(file)).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))
}

fn generate(cfg: &RunConfig) -> Result<String, RunError> {
    let overrides = match &cfg.overrides {
        Some(p) => Overrides::load(p).map_err(|e| RunError::Config(e.to_string()))?,
        None => Overrides::default(),
    };
    let info = CorpusInfo {
        version: CORPUS_VERSION,
        ir_version: IR_VERSION,
        manifest_version: MANIFEST_VERSION,
        seed: cfg.seed,
        sheets: cfg.sheets,
        overrides: overrides.clone(),
    };
    let dir = &cfg.corpus;
    if dir.join(CORPUS_FILE).exists() {
        let existing = read_info(dir)?;
        if existing != info {
            return Err(RunError::Config(format!(
                "{} already holds a corpus generated with seed {} and {} sheets; use a fresh directory",
                dir.display(),
                existing.seed,
                existing.sheets
            )));
        }
        if dir.join(IR_FILE).is_file() {
            return Ok(format!("{} sheets already generated in {}", info.sheets, dir.display()));
        }
    }
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    let config = GenConfig {
        seed: cfg.seed,
        sheet_count: cfg.sheets,
        overrides,
    };
    let docs = generate_corpus(&config).map_err(|e| RunError::Config(e.to_string()))?;
    for d in &docs {
        let v = validate(d);
        if !v.is_empty() {
            return Err(RunError::Config(format!("sheet {} violates {}", d.sheet_id, v[0])));
        }
    }
    let json = serde_json::to_string_pretty(&info).expect("corpus info serializes");
    write_atomic(&dir.join(CORPUS_FILE), format!("{json}\n").as_bytes())?;
    write_atomic(&dir.join(IR_FILE), ir_jsonl(&docs).as_bytes())?;
    log::info!("event=generate sheets={} seed={}", docs.len(), cfg.seed);
    Ok(format!("generated {} sheets in {}", docs.len(), dir.display()))
}

/// Completion marker written next to a rendered sheet.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DoneMarker {
    input_sha256: String,
    output_sha256: String,
    png_sha256: String,
    dpi: u32,
    fit_iterations: u32,
    page_count: u32,
    millis: u128,
    doc: ScoreDoc,
}

/// Per-sheet render outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetRender {
    pub sheet_id: String,
    pub skipped: bool,
    pub fit_iterations: u32,
    pub page_count: u32,
    pub final_bar_count: u32,
    pub elapsed: Duration,
}

fn marker_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.done"))
}

fn completed(dir: &Path, doc: &ScoreDoc, dpi: u32) -> Option<DoneMarker> {
    let text = fs::read_to_string(marker_path(dir, &doc.sheet_id)).ok()?;
    let marker: DoneMarker = serde_json::from_str(&text).ok()?;
    let current = sha256_hex(serialize_ir(doc).as_bytes());
    let matches = current == marker.input_sha256 || current == marker.output_sha256;
    let png = fs::read(dir.join(format!("{}.png", doc.sheet_id))).ok()?;
    let artifacts = ["tex", "pdf"].iter().all(|e| dir.join(format!("{}.{e}", doc.sheet_id)).is_file());
    (matches && marker.dpi == dpi && artifacts && sha256_hex(&png) == marker.png_sha256).then_some(marker)
}

fn render_one(tc: &Toolchain, doc: &ScoreDoc, dir: &Path, dpi: u32) -> Result<(ScoreDoc, SheetRender), EngraveError> {
    if let Some(m) = completed(dir, doc, dpi) {
        let render = SheetRender {
            sheet_id: doc.sheet_id.clone(),
            skipped: true,
            fit_iterations: m.fit_iterations,
            page_count: m.page_count,
            final_bar_count: m.doc.bars.len() as u32,
            elapsed: Duration::ZERO,
        };
        return Ok((m.doc, render));
    }
    let start = Instant::now();
    let (fitted, result) = engrave_sheet(tc, doc, dir, dpi)?;
    let elapsed = start.elapsed();
    let png = fs::read(&result.image_paths[0])?;
    let marker = DoneMarker {
        input_sha256: sha256_hex(serialize_ir(doc).as_bytes()),
        output_sha256: sha256_hex(serialize_ir(&fitted).as_bytes()),
        png_sha256: sha256_hex(&png),
        dpi,
        fit_iterations: result.fit_iterations,
        page_count: result.page_count,
        millis: elapsed.as_millis(),
        doc: fitted.clone(),
    };
    let json = serde_json::to_string(&marker).expect("marker serializes");
    fs::write(marker_path(dir, &doc.sheet_id), json)?;
    log::info!(
        "event=render sheet={} seed={} fit_iterations={} bars={} millis={}",
        fitted.sheet_id,
        fitted.meta.seed,
        result.fit_iterations,
        result.final_bar_count,
        elapsed.as_millis()
    );
    let render = SheetRender {
        sheet_id: fitted.sheet_id.clone(),
        skipped: false,
        fit_iterations: result.fit_iterations,
        page_count: result.page_count,
        final_bar_count: result.final_bar_count,
        elapsed,
    };
    Ok((fitted, render))
}

/// Engraves every sheet of the corpus with `toolchain`, skipping sheets whose
/// completion marker matches. Rewrites `ir.jsonl` with the fitted documents.
pub fn render_corpus(cfg: &RunConfig, toolchain: &Toolchain) -> Result<Vec<SheetRender>, RunError> {
    let dir = &cfg.corpus;
    read_info(dir)?;
    let docs = read_ir_corpus(dir)?;
    let sheets = dir.join(SHEETS_DIR);
    fs::create_dir_all(&sheets).map_err(io_err(format!("creating {}", sheets.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| RunError::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<(ScoreDoc, SheetRender), EngraveError>> =
        pool.install(|| docs.par_iter().map(|d| render_one(toolchain, d, &sheets, cfg.dpi)).collect());

    let mut fitted = Vec::with_capacity(docs.len());
    let mut renders = Vec::with_capacity(docs.len());
    let mut failures = Vec::new();
    for (doc, r) in docs.iter().zip(results) {
        match r {
            Ok((d, s)) => {
                fitted.push(d);
                renders.push(s);
            }
            Err(e) => {
                fitted.push(doc.clone());
                failures.push((doc.sheet_id.clone(), e));
            }
        }
    }
    let new_ir = ir_jsonl(&fitted);
    if fs::read_to_string(dir.join(IR_FILE)).ok().as_deref() != Some(new_ir.as_str()) {
        write_atomic(&dir.join(IR_FILE), new_ir.as_bytes())?;
    }
    if let Some((id, e)) = failures.first() {
        let message = format!("{} of {} sheets failed; first: {id}: {e}", failures.len(), docs.len());
        return Err(match e {
            EngraveError::Environment { .. } => RunError::Environment(message),
            _ => RunError::Compile(message),
        });
    }
    Ok(renders)
}

fn render(cfg: &RunConfig) -> Result<String, RunError> {
    let toolchain = match &cfg.toolchain {
        Some(t) => t.clone(),
        None => Toolchain::probe().map_err(|e| RunError::Environment(e.to_string()))?,
    };
    let renders = render_corpus(cfg, &toolchain)?;
    let done: Vec<&SheetRender> = renders.iter().filter(|r| !r.skipped).collect();
    let mean_ms = if done.is_empty() {
        0.0
    } else {
        done.iter().map(|r| r.elapsed.as_secs_f64() * 1e3).sum::<f64>() / done.len() as f64
    };
    Ok(format!(
        "rendered {} sheets ({} already complete), mean {:.0} ms per sheet",
        done.len(),
        renders.len() - done.len(),
        mean_ms
    ))
}

fn qa(cfg: &RunConfig) -> Result<String, RunError> {
    let dir = &cfg.corpus;
    let info = read_info(dir)?;
    let docs = read_ir_corpus(dir)?;
    let unrendered = docs
        .iter()
        .filter(|d| !dir.join(crate::qa::image_path(&d.sheet_id)).is_file())
        .count();
    if unrendered > 0 {
        log::warn!("{unrendered} sheets have no page image yet");
    }
    let pairs: Vec<_> = docs.par_iter().flat_map_iter(|d| generate_sheet_qa(d, cfg.format)).collect();
    let manifest = split_manifest(pairs, cfg.split_ratio, info.seed).map_err(|e| RunError::Config(e.to_string()))?;
    write_atomic(&dir.join(MANIFEST_FILE), manifest.to_jsonl().as_bytes())?;
    log::info!("event=qa pairs={} sheets={}", manifest.records.len(), docs.len());
    Ok(format!("wrote {} QA pairs for {} sheets", manifest.records.len(), docs.len()))
}

fn stats(cfg: &RunConfig) -> Result<String, RunError> {
    let dir = &cfg.corpus;
    read_info(dir)?;
    let docs = read_ir_corpus(dir)?;
    let manifest = if dir.join(MANIFEST_FILE).exists() {
        read_manifest(dir)?
    } else {
        Manifest::default()
    };
    let report = compute_stats(&docs, &manifest);
    let json = serde_json::to_string_pretty(&report).expect("stats serialize");
    write_atomic(&dir.join("stats.json"), format!("{json}\n").as_bytes())?;
    let table = report.to_string();
    write_atomic(&dir.join("stats.txt"), table.as_bytes())?;
    Ok(table)
}

fn eval(cfg: &RunConfig) -> Result<String, RunError> {
    let dir = &cfg.corpus;
    let manifest = read_manifest(dir)?;
    let path = cfg.predictions.as_ref().expect("checked");
    let file = fs::File::open(path).map_err(io_err(format!("opening {}", path.display())))?;
    let preds = read_predictions(BufReader::new(file)).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))?;
    let client: Option<Arc<dyn JudgeClient>> = match cfg.judge {
        JudgeKind::None => None,
        JudgeKind::Stub => Some(Arc::new(StubJudge)),
        JudgeKind::Http => Some(Arc::new(HttpJudge::from_env().map_err(|e| RunError::Config(e.to_string()))?)),
    };
    let report = match client {
        None => evaluate_predictions(&manifest, &preds, cfg.scope),
        Some(c) => {
            let pool = JudgePool::new(c)
                .with_max_in_flight(cfg.workers)
                .with_min_interval(cfg.judge_interval);
            evaluate_with_judge(&manifest, &preds, cfg.scope, &pool)
        }
    }
    .map_err(|e| match e {
        EvalError::Judge(JudgeError::Config(m)) => RunError::Config(m),
        EvalError::Judge(j) => RunError::Environment(j.to_string()),
        EvalError::Io(source) => RunError::Io {
            context: "evaluation".into(),
            source,
        },
        other => RunError::Parse(other.to_string()),
    })?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&dir.join("eval.json"), format!("{json}\n").as_bytes())?;
    Ok(report.to_string())
}

/// Runs one subcommand against `cfg.corpus`. Returns a human-readable summary.
pub fn run(command: Command, cfg: &RunConfig) -> Result<String, RunError> {
    cfg.check(command)?;
    match command {
        Command::Generate => generate(cfg),
        Command::Render => render(cfg),
        Command::Qa => qa(cfg),
        Command::Stats => stats(cfg),
        Command::Eval => eval(cfg),
        Command::Pipeline => {
            // Fail on a missing toolchain before generating anything.
            let toolchain = match (&cfg.toolchain, cfg.skip_render) {
                (_, true) => None,
                (Some(t), false) => Some(t.clone()),
                (None, false) => Some(Toolchain::probe().map_err(|e| RunError::Environment(e.to_string()))?),
            };
            let mut out = vec![generate(cfg)?];
            if let Some(t) = toolchain {
                let staged = RunConfig {
                    toolchain: Some(t),
                    ..cfg.clone()
                };
                out.push(render(&staged)?);
            }
            out.push(qa(cfg)?);
            out.push(stats(cfg)?);
            Ok(out.join("\n"))
        }
    }
}
