use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use scoresynth::corpus::{run, Command, JudgeKind, RunConfig};
use scoresynth::eval::Scope;
use scoresynth::qa::NoteFormat;

/// Synthetic music-sheet corpora with exact ground truth.
///
/// Toolchain programs are taken from SCORESYNTH_TEX, SCORESYNTH_MUSIXFLX and
/// SCORESYNTH_RASTERIZER (defaults: pdftex, musixflx, pdftoppm). The HTTP
/// judge reads SCORESYNTH_JUDGE_URL, SCORESYNTH_JUDGE_API_KEY and
/// SCORESYNTH_JUDGE_MODEL.
#[derive(Parser)]
#[command(name = "scoresynth", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Corpus directory.
    #[arg(long, global = true, default_value = "corpus")]
    corpus: PathBuf,
    /// Corpus seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of sheets to generate.
    #[arg(long, global = true, default_value_t = 10)]
    sheets: usize,
    /// TOML file pinning sheet parameters.
    #[arg(long, global = true)]
    overrides: Option<PathBuf>,
    /// Rasterization density.
    #[arg(long, global = true, default_value_t = scoresynth::engrave::DEFAULT_DPI)]
    dpi: u32,
    /// Parallel engraving processes or judge requests.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Fraction of sheets assigned to train.
    #[arg(long, global = true, default_value_t = scoresynth::qa::DEFAULT_TRAIN_RATIO)]
    split_ratio: f64,
    /// Notation for note-sequence answers.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample sheets into ir.jsonl.
    Generate,
    /// Engrave every sheet to TeX, PDF and PNG, shrinking to one page.
    Render,
    /// Emit QA pairs and the train/test split into manifest.jsonl.
    Qa,
    /// Corpus statistics.
    Stats,
    /// Score predictions against the manifest.
    Eval {
        /// JSON lines of {"qa_id", "answer", "model"?}.
        #[arg(long)]
        predictions: PathBuf,
        /// Semantic judge for G-Acc; omitted means PNLS only.
        #[arg(long, value_enum)]
        judge: Option<Judge>,
        /// Minimum milliseconds between judge requests.
        #[arg(long, default_value_t = 0)]
        judge_interval_ms: u64,
        /// Score train pairs too.
        #[arg(long)]
        all_splits: bool,
    },
    /// generate, render, qa and stats in one go.
    Pipeline {
        /// Skip engraving.
        #[arg(long)]
        no_render: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    #[value(name = "kern+")]
    Kern,
}

#[derive(Clone, Copy, ValueEnum)]
enum Judge {
    Stub,
    Http,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let mut cfg = RunConfig {
        seed: cli.seed,
        sheets: cli.sheets,
        overrides: cli.overrides,
        dpi: cli.dpi,
        split_ratio: cli.split_ratio,
        format: match cli.format {
            Format::Json => NoteFormat::Json,
            Format::Kern => NoteFormat::KernPlus,
        },
        ..RunConfig::new(cli.corpus)
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    let command = match cli.command {
        Cmd::Generate => Command::Generate,
        Cmd::Render => Command::Render,
        Cmd::Qa => Command::Qa,
        Cmd::Stats => Command::Stats,
        Cmd::Eval {
            predictions,
            judge,
            judge_interval_ms,
            all_splits,
        } => {
            cfg.predictions = Some(predictions);
            cfg.judge = match judge {
                None => JudgeKind::None,
                Some(Judge::Stub) => JudgeKind::Stub,
                Some(Judge::Http) => JudgeKind::Http,
            };
            cfg.judge_interval = Duration::from_millis(judge_interval_ms);
            cfg.scope = if all_splits { Scope::All } else { Scope::Test };
            Command::Eval
        }
        Cmd::Pipeline { no_render } => {
            cfg.skip_render = no_render;
            Command::Pipeline
        }
    };
    match run(command, &cfg) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
