//! MusiXTeX emission, the external TeX toolchain, the single-page fit loop
//! and rasterization.
//!
//! The toolchain is three external programs, each overridable through an
//! environment variable holding a program name or path:
//!
//! | role       | default    | variable                |
//! |------------|------------|-------------------------|
//! | TeX engine | `pdftex`   | `SCORESYNTH_TEX`        |
//! | spacing    | `musixflx` | `SCORESYNTH_MUSIXFLX`   |
//! | rasterizer | `pdftoppm` | `SCORESYNTH_RASTERIZER` |

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::ir::{NoteEvent, ScoreDoc};
use crate::sampler::{NoteSize, BAR_COUNT_RANGE, SPACING_RANGE};
use crate::theory::{Clef, Pitch};

pub const DEFAULT_DPI: u32 = 300;
pub const ENV_TEX: &str = "SCORESYNTH_TEX";
pub const ENV_MUSIXFLX: &str = "SCORESYNTH_MUSIXFLX";
pub const ENV_RASTERIZER: &str = "SCORESYNTH_RASTERIZER";

/// Horizontal note-spacing factor per spacing setting (1 = most compact).
const SPACING_FACTORS: [&str; 4] = ["0.70", "0.85", "1.00", "1.20"];
const LOG_TAIL_LINES: usize = 30;

#[derive(Debug, Error)]
pub enum EngraveError {
    #[error("cannot engrave bar {bar}{}: {reason}", event.map(|e| format!(" event {e}")).unwrap_or_default())]
    Emit {
        bar: u32,
        event: Option<usize>,
        reason: String,
    },
    #[error("required program `{program}` not found (set {var} to override)")]
    Environment { program: String, var: &'static str },
    #[error("{pass} failed:\n{log_tail}")]
    Compile { pass: String, log_tail: String },
    #[error("rasterization failed: {0}")]
    Rasterize(String),
    #[error("sheet does not fit one page at {bars} bars and spacing {spacing} ({pages} pages)")]
    FitFailure { bars: u32, spacing: u8, pages: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EngraveError {
    fn emit(bar: u32, event: Option<usize>, reason: impl Into<String>) -> Self {
        EngraveError::Emit {
            bar,
            event,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngraveResult {
    pub tex_source: String,
    pub pdf_path: PathBuf,
    pub page_count: u32,
    pub image_paths: Vec<PathBuf>,
    pub final_bar_count: u32,
    pub final_spacing: u8,
    pub fit_iterations: u32,
}

/// MusiXTeX pitch letter: `A`..`N` cover A1..G3, `a`..`z` start at A3.
fn pitch_letter(p: Pitch) -> String {
    let offset = p.diatonic_step() - (7 + 5);
    let letter = |o: i32| -> char {
        if o < 14 {
            (b'A' + o as u8) as char
        } else {
            (b'a' + (o - 14) as u8) as char
        }
    };
    if offset < 0 {
        format!("`{}", letter(offset + 7))
    } else {
        letter(offset).to_string()
    }
}

fn middle_line(clef: Clef) -> i32 {
    match clef {
        Clef::Treble => 4 * 7 + 6,
        Clef::Bass => 3 * 7 + 1,
    }
}

fn stem_up(clef: Clef, steps: impl Iterator<Item = i32>) -> bool {
    let (sum, n) = steps.fold((0, 0), |(s, n), v| (s + v, n + 1));
    n == 0 || sum < middle_line(clef) * n
}

fn dots(n: u8) -> &'static str {
    match n {
        0 => "",
        1 => "p",
        _ => "pp",
    }
}

fn column_macro(gap: u32) -> &'static str {
    match gap {
        0 | 1 => "\\notes",
        2 => "\\Notes",
        3 | 4 => "\\NOtes",
        5..=8 => "\\NOTes",
        _ => "\\NOTEs",
    }
}

fn tex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\char92 "),
            '{' | '}' | '#' | '$' | '%' | '&' | '_' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\char126 "),
            '^' => out.push_str("\\char94 "),
            _ => out.push(c),
        }
    }
    out
}

/// Commands for the note of one staff in one column.
struct StaffWriter<'a> {
    clef: Clef,
    /// Beam and tie slot; distinct per staff.
    slot: usize,
    voice: &'a [NoteEvent],
    bar: u32,
    beam_up: bool,
}

impl StaffWriter<'_> {
    fn group_id(&self, i: usize) -> Option<u32> {
        self.voice.get(i).and_then(|n| n.beam_group)
    }

    fn same_group(&self, i: usize, j: Option<usize>) -> bool {
        match (self.group_id(i), j.and_then(|j| self.group_id(j))) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    fn note(&mut self, i: usize, out: &mut String) -> Result<(), EngraveError> {
        let n = &self.voice[i];
        let prev = i.checked_sub(1);
        let beamed_prev = self.same_group(i, prev);
        let beamed_next = self.same_group(i, Some(i + 1));
        let p = pitch_letter(n.pitch);
        let s = self.slot;
        if i > 0 && self.voice[i - 1].tie_to_next {
            let _ = write!(out, "\\ttie{s}");
        }
        if beamed_prev || beamed_next {
            if !n.value.is_beamable() {
                return Err(EngraveError::emit(
                    self.bar,
                    Some(i),
                    format!("{}-note value {} cannot be beamed", self.clef, n.value),
                ));
            }
            let group = self.group_range(i);
            if !beamed_prev {
                self.beam_up = stem_up(self.clef, group.clone().map(|k| self.voice[k].pitch.diatonic_step()));
                let all16 = group.clone().all(|k| self.voice[k].value.base() == 16);
                let _ = write!(out, "\\ib{}{}{s}{{{p}}}0", if all16 { "b" } else { "" }, self.ud());
            }
            let all16 = group.clone().all(|k| self.voice[k].value.base() == 16);
            let is16 = |k: usize| group.contains(&k) && self.voice[k].value.base() == 16;
            if !all16 && n.value.base() == 16 {
                if !prev.is_some_and(is16) {
                    let _ = write!(out, "\\nbb{}{s}", self.ud());
                }
                if !is16(i + 1) {
                    let _ = write!(out, "\\tbb{}{s}", self.ud());
                }
            }
            if n.tie_to_next {
                let _ = write!(out, "\\itie{}{s}{{{p}}}", if self.beam_up { "d" } else { "u" });
            }
            if !beamed_next {
                let _ = write!(out, "\\tb{}{s}", self.ud());
            }
            let _ = write!(out, "\\qb{}{s}{{{p}}}", dots(n.value.dots()));
            return Ok(());
        }
        let up = stem_up(self.clef, std::iter::once(n.pitch.diatonic_step()));
        if n.tie_to_next {
            let _ = write!(out, "\\itie{}{s}{{{p}}}", if up { "d" } else { "u" });
        }
        let ud = if up { "u" } else { "l" };
        let head = match n.value.base() {
            1 => "wh".to_string(),
            2 => format!("h{ud}"),
            4 => format!("q{ud}"),
            8 => format!("c{ud}"),
            16 => format!("cc{ud}"),
            b => return Err(EngraveError::emit(self.bar, Some(i), format!("unsupported base value {b}"))),
        };
        let _ = write!(out, "\\{head}{}{{{p}}}", dots(n.value.dots()));
        Ok(())
    }

    fn ud(&self) -> &'static str {
        if self.beam_up {
            "u"
        } else {
            "l"
        }
    }

    fn group_range(&self, i: usize) -> std::ops::Range<usize> {
        let mut lo = i;
        while self.same_group(lo, lo.checked_sub(1)) {
            lo -= 1;
        }
        let mut hi = i + 1;
        while self.same_group(hi - 1, Some(hi)) {
            hi += 1;
        }
        lo..hi
    }
}

/// Renders a document as plain-TeX MusiXTeX source. Output depends only on
/// the document.
pub fn emit_musixtex(doc: &ScoreDoc) -> Result<String, EngraveError> {
    let meta = &doc.meta;
    let clefs = meta.clef_config.clefs();
    // MusiXTeX numbers staves from the bottom.
    let staves: Vec<Clef> = clefs.iter().rev().copied().collect();
    let spacing = meta.spacing.clamp(*SPACING_RANGE.start(), *SPACING_RANGE.end());
    let bins_per_bar = meta.time_signature.bins_per_bar();

    let mut t = String::new();
    let _ = writeln!(t, "% sheet {}", doc.sheet_id);
    let _ = writeln!(t, "% spacing {spacing}");
    t.push_str("\\input musixtex\n");
    t.push_str("\\pdfobjcompresslevel=0\n");
    t.push_str("\\hsize=180mm \\vsize=257mm \\hoffset=-10mm \\voffset=-10mm\n");
    t.push_str("\\parindent=0pt \\nopagenumbers\n");
    if meta.show_chord_labels {
        t.push_str("\\def\\chordlabel#1{{\\bf #1}}\n");
    }
    t.push_str(match meta.note_size {
        NoteSize::Regular => "\\normalmusicsize\n",
        NoteSize::Small => "\\smallmusicsize\n",
    });
    let _ = writeln!(t, "\\elemskip={}\\elemskip", SPACING_FACTORS[(spacing - 1) as usize]);
    let _ = writeln!(t, "\\centerline{{\\bf {}}}", tex_escape(&meta.title));
    let _ = writeln!(t, "\\rightline{{\\it {}}}", tex_escape(&meta.composer));
    t.push_str("\\medskip\n");
    t.push_str("\\instrumentnumber{1}\n");
    let _ = writeln!(t, "\\setstaffs1{{{}}}", staves.len());
    let codes: String = staves
        .iter()
        .map(|c| match c {
            Clef::Treble => '0',
            Clef::Bass => '6',
        })
        .collect();
    let _ = writeln!(t, "\\setclef1{{{codes}}}");
    let _ = writeln!(t, "\\generalsignature{{{}}}", meta.scale.key_signature().signed());
    let _ = writeln!(
        t,
        "\\generalmeter{{\\meterfrac{{{}}}{{4}}}}",
        meta.time_signature.numerator()
    );
    t.push_str(if meta.show_bar_indices {
        "\\barnumbers\n"
    } else {
        "\\nobarnumbers\n"
    });
    t.push_str("\\startmuflex\n\\startpiece\n");

    let repeat = meta.repeat_span;
    let last = doc.bars.last().map_or(0, |b| b.index);
    for (k, bar) in doc.bars.iter().enumerate() {
        let b = bar.index;
        if b != k as u32 + 1 {
            return Err(EngraveError::emit(b, None, format!("expected bar index {}", k + 1)));
        }
        let opens = repeat.is_some_and(|r| r.start == b);
        let closes_before = repeat.is_some_and(|r| r.end + 1 == b);
        if b > 1 {
            t.push_str(if opens {
                "\\leftrepeat\n"
            } else if closes_before {
                "\\rightrepeat\n"
            } else {
                "\\bar\n"
            });
        } else if opens {
            t.push_str("\\leftrepeat\n");
        }
        let _ = writeln!(t, "% bar {b}");

        let mut voices = Vec::with_capacity(staves.len());
        for &clef in &staves {
            let v = bar
                .voice(clef)
                .ok_or_else(|| EngraveError::emit(b, None, format!("missing {clef} voice")))?;
            let mut at = 0;
            for (i, n) in v.iter().enumerate() {
                if n.onset_bin != at {
                    return Err(EngraveError::emit(b, Some(i), format!("{clef} onset {} is not contiguous", n.onset_bin)));
                }
                at = n.end_bin();
            }
            if at != bins_per_bar {
                return Err(EngraveError::emit(b, None, format!("{clef} voice fills {at} of {bins_per_bar} bins")));
            }
            voices.push(v);
        }
        if bar.voices.len() != staves.len() {
            return Err(EngraveError::emit(b, None, "voice for a clef outside the clef configuration"));
        }

        let onsets: BTreeSet<u32> = voices.iter().flat_map(|v| v.iter().map(|n| n.onset_bin)).collect();
        let onsets: Vec<u32> = onsets.into_iter().collect();
        let mut writers: Vec<StaffWriter> = staves
            .iter()
            .zip(&voices)
            .enumerate()
            .map(|(slot, (&clef, voice))| StaffWriter {
                clef,
                slot,
                voice,
                bar: b,
                beam_up: true,
            })
            .collect();
        let top = writers.len() - 1;
        for (c, &onset) in onsets.iter().enumerate() {
            let gap = onsets.get(c + 1).copied().unwrap_or(bins_per_bar) - onset;
            t.push_str(column_macro(gap));
            t.push(' ');
            for (s, w) in writers.iter_mut().enumerate() {
                if s > 0 {
                    t.push('|');
                }
                if s == top && c == 0 {
                    if b == 1 {
                        let _ = write!(t, "\\Uptext{{\\metron{{\\qu}}{{{}}}}}", meta.tempo_bpm);
                    }
                    if meta.show_chord_labels {
                        let _ = write!(t, "\\uptext{{\\chordlabel{{{}}}}}", bar.chord.label());
                    }
                }
                if let Some(i) = w.voice.iter().position(|n| n.onset_bin == onset) {
                    w.note(i, &mut t)?;
                }
            }
            t.push_str("\\en\n");
        }
    }
    if repeat.is_some_and(|r| r.end == last) {
        t.push_str("\\setrightrepeat\n");
    }
    t.push_str("\\endpiece\n\\endmuflex\n\\bye\n");
    Ok(t)
}

fn find_program(name: &str) -> Option<PathBuf> {
    let candidate = Path::new(name);
    if candidate.components().count() > 1 {
        return is_executable(candidate).then(|| candidate.to_path_buf());
    }
    std::env::split_paths(&std::env::var_os("PATH")?)
        .map(|dir| dir.join(name))
        .find(|p| is_executable(p))
}

#[cfg(unix)]
fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    fs::metadata(p).is_ok_and(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
}

#[cfg(not(unix))]
fn is_executable(p: &Path) -> bool {
    p.is_file()
}

/// Resolved paths of the external programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Toolchain {
    pub tex: PathBuf,
    pub musixflx: PathBuf,
    pub rasterizer: PathBuf,
}

impl Toolchain {
    /// Uses the given programs as-is; nothing is probed.
    pub fn new(tex: impl Into<PathBuf>, musixflx: impl Into<PathBuf>, rasterizer: impl Into<PathBuf>) -> Self {
        Toolchain {
            tex: tex.into(),
            musixflx: musixflx.into(),
            rasterizer: rasterizer.into(),
        }
    }

    /// Resolves all three programs from the environment and `PATH`.
    pub fn probe() -> Result<Self, EngraveError> {
        let resolve = |var: &'static str, default: &str| {
            let name = std::env::var(var).unwrap_or_else(|_| default.to_string());
            find_program(&name).ok_or(EngraveError::Environment { program: name, var })
        };
        Ok(Toolchain {
            tex: resolve(ENV_TEX, "pdftex")?,
            musixflx: resolve(ENV_MUSIXFLX, "musixflx")?,
            rasterizer: resolve(ENV_RASTERIZER, "pdftoppm")?,
        })
    }

    fn require(program: &Path, var: &'static str) -> Result<(), EngraveError> {
        match program.to_str().and_then(find_program) {
            Some(_) => Ok(()),
            None => Err(EngraveError::Environment {
                program: program.display().to_string(),
                var,
            }),
        }
    }

    fn run(&self, pass: &str, program: &Path, args: &[&str], dir: &Path, log: Option<&Path>) -> Result<(), EngraveError> {
        let out = Command::new(program)
            .args(args)
            .current_dir(dir)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| EngraveError::Compile {
                pass: pass.to_string(),
                log_tail: format!("cannot start {}: {e}", program.display()),
            })?;
        if out.status.success() {
            return Ok(());
        }
        let text = log
            .and_then(|l| fs::read_to_string(l).ok())
            .unwrap_or_else(|| {
                format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
            });
        Err(EngraveError::Compile {
            pass: pass.to_string(),
            log_tail: tail(&text, LOG_TAIL_LINES),
        })
    }

    /// Runs TeX, musixflx, TeX in a private temporary directory and copies
    /// the PDF to `workdir/<stem>.pdf`. Returns the PDF path and page count.
    pub fn compile_pdf(&self, tex_source: &str, workdir: &Path, stem: &str) -> Result<(PathBuf, u32), EngraveError> {
        Self::require(&self.tex, ENV_TEX)?;
        Self::require(&self.musixflx, ENV_MUSIXFLX)?;
        let scratch = tempfile::Builder::new().prefix("scoresynth-").tempdir()?;
        let dir = scratch.path();
        let tex_file = format!("{stem}.tex");
        fs::write(dir.join(&tex_file), tex_source)?;
        let log = dir.join(format!("{stem}.log"));
        let tex_args = ["-interaction=nonstopmode", "-halt-on-error", tex_file.as_str()];
        self.run("TeX pass 1", &self.tex, &tex_args, dir, Some(&log))?;
        self.run("musixflx", &self.musixflx, &[stem], dir, None)?;
        self.run("TeX pass 2", &self.tex, &tex_args, dir, Some(&log))?;

        let produced = dir.join(format!("{stem}.pdf"));
        let log_text = fs::read_to_string(&log).unwrap_or_default();
        let pdf = fs::read(&produced).map_err(|_| EngraveError::Compile {
            pass: "TeX pass 2".into(),
            log_tail: format!("no PDF produced\n{}", tail(&log_text, LOG_TAIL_LINES)),
        })?;
        let pages = log_page_count(&log_text).unwrap_or_else(|| pdf_page_count(&pdf));
        fs::create_dir_all(workdir)?;
        let dest = workdir.join(format!("{stem}.pdf"));
        fs::write(&dest, &pdf)?;
        Ok((dest, pages))
    }

    /// Rasterizes every page of `pdf` at `dpi` into `out_dir`: a one-page PDF
    /// becomes `<stem>.png`, longer ones `<stem>-<page>.png`.
    pub fn rasterize(&self, pdf: &Path, dpi: u32, out_dir: &Path, stem: &str) -> Result<Vec<PathBuf>, EngraveError> {
        if dpi == 0 {
            return Err(EngraveError::Rasterize("dpi must be positive".into()));
        }
        Self::require(&self.rasterizer, ENV_RASTERIZER)?;
        let bytes = fs::read(pdf).map_err(|e| EngraveError::Rasterize(format!("{}: {e}", pdf.display())))?;
        let pages = pdf_page_count(&bytes);
        if !bytes.starts_with(b"%PDF-") || pages == 0 {
            return Err(EngraveError::Rasterize(format!("{} is not a readable PDF", pdf.display())));
        }
        fs::create_dir_all(out_dir)?;
        let pdf_abs = fs::canonicalize(pdf)?;
        let dpi_arg = dpi.to_string();
        let pdf_arg = pdf_abs.to_string_lossy();
        let mut args = vec!["-r", dpi_arg.as_str(), "-png"];
        if pages == 1 {
            args.push("-singlefile");
        }
        args.extend([pdf_arg.as_ref(), stem]);
        let expected: Vec<PathBuf> = if pages == 1 {
            vec![out_dir.join(format!("{stem}.png"))]
        } else {
            (1..=pages).map(|p| out_dir.join(format!("{stem}-{p}.png"))).collect()
        };
        let result = self.run("rasterizer", &self.rasterizer, &args, out_dir, None);
        if let Err(e) = result {
            for p in &expected {
                let _ = fs::remove_file(p);
            }
            return Err(match e {
                EngraveError::Compile { log_tail, .. } => EngraveError::Rasterize(log_tail),
                other => other,
            });
        }
        if let Some(missing) = expected.iter().find(|p| !p.is_file()) {
            return Err(EngraveError::Rasterize(format!("{} was not produced", missing.display())));
        }
        Ok(expected)
    }
}

fn tail(text: &str, lines: usize) -> String {
    let all: Vec<&str> = text.lines().collect();
    all[all.len().saturating_sub(lines)..].join("\n")
}

/// Page count from a TeX log's `Output written on X.pdf (N pages, …)` line.
pub fn log_page_count(log: &str) -> Option<u32> {
    let at = log.find("Output written on")?;
    let rest = &log[at..];
    let open = rest.find(" (")?;
    let digits: String = rest[open + 2..].chars().take_while(char::is_ascii_digit).collect();
    digits.parse().ok()
}

/// Counts `/Type /Page` objects in an uncompressed PDF.
pub fn pdf_page_count(pdf: &[u8]) -> u32 {
    let mut count = 0;
    let mut i = 0;
    while let Some(off) = find(&pdf[i..], b"/Type") {
        let mut j = i + off + 5;
        while pdf.get(j).is_some_and(u8::is_ascii_whitespace) {
            j += 1;
        }
        if pdf[j..].starts_with(b"/Page") && !pdf[j..].starts_with(b"/Pages") {
            count += 1;
        }
        i = j;
    }
    count
}

fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

/// Width and height from a PNG header.
pub fn png_dimensions(path: &Path) -> std::io::Result<(u32, u32)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 24 || &bytes[..8] != b"\x89PNG\r\n\x1a\n" || &bytes[12..16] != b"IHDR" {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "not a PNG"));
    }
    let be = |o: usize| u32::from_be_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    Ok((be(16), be(20)))
}

fn drop_last_bar(doc: &mut ScoreDoc) {
    doc.bars.pop();
    doc.meta.bar_count = doc.bars.len() as u32;
    if doc.meta.repeat_span.is_some_and(|r| r.end > doc.meta.bar_count) {
        doc.meta.repeat_span = None;
    }
}

/// Compiles and shrinks `doc` until it fits on one page: drop trailing bars
/// down to the 10-bar floor, then tighten spacing. The final PDF is
/// `workdir/<sheet_id>.pdf`.
pub fn fit_single_page(
    toolchain: &Toolchain,
    doc: &ScoreDoc,
    workdir: &Path,
) -> Result<(ScoreDoc, EngraveResult), EngraveError> {
    let mut doc = doc.clone();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let tex = emit_musixtex(&doc)?;
        let (pdf, pages) = toolchain.compile_pdf(&tex, workdir, &doc.sheet_id)?;
        log::debug!(
            "sheet {} fit iteration {iterations}: {} bars, spacing {}, {pages} pages",
            doc.sheet_id,
            doc.bars.len(),
            doc.meta.spacing
        );
        if pages <= 1 {
            let result = EngraveResult {
                tex_source: tex,
                pdf_path: pdf,
                page_count: pages,
                image_paths: Vec::new(),
                final_bar_count: doc.bars.len() as u32,
                final_spacing: doc.meta.spacing,
                fit_iterations: iterations,
            };
            return Ok((doc, result));
        }
        if doc.bars.len() as u32 > *BAR_COUNT_RANGE.start() {
            drop_last_bar(&mut doc);
        } else if doc.meta.spacing > *SPACING_RANGE.start() {
            doc.meta.spacing -= 1;
        } else {
            let _ = fs::remove_file(&pdf);
            return Err(EngraveError::FitFailure {
                bars: doc.bars.len() as u32,
                spacing: doc.meta.spacing,
                pages,
            });
        }
    }
}

/// Fit loop plus rasterization. Writes `<id>.tex`, `<id>.pdf` and `<id>.png`
/// into `out_dir`.
pub fn engrave_sheet(
    toolchain: &Toolchain,
    doc: &ScoreDoc,
    out_dir: &Path,
    dpi: u32,
) -> Result<(ScoreDoc, EngraveResult), EngraveError> {
    let (fitted, mut result) = fit_single_page(toolchain, doc, out_dir)?;
    fs::write(out_dir.join(format!("{}.tex", fitted.sheet_id)), &result.tex_source)?;
    result.image_paths = toolchain.rasterize(&result.pdf_path, dpi, out_dir, &fitted.sheet_id)?;
    Ok((fitted, result))
}
