//! The `scenery` command line.
//!
//! Exit codes: 0 success, 1 validation or round-trip failure, 2 usage
//! error, 3 I/O or format error.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::binary::{compression_report, decode_binary, encode_binary, EncodeOptions};
use crate::resolve::{is_binary, load_scene, load_scene_bytes, DirResolver};
use crate::runtime::{parse_script, write_trace, SimConfig, Simulation};
use crate::scene::{scene_stats, validate, SceneGraph};
use crate::scenegen::{self, GenParams};
use crate::xml::{semantic_diff, serialize_xml};

/// Name of the corpus listing written by `gen bench-corpus`.
pub const CORPUS_LISTING: &str = "corpus.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitStatus(pub u8);

impl ExitStatus {
    pub const SUCCESS: ExitStatus = ExitStatus(0);
    pub const FAILURE: ExitStatus = ExitStatus(1);
    pub const USAGE: ExitStatus = ExitStatus(2);
    pub const IO: ExitStatus = ExitStatus(3);

    pub fn code(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Parser)]
#[command(name = "scenery", version, about = "Scene-graph toolchain: generate, check, encode and simulate X3D scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a scene and its model files.
    Gen(GenArgs),
    /// Parse a scene and print it in canonical XML.
    Parse(FileArgs),
    /// Check a scene against the node and route rules.
    Validate(FileArgs),
    /// Count nodes, with Inlines expanded.
    Stats(FileArgs),
    /// Write the binary encoding.
    Encode(EncodeArgs),
    /// Write XML from the binary encoding.
    Decode(DecodeArgs),
    /// Check that a scene survives XML to binary to XML.
    Roundtrip(RoundtripArgs),
    /// Compression table over a corpus directory.
    Bench(BenchArgs),
    /// Run a scene against an event script and print the trace.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Georgia,
    Savannah,
    Composite,
    BenchCorpus,
}

#[derive(Debug, Args)]
struct GenArgs {
    which: Which,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    car_count: Option<usize>,
    #[arg(long)]
    building_count: Option<usize>,
    #[arg(long)]
    mesh_density: Option<usize>,
    #[arg(long)]
    debug_backdrop: bool,
    #[arg(long)]
    debug_camera_cube: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct FileArgs {
    file: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    file: PathBuf,
    /// Output path; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_compress: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    file: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    file: PathBuf,
    /// Compare against this binary instead of a fresh encoding.
    #[arg(long)]
    binary: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Print the aligned text table (the default unless --json).
    #[arg(long)]
    table: bool,
    #[arg(long)]
    no_compress: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    file: PathBuf,
    #[arg(long)]
    script: PathBuf,
    #[arg(long)]
    until: f64,
    #[arg(long)]
    tick_rate: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub label: String,
    pub file: String,
}

/// A failed command: its exit status and the message for the error stream.
struct Fail(ExitStatus, String);

type CmdResult = Result<ExitStatus, Fail>;

fn io_fail(what: impl std::fmt::Display) -> Fail {
    Fail(ExitStatus::IO, what.to_string())
}

/// Runs one command line. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                ExitStatus::USAGE
            } else {
                let _ = write!(out, "{text}");
                ExitStatus::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Parse(a) => parse(a, out),
        Command::Validate(a) => validate_cmd(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Encode(a) => encode(a, out),
        Command::Decode(a) => decode(a, out),
        Command::Roundtrip(a) => roundtrip(a, out, err),
        Command::Bench(a) => bench(a, out),
        Command::Simulate(a) => simulate(a, out),
    };
    match result {
        Ok(s) => s,
        Err(Fail(s, msg)) => {
            let _ = writeln!(err, "scenery: {msg}");
            s
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Fail> {
    out.write_all(text.as_bytes()).map_err(io_fail)
}

fn emit_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), Fail> {
    emit(out, &format!("{}\n", serde_json::to_string_pretty(v).map_err(io_fail)?))
}

fn load(path: &Path) -> Result<SceneGraph, Fail> {
    load_scene(path).map_err(io_fail)
}

fn gen(a: GenArgs, out: &mut dyn Write) -> CmdResult {
    let d = GenParams::default();
    let p = GenParams {
        car_count: a.car_count.unwrap_or(d.car_count),
        building_count: a.building_count.unwrap_or(d.building_count),
        mesh_density: a.mesh_density.unwrap_or(d.mesh_density),
        include_debug_backdrop: a.debug_backdrop,
        include_debug_camera_cube: a.debug_camera_cube,
        ..d
    };
    let usage = |e: &dyn std::fmt::Display| Fail(ExitStatus::USAGE, e.to_string());
    let written = match a.which {
        Which::BenchCorpus => {
            let corpus = scenegen::generate_bench_corpus(&p).map_err(|e| match e {
                scenegen::CorpusError::Params(e) => usage(&e),
                other => Fail(ExitStatus::FAILURE, other.to_string()),
            })?;
            std::fs::create_dir_all(&a.out).map_err(io_fail)?;
            let mut written = Vec::new();
            let mut listing = Vec::new();
            for art in &corpus {
                let path = a.out.join(&art.file_name);
                std::fs::write(&path, serialize_xml(&art.scene)).map_err(io_fail)?;
                written.push(path);
                listing.push(CorpusEntry { label: art.label.clone(), file: art.file_name.clone() });
            }
            let path = a.out.join(CORPUS_LISTING);
            let text = serde_json::to_string_pretty(&listing).map_err(io_fail)? + "\n";
            std::fs::write(&path, text).map_err(io_fail)?;
            written.push(path);
            written
        }
        w => {
            let g = match w {
                Which::Georgia => scenegen::generate_georgia(&p),
                Which::Savannah => scenegen::generate_savannah(&p),
                _ => scenegen::generate_composite(&p),
            }
            .map_err(|e| usage(&e))?;
            g.write_to(&a.out).map_err(io_fail)?
        }
    };
    let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    if a.json {
        emit_json(out, &json!({ "written": names }))?;
    } else {
        emit(out, &names.iter().map(|n| format!("{n}\n")).collect::<String>())?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn parse(a: FileArgs, out: &mut dyn Write) -> CmdResult {
    let scene = load(&a.file)?;
    if a.json {
        let mut nodes = 0;
        scene.walk_defined(&mut |_, _| nodes += 1);
        emit_json(
            out,
            &json!({ "file": a.file.display().to_string(), "roots": scene.roots.len(), "nodes": nodes, "routes": scene.routes.len() }),
        )?;
    } else {
        out.write_all(&serialize_xml(&scene)).map_err(io_fail)?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn validate_cmd(a: FileArgs, out: &mut dyn Write) -> CmdResult {
    let scene = load(&a.file)?;
    let report = validate(&scene);
    if a.json {
        emit_json(out, &serde_json::to_value(&report).map_err(io_fail)?)?;
    } else {
        let mut text = String::new();
        for e in report.errors.iter().chain(&report.warnings) {
            text.push_str(&format!("{e}\n"));
        }
        text.push_str(&format!("{} error(s), {} warning(s)\n", report.errors.len(), report.warnings.len()));
        emit(out, &text)?;
    }
    Ok(if report.errors.is_empty() { ExitStatus::SUCCESS } else { ExitStatus::FAILURE })
}

fn stats(a: FileArgs, out: &mut dyn Write) -> CmdResult {
    let scene = load(&a.file)?;
    let s = scene_stats(&scene, &DirResolver::beside(&a.file));
    if a.json {
        emit_json(out, &serde_json::to_value(&s).map_err(io_fail)?)?;
    } else {
        let mut text = format!(
            "shapes {}\nimage textures {}\naudio clips {}\ninlines {}\n",
            s.shape_count, s.image_texture_count, s.audio_clip_count, s.inline_count
        );
        for (k, n) in &s.node_count_by_kind {
            text.push_str(&format!("  {k} {n}\n"));
        }
        for m in &s.missing_inlines {
            text.push_str(&format!("missing inline {m}\n"));
        }
        emit(out, &text)?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_fail(format!("{}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(io_fail),
    }
}

fn encode(a: EncodeArgs, out: &mut dyn Write) -> CmdResult {
    let scene = load(&a.file)?;
    let opts = EncodeOptions { compress_payload: !a.no_compress, ..Default::default() };
    let bytes = encode_binary(&scene, opts).map_err(io_fail)?;
    write_output(a.out.as_deref(), &bytes, out)?;
    if a.json && a.out.is_some() {
        emit_json(out, &json!({ "binary_bytes": bytes.len() }))?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn decode(a: DecodeArgs, out: &mut dyn Write) -> CmdResult {
    let bytes = std::fs::read(&a.file).map_err(|e| io_fail(format!("{}: {e}", a.file.display())))?;
    let scene = decode_binary(&bytes).map_err(|e| io_fail(format!("{}: {e}", a.file.display())))?;
    let xml = serialize_xml(&scene);
    write_output(a.out.as_deref(), &xml, out)?;
    if a.json && a.out.is_some() {
        emit_json(out, &json!({ "xml_bytes": xml.len() }))?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn roundtrip(a: RoundtripArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let original = load(&a.file)?;
    let encoded = match &a.binary {
        Some(p) => std::fs::read(p).map_err(|e| io_fail(format!("{}: {e}", p.display())))?,
        None => encode_binary(&original, EncodeOptions::default()).map_err(io_fail)?,
    };
    let diffs = match decode_binary(&encoded) {
        Ok(back) => {
            // through XML once more, as a reader of the decoded file would
            let xml = serialize_xml(&back);
            match load_scene_bytes(&a.file, &xml) {
                Ok(again) => semantic_diff(&original, &again),
                Err(e) => vec![format!("decoded scene does not reparse: {e}")],
            }
        }
        Err(e) => vec![format!("binary does not decode: {e}")],
    };
    let ok = diffs.is_empty();
    if a.json {
        emit_json(out, &json!({ "equal": ok, "binary_bytes": encoded.len(), "differences": diffs }))?;
    } else if ok {
        emit(out, &format!("ok: {} survives the round trip ({} binary bytes)\n", a.file.display(), encoded.len()))?;
    } else {
        emit(out, &format!("{} difference(s)\n", diffs.len()))?;
        for d in diffs.iter().take(20) {
            let _ = writeln!(err, "  {d}");
        }
    }
    Ok(if ok { ExitStatus::SUCCESS } else { ExitStatus::FAILURE })
}

fn corpus_entries(dir: &Path) -> Result<Vec<CorpusEntry>, Fail> {
    let listing = dir.join(CORPUS_LISTING);
    if listing.exists() {
        let text = std::fs::read_to_string(&listing).map_err(io_fail)?;
        return serde_json::from_str(&text).map_err(|e| io_fail(format!("{}: {e}", listing.display())));
    }
    let mut files: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| io_fail(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".x3d"))
        .collect();
    files.sort();
    Ok(files
        .into_iter()
        .map(|f| CorpusEntry { label: f.trim_end_matches(".x3d").to_string(), file: f })
        .collect())
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> CmdResult {
    let entries = corpus_entries(&a.corpus)?;
    let opts = EncodeOptions { compress_payload: !a.no_compress, ..Default::default() };
    // one thread per file; rows keep input order
    let sizes: Vec<Result<(u64, u64), Fail>> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .map(|e| {
                let path = a.corpus.join(&e.file);
                s.spawn(move || -> Result<(u64, u64), Fail> {
                    let bytes = std::fs::read(&path).map_err(|e| io_fail(format!("{}: {e}", path.display())))?;
                    if is_binary(&bytes) {
                        return Err(io_fail(format!("{}: expected an XML scene", path.display())));
                    }
                    let scene = load_scene_bytes(&path, &bytes).map_err(io_fail)?;
                    let bin = encode_binary(&scene, opts).map_err(io_fail)?;
                    Ok((bytes.len() as u64, bin.len() as u64))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(io_fail("worker panicked")))).collect()
    });
    let mut rows = Vec::new();
    for (e, r) in entries.iter().zip(sizes) {
        let (x, b) = r?;
        rows.push((e.label.clone(), x, b));
    }
    let report = compression_report(&rows).map_err(io_fail)?;
    if a.json {
        emit_json(out, &serde_json::to_value(&report).map_err(io_fail)?)?;
    } else {
        emit(out, &report.to_string())?;
    }
    Ok(ExitStatus::SUCCESS)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let usage = |m: String| Fail(ExitStatus::USAGE, m);
    let mut config = SimConfig::from_env().map_err(io_fail)?;
    if let Some(r) = a.tick_rate {
        config.tick_rate = r;
    }
    let config = config.check().map_err(|e| usage(e.to_string()))?;
    if !(a.until.is_finite() && a.until >= 0.0) {
        return Err(usage(format!("--until must be a finite, non-negative time, got {}", a.until)));
    }
    let scene = load(&a.file)?;
    let script_text = std::fs::read_to_string(&a.script).map_err(|e| io_fail(format!("{}: {e}", a.script.display())))?;
    let events = parse_script(&script_text).map_err(|e| io_fail(format!("{}: {e}", a.script.display())))?;
    // events after --until are never reached
    let events: Vec<_> = events.into_iter().filter(|e| e.at <= a.until).collect();
    let mut sim = Simulation::new(&scene, &DirResolver::beside(&a.file), config);
    let records = sim.step_to(a.until, &events).map_err(|e| Fail(ExitStatus::FAILURE, e.to_string()))?;
    let summary = sim.summary();
    let mut buf = Vec::new();
    write_trace(&mut buf, &records, &summary).map_err(io_fail)?;
    out.write_all(&buf).map_err(io_fail)?;
    Ok(ExitStatus::SUCCESS)
}

/// Entry point for the binary.
pub fn main_with_args(argv: Vec<OsString>) -> ExitStatus {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let status = run(argv, &mut out, &mut err);
    let _ = out.flush();
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (ExitStatus, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("scenery").chain(args.iter().copied());
        let s = run(argv, &mut out, &mut err);
        (s, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        let (s, out, err) = call(&["frobnicate"]);
        assert_eq!(s, ExitStatus::USAGE);
        assert!(out.is_empty() && err.contains("frobnicate"));
        assert_eq!(call(&["--help"]).0, ExitStatus::SUCCESS);
    }

    #[test]
    fn missing_file_is_io() {
        let (s, _, err) = call(&["validate", "/nonexistent/x.x3d"]);
        assert_eq!(s, ExitStatus::IO);
        assert!(err.starts_with("scenery: "));
    }

    #[test]
    fn gen_rejects_bad_params_as_usage() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(call(&["gen", "georgia", "--out", out, "--car-count", "0"]).0, ExitStatus::USAGE);
    }
}
