use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use thiserror::Error;

use inkboard_core::geom::Point2;
use inkboard_core::recognizer::GlyphLibrary;
use inkboard_core::sketches::SKETCH_TYPES;
use inkboard_core::stroke::{Stroke, StrokeSet};
use inkboard_core::Tick;
use inkboard_session::frames::{hash_frames, hex, parse_frames};
use inkboard_session::script::parse_script;
use inkboard_session::session::run_script;

#[derive(Parser)]
#[command(name = "inkboard", version, about = "Replay, hash and serve inkboard sessions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recognize a glyph given as a JSON list of strokes of [x, y] points.
    Recognize {
        #[arg(long)]
        library: PathBuf,
        #[arg(long)]
        strokes: PathBuf,
    },
    /// Replay a script and write one frame per tick as JSON lines.
    Run {
        #[arg(long)]
        script: PathBuf,
        /// Last tick to run (frames 0..=N are written).
        #[arg(long)]
        ticks: Tick,
        #[arg(long)]
        out: PathBuf,
        /// Glyph library; the bundled one by default.
        #[arg(long)]
        library: Option<PathBuf>,
    },
    /// Fold the digests of a frames file into one.
    Hash {
        #[arg(long)]
        frames: PathBuf,
    },
    /// Serve the websocket protocol.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        library: Option<PathBuf>,
    },
}

/// Bad user input, as opposed to an environment failure.
#[derive(Debug, Error)]
#[error("{0}")]
struct Malformed(String);

fn malformed(e: impl std::fmt::Display) -> anyhow::Error {
    Malformed(e.to_string()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_library(path: Option<&Path>) -> Result<GlyphLibrary> {
    match path {
        None => Ok(inkboard_core::shipped_library()),
        Some(p) => GlyphLibrary::load(read(p)?.as_bytes(), &SKETCH_TYPES).map_err(malformed),
    }
}

fn recognize(library: &Path, strokes: &Path) -> Result<()> {
    let library = load_library(Some(library))?;
    let raw: Vec<Vec<Point2>> = serde_json::from_str(&read(strokes)?).map_err(malformed)?;
    let strokes = raw
        .into_iter()
        .map(Stroke::from_points)
        .collect::<Result<Vec<_>, _>>()
        .map_err(malformed)?;
    let set = StrokeSet::new(strokes).map_err(malformed)?;
    let found = library.recognize(&set).map_err(malformed)?;
    println!("{}", serde_json::to_string(&found)?);
    Ok(())
}

fn run(script: &Path, ticks: Tick, out: &Path, library: Option<&Path>) -> Result<()> {
    let library = Arc::new(load_library(library)?);
    let events = parse_script(&read(script)?).map_err(malformed)?;
    let frames = run_script(&events, ticks, library);
    let body: String = frames.iter().map(|f| f.to_line() + "\n").collect();
    fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", hex(hash_frames(&frames)));
    Ok(())
}

fn hash(frames: &Path) -> Result<()> {
    let frames = parse_frames(&read(frames)?).map_err(malformed)?;
    println!("{}", hex(hash_frames(&frames)));
    Ok(())
}

fn serve(port: u16, library: Option<&Path>) -> Result<()> {
    let library = Arc::new(load_library(library)?);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(inkboard_session::server::serve(port, library))?;
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Recognize { library, strokes } => recognize(library, strokes),
        Cmd::Run {
            script,
            ticks,
            out,
            library,
        } => run(script, *ticks, out, library.as_deref()),
        Cmd::Hash { frames } => hash(frames),
        Cmd::Serve { port, library } => serve(*port, library.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Malformed>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
