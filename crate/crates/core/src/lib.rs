//! Engine core for an ink-driven presentation board.
//!
//! Hand-drawn glyphs are recognized against a template library and become
//! sketches: small interactive objects that animate, exchange values over
//! links, and render to a flat draw list once per tick. Everything runs on
//! an integer tick clock so a recorded input script always replays to the
//! same frames.

pub mod animator;
pub mod draw;
pub mod geom;
pub mod recognizer;
pub mod runtime;
pub mod sketches;
pub mod stroke;
pub mod value;

pub type Tick = u64;
pub type SketchId = u64;

pub const TICKS_PER_SECOND: f64 = 60.0;

const SHIPPED_LIBRARY: &str = include_str!("../assets/glyphs.json");

/// The bundled glyph library: digits, pendulum, graph, tree and stack.
pub fn shipped_library() -> recognizer::GlyphLibrary {
    recognizer::GlyphLibrary::load(SHIPPED_LIBRARY.as_bytes(), &sketches::SKETCH_TYPES)
        .expect("bundled glyph library is valid")
}

/// Raw bytes of the bundled glyph library.
pub fn shipped_library_json() -> &'static str {
    SHIPPED_LIBRARY
}
