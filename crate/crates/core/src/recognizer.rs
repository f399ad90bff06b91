//! Glyph recognition against a template library, plus the single-stroke
//! traversal gestures drawn on top of a tree sketch.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point2;
use crate::stroke::{
    glyph_distance, normalize, normalize_polylines, NormalizedGlyph, Stroke, StrokeError,
    StrokeSet,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LibraryError {
    #[error("malformed glyph library: {0}")]
    MalformedLibrary(String),
    #[error("duplicate template name {0:?}")]
    DuplicateTemplate(String),
    #[error("template {template:?} names unknown sketch type {sketch_type:?}")]
    UnknownSketchType { template: String, sketch_type: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognizeError {
    #[error("glyph library is empty")]
    EmptyLibrary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlyphTemplate {
    pub name: String,
    pub sketch_type: String,
    pub glyph: NormalizedGlyph,
    /// The strokes as stored in the library file.
    pub source: StrokeSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Match {
    pub template_name: String,
    pub sketch_type: String,
    /// Mean normalized distance; lower is better.
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OverlayGestureKind {
    PreOrder,
    InOrder,
    PostOrder,
    BreadthFirst,
}

impl OverlayGestureKind {
    pub const ALL: [OverlayGestureKind; 4] = [
        OverlayGestureKind::PreOrder,
        OverlayGestureKind::InOrder,
        OverlayGestureKind::PostOrder,
        OverlayGestureKind::BreadthFirst,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OverlayGestureKind::PreOrder => "pre-order",
            OverlayGestureKind::InOrder => "in-order",
            OverlayGestureKind::PostOrder => "post-order",
            OverlayGestureKind::BreadthFirst => "breadth-first",
        }
    }

    /// Template vertices in a unit box, y down: root at top centre, children
    /// at the bottom corners.
    fn vertices(self) -> &'static [(f64, f64)] {
        const ROOT: (f64, f64) = (0.5, 0.0);
        const LEFT: (f64, f64) = (0.15, 1.0);
        const RIGHT: (f64, f64) = (0.85, 1.0);
        match self {
            OverlayGestureKind::PreOrder => &[ROOT, LEFT, RIGHT],
            OverlayGestureKind::InOrder => &[LEFT, ROOT, RIGHT],
            OverlayGestureKind::PostOrder => &[LEFT, RIGHT, ROOT],
            OverlayGestureKind::BreadthFirst => {
                &[(0.2, 0.0), (0.8, 0.25), (0.2, 0.5), (0.8, 0.75), (0.2, 1.0)]
            }
        }
    }

    /// The built-in template stroke, scaled to a 100-unit box.
    pub fn template_stroke(self) -> Stroke {
        let points = self
            .vertices()
            .iter()
            .map(|&(x, y)| Point2::new(x * 100.0, y * 100.0))
            .collect();
        Stroke::from_points(points).expect("built-in overlay templates are valid")
    }

    fn template_glyph(self) -> &'static NormalizedGlyph {
        static GLYPHS: OnceLock<Vec<NormalizedGlyph>> = OnceLock::new();
        let all = GLYPHS.get_or_init(|| {
            OverlayGestureKind::ALL
                .iter()
                .map(|k| normalize(&StrokeSet::single(k.template_stroke())).unwrap())
                .collect()
        });
        &all[self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayMatch {
    pub kind: OverlayGestureKind,
    pub score: f64,
}

// On-disk shape of the library file.
#[derive(Debug, Serialize, Deserialize)]
pub struct LibraryFile {
    pub version: i64,
    pub glyph_threshold: f64,
    pub overlay_threshold: f64,
    pub templates: Vec<TemplateFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TemplateFile {
    pub name: String,
    pub sketch_type: String,
    pub strokes: Vec<Vec<Point2>>,
}

/// Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphLibrary {
    version: i64,
    glyph_threshold: f64,
    overlay_threshold: f64,
    templates: Vec<GlyphTemplate>,
}

impl GlyphLibrary {
    /// Parses and validates a library file. `known_types` is the set of
    /// sketch types the runtime can instantiate.
    pub fn load(bytes: &[u8], known_types: &[&str]) -> Result<Self, LibraryError> {
        let file: LibraryFile = serde_json::from_slice(bytes)
            .map_err(|e| LibraryError::MalformedLibrary(e.to_string()))?;
        Self::from_file(file, known_types)
    }

    pub fn from_file(file: LibraryFile, known_types: &[&str]) -> Result<Self, LibraryError> {
        for (label, t) in [
            ("glyph_threshold", file.glyph_threshold),
            ("overlay_threshold", file.overlay_threshold),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(LibraryError::MalformedLibrary(format!(
                    "{label} must be a positive number"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        let mut templates = Vec::with_capacity(file.templates.len());
        for t in file.templates {
            if t.name.is_empty() {
                return Err(LibraryError::MalformedLibrary("empty template name".into()));
            }
            if !seen.insert(t.name.clone()) {
                return Err(LibraryError::DuplicateTemplate(t.name));
            }
            if !known_types.contains(&t.sketch_type.as_str()) {
                return Err(LibraryError::UnknownSketchType {
                    template: t.name,
                    sketch_type: t.sketch_type,
                });
            }
            let bad = |e: StrokeError| {
                LibraryError::MalformedLibrary(format!("template {:?}: {e}", t.name))
            };
            let strokes = t
                .strokes
                .iter()
                .map(|s| Stroke::from_points(s.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(bad)?;
            let source = StrokeSet::new(strokes).map_err(bad)?;
            let glyph = normalize(&source).map_err(bad)?;
            templates.push(GlyphTemplate {
                name: t.name,
                sketch_type: t.sketch_type,
                glyph,
                source,
            });
        }
        Ok(Self {
            version: file.version,
            glyph_threshold: file.glyph_threshold,
            overlay_threshold: file.overlay_threshold,
            templates,
        })
    }

    pub fn version(&self) -> i64 {
        self.version
    }

    pub fn glyph_threshold(&self) -> f64 {
        self.glyph_threshold
    }

    pub fn overlay_threshold(&self) -> f64 {
        self.overlay_threshold
    }

    pub fn templates(&self) -> &[GlyphTemplate] {
        &self.templates
    }

    pub fn template(&self, name: &str) -> Option<&GlyphTemplate> {
        self.templates.iter().find(|t| t.name == name)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Best template with the drawing's stroke count, if it scores within
    /// the glyph threshold. Ties keep the earliest template.
    pub fn recognize(&self, drawing: &StrokeSet) -> Result<Option<Match>, RecognizeError> {
        if self.templates.is_empty() {
            return Err(RecognizeError::EmptyLibrary);
        }
        let Ok(glyph) = normalize(drawing) else {
            return Ok(None);
        };
        Ok(self
            .best_candidate(&glyph)
            .filter(|(_, score)| *score <= self.glyph_threshold)
            .map(|(t, score)| Match {
                template_name: t.name.clone(),
                sketch_type: t.sketch_type.clone(),
                score,
            }))
    }

    /// Lowest-scoring template with a matching stroke count, ignoring the threshold.
    pub fn best_candidate(&self, glyph: &NormalizedGlyph) -> Option<(&GlyphTemplate, f64)> {
        let mut best: Option<(&GlyphTemplate, f64)> = None;
        for t in &self.templates {
            let Ok(score) = glyph_distance(glyph, &t.glyph) else {
                continue;
            };
            if best.map_or(true, |(_, s)| score < s) {
                best = Some((t, score));
            }
        }
        best
    }

    /// Classifies a single stroke against the traversal gesture templates
    /// restricted to `kinds`.
    pub fn recognize_overlay(
        &self,
        stroke: &Stroke,
        kinds: &[OverlayGestureKind],
    ) -> Option<OverlayMatch> {
        overlay_match(stroke.points(), kinds, self.overlay_threshold)
    }
}

pub(crate) fn overlay_match(
    points: &[Point2],
    kinds: &[OverlayGestureKind],
    threshold: f64,
) -> Option<OverlayMatch> {
    let glyph = normalize_polylines([points]).ok()?;
    let mut best: Option<OverlayMatch> = None;
    for kind in OverlayGestureKind::ALL {
        if !kinds.contains(&kind) {
            continue;
        }
        let score = glyph_distance(&glyph, kind.template_glyph()).ok()?;
        if best.map_or(true, |b| score < b.score) {
            best = Some(OverlayMatch { kind, score });
        }
    }
    best.filter(|m| m.score <= threshold)
}
