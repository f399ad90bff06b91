//! Stroke primitives: validated polylines, uniform arc-length resampling,
//! position/scale normalization, and the glyph distance used for matching.
//!
//! Direction and stroke order are significant everywhere in this module:
//! a stroke drawn right-to-left is a different stroke.

use thiserror::Error;

use crate::geom::{Aabb, Point2};
use crate::Tick;

/// Points per stroke after normalization.
pub const SAMPLES_PER_STROKE: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrokeError {
    #[error("a stroke needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("{points} points but {ticks} tick stamps")]
    LengthMismatch { points: usize, ticks: usize },
    #[error("tick stamps must be non-decreasing")]
    NonMonotonicTicks,
    #[error("stroke contains a non-finite coordinate")]
    NonFinite,
    #[error("stroke has zero extent")]
    DegenerateStroke,
    #[error("a stroke set needs at least one stroke")]
    EmptyStrokeSet,
    #[error("cannot resample to {0} points")]
    InvalidSampleCount(usize),
    #[error("stroke counts differ ({left} vs {right})")]
    StrokeCountMismatch { left: usize, right: usize },
}

/// Sum of segment lengths.
pub fn arc_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// A raw pointer trace. Unlike [`Stroke`] it may be a single point or have
/// zero length (a click).
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    points: Vec<Point2>,
    ticks: Vec<Tick>,
}

impl Trace {
    pub fn start(at: Point2, tick: Tick) -> Self {
        Self {
            points: vec![at],
            ticks: vec![tick],
        }
    }

    /// Builds a trace from parallel lists. Panics if they are empty or differ in length.
    pub fn from_parts(points: Vec<Point2>, ticks: Vec<Tick>) -> Self {
        assert!(!points.is_empty() && points.len() == ticks.len());
        Self { points, ticks }
    }

    /// Appends a sample; a tick earlier than the last one is raised to it.
    pub fn push(&mut self, at: Point2, tick: Tick) {
        let last = *self.ticks.last().expect("trace is never empty");
        self.points.push(at);
        self.ticks.push(tick.max(last));
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    pub fn first(&self) -> Point2 {
        self.points[0]
    }

    pub fn last(&self) -> Point2 {
        *self.points.last().expect("trace is never empty")
    }

    pub fn duration(&self) -> Tick {
        self.ticks.last().unwrap() - self.ticks[0]
    }

    /// End point minus start point.
    pub fn displacement(&self) -> Point2 {
        self.last() - self.first()
    }

    /// Largest distance any sample strays from the start point.
    pub fn excursion(&self) -> f64 {
        let s = self.first();
        self.points
            .iter()
            .map(|p| p.distance(s))
            .fold(0.0, f64::max)
    }

    pub fn arc_length(&self) -> f64 {
        arc_length(&self.points)
    }

    pub fn to_stroke(&self) -> Result<Stroke, StrokeError> {
        Stroke::new(self.points.clone(), self.ticks.clone())
    }
}

/// A validated, timestamped polyline of positive length.
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    points: Vec<Point2>,
    ticks: Vec<Tick>,
}

impl Stroke {
    pub fn new(points: Vec<Point2>, ticks: Vec<Tick>) -> Result<Self, StrokeError> {
        if points.len() < 2 {
            return Err(StrokeError::TooFewPoints(points.len()));
        }
        if points.len() != ticks.len() {
            return Err(StrokeError::LengthMismatch {
                points: points.len(),
                ticks: ticks.len(),
            });
        }
        if ticks.windows(2).any(|w| w[1] < w[0]) {
            return Err(StrokeError::NonMonotonicTicks);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(StrokeError::NonFinite);
        }
        if arc_length(&points) <= 0.0 {
            return Err(StrokeError::DegenerateStroke);
        }
        Ok(Self { points, ticks })
    }

    /// Stroke with tick stamps 0, 1, 2, ...
    pub fn from_points(points: Vec<Point2>) -> Result<Self, StrokeError> {
        let ticks = (0..points.len() as Tick).collect();
        Self::new(points, ticks)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    pub fn arc_length(&self) -> f64 {
        arc_length(&self.points)
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::enclosing(self.points.iter().copied()).expect("stroke is non-empty")
    }
}

/// Strokes in drawing order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeSet {
    strokes: Vec<Stroke>,
}

impl StrokeSet {
    pub fn new(strokes: Vec<Stroke>) -> Result<Self, StrokeError> {
        if strokes.is_empty() {
            return Err(StrokeError::EmptyStrokeSet);
        }
        Ok(Self { strokes })
    }

    pub fn single(stroke: Stroke) -> Self {
        Self {
            strokes: vec![stroke],
        }
    }

    pub fn strokes(&self) -> &[Stroke] {
        &self.strokes
    }

    pub fn len(&self) -> usize {
        self.strokes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strokes.is_empty()
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::enclosing(self.strokes.iter().flat_map(|s| s.points().iter().copied()))
            .expect("stroke set is non-empty")
    }
}

/// `n` points at uniform arc-length spacing along `stroke`, endpoints exact.
pub fn resample(stroke: &Stroke, n: usize) -> Result<Vec<Point2>, StrokeError> {
    resample_points(stroke.points(), n)
}

pub(crate) fn resample_points(points: &[Point2], n: usize) -> Result<Vec<Point2>, StrokeError> {
    if n < 2 {
        return Err(StrokeError::InvalidSampleCount(n));
    }
    if points.len() < 2 {
        return Err(StrokeError::TooFewPoints(points.len()));
    }
    let total = arc_length(points);
    if total <= 0.0 || !total.is_finite() {
        return Err(StrokeError::DegenerateStroke);
    }
    let step = total / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    out.push(points[0]);

    // `walked` is the arc length at the start of segment `seg`.
    let mut seg = 0;
    let mut walked = 0.0;
    let mut seg_len = points[0].distance(points[1]);
    for k in 1..n - 1 {
        let target = step * k as f64;
        while walked + seg_len < target && seg + 2 < points.len() {
            walked += seg_len;
            seg += 1;
            seg_len = points[seg].distance(points[seg + 1]);
        }
        let t = if seg_len > 0.0 {
            ((target - walked) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(points[seg].lerp(points[seg + 1], t));
    }
    out.push(*points.last().unwrap());
    Ok(out)
}

/// A glyph with position and scale factored out: every stroke holds exactly
/// [`SAMPLES_PER_STROKE`] points, the joint centroid sits at the origin and
/// the larger bounding-box side has length 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGlyph {
    strokes: Vec<Vec<Point2>>,
}

impl NormalizedGlyph {
    pub fn strokes(&self) -> &[Vec<Point2>] {
        &self.strokes
    }

    pub fn stroke_count(&self) -> usize {
        self.strokes.len()
    }

    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.strokes.iter().flat_map(|s| s.iter().copied())
    }
}

pub fn normalize(strokes: &StrokeSet) -> Result<NormalizedGlyph, StrokeError> {
    normalize_polylines(strokes.strokes().iter().map(|s| s.points()))
}

pub(crate) fn normalize_polylines<'a, I>(polylines: I) -> Result<NormalizedGlyph, StrokeError>
where
    I: IntoIterator<Item = &'a [Point2]>,
{
    let resampled = polylines
        .into_iter()
        .map(|p| resample_points(p, SAMPLES_PER_STROKE))
        .collect::<Result<Vec<_>, _>>()?;
    if resampled.is_empty() {
        return Err(StrokeError::EmptyStrokeSet);
    }
    let count = (resampled.len() * SAMPLES_PER_STROKE) as f64;
    let sum = resampled
        .iter()
        .flatten()
        .fold(Point2::ORIGIN, |acc, &p| acc + p);
    let centroid = sum * (1.0 / count);
    let extent = Aabb::enclosing(resampled.iter().flatten().copied())
        .expect("non-empty")
        .max_dimension();
    if extent <= 1e-9 * (1.0 + centroid.norm()) {
        return Err(StrokeError::DegenerateStroke);
    }
    let strokes = resampled
        .into_iter()
        .map(|s| s.into_iter().map(|p| (p - centroid) * (1.0 / extent)).collect())
        .collect();
    Ok(NormalizedGlyph { strokes })
}

/// Mean Euclidean distance over corresponding points; strokes are paired in
/// drawn order and points in index order.
pub fn glyph_distance(a: &NormalizedGlyph, b: &NormalizedGlyph) -> Result<f64, StrokeError> {
    if a.stroke_count() != b.stroke_count() {
        return Err(StrokeError::StrokeCountMismatch {
            left: a.stroke_count(),
            right: b.stroke_count(),
        });
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for (sa, sb) in a.strokes.iter().zip(&b.strokes) {
        for (p, q) in sa.iter().zip(sb) {
            total += p.distance(*q);
            n += 1;
        }
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point2> {
        raw.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    fn stroke(raw: &[(f64, f64)]) -> Stroke {
        Stroke::from_points(pts(raw)).unwrap()
    }

    fn square_at(x: f64, y: f64, side: f64) -> StrokeSet {
        StrokeSet::single(stroke(&[
            (x, y),
            (x + side, y),
            (x + side, y + side),
            (x, y + side),
            (x, y),
        ]))
    }

    #[test]
    fn resample_straight_segment() {
        let out = resample(&stroke(&[(0.0, 0.0), (10.0, 0.0)]), 3).unwrap();
        assert_eq!(out, pts(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]));
    }

    #[test]
    fn resample_two_points_keeps_endpoints() {
        let out = resample(&stroke(&[(0.0, 0.0), (0.0, 4.0), (3.0, 4.0)]), 2).unwrap();
        assert_eq!(out, pts(&[(0.0, 0.0), (3.0, 4.0)]));
    }

    #[test]
    fn resample_l_path_unit_spacing() {
        // Arc length 7 split into 7 steps; walk the L by hand.
        let out = resample(&stroke(&[(0.0, 0.0), (0.0, 4.0), (3.0, 4.0)]), 8).unwrap();
        let expected = pts(&[
            (0.0, 0.0),
            (0.0, 1.0),
            (0.0, 2.0),
            (0.0, 3.0),
            (0.0, 4.0),
            (1.0, 4.0),
            (2.0, 4.0),
            (3.0, 4.0),
        ]);
        for (a, b) in out.iter().zip(&expected) {
            assert!(a.distance(*b) < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn degenerate_stroke_rejected() {
        let err = Stroke::from_points(pts(&[(1.0, 1.0), (1.0, 1.0)])).unwrap_err();
        assert_eq!(err, StrokeError::DegenerateStroke);
        assert_eq!(
            resample_points(&pts(&[(1.0, 1.0), (1.0, 1.0)]), 4).unwrap_err(),
            StrokeError::DegenerateStroke
        );
    }

    #[test]
    fn stroke_validation() {
        assert_eq!(
            Stroke::from_points(pts(&[(0.0, 0.0)])).unwrap_err(),
            StrokeError::TooFewPoints(1)
        );
        assert_eq!(
            Stroke::new(pts(&[(0.0, 0.0), (1.0, 0.0)]), vec![3, 2]).unwrap_err(),
            StrokeError::NonMonotonicTicks
        );
        assert_eq!(
            Stroke::new(pts(&[(0.0, 0.0), (1.0, 0.0)]), vec![0]).unwrap_err(),
            StrokeError::LengthMismatch { points: 2, ticks: 1 }
        );
        assert_eq!(
            Stroke::from_points(pts(&[(0.0, f64::NAN), (1.0, 0.0)])).unwrap_err(),
            StrokeError::NonFinite
        );
        assert_eq!(StrokeSet::new(vec![]).unwrap_err(), StrokeError::EmptyStrokeSet);
    }

    #[test]
    fn normalize_square_centered_unit_side() {
        let g = normalize(&square_at(100.0, 100.0, 10.0)).unwrap();
        assert_eq!(g.stroke_count(), 1);
        assert_eq!(g.strokes()[0].len(), SAMPLES_PER_STROKE);
        let b = Aabb::enclosing(g.points()).unwrap();
        assert!((b.width() - 1.0).abs() < 1e-9);
        assert!((b.height() - 1.0).abs() < 1e-9);
        let c = g.points().fold(Point2::ORIGIN, |a, p| a + p) * (1.0 / 32.0);
        assert!(c.norm() < 1e-6);
    }

    #[test]
    fn normalize_removes_position_and_scale() {
        let a = normalize(&square_at(100.0, 100.0, 10.0)).unwrap();
        let b = normalize(&square_at(-40.0, 700.0, 30.0)).unwrap();
        for (p, q) in a.points().zip(b.points()) {
            assert!(p.distance(q) < 1e-6);
        }
        assert!(glyph_distance(&a, &b).unwrap() < 1e-6);
    }

    #[test]
    fn normalize_rectangle_keeps_aspect() {
        let rect = StrokeSet::single(stroke(&[
            (0.0, 0.0),
            (20.0, 0.0),
            (20.0, 10.0),
            (0.0, 10.0),
            (0.0, 0.0),
        ]));
        let b = Aabb::enclosing(normalize(&rect).unwrap().points()).unwrap();
        assert!((b.width() - 1.0).abs() < 1e-9);
        assert!((b.height() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn self_distance_zero_and_count_mismatch() {
        let a = normalize(&square_at(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(glyph_distance(&a, &a).unwrap(), 0.0);
        let two = StrokeSet::new(vec![
            stroke(&[(0.0, 0.0), (1.0, 0.0)]),
            stroke(&[(0.0, 1.0), (1.0, 1.0)]),
        ])
        .unwrap();
        let b = normalize(&two).unwrap();
        assert_eq!(
            glyph_distance(&a, &b).unwrap_err(),
            StrokeError::StrokeCountMismatch { left: 1, right: 2 }
        );
    }

    #[test]
    fn horizontal_vs_vertical_bar() {
        // Oracle: both bars normalize to 32 evenly spaced points on a unit
        // segment through the origin; sum pointwise distances by hand.
        let h = normalize(&StrokeSet::single(stroke(&[(0.0, 0.0), (50.0, 0.0)]))).unwrap();
        let v = normalize(&StrokeSet::single(stroke(&[(0.0, 0.0), (0.0, 50.0)]))).unwrap();
        let mut sum = 0.0;
        for i in 0..32 {
            let u = i as f64 / 31.0 - 0.5;
            sum += (2.0 * u * u).sqrt();
        }
        let expected = sum / 32.0;
        let got = glyph_distance(&h, &v).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!(got > 0.0);
    }
}
