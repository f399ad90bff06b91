#![allow(dead_code)]

use inkboard_core::geom::{Aabb, Point2};
use inkboard_core::recognizer::GlyphLibrary;
use inkboard_core::runtime::PointerPhase;
use inkboard_core::stroke::{resample, SAMPLES_PER_STROKE};
use inkboard_core::Tick;
use inkboard_session::script::{Payload, ScriptEvent};

/// Builds input scripts one gesture at a time, advancing a cursor tick.
pub struct ScriptBuilder {
    pub events: Vec<ScriptEvent>,
    pub tick: Tick,
}

impl ScriptBuilder {
    pub fn new(start: Tick) -> Self {
        Self {
            events: Vec::new(),
            tick: start,
        }
    }

    pub fn push(&mut self, payload: Payload) -> &mut Self {
        self.events.push(ScriptEvent::new(self.tick, payload));
        self
    }

    pub fn wait(&mut self, ticks: Tick) -> &mut Self {
        self.tick += ticks;
        self
    }

    /// One pointer sample per tick: down, moves, up. Leaves a one-tick gap.
    pub fn stroke(&mut self, points: &[Point2]) -> &mut Self {
        assert!(points.len() >= 2);
        for (i, &p) in points.iter().enumerate() {
            let phase = match i {
                0 => PointerPhase::Down,
                i if i + 1 == points.len() => PointerPhase::Up,
                _ => PointerPhase::Move,
            };
            self.events.push(ScriptEvent::new(self.tick, Payload::pointer(phase, p)));
            self.tick += 1;
        }
        self.tick += 1;
        self
    }

    /// A straight pointer path of `steps` segments.
    pub fn drag(&mut self, from: Point2, to: Point2, steps: usize) -> &mut Self {
        let pts: Vec<Point2> = (0..=steps).map(|i| from.lerp(to, i as f64 / steps as f64)).collect();
        self.stroke(&pts)
    }

    pub fn click(&mut self, at: Point2) -> &mut Self {
        self.stroke(&[at, at])
    }

    /// Draws a library template's strokes with their bounding box centred on `center`.
    pub fn glyph(&mut self, library: &GlyphLibrary, name: &str, center: Point2) -> &mut Self {
        for stroke in placed_template(library, name, center) {
            self.stroke(&stroke);
        }
        self
    }

    pub fn spawn(&mut self, value: i64, at: Point2) -> &mut Self {
        self.push(Payload::SpawnNumeric {
            value,
            x: Some(at.x),
            y: Some(at.y),
        })
    }

    pub fn confirm(&mut self) -> &mut Self {
        self.push(Payload::Confirm);
        self.tick += 1;
        self
    }
}

pub fn template_bounds(library: &GlyphLibrary, name: &str) -> Aabb {
    library.template(name).expect("template exists").source.bounds()
}

/// Template strokes translated so their bounding box is centred on `center`.
pub fn placed_template(library: &GlyphLibrary, name: &str, center: Point2) -> Vec<Vec<Point2>> {
    let t = library.template(name).expect("template exists");
    let shift = center - t.source.bounds().center();
    t.source
        .strokes()
        .iter()
        .map(|s| s.points().iter().map(|&p| p + shift).collect())
        .collect()
}

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Where a confirmed glyph drawn by [`ScriptBuilder::glyph`] lands: the
/// centroid of its resampled points.
pub fn confirmed_center(library: &GlyphLibrary, name: &str, center: Point2) -> Point2 {
    let t = library.template(name).expect("template exists");
    let shift = center - t.source.bounds().center();
    let mut sum = Point2::ORIGIN;
    let mut n = 0.0;
    for s in t.source.strokes() {
        for q in resample(s, SAMPLES_PER_STROKE).expect("template strokes resample") {
            sum = sum + q + shift;
            n += 1.0;
        }
    }
    sum * (1.0 / n)
}

/// The stack walkthrough: draw a stack, drop 1, 6, 1 and a drawn 8 onto it,
/// then swipe down once.
pub struct StackWalkthrough {
    pub events: Vec<ScriptEvent>,
    pub stack_at: Point2,
    /// Tick of the first pointer sample of the closing swipe.
    pub swipe_tick: Tick,
    pub end: Tick,
}

pub fn stack_walkthrough(library: &GlyphLibrary) -> StackWalkthrough {
    let mut s = ScriptBuilder::new(5);
    s.glyph(library, "stack", p(700.0, 500.0)).confirm();
    let stack_at = confirmed_center(library, "stack", p(700.0, 500.0));
    for (i, v) in [1, 6, 1].into_iter().enumerate() {
        let home = p(150.0 + 120.0 * i as f64, 850.0);
        s.spawn(v, home).wait(1).drag(home, stack_at, 20);
    }
    s.glyph(library, "8", p(200.0, 300.0));
    s.click(p(200.0, 300.0));
    let eight_at = confirmed_center(library, "8", p(200.0, 300.0));
    s.wait(2).drag(eight_at, stack_at, 20);
    s.wait(150);
    let swipe_tick = s.tick;
    s.drag(stack_at - p(0.0, 40.0), stack_at + p(0.0, 40.0), 8);
    let end = s.tick + 60;
    StackWalkthrough {
        events: s.events,
        stack_at,
        swipe_tick,
        end,
    }
}
