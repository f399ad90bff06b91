//! The board: sketches, links, pending ink and the tick loop that drives
//! them.
//!
//! Each call to [`Scene::step`] runs one tick in a fixed phase order:
//! link propagation (using outputs as they stood at tick start), animation
//! ops, queued inputs, physics, then render. Nothing reads a clock; the
//! same inputs at the same ticks always produce the same frames.

pub mod command;
pub mod gesture;
pub mod sketch;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::animator::{AnimatorError, FinishedOp, OpHost, OpQueue, OpStatus, Step};
use crate::draw::{Color, DrawList, Transform};
use crate::geom::{polyline_self_intersects, Aabb, Point2};
use crate::recognizer::{GlyphLibrary, Match, OverlayGestureKind, RecognizeError};
use crate::sketches::bst::{InsertOp, RemoveOp, TraverseOp, UndoError};
use crate::sketches::stack::{PopOp, PushOp};
use crate::sketches::{NumericState, OnBst, OnStack, SketchState, StackError};
use crate::stroke::{resample, Stroke, StrokeError, StrokeSet, Trace, SAMPLES_PER_STROKE};
use crate::value::Value;
use crate::{SketchId, Tick};

pub use command::Command;
pub use gesture::{classify_gesture, GestureEvent, SwipeDirection};
pub use sketch::{HitZone, Link, Sketch};

/// A periphery click arms deletion for this long.
pub const DELETE_WINDOW: Tick = 60;
/// Board size of a numeric sketch spawned without a glyph.
pub const NUMERIC_SIZE: f64 = 60.0;
pub const MIN_SKETCH_SIZE: f64 = 40.0;
pub const MIN_SCALE: f64 = 10.0;
pub const MAX_SCALE: f64 = 3000.0;
/// Clicks within this margin of the pending glyph confirm it.
pub const CONFIRM_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerPhase {
    Down,
    Move,
    Up,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Pointer { phase: PointerPhase, at: Point2 },
    SpawnNumeric { value: i64, at: Point2 },
    Confirm,
    ResumeBreakpoint(SketchId),
    SetBreakpoint { sketch: SketchId, tag: String, enabled: bool },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("no recognized glyph to confirm")]
    NothingToConfirm,
    #[error("unknown sketch type {0:?}")]
    UnknownSketchType(String),
    #[error("sketch {0} cannot link to itself")]
    SelfLink(SketchId),
    #[error("link {from} -> {to} already exists")]
    DuplicateLink { from: SketchId, to: SketchId },
    #[error("no sketch with id {0}")]
    UnknownSketch(SketchId),
    #[error("sketch {0} is not a tree")]
    NotATree(SketchId),
    #[error("sketch {0} is still animating")]
    OpInFlight(SketchId),
    #[error("sketch {sketch}: {error}")]
    Undo { sketch: SketchId, error: UndoError },
    #[error(transparent)]
    Breakpoint(#[from] AnimatorError),
    #[error("sketch {sketch}: {error}")]
    FrameMismatch { sketch: SketchId, error: StackError },
    #[error(transparent)]
    Stroke(#[from] StrokeError),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
}

/// Things that happened during a tick, for observers such as a UI.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneEvent {
    Recognized { hint: Match, bounds: Aabb },
    Instantiated { id: SketchId, sketch_type: String },
    Linked(Link),
    Removed(SketchId),
    TraversalStarted { sketch: SketchId, kind: OverlayGestureKind },
    OpFinished(FinishedOp),
    Rejected(SceneError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Capture {
    None,
    Numeric { id: SketchId, home: Point2, offset: Point2 },
    Pendulum(SketchId),
}

#[derive(Debug, Clone)]
struct ActivePointer {
    trace: Trace,
    capture: Capture,
}

struct StateHost<'a>(&'a mut BTreeMap<SketchId, Sketch>);

impl OpHost<SketchState> for StateHost<'_> {
    fn op_target(&mut self, owner: SketchId) -> Option<&mut SketchState> {
        self.0.get_mut(&owner).map(|s| &mut s.state)
    }
}

pub struct Scene {
    library: Arc<GlyphLibrary>,
    sketches: BTreeMap<SketchId, Sketch>,
    links: Vec<Link>,
    pending: Vec<Stroke>,
    hint: Option<Match>,
    ops: OpQueue<SketchState>,
    tick: Tick,
    next_sketch: SketchId,
    next_link: u64,
    pointer: Option<ActivePointer>,
    armed_delete: Option<(SketchId, Tick)>,
    events: Vec<SceneEvent>,
}

impl Scene {
    pub fn new(library: Arc<GlyphLibrary>) -> Self {
        Self {
            library,
            sketches: BTreeMap::new(),
            links: Vec::new(),
            pending: Vec::new(),
            hint: None,
            ops: OpQueue::new(),
            tick: 0,
            next_sketch: 1,
            next_link: 1,
            pointer: None,
            armed_delete: None,
            events: Vec::new(),
        }
    }

    pub fn library(&self) -> &Arc<GlyphLibrary> {
        &self.library
    }

    /// The next tick [`step`](Self::step) will run.
    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn sketches(&self) -> &BTreeMap<SketchId, Sketch> {
        &self.sketches
    }

    pub fn sketch(&self, id: SketchId) -> Option<&Sketch> {
        self.sketches.get(&id)
    }

    pub fn sketch_mut(&mut self, id: SketchId) -> Option<&mut Sketch> {
        self.sketches.get_mut(&id)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn pending_strokes(&self) -> &[Stroke] {
        &self.pending
    }

    pub fn hint(&self) -> Option<&Match> {
        self.hint.as_ref()
    }

    pub fn pending_bounds(&self) -> Option<Aabb> {
        Aabb::enclosing(self.pending.iter().flat_map(|s| s.points().iter().copied()))
    }

    pub fn is_idle(&self, id: SketchId) -> bool {
        self.ops.is_idle(id)
    }

    pub fn all_idle(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op_status(&self, id: SketchId) -> Option<&OpStatus> {
        self.ops.head_status(id)
    }

    pub fn take_events(&mut self) -> Vec<SceneEvent> {
        std::mem::take(&mut self.events)
    }

    /// Runs one tick and returns its frame.
    pub fn step(&mut self, inputs: &[Input]) -> DrawList {
        let now = self.tick;
        self.propagate(now);
        self.ops.tick_ops(now, &mut StateHost(&mut self.sketches));
        for done in self.ops.take_finished() {
            self.events.push(SceneEvent::OpFinished(done));
        }
        for input in inputs {
            self.apply_input(input, now);
        }
        for s in self.sketches.values_mut() {
            s.state.physics();
        }
        let frame = self.render_at(now);
        self.tick += 1;
        frame
    }

    /// Delivers each link's source output, read before any delivery, in
    /// link creation order.
    fn propagate(&mut self, now: Tick) {
        let deliveries: Vec<(SketchId, Value)> = self
            .links
            .iter()
            .filter_map(|l| Some((l.target, self.sketches.get(&l.source)?.state.output())))
            .collect();
        for (target, v) in deliveries {
            let Some(s) = self.sketches.get_mut(&target) else {
                continue;
            };
            if let Err(error) = s.state.ingest(&v, now) {
                self.reject(SceneError::FrameMismatch {
                    sketch: target,
                    error,
                });
            }
        }
    }

    fn reject(&mut self, e: SceneError) {
        self.events.push(SceneEvent::Rejected(e));
    }

    fn apply_input(&mut self, input: &Input, now: Tick) {
        let result = match input {
            Input::Pointer { phase, at } => {
                self.pointer_event(*phase, *at, now);
                Ok(())
            }
            Input::SpawnNumeric { value, at } => {
                self.spawn_numeric(*value, *at);
                Ok(())
            }
            Input::Confirm => self.confirm().map(|_| ()),
            Input::ResumeBreakpoint(id) => self.ops.resume_breakpoint(*id).map_err(Into::into),
            Input::SetBreakpoint {
                sketch,
                tag,
                enabled,
            } => self.set_breakpoint(*sketch, tag, *enabled),
        };
        if let Err(e) = result {
            self.reject(e);
        }
    }

    fn pointer_event(&mut self, phase: PointerPhase, at: Point2, now: Tick) {
        if !at.is_finite() {
            return;
        }
        match phase {
            PointerPhase::Down => {
                if let Some(prev) = self.pointer.take() {
                    self.finish_trace(prev, now);
                }
                let capture = self.capture_at(at, now);
                self.pointer = Some(ActivePointer {
                    trace: Trace::start(at, now),
                    capture,
                });
            }
            PointerPhase::Move | PointerPhase::Up => {
                let Some(mut active) = self.pointer.take() else {
                    return;
                };
                active.trace.push(at, now);
                self.track_capture(active.capture, at, now);
                if phase == PointerPhase::Move {
                    self.pointer = Some(active);
                } else {
                    self.finish_trace(active, now);
                }
            }
        }
    }

    /// Topmost sketch at a board point and which part of it was hit.
    pub fn hit_test(&self, p: Point2) -> Option<(SketchId, HitZone)> {
        self.sketches
            .values()
            .rev()
            .find_map(|s| s.hit(p).map(|z| (s.id, z)))
    }

    fn capture_at(&mut self, at: Point2, now: Tick) -> Capture {
        let Some((id, HitZone::Inside)) = self.hit_test(at) else {
            return Capture::None;
        };
        let sketch = self.sketches.get_mut(&id).expect("hit sketch exists");
        let local = sketch.to_local(at);
        match &mut sketch.state {
            SketchState::Numeric(_) => Capture::Numeric {
                id,
                home: sketch.transform.position,
                offset: at - sketch.transform.position,
            },
            SketchState::Pendulum(p) if p.hits_bob(local) => {
                p.grab(local, now);
                Capture::Pendulum(id)
            }
            _ => Capture::None,
        }
    }

    fn track_capture(&mut self, capture: Capture, at: Point2, now: Tick) {
        match capture {
            Capture::None => {}
            Capture::Numeric { id, offset, .. } => {
                if let Some(s) = self.sketches.get_mut(&id) {
                    s.transform.position = at - offset;
                }
            }
            Capture::Pendulum(id) => {
                if let Some(s) = self.sketches.get_mut(&id) {
                    let local = s.to_local(at);
                    if let SketchState::Pendulum(p) = &mut s.state {
                        p.drag_to(local, now);
                    }
                }
            }
        }
    }

    fn finish_trace(&mut self, active: ActivePointer, now: Tick) {
        let trace = active.trace;
        let is_click =
            trace.excursion() < gesture::CLICK_TRAVEL && trace.duration() < gesture::CLICK_TICKS;
        match active.capture {
            Capture::Pendulum(id) => {
                if let Some(SketchState::Pendulum(p)) =
                    self.sketches.get_mut(&id).map(|s| &mut s.state)
                {
                    p.release();
                }
                return;
            }
            Capture::Numeric { id, home, .. } => {
                if !is_click {
                    self.drop_numeric(id, home, trace.last());
                    return;
                }
                if let Some(s) = self.sketches.get_mut(&id) {
                    s.transform.position = home;
                }
            }
            Capture::None => {}
        }
        if let Some((id, armed_at)) = self.armed_delete.take() {
            if !is_click
                && now.saturating_sub(armed_at) <= DELETE_WINDOW
                && polyline_self_intersects(trace.points())
            {
                let _ = self.remove_sketch(id);
                return;
            }
        }
        let g = classify_gesture(&trace, |p| self.hit_test(p));
        self.dispatch(g, &trace, now);
    }

    fn dispatch(&mut self, g: GestureEvent, trace: &Trace, now: Tick) {
        match g {
            GestureEvent::Click(p) => self.click(p, now),
            GestureEvent::Swipe { direction, over } => {
                let Some(id) = over else {
                    // Quick strokes on empty board are still ink.
                    self.add_glyph_stroke(trace);
                    return;
                };
                let result = match (direction, self.sketches[&id].type_name()) {
                    (SwipeDirection::Left, "bst") => self.undo(id, now),
                    (SwipeDirection::Down, "stack") => {
                        self.ops.enqueue(id, Box::new(OnStack(PopOp::new())));
                        Ok(())
                    }
                    _ => Ok(()),
                };
                if let Err(e) = result {
                    self.reject(e);
                }
            }
            GestureEvent::CommandDrag { sketch, trace } => self.apply_command(sketch, &trace),
            GestureEvent::Drag { sketch, trace } => self.drag(sketch, &trace),
            GestureEvent::GlyphDrawn(trace) => self.add_glyph_stroke(&trace),
        }
    }

    fn click(&mut self, p: Point2, now: Tick) {
        let on_glyph = self
            .pending_bounds()
            .is_some_and(|b| b.padded(CONFIRM_MARGIN).contains(p));
        if on_glyph && self.hint.is_some() {
            if let Err(e) = self.confirm() {
                self.reject(e);
            }
            return;
        }
        match self.hit_test(p) {
            Some((id, HitZone::Periphery)) => self.armed_delete = Some((id, now)),
            Some((id, HitZone::Inside)) => {
                if matches!(self.ops.head_status(id), Some(OpStatus::AtBreakpoint(_))) {
                    let _ = self.ops.resume_breakpoint(id);
                }
            }
            None => {}
        }
    }

    fn drag(&mut self, id: SketchId, trace: &Trace) {
        let sketch = &self.sketches[&id];
        match &sketch.state {
            SketchState::Bst(_) => {
                let local: Vec<Point2> = trace.points().iter().map(|&p| sketch.to_local(p)).collect();
                let Ok(stroke) = Stroke::from_points(local) else {
                    return;
                };
                if let Some(m) = self.library.recognize_overlay(&stroke, &OverlayGestureKind::ALL) {
                    self.ops.enqueue(id, Box::new(OnBst(TraverseOp::new(m.kind))));
                    self.events.push(SceneEvent::TraversalStarted {
                        sketch: id,
                        kind: m.kind,
                    });
                }
            }
            SketchState::Stack(_) => {
                let d = trace.displacement();
                if d.y >= gesture::SWIPE_TRAVEL && d.y > d.x.abs() {
                    self.ops.enqueue(id, Box::new(OnStack(PopOp::new())));
                }
            }
            _ => {}
        }
    }

    fn add_glyph_stroke(&mut self, trace: &Trace) {
        let stroke = match trace.to_stroke() {
            Ok(s) => s,
            Err(e) => return self.reject(e.into()),
        };
        let most = self
            .library
            .templates()
            .iter()
            .map(|t| t.glyph.stroke_count())
            .max()
            .unwrap_or(1);
        if self.pending.len() >= most {
            // No template has this many strokes; begin a new glyph.
            self.pending.clear();
        }
        self.pending.push(stroke);
        let set = StrokeSet::new(self.pending.clone()).expect("pending is non-empty");
        match self.library.recognize(&set) {
            Ok(hint) => {
                self.hint = hint.clone();
                if let (Some(hint), Some(bounds)) = (hint, self.pending_bounds()) {
                    self.events.push(SceneEvent::Recognized { hint, bounds });
                }
            }
            Err(e) => self.reject(e.into()),
        }
    }

    /// Turns the recognized pending glyph into a sketch at its centroid,
    /// sized to the drawing.
    pub fn confirm(&mut self) -> Result<SketchId, SceneError> {
        let hint = self.hint.clone().ok_or(SceneError::NothingToConfirm)?;
        let state = SketchState::for_template(&hint.sketch_type, &hint.template_name)
            .ok_or_else(|| SceneError::UnknownSketchType(hint.sketch_type.clone()))?;
        let mut samples = Vec::new();
        for s in &self.pending {
            samples.extend(resample(s, SAMPLES_PER_STROKE)?);
        }
        let n = samples.len().max(1) as f64;
        let centroid = samples.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) * (1.0 / n);
        let size = self
            .pending_bounds()
            .map_or(MIN_SKETCH_SIZE, |b| b.max_dimension().max(MIN_SKETCH_SIZE));
        let id = self.add_sketch(state, Transform::at(centroid, size));
        self.pending.clear();
        self.hint = None;
        Ok(id)
    }

    pub fn add_sketch(&mut self, state: SketchState, transform: Transform) -> SketchId {
        let id = self.next_sketch;
        self.next_sketch += 1;
        self.events.push(SceneEvent::Instantiated {
            id,
            sketch_type: state.type_name().to_string(),
        });
        self.sketches.insert(
            id,
            Sketch {
                id,
                transform,
                state,
            },
        );
        id
    }

    pub fn spawn_numeric(&mut self, value: i64, at: Point2) -> SketchId {
        self.add_sketch(
            SketchState::Numeric(NumericState::new(value)),
            Transform::at(at, NUMERIC_SIZE),
        )
    }

    pub fn create_link(&mut self, source: SketchId, target: SketchId) -> Result<u64, SceneError> {
        for id in [source, target] {
            if !self.sketches.contains_key(&id) {
                return Err(SceneError::UnknownSketch(id));
            }
        }
        if source == target {
            return Err(SceneError::SelfLink(source));
        }
        if self.links.iter().any(|l| l.source == source && l.target == target) {
            return Err(SceneError::DuplicateLink {
                from: source,
                to: target,
            });
        }
        let link = Link {
            id: self.next_link,
            source,
            target,
        };
        self.next_link += 1;
        self.links.push(link);
        self.events.push(SceneEvent::Linked(link));
        Ok(link.id)
    }

    /// Deletes a sketch together with its links and pending ops.
    pub fn remove_sketch(&mut self, id: SketchId) -> Result<Sketch, SceneError> {
        let sketch = self.sketches.remove(&id).ok_or(SceneError::UnknownSketch(id))?;
        self.links.retain(|l| l.source != id && l.target != id);
        self.ops.drop_owner(id);
        if let Some(p) = &mut self.pointer {
            if matches!(p.capture, Capture::Numeric { id: c, .. } | Capture::Pendulum(c) if c == id)
            {
                p.capture = Capture::None;
            }
        }
        if self.armed_delete.is_some_and(|(a, _)| a == id) {
            self.armed_delete = None;
        }
        self.events.push(SceneEvent::Removed(id));
        Ok(sketch)
    }

    pub fn enqueue_op(
        &mut self,
        owner: SketchId,
        step: Box<dyn Step<SketchState>>,
    ) -> Result<(), SceneError> {
        if !self.sketches.contains_key(&owner) {
            return Err(SceneError::UnknownSketch(owner));
        }
        self.ops.enqueue(owner, step);
        Ok(())
    }

    pub fn set_breakpoint(&mut self, id: SketchId, tag: &str, enabled: bool) -> Result<(), SceneError> {
        let s = self.sketches.get_mut(&id).ok_or(SceneError::UnknownSketch(id))?;
        let bst = s.state.as_bst_mut().ok_or(SceneError::NotATree(id))?;
        bst.set_breakpoint(tag, enabled);
        Ok(())
    }

    /// Reverts a tree's last completed mutation. Refused while the tree is
    /// animating.
    pub fn undo(&mut self, id: SketchId, now: Tick) -> Result<(), SceneError> {
        let idle = self.ops.is_idle(id);
        let s = self.sketches.get_mut(&id).ok_or(SceneError::UnknownSketch(id))?;
        let bst = s.state.as_bst_mut().ok_or(SceneError::NotATree(id))?;
        if !idle {
            bst.flash(now);
            return Err(SceneError::OpInFlight(id));
        }
        bst.undo(now).map_err(|error| SceneError::Undo { sketch: id, error })
    }

    /// A dropped numeric is consumed by a tree or stack under the drop
    /// point, snaps home over any other sketch, and stays put on empty board.
    fn drop_numeric(&mut self, id: SketchId, home: Point2, at: Point2) {
        let Some(SketchState::Numeric(n)) = self.sketches.get(&id).map(|s| &s.state) else {
            return;
        };
        let value = n.value;
        let target = self
            .sketches
            .values()
            .rev()
            .find(|s| s.id != id && s.bounds().contains(at))
            .map(|s| (s.id, s.state.accepts_drops()));
        match target {
            Some((t, true)) => {
                let step: Box<dyn Step<SketchState>> = match &self.sketches[&t].state {
                    SketchState::Bst(b) if b.contains(value) => Box::new(OnBst(RemoveOp::new(value))),
                    SketchState::Bst(_) => Box::new(OnBst(InsertOp::new(value))),
                    _ => Box::new(OnStack(PushOp::new(Value::Int(value)))),
                };
                self.ops.enqueue(t, step);
                let _ = self.remove_sketch(id);
            }
            Some((_, false)) => {
                if let Some(s) = self.sketches.get_mut(&id) {
                    s.transform.position = home;
                }
            }
            None => {}
        }
    }

    /// Move, link, scale or rotate, depending on how the command drag moved.
    fn apply_command(&mut self, id: SketchId, trace: &Trace) {
        let Some(sketch) = self.sketches.get(&id) else {
            return;
        };
        let center = sketch.center();
        if command::hold_duration(trace) < command::HOLD_TICKS {
            let end = trace.last();
            let target = self
                .sketches
                .values()
                .rev()
                .find(|s| s.id != id && s.hit(end).is_some())
                .map(|s| s.id);
            if let Some(target) = target {
                if let Err(e) = self.create_link(id, target) {
                    self.reject(e);
                }
                return;
            }
        }
        let t = &mut self.sketches.get_mut(&id).expect("checked above").transform;
        match command::interpret(trace, center) {
            Command::Translate(d) => t.position = t.position + d,
            Command::Scale(k) => t.scale = (t.scale * k).clamp(MIN_SCALE, MAX_SCALE),
            Command::Rotate(a) => t.rotation += a,
        }
    }

    /// The frame for the most recently completed tick. Does not mutate.
    pub fn render(&self) -> DrawList {
        self.render_at(self.tick.saturating_sub(1))
    }

    fn render_at(&self, now: Tick) -> DrawList {
        let mut out = DrawList::new();
        for s in self.sketches.values() {
            s.render(now, &mut out);
        }
        for l in &self.links {
            let (Some(a), Some(b)) = (self.sketches.get(&l.source), self.sketches.get(&l.target))
            else {
                continue;
            };
            let (p0, p1) = (a.center(), b.center());
            out.line(p0, p1, Color::LINK, 2.0);
            let back = p0 - p1;
            let len = back.norm();
            if len > 0.0 {
                let tip = p1 + back * (b.bounds().circumradius() / len).min(0.5);
                let barb = back * (12.0 / len);
                out.line(tip, tip + barb.rotated(0.4), Color::LINK, 2.0);
                out.line(tip, tip + barb.rotated(-0.4), Color::LINK, 2.0);
            }
        }
        for s in &self.pending {
            out.curve(s.points().to_vec(), Color::INK, 3.0);
        }
        if let (Some(hint), Some(b)) = (&self.hint, self.pending_bounds()) {
            out.text(
                hint.template_name.clone(),
                Point2::new(b.center().x, b.min.y - 20.0),
                18.0,
                Color::DIM,
            );
        }
        if let Some(p) = &self.pointer {
            if p.capture == Capture::None && p.trace.points().len() > 1 {
                out.curve(p.trace.points().to_vec(), Color::INK, 3.0);
            }
        }
        out
    }
}
