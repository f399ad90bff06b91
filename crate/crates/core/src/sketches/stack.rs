//! LIFO stack sketch.
//!
//! Values arrive two ways: dropped numerics become animated pushes, and
//! records from a linked tree are ingested directly. Records are
//! deduplicated by sequence number because a link redelivers the source's
//! output every tick. `enter`/`exit` records drive a call-stack view; the
//! other kinds append to a history.

use thiserror::Error;

use crate::animator::{interpolate, Advance, OpFault, Step, YieldPoint};
use crate::draw::{Color, DrawList};
use crate::geom::Point2;
use crate::value::Value;
use crate::Tick;

pub const SLIDE_TICKS: u32 = 24;
pub const FLASH_TICKS: Tick = 12;
/// Half the width of the stack's local frame.
pub const HALF_WIDTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StackMode {
    #[default]
    History,
    CallStack,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StackError {
    #[error("exit({value}) does not match the top frame {top:?}")]
    FrameMismatch { value: String, top: Option<String> },
}

/// A value sliding into or out of the top slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Slide {
    pub value: Value,
    pub entering: bool,
    pub start: Tick,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StackState {
    items: Vec<Value>,
    last_seq_processed: Option<u64>,
    mode: StackMode,
    flash_until: Tick,
    slide: Option<Slide>,
}

impl StackState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_items<I: IntoIterator<Item = Value>>(items: I) -> Self {
        Self {
            items: items.into_iter().collect(),
            ..Self::default()
        }
    }

    /// Bottom to top.
    pub fn items(&self) -> &[Value] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn mode(&self) -> StackMode {
        self.mode
    }

    pub fn last_seq_processed(&self) -> Option<u64> {
        self.last_seq_processed
    }

    pub fn push(&mut self, v: Value) {
        self.items.push(v);
    }

    pub fn pop(&mut self) -> Option<Value> {
        self.items.pop()
    }

    /// The top item, or `Null` when empty.
    pub fn output(&self) -> Value {
        self.items.last().cloned().unwrap_or_default()
    }

    pub fn flash(&mut self, now: Tick) {
        self.flash_until = now + FLASH_TICKS;
    }

    pub fn is_flashing(&self, now: Tick) -> bool {
        now < self.flash_until
    }

    /// Handles one linked delivery. Returns whether the stack changed.
    pub fn ingest(&mut self, v: &Value, now: Tick) -> Result<bool, StackError> {
        let Value::Record(rec) = v else {
            return Ok(false);
        };
        if self.last_seq_processed.is_some_and(|last| rec.seq <= last) {
            return Ok(false);
        }
        self.last_seq_processed = Some(rec.seq);
        match rec.kind.as_str() {
            "insert" | "remove" | "visit" => {
                self.mode = StackMode::History;
                self.items.push(Value::Text(rec.to_string()));
                Ok(true)
            }
            "enter" => {
                self.mode = StackMode::CallStack;
                self.items.push(Value::Text(rec.to_string()));
                Ok(true)
            }
            "exit" => {
                self.mode = StackMode::CallStack;
                let value = rec.fields.get("value").cloned().unwrap_or_default().to_string();
                let expected = format!("enter({value})");
                match self.items.last() {
                    Some(Value::Text(top)) if *top == expected => {
                        self.items.pop();
                        Ok(true)
                    }
                    top => {
                        let top = top.map(|t| t.to_string());
                        self.flash(now);
                        Err(StackError::FrameMismatch { value, top })
                    }
                }
            }
            _ => Ok(false),
        }
    }

    fn slot_height(&self) -> f64 {
        (0.9 / (self.items.len() + 1) as f64).min(0.15)
    }

    fn slot_center(&self, index: usize) -> Point2 {
        Point2::new(0.0, 0.45 - (index as f64 + 0.5) * self.slot_height())
    }

    pub fn render(&self, now: Tick, out: &mut DrawList) {
        let w = HALF_WIDTH;
        out.curve(
            vec![
                Point2::new(-w, -0.5),
                Point2::new(-w, 0.5),
                Point2::new(w, 0.5),
                Point2::new(w, -0.5),
            ],
            Color::INK,
            0.015,
        );
        let h = self.slot_height();
        for (i, item) in self.items.iter().enumerate() {
            let c = self.slot_center(i);
            let half = Point2::new(w * 0.85, h * 0.45);
            out.rect(c - half, c + half, Color::ACCENT, 0.01);
            out.text(item.to_string(), c, h * 0.5, Color::INK);
        }
        if let Some(slide) = &self.slide {
            let top = self.slot_center(self.items.len());
            let above = Point2::new(0.0, -0.6);
            let t = now.saturating_sub(slide.start) as f64 / SLIDE_TICKS as f64;
            let (from, to) = if slide.entering { (above, top) } else { (top, above) };
            let at = Point2::new(interpolate(from.x, to.x, t), interpolate(from.y, to.y, t));
            out.text(slide.value.to_string(), at, h * 0.5, Color::HIGHLIGHT);
        }
        if self.is_flashing(now) {
            // Shake sideways while flashing.
            let dx = if now % 2 == 0 { 0.02 } else { -0.02 };
            out.rect(Point2::new(-w + dx, -0.5), Point2::new(w + dx, 0.5), Color::ALERT, 0.01);
        }
        if self.mode == StackMode::CallStack {
            out.text("call stack", Point2::new(0.0, 0.58), 0.06, Color::DIM);
        }
    }
}

/// Slides a value onto the top slot, then appends it.
pub struct PushOp {
    value: Value,
    started: bool,
}

impl PushOp {
    pub fn new(value: Value) -> Self {
        Self {
            value,
            started: false,
        }
    }
}

impl Step<StackState> for PushOp {
    fn label(&self) -> String {
        format!("push({})", self.value)
    }

    fn advance(&mut self, stack: &mut StackState, now: Tick) -> Result<Advance, OpFault> {
        if !self.started {
            self.started = true;
            stack.slide = Some(Slide {
                value: self.value.clone(),
                entering: true,
                start: now,
            });
            return Ok(Advance::Yield(YieldPoint::Pause(SLIDE_TICKS)));
        }
        stack.slide = None;
        stack.items.push(self.value.clone());
        Ok(Advance::Complete(self.value.clone()))
    }
}

/// Removes the top value and slides it out upward. Completes with the value,
/// or with `Null` (after a shake) on an empty stack.
#[derive(Default)]
pub struct PopOp {
    popped: Option<Value>,
}

impl PopOp {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Step<StackState> for PopOp {
    fn label(&self) -> String {
        "pop".into()
    }

    fn advance(&mut self, stack: &mut StackState, now: Tick) -> Result<Advance, OpFault> {
        if let Some(v) = self.popped.take() {
            stack.slide = None;
            return Ok(Advance::Complete(v));
        }
        let Some(v) = stack.items.pop() else {
            stack.flash(now);
            return Ok(Advance::Complete(Value::Null));
        };
        stack.slide = Some(Slide {
            value: v.clone(),
            entering: false,
            start: now,
        });
        self.popped = Some(v);
        Ok(Advance::Yield(YieldPoint::Pause(SLIDE_TICKS)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::animator::{OpOutcome, OpQueue};
    use crate::value::Record;
    use std::collections::BTreeMap;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|&i| Value::Int(i)).collect()
    }

    fn record(kind: &str, value: i64, seq: u64) -> Value {
        Value::Record(Record::new(kind, seq).with("value", Value::Int(value)))
    }

    fn run(stack: StackState, step: Box<dyn Step<StackState>>) -> (StackState, Tick, Value) {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1u64, stack)]);
        q.enqueue(1, step);
        let mut now = 0;
        while !q.is_idle(1) {
            q.tick_ops(now, &mut host);
            now += 1;
        }
        let done = q.take_finished().pop().unwrap();
        let OpOutcome::Completed(v) = done.outcome else { panic!() };
        (host.remove(&1).unwrap(), done.tick, v)
    }

    #[test]
    fn push_then_pop_restores() {
        let start = StackState::with_items(ints(&[1, 6, 1]));
        let (pushed, ticks, _) = run(start.clone(), Box::new(PushOp::new(Value::Int(8))));
        assert_eq!(pushed.items(), ints(&[1, 6, 1, 8]).as_slice());
        assert_eq!(ticks, SLIDE_TICKS as Tick);
        assert_eq!(pushed.output(), Value::Int(8));
        let (popped, _, v) = run(pushed, Box::new(PopOp::new()));
        assert_eq!(v, Value::Int(8));
        assert_eq!(popped.items(), start.items());
    }

    #[test]
    fn pop_empty_is_null_and_shakes() {
        let (s, ticks, v) = run(StackState::new(), Box::new(PopOp::new()));
        assert_eq!(v, Value::Null);
        assert_eq!(ticks, 0);
        assert!(s.is_flashing(0));
    }

    #[test]
    fn repeated_delivery_mutates_once() {
        let mut s = StackState::new();
        let r = record("remove", 5, 12);
        let changes: Vec<bool> = (0..3).map(|t| s.ingest(&r, t).unwrap()).collect();
        assert_eq!(changes, [true, false, false]);
        assert_eq!(s.items(), &[Value::Text("remove(5)".into())]);
        assert_eq!(s.mode(), StackMode::History);
    }

    #[test]
    fn same_payload_with_new_seq_is_a_new_entry() {
        let mut s = StackState::new();
        s.ingest(&record("remove", 5, 1), 0).unwrap();
        s.ingest(&record("remove", 5, 2), 0).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn non_records_are_ignored() {
        let mut s = StackState::new();
        assert!(!s.ingest(&Value::Text("x".into()), 0).unwrap());
        assert!(!s.ingest(&Value::Int(3), 0).unwrap());
        assert!(s.is_empty());
    }

    #[test]
    fn call_frames_pair_up() {
        let mut s = StackState::new();
        s.ingest(&record("enter", 4, 1), 0).unwrap();
        s.ingest(&record("enter", 2, 2), 0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.mode(), StackMode::CallStack);
        s.ingest(&record("exit", 2, 3), 0).unwrap();
        s.ingest(&record("exit", 4, 4), 0).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn mismatched_exit_leaves_stack_unchanged() {
        let mut s = StackState::new();
        s.ingest(&record("enter", 4, 1), 0).unwrap();
        let before = s.items().to_vec();
        let err = s.ingest(&record("exit", 9, 2), 3).unwrap_err();
        assert!(matches!(err, StackError::FrameMismatch { ref value, .. } if value == "9"));
        assert_eq!(s.items(), before.as_slice());
        assert!(s.is_flashing(3));
        assert_eq!(s.last_seq_processed(), Some(2));
    }

    #[test]
    fn exit_on_empty_stack_is_a_mismatch() {
        let mut s = StackState::new();
        assert!(s.ingest(&record("exit", 1, 1), 0).is_err());
    }

    #[test]
    fn render_shows_one_box_per_item() {
        let s = StackState::with_items(ints(&[1, 6, 1, 8]));
        let mut d = DrawList::new();
        s.render(0, &mut d);
        let texts: Vec<_> = d
            .commands()
            .iter()
            .filter_map(|c| match c {
                crate::draw::DrawCommand::Text { text, .. } => Some(text.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(texts, ["1", "6", "1", "8"]);
    }
}
