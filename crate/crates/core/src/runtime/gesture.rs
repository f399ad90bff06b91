//! Pointer-trace classification. Every completed trace maps to exactly one
//! [`GestureEvent`].

use crate::geom::Point2;
use crate::stroke::Trace;
use crate::{SketchId, Tick};

use super::sketch::HitZone;

/// Logical board side length.
pub const BOARD_SIZE: f64 = 1000.0;
/// A click strays less than this from its start (1% of the board).
pub const CLICK_TRAVEL: f64 = BOARD_SIZE * 0.01;
pub const CLICK_TICKS: Tick = 18;
/// A swipe covers at least this much ground (5% of the board)...
pub const SWIPE_TRAVEL: f64 = BOARD_SIZE * 0.05;
/// ...within this many ticks.
pub const SWIPE_TICKS: Tick = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwipeDirection {
    Left,
    Right,
    Up,
    Down,
}

impl SwipeDirection {
    /// Dominant axis of a displacement, y pointing down.
    pub fn of(d: Point2) -> Self {
        if d.x.abs() >= d.y.abs() {
            if d.x < 0.0 {
                SwipeDirection::Left
            } else {
                SwipeDirection::Right
            }
        } else if d.y < 0.0 {
            SwipeDirection::Up
        } else {
            SwipeDirection::Down
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GestureEvent {
    Click(Point2),
    Swipe {
        direction: SwipeDirection,
        /// Topmost sketch under the start of the swipe.
        over: Option<SketchId>,
    },
    CommandDrag {
        sketch: SketchId,
        trace: Trace,
    },
    Drag {
        sketch: SketchId,
        trace: Trace,
    },
    GlyphDrawn(Trace),
}

/// Classifies a finished trace. `hit` reports the topmost sketch at a board
/// point and which zone of it was hit.
pub fn classify_gesture(
    trace: &Trace,
    hit: impl Fn(Point2) -> Option<(SketchId, HitZone)>,
) -> GestureEvent {
    let start = trace.first();
    if trace.excursion() < CLICK_TRAVEL && trace.duration() < CLICK_TICKS {
        return GestureEvent::Click(start);
    }
    let d = trace.displacement();
    if d.norm() >= SWIPE_TRAVEL && trace.duration() <= SWIPE_TICKS {
        return GestureEvent::Swipe {
            direction: SwipeDirection::of(d),
            over: hit(start).map(|(id, _)| id),
        };
    }
    match hit(start) {
        Some((sketch, HitZone::Periphery)) => GestureEvent::CommandDrag {
            sketch,
            trace: trace.clone(),
        },
        Some((sketch, HitZone::Inside)) => GestureEvent::Drag {
            sketch,
            trace: trace.clone(),
        },
        None => GestureEvent::GlyphDrawn(trace.clone()),
    }
}
