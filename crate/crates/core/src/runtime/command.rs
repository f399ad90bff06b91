//! Interpretation of command drags: gestures that start on a sketch's
//! periphery and change the sketch itself.

use crate::geom::{signed_angle, Point2};
use crate::stroke::Trace;
use crate::Tick;

use super::gesture::CLICK_TRAVEL;

/// Holding still this long before moving turns a command drag into a move.
pub const HOLD_TICKS: Tick = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    Translate(Point2),
    Scale(f64),
    Rotate(f64),
}

/// How long the pointer stayed within click distance of where it went down.
pub fn hold_duration(trace: &Trace) -> Tick {
    let start = trace.first();
    let t0 = trace.ticks()[0];
    let left = trace
        .points()
        .iter()
        .zip(trace.ticks())
        .find(|(p, _)| p.distance(start) >= CLICK_TRAVEL)
        .map_or(*trace.ticks().last().unwrap(), |(_, &t)| t);
    left - t0
}

/// Sum of the signed angle steps the trace sweeps around `center`.
pub fn swept_angle(trace: &Trace, center: Point2) -> f64 {
    trace
        .points()
        .windows(2)
        .map(|w| signed_angle(w[0] - center, w[1] - center))
        .sum()
}

/// Chooses between move, scale and rotate. Radial motion scales by the
/// ratio of end to start distance from `center`; tangential motion rotates
/// by the swept angle.
pub fn interpret(trace: &Trace, center: Point2) -> Command {
    if hold_duration(trace) >= HOLD_TICKS {
        return Command::Translate(trace.displacement());
    }
    let r0 = trace.first().distance(center);
    let r1 = trace.last().distance(center);
    let sweep = swept_angle(trace, center);
    let radial = (r1 - r0).abs();
    let tangential = sweep.abs() * 0.5 * (r0 + r1);
    if radial >= tangential && r0 > 0.0 {
        Command::Scale(r1 / r0)
    } else {
        Command::Rotate(sweep)
    }
}
