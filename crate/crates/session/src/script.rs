//! Input scripts: newline-delimited JSON, one timed event per line.
//!
//! ```text
//! {"tick":3,"type":"pointer","phase":"down","x":120.0,"y":80.5}
//! {"tick":40,"type":"confirm"}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use inkboard_core::geom::Point2;
use inkboard_core::runtime::{Input, PointerPhase};
use inkboard_core::{SketchId, Tick};

/// Where a scripted numeric appears when the event gives no position.
pub const DEFAULT_SPAWN: Point2 = Point2::new(500.0, 100.0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("malformed script at line {line}: {reason}")]
    MalformedScript { line: usize, reason: String },
}

/// The engine-facing part of a script line or client message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Pointer {
        phase: PointerPhase,
        x: f64,
        y: f64,
    },
    SpawnNumeric {
        value: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<f64>,
    },
    Confirm,
    #[serde(alias = "resume")]
    ResumeBreakpoint { sketch: SketchId },
    SetBreakpoint {
        sketch: SketchId,
        tag: String,
        #[serde(default = "enabled_default")]
        enabled: bool,
    },
}

fn enabled_default() -> bool {
    true
}

impl Payload {
    pub fn to_input(&self) -> Input {
        match self {
            Payload::Pointer { phase, x, y } => Input::Pointer {
                phase: *phase,
                at: Point2::new(*x, *y),
            },
            Payload::SpawnNumeric { value, x, y } => Input::SpawnNumeric {
                value: *value,
                at: Point2::new(x.unwrap_or(DEFAULT_SPAWN.x), y.unwrap_or(DEFAULT_SPAWN.y)),
            },
            Payload::Confirm => Input::Confirm,
            Payload::ResumeBreakpoint { sketch } => Input::ResumeBreakpoint(*sketch),
            Payload::SetBreakpoint {
                sketch,
                tag,
                enabled,
            } => Input::SetBreakpoint {
                sketch: *sketch,
                tag: tag.clone(),
                enabled: *enabled,
            },
        }
    }

    pub fn pointer(phase: PointerPhase, at: Point2) -> Self {
        Payload::Pointer {
            phase,
            x: at.x,
            y: at.y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEvent {
    pub tick: Tick,
    #[serde(flatten)]
    pub payload: Payload,
}

impl ScriptEvent {
    pub fn new(tick: Tick, payload: Payload) -> Self {
        Self { tick, payload }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("script events always serialize")
    }
}

/// Parses a script, checking that ticks never decrease and that pointer
/// phases go down, move*, up. Blank lines are skipped; line numbers are
/// 1-based.
pub fn parse_script(text: &str) -> Result<Vec<ScriptEvent>, ScriptError> {
    let mut events = Vec::new();
    let mut last_tick = 0;
    let mut pointer_down = false;
    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        let bad = |reason: String| ScriptError::MalformedScript { line, reason };
        if raw.trim().is_empty() {
            continue;
        }
        let ev: ScriptEvent = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        if ev.tick < last_tick {
            return Err(bad(format!("tick {} comes after tick {last_tick}", ev.tick)));
        }
        last_tick = ev.tick;
        if let Payload::Pointer { phase, x, y } = &ev.payload {
            if !(x.is_finite() && y.is_finite()) {
                return Err(bad("pointer coordinates must be finite".into()));
            }
            match (phase, pointer_down) {
                (PointerPhase::Down, true) => return Err(bad("pointer down while already down".into())),
                (PointerPhase::Move | PointerPhase::Up, false) => {
                    return Err(bad("pointer move or up before down".into()))
                }
                _ => {}
            }
            pointer_down = *phase != PointerPhase::Up;
        }
        events.push(ev);
    }
    Ok(events)
}

/// Serializes events back to script text.
pub fn write_script(events: &[ScriptEvent]) -> String {
    events.iter().map(|e| e.to_line() + "\n").collect()
}
