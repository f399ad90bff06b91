//! Client/server messages: one JSON object per line, each carrying
//! `"version": 1`.

use serde::{Deserialize, Serialize};

use inkboard_core::draw::DrawList;
use inkboard_core::geom::Aabb;
use inkboard_core::runtime::Input;
use inkboard_core::Tick;

use crate::frames::{hex, FrameSnapshot};
use crate::script::Payload;

pub const PROTOCOL_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Frame {
        version: i64,
        tick: Tick,
        digest: String,
        drawlist: DrawList,
    },
    Recognized {
        version: i64,
        name: String,
        score: f64,
        bounds: Aabb,
    },
    Error {
        version: i64,
        code: String,
        text: String,
    },
}

impl ServerMessage {
    pub fn frame(f: &FrameSnapshot) -> Self {
        ServerMessage::Frame {
            version: PROTOCOL_VERSION,
            tick: f.tick,
            digest: hex(f.digest),
            drawlist: f.drawlist.clone(),
        }
    }

    pub fn recognized(name: &str, score: f64, bounds: Aabb) -> Self {
        ServerMessage::Recognized {
            version: PROTOCOL_VERSION,
            name: name.to_string(),
            score,
            bounds,
        }
    }

    pub fn error(code: &str, text: impl Into<String>) -> Self {
        ServerMessage::Error {
            version: PROTOCOL_VERSION,
            code: code.to_string(),
            text: text.into(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}

/// What the server should do with one client line.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Start (or restart) the engine session.
    Hello,
    /// Feed an input to the engine, at `tick` if given and not yet past.
    Input { tick: Option<Tick>, input: Input },
    Reply(ServerMessage),
    ReplyAndClose(ServerMessage),
}

const INPUT_TYPES: [&str; 6] = [
    "pointer",
    "spawn_numeric",
    "confirm",
    "resume",
    "resume_breakpoint",
    "set_breakpoint",
];

/// Per-connection protocol state. Pure: no I/O, so it can be fuzzed directly.
#[derive(Debug, Default)]
pub struct Connection {
    greeted: bool,
}

impl Connection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_greeted(&self) -> bool {
        self.greeted
    }

    /// Handles a text frame that may hold several newline-separated messages.
    /// Stops after a message that closes the connection.
    pub fn handle_text(&mut self, text: &str) -> Vec<Action> {
        let mut out = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let action = self.handle_line(line);
            let closing = matches!(action, Action::ReplyAndClose(_));
            out.push(action);
            if closing {
                break;
            }
        }
        out
    }

    pub fn handle_line(&mut self, line: &str) -> Action {
        let err = |code: &str, text: String| Action::Reply(ServerMessage::error(code, text));
        let value: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return err("parse", e.to_string()),
        };
        let Some(obj) = value.as_object() else {
            return err("parse", "message must be a JSON object".into());
        };
        let Some(kind) = obj.get("type").and_then(|t| t.as_str()) else {
            return err("parse", "missing string field \"type\"".into());
        };
        let version = obj.get("version").and_then(|v| v.as_i64());
        if version != Some(PROTOCOL_VERSION) {
            let text = format!("protocol version {PROTOCOL_VERSION} required");
            return if kind == "hello" {
                Action::ReplyAndClose(ServerMessage::error("version", text))
            } else {
                err("version", text)
            };
        }
        if kind == "hello" {
            self.greeted = true;
            return Action::Hello;
        }
        if !INPUT_TYPES.contains(&kind) {
            return err("unknown_type", format!("unknown message type {kind:?}"));
        }
        if !self.greeted {
            return err("handshake", "send hello first".into());
        }
        let tick = obj.get("tick").and_then(|t| t.as_u64());
        match serde_json::from_value::<Payload>(value) {
            Ok(payload) => {
                if let Payload::Pointer { x, y, .. } = payload {
                    if !(x.is_finite() && y.is_finite()) {
                        return err("parse", "pointer coordinates must be finite".into());
                    }
                }
                Action::Input {
                    tick,
                    input: payload.to_input(),
                }
            }
            Err(e) => err("parse", e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use inkboard_core::geom::Point2;
    use inkboard_core::runtime::PointerPhase;

    fn code(a: &Action) -> Option<&str> {
        match a {
            Action::Reply(ServerMessage::Error { code, .. })
            | Action::ReplyAndClose(ServerMessage::Error { code, .. }) => Some(code),
            _ => None,
        }
    }

    #[test]
    fn handshake_then_pointer() {
        let mut c = Connection::new();
        let a = c.handle_line(r#"{"type":"pointer","version":1,"phase":"down","x":1,"y":2}"#);
        assert_eq!(code(&a), Some("handshake"));
        assert_eq!(c.handle_line(r#"{"type":"hello","version":1}"#), Action::Hello);
        let a = c.handle_line(r#"{"type":"pointer","version":1,"phase":"down","x":1,"y":2,"tick":40}"#);
        assert_eq!(
            a,
            Action::Input {
                tick: Some(40),
                input: Input::Pointer {
                    phase: PointerPhase::Down,
                    at: Point2::new(1.0, 2.0)
                }
            }
        );
    }

    #[test]
    fn wrong_version_hello_closes() {
        let mut c = Connection::new();
        let a = c.handle_line(r#"{"type":"hello","version":2}"#);
        assert!(matches!(a, Action::ReplyAndClose(_)));
        assert_eq!(code(&a), Some("version"));
        let a = c.handle_line(r#"{"type":"hello"}"#);
        assert_eq!(code(&a), Some("version"));
    }

    #[test]
    fn errors_keep_connection_open() {
        let mut c = Connection::new();
        c.handle_line(r#"{"type":"hello","version":1}"#);
        for (line, expected) in [
            ("garbage", "parse"),
            ("[1,2]", "parse"),
            (r#"{"version":1}"#, "parse"),
            (r#"{"type":"teleport","version":1}"#, "unknown_type"),
            (r#"{"type":"confirm","version":3}"#, "version"),
            (r#"{"type":"pointer","version":1,"phase":"sideways","x":1,"y":2}"#, "parse"),
        ] {
            let a = c.handle_line(line);
            assert!(matches!(a, Action::Reply(_)), "{line}");
            assert_eq!(code(&a), Some(expected), "{line}");
        }
        assert!(c.is_greeted());
    }

    #[test]
    fn resume_and_multi_line_frames() {
        let mut c = Connection::new();
        let actions = c.handle_text("{\"type\":\"hello\",\"version\":1}\n\n{\"type\":\"resume\",\"version\":1,\"sketch\":3}\n{\"type\":\"confirm\",\"version\":1}");
        assert_eq!(
            actions,
            vec![
                Action::Hello,
                Action::Input { tick: None, input: Input::ResumeBreakpoint(3) },
                Action::Input { tick: None, input: Input::Confirm },
            ]
        );
    }

    #[test]
    fn server_messages_serialize_with_version() {
        let line = ServerMessage::error("parse", "bad").to_line();
        assert_eq!(line, r#"{"type":"error","version":1,"code":"parse","text":"bad"}"#);
    }
}
