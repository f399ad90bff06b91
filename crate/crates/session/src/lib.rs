//! Headless sessions for the inkboard engine: JSONL input scripts, frame
//! digests for golden replay, and the websocket protocol a canvas client
//! speaks.

pub mod frames;
pub mod script;
pub mod server;
pub mod session;
pub mod wire;
