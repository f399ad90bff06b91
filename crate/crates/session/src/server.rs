//! Websocket server: one isolated engine session per connection, ticking
//! at 60 Hz of wall time.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::time::MissedTickBehavior;

use inkboard_core::recognizer::GlyphLibrary;
use inkboard_core::runtime::{Input, SceneEvent};
use inkboard_core::Tick;

use crate::session::{Session, TickOutput};
use crate::wire::{Action, Connection, ServerMessage};

pub const TICK_PERIOD: Duration = Duration::from_micros(16_667);
/// An unchanged frame is still resent this often.
pub const KEEPALIVE_TICKS: Tick = 60;

pub fn router(library: Arc<GlyphLibrary>) -> Router {
    Router::new()
        .route("/", get(upgrade))
        .route("/ws", get(upgrade))
        .with_state(library)
}

pub async fn serve(port: u16, library: Arc<GlyphLibrary>) -> std::io::Result<()> {
    let listener = TcpListener::bind(("0.0.0.0", port)).await?;
    serve_on(listener, library).await
}

pub async fn serve_on(listener: TcpListener, library: Arc<GlyphLibrary>) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr()?, "listening");
    axum::serve(listener, router(library)).await
}

async fn upgrade(ws: WebSocketUpgrade, State(library): State<Arc<GlyphLibrary>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, library))
}

struct Live {
    session: Session,
    scheduled: BTreeMap<Tick, Vec<Input>>,
    last_sent: Option<(Tick, u64)>,
}

impl Live {
    fn new(library: Arc<GlyphLibrary>) -> Self {
        Self {
            session: Session::new(library),
            scheduled: BTreeMap::new(),
            last_sent: None,
        }
    }

    /// Inputs stamped with a past tick, or none, run on the next tick.
    fn schedule(&mut self, tick: Option<Tick>, input: Input) {
        let next = self.session.tick();
        let at = tick.filter(|&t| t >= next).unwrap_or(next);
        self.scheduled.entry(at).or_default().push(input);
    }

    /// Runs one tick and returns the messages it produces.
    fn step(&mut self, force_frame: bool) -> Vec<ServerMessage> {
        let inputs = self
            .scheduled
            .remove(&self.session.tick())
            .unwrap_or_default();
        let TickOutput { frame, events } = self.session.step(&inputs);
        let mut out: Vec<ServerMessage> = events
            .into_iter()
            .filter_map(|e| match e {
                SceneEvent::Recognized { hint, bounds } => Some(ServerMessage::recognized(
                    &hint.template_name,
                    hint.score,
                    bounds,
                )),
                _ => None,
            })
            .collect();
        let due = match self.last_sent {
            None => true,
            Some((tick, digest)) => {
                digest != frame.digest || frame.tick - tick >= KEEPALIVE_TICKS
            }
        };
        if due || force_frame {
            self.last_sent = Some((frame.tick, frame.digest));
            out.push(ServerMessage::frame(&frame));
        }
        out
    }
}

async fn connection(socket: WebSocket, library: Arc<GlyphLibrary>) {
    let (mut tx, mut rx) = socket.split();
    let mut protocol = Connection::new();
    let mut live: Option<Live> = None;
    let mut clock = tokio::time::interval(TICK_PERIOD);
    clock.set_missed_tick_behavior(MissedTickBehavior::Burst);

    loop {
        let mut outgoing = Vec::new();
        let mut close = false;
        tokio::select! {
            msg = rx.next() => {
                let text = match msg {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Binary(b))) => String::from_utf8_lossy(&b).into_owned(),
                    Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
                    Some(Ok(_)) => continue,
                };
                for action in protocol.handle_text(&text) {
                    match action {
                        Action::Hello => {
                            let mut fresh = Live::new(library.clone());
                            outgoing.extend(fresh.step(true));
                            live = Some(fresh);
                            clock.reset();
                        }
                        Action::Input { tick, input } => {
                            if let Some(l) = live.as_mut() {
                                l.schedule(tick, input);
                            }
                        }
                        Action::Reply(m) => outgoing.push(m),
                        Action::ReplyAndClose(m) => {
                            outgoing.push(m);
                            close = true;
                        }
                    }
                }
            }
            _ = clock.tick(), if live.is_some() => {
                if let Some(l) = live.as_mut() {
                    outgoing.extend(l.step(false));
                }
            }
        }
        for m in outgoing {
            if tx.send(Message::Text(m.to_line())).await.is_err() {
                return;
            }
        }
        if close {
            let _ = tx.close().await;
            return;
        }
    }
}
