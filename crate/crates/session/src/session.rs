//! One engine session: a scene plus frame capture, driven tick by tick
//! either from a script or from a live connection.

use std::collections::BTreeMap;
use std::sync::Arc;

use inkboard_core::recognizer::GlyphLibrary;
use inkboard_core::runtime::{Input, Scene, SceneEvent};
use inkboard_core::Tick;

use crate::frames::FrameSnapshot;
use crate::script::ScriptEvent;

pub struct Session {
    scene: Scene,
}

pub struct TickOutput {
    pub frame: FrameSnapshot,
    pub events: Vec<SceneEvent>,
}

impl Session {
    pub fn new(library: Arc<GlyphLibrary>) -> Self {
        Self {
            scene: Scene::new(library),
        }
    }

    /// The next tick to run.
    pub fn tick(&self) -> Tick {
        self.scene.tick()
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn step(&mut self, inputs: &[Input]) -> TickOutput {
        let tick = self.scene.tick();
        let frame = self.scene.step(inputs);
        TickOutput {
            frame: FrameSnapshot::capture(tick, &frame),
            events: self.scene.take_events(),
        }
    }
}

/// Replays a sorted script for ticks `0..=max_tick` and returns every frame
/// along with the session in its final state. Events after `max_tick` are
/// not applied.
pub fn replay(
    events: &[ScriptEvent],
    max_tick: Tick,
    library: Arc<GlyphLibrary>,
) -> (Vec<FrameSnapshot>, Session) {
    let mut by_tick: BTreeMap<Tick, Vec<Input>> = BTreeMap::new();
    for e in events {
        by_tick.entry(e.tick).or_default().push(e.payload.to_input());
    }
    let mut session = Session::new(library);
    let frames = (0..=max_tick)
        .map(|t| {
            let inputs = by_tick.remove(&t).unwrap_or_default();
            session.step(&inputs).frame
        })
        .collect();
    (frames, session)
}

pub fn run_script(
    events: &[ScriptEvent],
    max_tick: Tick,
    library: Arc<GlyphLibrary>,
) -> Vec<FrameSnapshot> {
    replay(events, max_tick, library).0
}
