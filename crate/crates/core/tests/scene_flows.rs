use std::sync::Arc;

use inkboard_core::draw::Transform;
use inkboard_core::geom::Point2;
use inkboard_core::recognizer::OverlayGestureKind;
use inkboard_core::runtime::{Input, PointerPhase, Scene, SceneEvent};
use inkboard_core::sketches::bst::{RemoveOp, BREAK_BEFORE_REPLACE};
use inkboard_core::sketches::{BstState, GraphState, OnBst, PendulumState, SketchState};
use inkboard_core::animator::OpStatus;
use inkboard_core::{shipped_library, SketchId};

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn scene() -> Scene {
    Scene::new(Arc::new(shipped_library()))
}

/// Feeds one pointer sample per tick, then one idle tick. Returns the events
/// raised along the way.
fn stroke(scene: &mut Scene, pts: &[Point2]) -> Vec<SceneEvent> {
    let mut events = Vec::new();
    for (i, &at) in pts.iter().enumerate() {
        let phase = match i {
            0 => PointerPhase::Down,
            i if i + 1 == pts.len() => PointerPhase::Up,
            _ => PointerPhase::Move,
        };
        scene.step(&[Input::Pointer { phase, at }]);
        events.extend(scene.take_events());
    }
    scene.step(&[]);
    events.extend(scene.take_events());
    events
}

/// Polyline through `corners`, sampled every `spacing` units.
fn path(corners: &[Point2], spacing: f64) -> Vec<Point2> {
    let mut out = vec![corners[0]];
    for w in corners.windows(2) {
        let n = (w[0].distance(w[1]) / spacing).ceil().max(1.0) as usize;
        out.extend((1..=n).map(|i| w[0].lerp(w[1], i as f64 / n as f64)));
    }
    out
}

fn click(scene: &mut Scene, at: Point2) -> Vec<SceneEvent> {
    stroke(scene, &[at, at])
}

fn run_until_idle(scene: &mut Scene, id: SketchId) {
    for _ in 0..5000 {
        if scene.is_idle(id) {
            return;
        }
        scene.step(&[]);
    }
    panic!("sketch {id} never went idle");
}

fn tree(scene: &Scene, id: SketchId) -> &BstState {
    scene.sketch(id).unwrap().state.as_bst().unwrap()
}

fn default_tree(scene: &mut Scene) -> SketchId {
    scene.add_sketch(
        SketchState::Bst(BstState::default_population()),
        Transform::at(p(500.0, 500.0), 400.0),
    )
}

#[test]
fn traversal_gestures_drawn_on_a_tree_run_that_traversal() {
    let cases = [
        (OverlayGestureKind::PreOrder, vec![4, 2, 1, 3, 6, 5, 7]),
        (OverlayGestureKind::InOrder, vec![1, 2, 3, 4, 5, 6, 7]),
        (OverlayGestureKind::PostOrder, vec![1, 3, 2, 5, 7, 6, 4]),
        (OverlayGestureKind::BreadthFirst, vec![4, 2, 6, 1, 3, 5, 7]),
    ];
    for (kind, expected) in cases {
        let mut s = scene();
        let id = default_tree(&mut s);
        // The template drawn into a 300 x 240 box in the middle of the tree.
        let corners: Vec<Point2> = kind
            .template_stroke()
            .points()
            .iter()
            .map(|q| p(350.0 + q.x * 3.0, 380.0 + q.y * 2.4))
            .collect();
        let events = stroke(&mut s, &path(&corners, 12.0));
        assert!(
            events.contains(&SceneEvent::TraversalStarted { sketch: id, kind }),
            "{kind:?}: {events:?}"
        );
        run_until_idle(&mut s, id);
        assert_eq!(tree(&s, id).trail(), expected.as_slice(), "{kind:?}");
    }
}

#[test]
fn a_flat_line_over_a_tree_starts_nothing() {
    let mut s = scene();
    let id = default_tree(&mut s);
    let before = tree(&s, id).clone();
    let events = stroke(&mut s, &path(&[p(380.0, 500.0), p(620.0, 500.0)], 8.0));
    assert!(!events.iter().any(|e| matches!(e, SceneEvent::TraversalStarted { .. })));
    assert!(s.is_idle(id));
    assert_eq!(tree(&s, id).root(), before.root());
    assert!(s.pending_strokes().is_empty());
}

#[test]
fn linked_pendulum_feeds_a_graph() {
    let mut s = scene();
    let pend = s.add_sketch(
        SketchState::Pendulum(PendulumState::new(0.6, 0.0)),
        Transform::at(p(250.0, 400.0), 200.0),
    );
    let graph = s.add_sketch(SketchState::Graph(GraphState::new()), Transform::at(p(700.0, 400.0), 300.0));
    // From the pendulum's periphery across to the graph without holding.
    let events = stroke(&mut s, &path(&[p(250.0, 270.0), p(700.0, 400.0)], 15.0));
    assert!(events.iter().any(|e| matches!(e, SceneEvent::Linked(l) if l.source == pend && l.target == graph)));
    for _ in 0..120 {
        s.step(&[]);
    }
    let samples = s.sketch(graph).unwrap().state.as_graph().unwrap().samples().clone();
    assert!(samples.len() >= 120);
    let (lo, hi) = samples.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    assert!(lo < -0.05 && hi > 0.05, "swing range {lo}..{hi}");
}

#[test]
fn a_click_inside_releases_a_breakpoint() {
    let mut s = scene();
    let id = default_tree(&mut s);
    s.set_breakpoint(id, BREAK_BEFORE_REPLACE, true).unwrap();
    s.enqueue_op(id, Box::new(OnBst(RemoveOp::new(4)))).unwrap();
    for _ in 0..200 {
        s.step(&[]);
    }
    assert_eq!(s.op_status(id), Some(&OpStatus::AtBreakpoint(BREAK_BEFORE_REPLACE.into())));
    assert!(tree(&s, id).contains(4));
    click(&mut s, p(500.0, 500.0));
    run_until_idle(&mut s, id);
    let t = tree(&s, id);
    assert_eq!(t.in_order(), vec![1, 2, 3, 5, 6, 7]);
    assert_eq!(t.root().unwrap().value, 3);
}

#[test]
fn numerics_dropped_on_a_tree_insert_or_remove() {
    let mut s = scene();
    let id = default_tree(&mut s);
    for (value, expected) in [(9, vec![1, 2, 3, 4, 5, 6, 7, 9]), (2, vec![1, 3, 4, 5, 6, 7, 9])] {
        let n = s.spawn_numeric(value, p(100.0, 900.0));
        stroke(&mut s, &path(&[p(100.0, 900.0), p(480.0, 520.0)], 20.0));
        assert!(s.sketch(n).is_none(), "dropped numeric is consumed");
        run_until_idle(&mut s, id);
        assert_eq!(tree(&s, id).in_order(), expected);
    }
}

#[test]
fn numerics_stay_on_empty_board_and_bounce_off_other_sketches() {
    let mut s = scene();
    let pend = s.add_sketch(SketchState::Pendulum(PendulumState::default()), Transform::at(p(700.0, 300.0), 200.0));
    let n = s.spawn_numeric(3, p(100.0, 900.0));
    stroke(&mut s, &path(&[p(100.0, 900.0), p(300.0, 700.0)], 20.0));
    assert_eq!(s.sketch(n).unwrap().center(), p(300.0, 700.0));
    stroke(&mut s, &path(&[p(300.0, 700.0), p(700.0, 300.0)], 20.0));
    assert_eq!(s.sketch(n).unwrap().center(), p(300.0, 700.0));
    assert!(s.sketch(pend).is_some());
}

#[test]
fn a_periphery_click_then_a_scribble_deletes_with_links() {
    let mut s = scene();
    let a = s.spawn_numeric(1, p(200.0, 200.0));
    let b = s.add_sketch(SketchState::Graph(GraphState::new()), Transform::at(p(600.0, 600.0), 200.0));
    s.create_link(a, b).unwrap();
    // Periphery of the graph: its box is 200 wide, circumradius about 141.
    click(&mut s, p(600.0, 470.0));
    let scribble = path(&[p(550.0, 550.0), p(650.0, 650.0), p(650.0, 550.0), p(550.0, 650.0)], 10.0);
    let events = stroke(&mut s, &scribble);
    assert!(events.contains(&SceneEvent::Removed(b)));
    assert!(s.sketch(b).is_none());
    assert!(s.links().is_empty());
    assert!(s.sketch(a).is_some());
}

#[test]
fn holding_on_the_periphery_then_dragging_translates() {
    let mut s = scene();
    let g = s.add_sketch(SketchState::Graph(GraphState::new()), Transform::at(p(400.0, 400.0), 200.0));
    let grip = p(400.0, 270.0);
    let mut pts = vec![grip; 15];
    pts.extend(path(&[grip, grip + p(150.0, 50.0)], 10.0).into_iter().skip(1));
    stroke(&mut s, &pts);
    let c = s.sketch(g).unwrap().center();
    assert!((c.x - 550.0).abs() < 1e-9 && (c.y - 450.0).abs() < 1e-9, "{c:?}");
}

#[test]
fn drawn_glyph_is_confirmed_by_a_click_on_it() {
    let lib = shipped_library();
    let mut s = Scene::new(Arc::new(lib.clone()));
    let t = lib.template("bst").unwrap();
    let shift = p(500.0, 500.0) - t.source.bounds().center();
    let mut recognized = false;
    for st in t.source.strokes() {
        let pts: Vec<Point2> = st.points().iter().map(|&q| q + shift).collect();
        recognized |= stroke(&mut s, &pts)
            .iter()
            .any(|e| matches!(e, SceneEvent::Recognized { hint, .. } if hint.template_name == "bst"));
    }
    assert!(recognized);
    let events = click(&mut s, p(500.0, 500.0));
    assert!(events.iter().any(|e| matches!(e, SceneEvent::Instantiated { sketch_type, .. } if sketch_type == "bst")));
    assert!(s.pending_strokes().is_empty() && s.hint().is_none());
    let bst = s.sketches().values().next().unwrap();
    assert_eq!(bst.state.as_bst().unwrap().in_order(), vec![1, 2, 3, 4, 5, 6, 7]);
}
