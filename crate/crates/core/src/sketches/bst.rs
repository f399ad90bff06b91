//! Binary search tree sketch.
//!
//! The tree is an owned, pointer-based structure. Insert, remove and the
//! four traversals run as resumable ops that walk the tree one node per
//! yield so every visit can be highlighted on screen. Mutations happen only
//! inside a single advance, so a faulting step rolls back cleanly.
//!
//! Every completed mutation pushes a full copy of the previous tree onto a
//! bounded undo stack, and the sketch outputs a sequenced record describing
//! what it last did (`insert(9)`, `remove(5)`, `enter(4)`, `exit(4)`).

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::animator::{interpolate, Advance, OpFault, Step, YieldPoint};
use crate::draw::{Color, DrawList};
use crate::geom::Point2;
use crate::recognizer::OverlayGestureKind;
use crate::value::{Record, Value};
use crate::Tick;

/// Highlight hold for each visited node (~0.3 s).
pub const VISIT_PAUSE: u32 = 18;
/// Length of movement tweens.
pub const TWEEN_TICKS: u32 = 24;
pub const FLASH_TICKS: Tick = 12;
pub const UNDO_DEPTH: usize = 32;
pub const DEFAULT_POPULATION: [i64; 7] = [4, 2, 6, 1, 3, 5, 7];

/// Breakpoint tag hit just before a two-child removal copies the predecessor up.
pub const BREAK_BEFORE_REPLACE: &str = "before-replace";
/// Breakpoint tag hit on every traversal visit.
pub const BREAK_VISIT: &str = "visit";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Highlight {
    #[default]
    None,
    Visited,
    Selected,
}

type Child = Option<Box<TreeNode>>;

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub value: i64,
    pub left: Child,
    pub right: Child,
    /// Render-only; ignored by equality.
    pub highlight: Highlight,
}

impl PartialEq for TreeNode {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.left == other.left && self.right == other.right
    }
}

impl TreeNode {
    fn leaf(value: i64, highlight: Highlight) -> Box<Self> {
        Box::new(Self {
            value,
            left: None,
            right: None,
            highlight,
        })
    }

    fn child(&self, dir: Dir) -> Option<&TreeNode> {
        match dir {
            Dir::Left => self.left.as_deref(),
            Dir::Right => self.right.as_deref(),
        }
    }

    fn child_slot(&mut self, dir: Dir) -> &mut Child {
        match dir {
            Dir::Left => &mut self.left,
            Dir::Right => &mut self.right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Left,
    Right,
}

fn extend(path: &[Dir], dir: Dir) -> Vec<Dir> {
    let mut p = path.to_vec();
    p.push(dir);
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UndoError {
    #[error("nothing to undo")]
    NothingToUndo,
}

/// A value gliding between two local positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Tween {
    pub value: i64,
    pub from: Point2,
    pub to: Point2,
    pub start: Tick,
    pub ticks: u32,
}

impl Tween {
    pub fn position(&self, now: Tick) -> Point2 {
        let t = now.saturating_sub(self.start) as f64 / self.ticks.max(1) as f64;
        Point2::new(
            interpolate(self.from.x, self.to.x, t),
            interpolate(self.from.y, self.to.y, t),
        )
    }
}

/// A node's derived placement in the sketch's local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub value: i64,
    pub position: Point2,
    pub depth: usize,
    pub highlight: Highlight,
    pub parent: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BstState {
    root: Child,
    /// Shared so that cloning the state (every op step) stays cheap.
    snapshots: VecDeque<Arc<Child>>,
    op_seq: u64,
    last_record: Value,
    trail: Vec<i64>,
    flash_until: Tick,
    tween: Option<Tween>,
    breakpoints: BTreeSet<String>,
}

impl BstState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a tree by plain insertion, with no undo history.
    pub fn with_values<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let mut s = Self::new();
        for v in values {
            s.insert_plain(v);
        }
        s
    }

    pub fn default_population() -> Self {
        Self::with_values(DEFAULT_POPULATION)
    }

    pub fn root(&self) -> Option<&TreeNode> {
        self.root.as_deref()
    }

    fn insert_plain(&mut self, v: i64) -> bool {
        let mut slot = &mut self.root;
        while let Some(node) = slot {
            if v == node.value {
                return false;
            }
            slot = node.child_slot(if v < node.value { Dir::Left } else { Dir::Right });
        }
        *slot = Some(TreeNode::leaf(v, Highlight::None));
        true
    }

    pub fn contains(&self, v: i64) -> bool {
        self.path_to(v).is_some()
    }

    pub fn path_to(&self, v: i64) -> Option<Vec<Dir>> {
        let mut path = Vec::new();
        let mut cur = self.root.as_deref();
        while let Some(node) = cur {
            if v == node.value {
                return Some(path);
            }
            let dir = if v < node.value { Dir::Left } else { Dir::Right };
            path.push(dir);
            cur = node.child(dir);
        }
        None
    }

    pub fn node(&self, path: &[Dir]) -> Option<&TreeNode> {
        let mut cur = self.root.as_deref()?;
        for &d in path {
            cur = cur.child(d)?;
        }
        Some(cur)
    }

    fn node_mut(&mut self, path: &[Dir]) -> Result<&mut TreeNode, OpFault> {
        let mut cur = self
            .root
            .as_deref_mut()
            .ok_or_else(|| OpFault::new("tree is empty"))?;
        for &d in path {
            cur = cur
                .child_slot(d)
                .as_deref_mut()
                .ok_or_else(|| OpFault::new("path leaves the tree"))?;
        }
        Ok(cur)
    }

    /// The link that holds (or would hold) the node at `path`.
    fn slot_mut(&mut self, path: &[Dir]) -> Result<&mut Child, OpFault> {
        match path.split_last() {
            None => Ok(&mut self.root),
            Some((&last, parent)) => Ok(self.node_mut(parent)?.child_slot(last)),
        }
    }

    /// Replaces a node that has at most one child by that child.
    fn splice(&mut self, path: &[Dir]) -> Result<(), OpFault> {
        let slot = self.slot_mut(path)?;
        let node = slot.take().ok_or_else(|| OpFault::new("splice of a missing node"))?;
        if node.left.is_some() && node.right.is_some() {
            return Err(OpFault::new("splice of a node with two children"));
        }
        *slot = node.left.or(node.right);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.in_order().len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Height in edges; `None` for an empty tree.
    pub fn height(&self) -> Option<usize> {
        let mut best = None;
        let mut stack: Vec<(&TreeNode, usize)> = self.root.as_deref().map(|r| (r, 0)).into_iter().collect();
        while let Some((n, d)) = stack.pop() {
            best = Some(best.map_or(d, |b: usize| b.max(d)));
            stack.extend(n.left.as_deref().map(|c| (c, d + 1)));
            stack.extend(n.right.as_deref().map(|c| (c, d + 1)));
        }
        best
    }

    pub fn in_order(&self) -> Vec<i64> {
        let mut out = Vec::new();
        let mut stack: Vec<&TreeNode> = Vec::new();
        let mut cur = self.root.as_deref();
        while cur.is_some() || !stack.is_empty() {
            while let Some(n) = cur {
                stack.push(n);
                cur = n.left.as_deref();
            }
            let n = stack.pop().unwrap();
            out.push(n.value);
            cur = n.right.as_deref();
        }
        out
    }

    /// Every node respects the search-tree ordering with unique values.
    pub fn is_search_tree(&self) -> bool {
        self.in_order().windows(2).all(|w| w[0] < w[1])
    }

    /// Node positions: x from in-order rank, y from depth.
    pub fn layout(&self) -> Vec<NodeLayout> {
        fn walk(n: &TreeNode, depth: usize, parent_ix: Option<usize>, acc: &mut Vec<(i64, usize, Highlight, Option<usize>)>, order: &mut Vec<usize>) {
            let me = acc.len();
            acc.push((n.value, depth, n.highlight, parent_ix));
            if let Some(l) = n.left.as_deref() {
                walk(l, depth + 1, Some(me), acc, order);
            }
            order.push(me);
            if let Some(r) = n.right.as_deref() {
                walk(r, depth + 1, Some(me), acc, order);
            }
        }
        let Some(root) = self.root.as_deref() else {
            return Vec::new();
        };
        let mut acc = Vec::new();
        let mut order = Vec::new();
        walk(root, 0, None, &mut acc, &mut order);
        let n = acc.len() as f64;
        let h = acc.iter().map(|a| a.1).max().unwrap_or(0).max(1) as f64;
        let mut pos = vec![Point2::ORIGIN; acc.len()];
        for (rank, &ix) in order.iter().enumerate() {
            pos[ix] = Point2::new(
                -0.45 + 0.9 * (rank as f64 + 0.5) / n,
                -0.4 + 0.8 * acc[ix].1 as f64 / h,
            );
        }
        acc.iter()
            .enumerate()
            .map(|(ix, &(value, depth, highlight, parent))| NodeLayout {
                value,
                position: pos[ix],
                depth,
                highlight,
                parent: parent.map(|p| pos[p]),
            })
            .collect()
    }

    fn position_of(&self, value: i64) -> Point2 {
        self.layout()
            .into_iter()
            .find(|l| l.value == value)
            .map_or(Point2::ORIGIN, |l| l.position)
    }

    fn snapshot(&mut self) {
        let mut copy = self.root.clone();
        clear_highlights(&mut copy);
        self.snapshots.push_back(Arc::new(copy));
        if self.snapshots.len() > UNDO_DEPTH {
            self.snapshots.pop_front();
        }
    }

    pub fn undo_depth(&self) -> usize {
        self.snapshots.len()
    }

    /// Restores the tree as it was before the last completed mutation. The
    /// caller must make sure no op is in flight for this sketch.
    pub fn undo(&mut self, now: Tick) -> Result<(), UndoError> {
        match self.snapshots.pop_back() {
            Some(prev) => {
                self.root = Arc::unwrap_or_clone(prev);
                self.tween = None;
                Ok(())
            }
            None => {
                self.flash(now);
                Err(UndoError::NothingToUndo)
            }
        }
    }

    fn emit(&mut self, kind: &str, value: i64) -> Value {
        self.op_seq += 1;
        self.last_record =
            Value::Record(Record::new(kind, self.op_seq).with("value", Value::Int(value)));
        self.last_record.clone()
    }

    pub fn output(&self) -> Value {
        self.last_record.clone()
    }

    /// Visit order of the current (or last) traversal.
    pub fn trail(&self) -> &[i64] {
        &self.trail
    }

    pub fn flash(&mut self, now: Tick) {
        self.flash_until = now + FLASH_TICKS;
    }

    pub fn is_flashing(&self, now: Tick) -> bool {
        now < self.flash_until
    }

    pub fn tween(&self) -> Option<&Tween> {
        self.tween.as_ref()
    }

    pub fn set_breakpoint(&mut self, tag: &str, enabled: bool) {
        if enabled {
            self.breakpoints.insert(tag.to_string());
        } else {
            self.breakpoints.remove(tag);
        }
    }

    pub fn has_breakpoint(&self, tag: &str) -> bool {
        self.breakpoints.contains(tag)
    }

    fn clear_highlights(&mut self) {
        clear_highlights(&mut self.root);
    }

    pub fn render(&self, now: Tick, out: &mut DrawList) {
        let layout = self.layout();
        if layout.is_empty() {
            out.text("empty", Point2::ORIGIN, 0.12, Color::DIM);
        }
        let radius = (0.36 / layout.len().max(1) as f64).clamp(0.015, 0.06);
        for node in &layout {
            if let Some(parent) = node.parent {
                out.line(parent, node.position, Color::DIM, 0.01);
            }
        }
        for node in &layout {
            let color = match node.highlight {
                Highlight::None => Color::ACCENT,
                Highlight::Visited => Color::HIGHLIGHT,
                Highlight::Selected => Color::ALERT,
            };
            out.circle(node.position, radius, color, true);
            out.text(node.value.to_string(), node.position, radius * 1.2, Color::INK);
        }
        if let Some(t) = &self.tween {
            out.text(t.value.to_string(), t.position(now), radius * 1.4, Color::HIGHLIGHT);
        }
        if self.is_flashing(now) {
            out.rect(Point2::new(-0.5, -0.5), Point2::new(0.5, 0.5), Color::ALERT, 0.01);
        }
    }
}

fn clear_highlights(root: &mut Child) {
    let mut stack: Vec<&mut TreeNode> = root.as_deref_mut().into_iter().collect();
    while let Some(n) = stack.pop() {
        n.highlight = Highlight::None;
        stack.extend(n.left.as_deref_mut());
        stack.extend(n.right.as_deref_mut());
    }
}

fn visit_pause() -> Result<Advance, OpFault> {
    Ok(Advance::Yield(YieldPoint::Pause(VISIT_PAUSE)))
}

enum InsertPhase {
    Start,
    Descend(Vec<Dir>),
    Attach(Vec<Dir>),
    Finish,
}

/// Animated insertion: descend from the root highlighting each node, then
/// attach a new leaf.
pub struct InsertOp {
    value: i64,
    phase: InsertPhase,
}

impl InsertOp {
    pub fn new(value: i64) -> Self {
        Self {
            value,
            phase: InsertPhase::Start,
        }
    }
}

impl Step<BstState> for InsertOp {
    fn label(&self) -> String {
        format!("insert({})", self.value)
    }

    fn advance(&mut self, tree: &mut BstState, now: Tick) -> Result<Advance, OpFault> {
        let v = self.value;
        loop {
            match std::mem::replace(&mut self.phase, InsertPhase::Finish) {
                InsertPhase::Start => {
                    if tree.contains(v) {
                        tree.flash(now);
                        return Ok(Advance::Complete(Value::Null));
                    }
                    if tree.root.is_none() {
                        tree.snapshot();
                        tree.root = Some(TreeNode::leaf(v, Highlight::Selected));
                        tree.emit("insert", v);
                        self.phase = InsertPhase::Finish;
                        return Ok(Advance::Yield(YieldPoint::Frame));
                    }
                    self.phase = InsertPhase::Descend(Vec::new());
                }
                InsertPhase::Descend(path) => {
                    let node = tree.node_mut(&path)?;
                    if node.value == v {
                        return Err(OpFault::new(format!("{v} appeared during insert")));
                    }
                    node.highlight = Highlight::Visited;
                    let dir = if v < node.value { Dir::Left } else { Dir::Right };
                    let next = extend(&path, dir);
                    self.phase = if node.child(dir).is_some() {
                        InsertPhase::Descend(next)
                    } else {
                        InsertPhase::Attach(next)
                    };
                    return visit_pause();
                }
                InsertPhase::Attach(path) => {
                    tree.snapshot();
                    let slot = tree.slot_mut(&path)?;
                    if slot.is_some() {
                        return Err(OpFault::new("attach point is occupied"));
                    }
                    *slot = Some(TreeNode::leaf(v, Highlight::Selected));
                    tree.emit("insert", v);
                    self.phase = InsertPhase::Finish;
                    return visit_pause();
                }
                InsertPhase::Finish => {
                    tree.clear_highlights();
                    return Ok(Advance::Complete(tree.output()));
                }
            }
        }
    }
}

enum RemovePhase {
    Start,
    Descend(Vec<Dir>),
    Found(Vec<Dir>),
    SeekPredecessor { target: Vec<Dir>, cursor: Vec<Dir> },
    Replace { target: Vec<Dir>, pred: Vec<Dir> },
    Commit { target: Vec<Dir>, pred: Vec<Dir> },
    Finish,
}

/// Animated removal. A node with two children takes its in-order
/// predecessor's value, and the predecessor node is spliced out.
pub struct RemoveOp {
    value: i64,
    phase: RemovePhase,
}

impl RemoveOp {
    pub fn new(value: i64) -> Self {
        Self {
            value,
            phase: RemovePhase::Start,
        }
    }
}

impl Step<BstState> for RemoveOp {
    fn label(&self) -> String {
        format!("remove({})", self.value)
    }

    fn advance(&mut self, tree: &mut BstState, now: Tick) -> Result<Advance, OpFault> {
        let v = self.value;
        loop {
            match std::mem::replace(&mut self.phase, RemovePhase::Finish) {
                RemovePhase::Start => {
                    if !tree.contains(v) {
                        tree.flash(now);
                        return Ok(Advance::Complete(Value::Null));
                    }
                    self.phase = RemovePhase::Descend(Vec::new());
                }
                RemovePhase::Descend(path) => {
                    let node = tree.node_mut(&path)?;
                    if node.value == v {
                        node.highlight = Highlight::Selected;
                        self.phase = RemovePhase::Found(path);
                    } else {
                        node.highlight = Highlight::Visited;
                        let dir = if v < node.value { Dir::Left } else { Dir::Right };
                        self.phase = RemovePhase::Descend(extend(&path, dir));
                    }
                    return visit_pause();
                }
                RemovePhase::Found(path) => {
                    let node = tree.node_mut(&path)?;
                    if node.left.is_some() && node.right.is_some() {
                        let cursor = extend(&path, Dir::Left);
                        tree.node_mut(&cursor)?.highlight = Highlight::Visited;
                        self.phase = RemovePhase::SeekPredecessor {
                            target: path,
                            cursor,
                        };
                    } else {
                        tree.snapshot();
                        tree.splice(&path)?;
                        tree.emit("remove", v);
                        self.phase = RemovePhase::Finish;
                    }
                    return visit_pause();
                }
                RemovePhase::SeekPredecessor { target, cursor } => {
                    let node = tree.node_mut(&cursor)?;
                    if let Some(right) = node.right.as_deref_mut() {
                        right.highlight = Highlight::Visited;
                        self.phase = RemovePhase::SeekPredecessor {
                            target,
                            cursor: extend(&cursor, Dir::Right),
                        };
                        return visit_pause();
                    }
                    self.phase = RemovePhase::Replace {
                        target,
                        pred: cursor,
                    };
                    if tree.has_breakpoint(BREAK_BEFORE_REPLACE) {
                        return Ok(Advance::Yield(YieldPoint::Breakpoint(
                            BREAK_BEFORE_REPLACE.into(),
                        )));
                    }
                }
                RemovePhase::Replace { target, pred } => {
                    let pred_value = tree.node_mut(&pred)?.value;
                    tree.tween = Some(Tween {
                        value: pred_value,
                        from: tree.position_of(pred_value),
                        to: tree.position_of(v),
                        start: now,
                        ticks: TWEEN_TICKS,
                    });
                    self.phase = RemovePhase::Commit { target, pred };
                    return Ok(Advance::Yield(YieldPoint::Pause(TWEEN_TICKS)));
                }
                RemovePhase::Commit { target, pred } => {
                    tree.snapshot();
                    let pred_value = tree.node_mut(&pred)?.value;
                    tree.splice(&pred)?;
                    let node = tree.node_mut(&target)?;
                    node.value = pred_value;
                    node.highlight = Highlight::Selected;
                    tree.tween = None;
                    tree.emit("remove", v);
                    self.phase = RemovePhase::Finish;
                    return visit_pause();
                }
                RemovePhase::Finish => {
                    tree.clear_highlights();
                    return Ok(Advance::Complete(tree.output()));
                }
            }
        }
    }
}

enum WalkEvent {
    Enter(Vec<Dir>),
    Visit(Vec<Dir>),
    Exit(Vec<Dir>),
}

struct DepthFrame {
    path: Vec<Dir>,
    stage: u8,
}

enum Walk {
    Depth {
        kind: OverlayGestureKind,
        frames: Vec<DepthFrame>,
    },
    Breadth {
        queue: VecDeque<Vec<Dir>>,
        current: Option<(Vec<Dir>, u8)>,
    },
}

impl Walk {
    fn next_event(&mut self, tree: &BstState) -> Option<WalkEvent> {
        match self {
            Walk::Depth { kind, frames } => loop {
                let top = frames.last_mut()?;
                let path = top.path.clone();
                top.stage += 1;
                match top.stage {
                    1 => return Some(WalkEvent::Enter(path)),
                    2 if *kind == OverlayGestureKind::PreOrder => {
                        return Some(WalkEvent::Visit(path))
                    }
                    3 => {
                        if tree.node(&path)?.left.is_some() {
                            frames.push(DepthFrame { path: extend(&path, Dir::Left), stage: 0 });
                        }
                    }
                    4 if *kind == OverlayGestureKind::InOrder => {
                        return Some(WalkEvent::Visit(path))
                    }
                    5 => {
                        if tree.node(&path)?.right.is_some() {
                            frames.push(DepthFrame { path: extend(&path, Dir::Right), stage: 0 });
                        }
                    }
                    6 if *kind == OverlayGestureKind::PostOrder => {
                        return Some(WalkEvent::Visit(path))
                    }
                    7.. => {
                        frames.pop();
                        return Some(WalkEvent::Exit(path));
                    }
                    _ => {}
                }
            },
            Walk::Breadth { queue, current } => {
                if current.is_none() {
                    *current = Some((queue.pop_front()?, 0));
                }
                let (path, stage) = current.as_mut().unwrap();
                *stage += 1;
                let path = path.clone();
                match *stage {
                    1 => Some(WalkEvent::Enter(path)),
                    2 => {
                        let node = tree.node(&path)?;
                        if node.left.is_some() {
                            queue.push_back(extend(&path, Dir::Left));
                        }
                        if node.right.is_some() {
                            queue.push_back(extend(&path, Dir::Right));
                        }
                        Some(WalkEvent::Visit(path))
                    }
                    _ => {
                        *current = None;
                        Some(WalkEvent::Exit(path))
                    }
                }
            }
        }
    }
}

/// Animated traversal. Emits `enter(v)` when recursion reaches a node and
/// `exit(v)` when it returns; breadth-first emits the pair per dequeued node.
pub struct TraverseOp {
    kind: OverlayGestureKind,
    walk: Option<Walk>,
}

impl TraverseOp {
    pub fn new(kind: OverlayGestureKind) -> Self {
        Self { kind, walk: None }
    }
}

impl Step<BstState> for TraverseOp {
    fn label(&self) -> String {
        format!("traverse({})", self.kind.label())
    }

    fn advance(&mut self, tree: &mut BstState, _now: Tick) -> Result<Advance, OpFault> {
        if self.walk.is_none() {
            tree.trail.clear();
            let start = tree.root.is_some().then(Vec::new);
            self.walk = Some(match self.kind {
                OverlayGestureKind::BreadthFirst => Walk::Breadth {
                    queue: start.into_iter().collect(),
                    current: None,
                },
                kind => Walk::Depth {
                    kind,
                    frames: start
                        .into_iter()
                        .map(|path| DepthFrame { path, stage: 0 })
                        .collect(),
                },
            });
        }
        let walk = self.walk.as_mut().unwrap();
        match walk.next_event(tree) {
            None => {
                tree.clear_highlights();
                Ok(Advance::Complete(Value::Null))
            }
            Some(WalkEvent::Enter(path)) => {
                let v = tree.node_mut(&path)?.value;
                tree.emit("enter", v);
                Ok(Advance::Yield(YieldPoint::Frame))
            }
            Some(WalkEvent::Visit(path)) => {
                let node = tree.node_mut(&path)?;
                node.highlight = Highlight::Visited;
                let v = node.value;
                tree.trail.push(v);
                if tree.has_breakpoint(BREAK_VISIT) {
                    Ok(Advance::Yield(YieldPoint::Breakpoint(BREAK_VISIT.into())))
                } else {
                    visit_pause()
                }
            }
            Some(WalkEvent::Exit(path)) => {
                let v = tree.node_mut(&path)?.value;
                tree.emit("exit", v);
                Ok(Advance::Yield(YieldPoint::Frame))
            }
        }
    }
}
