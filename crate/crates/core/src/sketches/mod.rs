//! Built-in sketch kinds and the uniform interface the runtime drives them
//! through.

pub mod bst;
pub mod graph;
pub mod numeric;
pub mod pendulum;
pub mod stack;

use crate::animator::{Advance, OpFault, Step};
use crate::draw::DrawList;
use crate::geom::{Aabb, Point2};
use crate::value::Value;
use crate::Tick;

pub use bst::BstState;
pub use graph::GraphState;
pub use numeric::NumericState;
pub use pendulum::PendulumState;
pub use stack::{StackError, StackState};

/// Sketch type names a glyph template may instantiate.
pub const SKETCH_TYPES: [&str; 5] = ["numeric", "pendulum", "graph", "bst", "stack"];

#[derive(Debug, Clone, PartialEq)]
pub enum SketchState {
    Numeric(NumericState),
    Pendulum(PendulumState),
    Graph(GraphState),
    Bst(BstState),
    Stack(StackState),
}

impl SketchState {
    /// Fresh state for a recognized template. Numeric templates are named
    /// by their digit.
    pub fn for_template(sketch_type: &str, template_name: &str) -> Option<Self> {
        Some(match sketch_type {
            "numeric" => SketchState::Numeric(NumericState::new(template_name.parse().ok()?)),
            "pendulum" => SketchState::Pendulum(PendulumState::default()),
            "graph" => SketchState::Graph(GraphState::new()),
            "bst" => SketchState::Bst(BstState::default_population()),
            "stack" => SketchState::Stack(StackState::new()),
            _ => return None,
        })
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            SketchState::Numeric(_) => "numeric",
            SketchState::Pendulum(_) => "pendulum",
            SketchState::Graph(_) => "graph",
            SketchState::Bst(_) => "bst",
            SketchState::Stack(_) => "stack",
        }
    }

    pub fn output(&self) -> Value {
        match self {
            SketchState::Numeric(n) => n.output(),
            SketchState::Pendulum(p) => p.output(),
            SketchState::Graph(_) => Value::Null,
            SketchState::Bst(b) => b.output(),
            SketchState::Stack(s) => s.output(),
        }
    }

    /// Delivers one linked value. Kinds a sketch does not understand are
    /// ignored.
    pub fn ingest(&mut self, v: &Value, now: Tick) -> Result<(), StackError> {
        match self {
            SketchState::Graph(g) => g.ingest(v),
            SketchState::Stack(s) => {
                s.ingest(v, now)?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Per-tick simulation.
    pub fn physics(&mut self) {
        if let SketchState::Pendulum(p) = self {
            p.step();
        }
    }

    pub fn accepts_drops(&self) -> bool {
        matches!(self, SketchState::Bst(_) | SketchState::Stack(_))
    }

    /// Extent in the sketch's local frame.
    pub fn local_bounds(&self) -> Aabb {
        match self {
            SketchState::Stack(_) => Aabb::new(
                Point2::new(-stack::HALF_WIDTH, -0.5),
                Point2::new(stack::HALF_WIDTH, 0.5),
            ),
            _ => Aabb::new(Point2::new(-0.5, -0.5), Point2::new(0.5, 0.5)),
        }
    }

    pub fn render(&self, now: Tick, out: &mut DrawList) {
        match self {
            SketchState::Numeric(n) => n.render(out),
            SketchState::Pendulum(p) => p.render(out),
            SketchState::Graph(g) => g.render(out),
            SketchState::Bst(b) => b.render(now, out),
            SketchState::Stack(s) => s.render(now, out),
        }
    }

    pub fn as_bst(&self) -> Option<&BstState> {
        match self {
            SketchState::Bst(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_bst_mut(&mut self) -> Option<&mut BstState> {
        match self {
            SketchState::Bst(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_stack(&self) -> Option<&StackState> {
        match self {
            SketchState::Stack(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pendulum(&self) -> Option<&PendulumState> {
        match self {
            SketchState::Pendulum(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphState> {
        match self {
            SketchState::Graph(g) => Some(g),
            _ => None,
        }
    }
}

/// Runs a tree op against a [`SketchState`]; faults if the owner is not a tree.
pub struct OnBst<O>(pub O);

impl<O: Step<BstState>> Step<SketchState> for OnBst<O> {
    fn label(&self) -> String {
        self.0.label()
    }

    fn advance(&mut self, target: &mut SketchState, now: Tick) -> Result<Advance, OpFault> {
        match target {
            SketchState::Bst(b) => self.0.advance(b, now),
            other => Err(OpFault::new(format!("{} is not a tree", other.type_name()))),
        }
    }
}

/// Runs a stack op against a [`SketchState`]; faults if the owner is not a stack.
pub struct OnStack<O>(pub O);

impl<O: Step<StackState>> Step<SketchState> for OnStack<O> {
    fn label(&self) -> String {
        self.0.label()
    }

    fn advance(&mut self, target: &mut SketchState, now: Tick) -> Result<Advance, OpFault> {
        match target {
            SketchState::Stack(s) => self.0.advance(s, now),
            other => Err(OpFault::new(format!("{} is not a stack", other.type_name()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::animator::{OpOutcome, OpQueue};
    use std::collections::BTreeMap;

    #[test]
    fn templates_map_to_states() {
        assert_eq!(
            SketchState::for_template("numeric", "8"),
            Some(SketchState::Numeric(NumericState::new(8)))
        );
        assert!(SketchState::for_template("numeric", "eight").is_none());
        assert!(SketchState::for_template("matrix", "m").is_none());
        for t in SKETCH_TYPES {
            let name = if t == "numeric" { "3" } else { t };
            assert_eq!(SketchState::for_template(t, name).unwrap().type_name(), t);
        }
    }

    #[test]
    fn wrong_owner_faults() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1u64, SketchState::Graph(GraphState::new()))]);
        q.enqueue(1, Box::new(OnBst(bst::InsertOp::new(3))));
        q.tick_ops(0, &mut host);
        let done = q.take_finished();
        assert!(matches!(done[0].outcome, OpOutcome::Faulted(_)));
    }

    #[test]
    fn only_trees_and_stacks_take_drops() {
        let kinds: Vec<_> = SKETCH_TYPES
            .iter()
            .map(|t| SketchState::for_template(t, "1").unwrap())
            .filter(SketchState::accepts_drops)
            .map(|s| s.type_name())
            .collect();
        assert_eq!(kinds, ["bst", "stack"]);
    }
}
