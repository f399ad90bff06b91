use serde::Serialize;

use crate::draw::{DrawCommand, DrawList, Transform};
use crate::geom::{Aabb, Point2};
use crate::sketches::SketchState;
use crate::{SketchId, Tick};

/// Where a board point falls relative to a sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitZone {
    /// The command ring around the sketch.
    Periphery,
    Inside,
}

/// Width of the periphery band as fractions of the bounding-circle radius.
pub const PERIPHERY_INNER: f64 = 0.8;
pub const PERIPHERY_OUTER: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    pub id: SketchId,
    pub transform: Transform,
    pub state: SketchState,
}

impl Sketch {
    pub fn type_name(&self) -> &'static str {
        self.state.type_name()
    }

    /// Axis-aligned board extent of the transformed local bounds.
    pub fn bounds(&self) -> Aabb {
        let corners = self.state.local_bounds().corners();
        Aabb::enclosing(corners.iter().map(|&c| self.transform.apply(c)))
            .expect("four corners")
    }

    pub fn center(&self) -> Point2 {
        self.transform.apply(self.state.local_bounds().center())
    }

    pub fn to_local(&self, board: Point2) -> Point2 {
        self.transform.inverse(board)
    }

    pub fn hit(&self, p: Point2) -> Option<HitZone> {
        let bounds = self.bounds();
        let r = bounds.circumradius();
        let d = p.distance(bounds.center());
        if d >= PERIPHERY_INNER * r && d <= PERIPHERY_OUTER * r {
            Some(HitZone::Periphery)
        } else if self.state.local_bounds().contains(self.to_local(p)) {
            Some(HitZone::Inside)
        } else {
            None
        }
    }

    pub fn render(&self, now: Tick, out: &mut DrawList) {
        out.push(DrawCommand::PushTransform {
            transform: self.transform,
        });
        self.state.render(now, out);
        out.push(DrawCommand::PopTransform);
    }
}

/// A directed channel delivering the source's output to the target each tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Link {
    pub id: u64,
    pub source: SketchId,
    pub target: SketchId,
}
