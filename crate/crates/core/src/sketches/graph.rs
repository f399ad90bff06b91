use std::collections::VecDeque;

use crate::draw::{Color, DrawList};
use crate::geom::Point2;
use crate::value::Value;

pub const GRAPH_CAPACITY: usize = 240;

/// Rolling time series of the numbers a graph has received, in arrival order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphState {
    samples: VecDeque<f64>,
}

impl GraphState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends numeric values (ints are widened); everything else is ignored.
    pub fn ingest(&mut self, v: &Value) {
        let Some(x) = v.as_number().filter(|x| x.is_finite()) else {
            return;
        };
        if self.samples.len() == GRAPH_CAPACITY {
            self.samples.pop_front();
        }
        self.samples.push_back(x);
    }

    pub fn samples(&self) -> &VecDeque<f64> {
        &self.samples
    }

    /// Current vertical display range: the min and max of the buffer.
    pub fn range(&self) -> Option<(f64, f64)> {
        let first = *self.samples.front()?;
        Some(
            self.samples
                .iter()
                .fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x))),
        )
    }

    /// Axes plus the buffer as one curve against sample index, scaled to
    /// the current range.
    pub fn render(&self, out: &mut DrawList) {
        out.line(Point2::new(-0.45, -0.45), Point2::new(-0.45, 0.45), Color::DIM, 0.01);
        out.line(Point2::new(-0.45, 0.0), Point2::new(0.45, 0.0), Color::DIM, 0.01);
        let Some((lo, hi)) = self.range() else {
            return;
        };
        let span = hi - lo;
        let points: Vec<Point2> = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let u = if span > 0.0 { (x - lo) / span } else { 0.5 };
                Point2::new(
                    -0.45 + 0.9 * i as f64 / (GRAPH_CAPACITY - 1) as f64,
                    0.4 - 0.8 * u,
                )
            })
            .collect();
        out.curve(points, Color::LINK, 0.012);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Record;

    #[test]
    fn numbers_only() {
        let mut g = GraphState::new();
        g.ingest(&Value::Real(0.5));
        g.ingest(&Value::Int(2));
        g.ingest(&Value::Text("hi".into()));
        g.ingest(&Value::Null);
        g.ingest(&Value::Record(Record::new("insert", 1)));
        g.ingest(&Value::Real(f64::NAN));
        assert_eq!(g.samples().iter().copied().collect::<Vec<_>>(), vec![0.5, 2.0]);
        assert_eq!(g.range(), Some((0.5, 2.0)));
    }

    #[test]
    fn ring_drops_oldest() {
        let mut g = GraphState::new();
        for i in 0..300 {
            g.ingest(&Value::Int(i));
        }
        assert_eq!(g.samples().len(), GRAPH_CAPACITY);
        assert_eq!(g.samples().front(), Some(&60.0));
        assert_eq!(g.samples().back(), Some(&299.0));
    }
}
