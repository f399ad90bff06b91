use crate::draw::{Color, DrawList};
use crate::geom::Point2;
use crate::value::Value;

/// A number literal. Its output is always `Int(value)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericState {
    pub value: i64,
}

impl NumericState {
    pub fn new(value: i64) -> Self {
        Self { value }
    }

    pub fn output(&self) -> Value {
        Value::Int(self.value)
    }

    pub fn label(&self) -> String {
        self.value.to_string()
    }

    pub fn render(&self, out: &mut DrawList) {
        out.text(self.label(), Point2::ORIGIN, 0.8, Color::INK);
    }
}
