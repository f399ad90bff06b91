//! Data carried over links between sketches.

use std::collections::BTreeMap;
use std::fmt;

/// Maximum nesting of records inside records.
pub const MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Value {
    #[default]
    Null,
    Int(i64),
    Real(f64),
    Text(String),
    Record(Record),
}

impl Value {
    /// 1 for scalars, 1 + deepest field for records.
    pub fn depth(&self) -> usize {
        match self {
            Value::Record(r) => 1 + r.fields.values().map(Value::depth).max().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&Record> {
        match self {
            Value::Record(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Text(s) => f.write_str(s),
            Value::Record(r) => r.fmt(f),
        }
    }
}

/// A sequenced datum such as `remove(5)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: BTreeMap<String, Value>,
    pub seq: u64,
}

impl Record {
    pub fn new(kind: impl Into<String>, seq: u64) -> Self {
        Self {
            kind: kind.into(),
            fields: BTreeMap::new(),
            seq,
        }
    }

    /// Adds a field. Panics if it would nest deeper than [`MAX_DEPTH`].
    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        assert!(value.depth() < MAX_DEPTH, "record nesting exceeds {MAX_DEPTH}");
        self.fields.insert(name.into(), value);
        self
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.fields.get(name) {
            Some(Value::Int(i)) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for Record {
    /// `kind(value)`, or just `kind` without a value field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fields.get("value") {
            Some(v) => write!(f, "{}({v})", self.kind),
            None => f.write_str(&self.kind),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_display() {
        let r = Record::new("remove", 12).with("value", Value::Int(5));
        assert_eq!(r.to_string(), "remove(5)");
        assert_eq!(Record::new("tick", 0).to_string(), "tick");
    }

    #[test]
    fn depth_counts_nesting() {
        assert_eq!(Value::Int(1).depth(), 1);
        let inner = Value::Record(Record::new("a", 0).with("x", Value::Int(1)));
        let outer = Value::Record(Record::new("b", 0).with("inner", inner));
        assert_eq!(outer.depth(), 3);
    }

    #[test]
    #[should_panic]
    fn nesting_limit_enforced() {
        let mut v = Value::Null;
        for i in 0..MAX_DEPTH {
            v = Value::Record(Record::new("n", i as u64).with("v", v));
        }
    }
}
