use crate::id::{Curie, Identifier};

/// A typed property value. The kind of each known property is fixed by the
/// schema catalog; properties the catalog does not know are kept verbatim as
/// [`Value::Other`].
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Number(f64),
    Text(String),
    Coords(Vec<f64>),
    Ref(Identifier),
    Refs(Vec<Identifier>),
    Terms(Vec<Curie>),
    Other(serde_json::Value),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Every identifier this value refers to, in order.
    pub fn refs(&self) -> &[Identifier] {
        match self {
            Value::Ref(id) => std::slice::from_ref(id),
            Value::Refs(ids) => ids,
            _ => &[],
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, Value::Ref(_) | Value::Refs(_))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<Vec<f64>> for Value {
    fn from(c: Vec<f64>) -> Self {
        Value::Coords(c)
    }
}

impl From<Identifier> for Value {
    fn from(id: Identifier) -> Self {
        Value::Ref(id)
    }
}

impl From<Vec<Identifier>> for Value {
    fn from(ids: Vec<Identifier>) -> Self {
        Value::Refs(ids)
    }
}
