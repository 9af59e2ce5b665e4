use std::collections::BTreeMap;

use crate::id::{Curie, Identifier};
use crate::model::{ResourceClass, Value};

/// One declared or generated resource: an identifier, a class, and its
/// property values keyed by property name.
#[derive(Clone, Debug)]
pub struct Resource {
    pub id: Identifier,
    pub class: ResourceClass,
    pub props: BTreeMap<String, Value>,
    /// JSON pointer of the declaration in its source document, when known.
    pub origin: Option<String>,
}

// `origin` is provenance only and never part of structural equality.
impl PartialEq for Resource {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.class == other.class && self.props == other.props
    }
}

impl Resource {
    pub fn new(class: ResourceClass, id: Identifier) -> Self {
        Resource {
            id,
            class,
            props: BTreeMap::new(),
            origin: None,
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.props.get(name)
    }

    pub fn set(&mut self, name: &str, value: impl Into<Value>) {
        self.props.insert(name.to_string(), value.into());
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.props.remove(name)
    }

    pub fn flag(&self, name: &str) -> bool {
        self.get(name).and_then(Value::as_bool).unwrap_or(false)
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(Value::as_f64)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.get(name)? {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(Value::as_text)
    }

    pub fn coords(&self, name: &str) -> Option<&[f64]> {
        match self.get(name)? {
            Value::Coords(c) => Some(c),
            _ => None,
        }
    }

    /// First identifier held by a reference property.
    pub fn reference(&self, name: &str) -> Option<&Identifier> {
        self.get(name).and_then(|v| v.refs().first())
    }

    /// All identifiers held by a reference property (empty when absent).
    pub fn references(&self, name: &str) -> &[Identifier] {
        self.get(name).map(Value::refs).unwrap_or(&[])
    }

    pub fn name(&self) -> Option<&str> {
        self.text("name")
    }

    pub fn ontology_terms(&self) -> &[Curie] {
        match self.get("ontologyTerms") {
            Some(Value::Terms(t)) => t,
            _ => &[],
        }
    }

    pub fn is_generated(&self) -> bool {
        self.flag("generated")
    }

    pub fn is_external(&self) -> bool {
        self.flag("external")
    }

    /// Render flag; resources are visible unless explicitly hidden.
    pub fn is_visible(&self) -> bool {
        self.get("isVisible")
            .and_then(Value::as_bool)
            .unwrap_or(true)
    }

    /// Appends `id` to a list-valued reference property unless already present.
    pub fn push_ref(&mut self, name: &str, id: Identifier) -> bool {
        let entry = self
            .props
            .entry(name.to_string())
            .or_insert_with(|| Value::Refs(Vec::new()));
        match entry {
            Value::Refs(ids) => {
                if ids.contains(&id) {
                    false
                } else {
                    ids.push(id);
                    true
                }
            }
            other => {
                *other = Value::Refs(vec![id]);
                true
            }
        }
    }

    /// Iterates `(property, identifier)` for every outgoing reference.
    pub fn outgoing(&self) -> impl Iterator<Item = (&str, &Identifier)> {
        self.props
            .iter()
            .flat_map(|(k, v)| v.refs().iter().map(move |id| (k.as_str(), id)))
    }

    /// Rewrites every reference; `f` returning `None` drops it (single-valued
    /// properties are removed). Returns the names of changed properties.
    pub fn rewrite_refs(
        &mut self,
        mut f: impl FnMut(&str, &Identifier) -> Option<Identifier>,
    ) -> Vec<String> {
        let mut changed = Vec::new();
        let mut removed = Vec::new();
        for (name, value) in self.props.iter_mut() {
            match value {
                Value::Ref(id) => match f(name, id) {
                    Some(new) => {
                        if new != *id {
                            *id = new;
                            changed.push(name.clone());
                        }
                    }
                    None => removed.push(name.clone()),
                },
                Value::Refs(ids) => {
                    let before = ids.len();
                    let mut touched = false;
                    let mut out = Vec::with_capacity(before);
                    for id in ids.iter() {
                        match f(name, id) {
                            Some(new) => {
                                touched |= new != *id;
                                out.push(new);
                            }
                            None => touched = true,
                        }
                    }
                    if touched {
                        *ids = out;
                        changed.push(name.clone());
                    }
                }
                _ => {}
            }
        }
        for name in removed {
            self.props.remove(&name);
            changed.push(name);
        }
        changed.sort();
        changed
    }
}
