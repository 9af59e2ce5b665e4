//! The canonical JSON model document: parsing (with hoisting of inline
//! definitions) and canonical serialization.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value as Json};

use crate::error::{Error, Result};
use crate::id::{Curie, Identifier};
use crate::model::{
    GeneratedModel, ImportRef, Model, Resource, ResourceClass, Value, VarianceSpec,
};
use crate::schema::catalog::{self, PropKind};

/// Parses a model document.
///
/// Resources defined inline inside reference slots are hoisted into their
/// class collection and replaced by their id. Values whose JSON type does not
/// match the catalog are kept verbatim (run
/// [`validate_syntax`](crate::schema::validate_syntax) to report them).
pub fn parse_model(text: &str) -> Result<Model> {
    let doc: Json = serde_json::from_str(text)?;
    model_from_json(&doc)
}

pub fn model_from_json(doc: &Json) -> Result<Model> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::document("", "model document must be a JSON object"))?;
    let mut model = Model::new();
    let mut hoisted: Vec<Option<Resource>> = Vec::new();
    for (key, value) in obj {
        match key.as_str() {
            "id" => model.id = value.as_str().map(str::to_string),
            "name" => model.name = value.as_str().map(str::to_string),
            "namespace" => model.namespace = value.as_str().map(str::to_string),
            "description" => model.description = value.as_str().map(str::to_string),
            "schemaVersion" => model.schema_version = value.as_str().map(str::to_string),
            "generated" => model.generated = value.as_bool().unwrap_or(false),
            "imports" => model.imports = parse_imports(value),
            "variance" => model.variance = Some(parse_variance(value)?),
            _ => match (ResourceClass::from_collection(key), value.as_array()) {
                (Some(class), Some(items)) => {
                    for (i, item) in items.iter().enumerate() {
                        let ptr = format!("/{key}/{i}");
                        let r = parse_resource(class, item, &ptr, &mut hoisted)?;
                        model.push(r);
                    }
                }
                _ => {
                    model.extra.insert(key.clone(), value.clone());
                }
            },
        }
    }
    for r in hoisted.into_iter().flatten() {
        model.push(r);
    }
    Ok(model)
}

/// Parses one resource definition of `class`. Inline definitions nested in
/// reference slots are rejected.
pub fn resource_from_json(class: ResourceClass, value: &Json) -> Result<Resource> {
    let mut hoisted = Vec::new();
    let r = parse_resource(class, value, "", &mut hoisted)?;
    if !hoisted.is_empty() {
        return Err(Error::document(
            "",
            "nested definitions are not allowed here",
        ));
    }
    Ok(r)
}

/// Typed value of property `name` of `class`; unknown properties are kept
/// verbatim.
pub fn property_value(class: ResourceClass, name: &str, value: &Json) -> Result<Value> {
    let mut hoisted = Vec::new();
    let v = match catalog::property(class, name) {
        Some(spec) => typed_value(spec.kind, value, "", &mut hoisted)?,
        None => Value::Other(value.clone()),
    };
    if !hoisted.is_empty() {
        return Err(Error::document(
            "",
            "nested definitions are not allowed here",
        ));
    }
    Ok(v)
}

fn parse_imports(value: &Json) -> Vec<ImportRef> {
    let Some(items) = value.as_array() else {
        return Vec::new();
    };
    items
        .iter()
        .filter_map(|item| match item {
            Json::String(url) => Some(ImportRef::new(url.clone())),
            Json::Object(o) => Some(ImportRef {
                url: o.get("url")?.as_str()?.to_string(),
                namespace: o
                    .get("namespace")
                    .and_then(Json::as_str)
                    .map(str::to_string),
            }),
            _ => None,
        })
        .collect()
}

pub(crate) fn parse_variance(value: &Json) -> Result<VarianceSpec> {
    let mut spec = VarianceSpec::default();
    if let Some(clades) = value.get("clades").and_then(Json::as_array) {
        spec.clades = clades
            .iter()
            .filter_map(Json::as_str)
            .map(str::to_string)
            .collect();
    }
    if let Some(presence) = value.get("presence").and_then(Json::as_object) {
        for (id, list) in presence {
            let id = Identifier::parse(id)?;
            let clades: BTreeSet<String> = list
                .as_array()
                .map(|l| {
                    l.iter()
                        .filter_map(Json::as_str)
                        .map(str::to_string)
                        .collect()
                })
                .unwrap_or_default();
            spec.presence.insert(id, clades);
        }
    }
    Ok(spec)
}

fn parse_resource(
    class: ResourceClass,
    value: &Json,
    ptr: &str,
    hoisted: &mut Vec<Option<Resource>>,
) -> Result<Resource> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::document(ptr, format!("{class} definition must be an object")))?;
    let id = obj
        .get("id")
        .and_then(Json::as_str)
        .ok_or_else(|| Error::document(ptr, format!("{class} definition without id")))?;
    let mut r = Resource::new(class, Identifier::parse(id)?);
    r.origin = Some(ptr.to_string());
    for (key, v) in obj {
        if key == "id" {
            continue;
        }
        let p = format!("{ptr}/{key}");
        let value = match catalog::property(class, key) {
            Some(spec) => typed_value(spec.kind, v, &p, hoisted)?,
            None => Value::Other(v.clone()),
        };
        r.props.insert(key.clone(), value);
    }
    Ok(r)
}

fn typed_value(
    kind: PropKind,
    v: &Json,
    ptr: &str,
    hoisted: &mut Vec<Option<Resource>>,
) -> Result<Value> {
    let other = || Value::Other(v.clone());
    Ok(match kind {
        PropKind::Bool => v.as_bool().map_or_else(other, Value::Bool),
        PropKind::Int { .. } => v.as_i64().map_or_else(other, Value::Int),
        PropKind::Number | PropKind::Fraction => v.as_f64().map_or_else(other, Value::Number),
        PropKind::Text | PropKind::Enum(_) => v
            .as_str()
            .map_or_else(other, |s| Value::Text(s.to_string())),
        PropKind::Coords { .. } => match v.as_array() {
            Some(items) if items.iter().all(Json::is_number) => {
                Value::Coords(items.iter().filter_map(Json::as_f64).collect())
            }
            _ => other(),
        },
        PropKind::Ref(targets) => match reference(targets[0], v, ptr, hoisted)? {
            Some(id) => Value::Ref(id),
            None => other(),
        },
        PropKind::Refs(targets) => match v.as_array() {
            Some(items) => {
                let mut ids = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    match reference(targets[0], item, &format!("{ptr}/{i}"), hoisted)? {
                        Some(id) => ids.push(id),
                        None => return Ok(other()),
                    }
                }
                Value::Refs(ids)
            }
            None => other(),
        },
        PropKind::Terms => match v.as_array() {
            Some(items) => {
                let terms: Option<Vec<Curie>> = items
                    .iter()
                    .map(|t| t.as_str().and_then(|s| Curie::parse(s).ok()))
                    .collect();
                terms.map_or_else(other, Value::Terms)
            }
            None => other(),
        },
    })
}

/// A reference token, or an inline definition hoisted into `hoisted`.
fn reference(
    class: ResourceClass,
    v: &Json,
    ptr: &str,
    hoisted: &mut Vec<Option<Resource>>,
) -> Result<Option<Identifier>> {
    match v {
        Json::String(s) => Ok(Identifier::parse(s).ok()),
        Json::Object(_) => {
            // Reserve the slot first so that hoisted resources keep document order.
            let slot = hoisted.len();
            hoisted.push(None);
            let r = parse_resource(class, v, ptr, hoisted)?;
            let id = r.id.clone();
            hoisted[slot] = Some(r);
            Ok(Some(id))
        }
        _ => Ok(None),
    }
}

/// Document tree of a model. Resources flagged `external` are written only
/// when `include_external` is set.
pub fn model_to_json(model: &Model, include_external: bool) -> Json {
    let mut obj = Map::new();
    for (k, v) in &model.extra {
        obj.insert(k.clone(), v.clone());
    }
    let mut text = |key: &str, value: &Option<String>| {
        if let Some(v) = value {
            obj.insert(key.to_string(), Json::String(v.clone()));
        }
    };
    text("id", &model.id);
    text("name", &model.name);
    text("namespace", &model.namespace);
    text("description", &model.description);
    text("schemaVersion", &model.schema_version);
    if model.generated {
        obj.insert("generated".into(), Json::Bool(true));
    }
    if !model.imports.is_empty() {
        let imports = model
            .imports
            .iter()
            .map(|i| match &i.namespace {
                None => Json::String(i.url.clone()),
                Some(ns) => serde_json::json!({"url": i.url, "namespace": ns}),
            })
            .collect();
        obj.insert("imports".into(), Json::Array(imports));
    }
    if let Some(v) = &model.variance {
        obj.insert("variance".into(), variance_to_json(v));
    }
    for class in ResourceClass::ALL {
        let items: Vec<Json> = model
            .of_class(class)
            .iter()
            .filter(|r| include_external || !r.is_external())
            .map(resource_to_json)
            .collect();
        if !items.is_empty() {
            obj.insert(class.collection().to_string(), Json::Array(items));
        }
    }
    Json::Object(obj)
}

pub(crate) fn variance_to_json(v: &VarianceSpec) -> Json {
    let presence: Map<String, Json> = v
        .presence
        .iter()
        .map(|(id, clades)| {
            (
                id.to_string(),
                Json::Array(clades.iter().cloned().map(Json::String).collect()),
            )
        })
        .collect();
    serde_json::json!({"clades": v.clades, "presence": presence})
}

pub fn resource_to_json(r: &Resource) -> Json {
    let mut obj = Map::new();
    obj.insert("id".into(), Json::String(r.id.to_string()));
    for (k, v) in &r.props {
        obj.insert(k.clone(), value_to_json(v));
    }
    Json::Object(obj)
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(i) => Json::from(*i),
        Value::Number(x) => number(*x),
        Value::Text(s) => Json::String(s.clone()),
        Value::Coords(c) => Json::Array(c.iter().map(|x| number(*x)).collect()),
        Value::Ref(id) => Json::String(id.to_string()),
        Value::Refs(ids) => Json::Array(ids.iter().map(|i| Json::String(i.to_string())).collect()),
        Value::Terms(t) => Json::Array(t.iter().map(|c| Json::String(c.to_string())).collect()),
        Value::Other(j) => j.clone(),
    }
}

fn number(x: f64) -> Json {
    serde_json::Number::from_f64(x).map_or(Json::Null, Json::Number)
}

/// Canonical text: keys sorted, two-space indentation, trailing newline.
pub fn to_canonical_string(doc: &Json) -> String {
    // serde_json's default map is ordered by key, which gives sorted output.
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Serializes an input model; imported (`external`) resources are left out.
pub fn serialize_spec(model: &Model) -> String {
    to_canonical_string(&model_to_json(model, false))
}

/// Serializes a generated model, imported resources included.
pub fn serialize_generated(model: &GeneratedModel) -> String {
    to_canonical_string(&model_to_json(model.model(), true))
}

/// Reads `path` and parses it as a model document.
pub fn read_model(path: &std::path::Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

/// Keys of [`Model::extra`] in sorted order, used when building contexts.
pub fn extra_property_names(model: &Model) -> BTreeMap<ResourceClass, BTreeSet<String>> {
    let mut out: BTreeMap<ResourceClass, BTreeSet<String>> = BTreeMap::new();
    for r in model.resources() {
        for (k, v) in &r.props {
            if matches!(v, Value::Other(_)) && catalog::property(r.class, k).is_none() {
                out.entry(r.class).or_default().insert(k.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoists_nested_definitions_in_document_order() {
        let m = parse_model(
            r#"{"lyphs": [{"id": "L", "layers": [{"id": "A", "layers": [{"id": "B"}]}, "C"]}]}"#,
        )
        .unwrap();
        let ids: Vec<String> = m
            .of_class(ResourceClass::Lyph)
            .iter()
            .map(|r| r.id.to_string())
            .collect();
        assert_eq!(ids, ["L", "A", "B"]);
        assert_eq!(
            m.get(&Identifier::local("A")).unwrap().origin.as_deref(),
            Some("/lyphs/0/layers/0")
        );
        let l = m.get(&Identifier::local("L")).unwrap();
        assert_eq!(l.references("layers").len(), 2);
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let text = r#"{"namespace": "demo", "unknownTop": [1, 2],
            "links": [{"id": "l", "source": "a", "target": "b", "length": 5}],
            "nodes": [{"id": "a", "layout": [0, 1], "colour": "red"}]}"#;
        let once = serialize_spec(&parse_model(text).unwrap());
        let twice = serialize_spec(&parse_model(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.ends_with("}\n"));
        assert!(once.contains("\"colour\": \"red\""));
    }

    #[test]
    fn external_resources_only_in_generated_output() {
        let mut m = Model::new();
        m.push(
            Resource::new(ResourceClass::Anchor, Identifier::parse("too:a1").unwrap())
                .with("external", true),
        );
        assert!(!serialize_spec(&m).contains("too:a1"));
        let g = GeneratedModel::assume_generated(m);
        assert!(serialize_generated(&g).contains("too:a1"));
    }

    #[test]
    fn nested_without_id_is_rejected() {
        assert!(parse_model(r#"{"lyphs": [{"id": "L", "layers": [{"name": "x"}]}]}"#).is_err());
    }
}
