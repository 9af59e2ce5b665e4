//! Export of generated models: canonical JSON, JSON-LD and the resource map.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value as Json};

use crate::document::{to_canonical_string, value_to_json};
use crate::id::Identifier;
use crate::model::{GeneratedModel, Model, Resource, Value};
use crate::schema::catalog::{self, PropKind};
use crate::schema::{Issue, ValidationReport};

pub use crate::document::serialize_generated;

pub const DEFAULT_BASE_IRI: &str = "https://apinatomy.example/models/";
pub const VOCAB_IRI: &str = "https://apinatomy.example/schema#";

/// Namespace used for unprefixed ids of a model without namespace or id.
pub const FALLBACK_NAMESPACE: &str = "model";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub iri: String,
    /// Values are node references (`"@type": "@id"`).
    pub reference: bool,
    /// Values form an ordered RDF list.
    pub list: bool,
}

/// Term definitions and IRI bases of a JSON-LD export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonLdContext {
    /// Resource IRIs are `<base><namespace>#<local>`.
    pub base: String,
    pub vocab: String,
    pub terms: BTreeMap<String, Term>,
}

impl Default for JsonLdContext {
    fn default() -> Self {
        Self::standard(DEFAULT_BASE_IRI)
    }
}

impl JsonLdContext {
    /// Context defining every catalog property of every class.
    pub fn standard(base: &str) -> Self {
        let mut terms = BTreeMap::new();
        for class in crate::model::ResourceClass::ALL {
            for spec in catalog::properties(class) {
                let reference = spec.kind.is_reference() || spec.kind == PropKind::Terms;
                let list = spec.ordered || matches!(spec.kind, PropKind::Coords { .. });
                let t = terms.entry(spec.name.to_string()).or_insert(Term {
                    iri: format!("{VOCAB_IRI}{}", spec.name),
                    reference,
                    list,
                });
                t.reference |= reference;
                t.list |= list;
            }
        }
        JsonLdContext {
            base: base.to_string(),
            vocab: VOCAB_IRI.to_string(),
            terms,
        }
    }

    /// Standard context extended with the uncatalogued properties of `model`.
    pub fn for_model(base: &str, model: &Model) -> Self {
        let mut ctx = Self::standard(base);
        for names in crate::document::extra_property_names(model).into_values() {
            for n in names {
                ctx.add_literal(&n);
            }
        }
        ctx
    }

    pub fn add_literal(&mut self, name: &str) {
        self.terms.entry(name.to_string()).or_insert(Term {
            iri: format!("{}{name}", self.vocab),
            reference: false,
            list: false,
        });
    }

    pub fn namespace_iri(&self, ns: &str) -> String {
        format!("{}{ns}#", self.base)
    }

    pub fn to_json(&self) -> Json {
        let mut ctx = Map::new();
        ctx.insert("@vocab".into(), Json::String(self.vocab.clone()));
        for (name, t) in &self.terms {
            let mut d = Map::new();
            d.insert("@id".into(), Json::String(t.iri.clone()));
            if t.reference {
                d.insert("@type".into(), json!("@id"));
            }
            if t.list {
                d.insert("@container".into(), json!("@list"));
            }
            ctx.insert(name.clone(), Json::Object(d));
        }
        Json::Object(ctx)
    }
}

/// Namespace an unprefixed id of `model` belongs to.
pub fn home_namespace(model: &Model) -> &str {
    model
        .namespace
        .as_deref()
        .or(model.id.as_deref())
        .unwrap_or(FALLBACK_NAMESPACE)
}

pub fn resource_iri(ctx: &JsonLdContext, model: &Model, id: &Identifier) -> String {
    let ns = id.prefix().unwrap_or_else(|| home_namespace(model));
    format!("{}{}", ctx.namespace_iri(ns), id.local_part())
}

/// JSON-LD document of a generated model: one node object per resource in
/// `@graph`, typed by class. Ontology terms are kept as compact IRIs whose
/// prefix is left undefined.
///
/// Fails with an error listing every serialized property that `ctx` has no
/// term for.
pub fn to_json_ld(gen: &GeneratedModel, ctx: &JsonLdContext) -> Result<Json, ValidationReport> {
    let model = gen.model();
    let mut missing: BTreeSet<String> = BTreeSet::new();
    for r in model.resources() {
        for k in r.props.keys() {
            if !ctx.terms.contains_key(k) {
                missing.insert(k.clone());
            }
        }
    }
    if !missing.is_empty() {
        let list: Vec<&str> = missing.iter().map(String::as_str).collect();
        let mut report = ValidationReport::new();
        report.push(Issue::error(
            "missing-context-term",
            format!("no context term for: {}", list.join(", ")),
        ));
        return Err(report);
    }
    let graph: Vec<Json> = model
        .resources()
        .map(|r| node_object(ctx, model, r))
        .collect();
    Ok(json!({"@context": ctx.to_json(), "@graph": graph}))
}

fn node_object(ctx: &JsonLdContext, model: &Model, r: &Resource) -> Json {
    let mut o = Map::new();
    o.insert("@id".into(), Json::String(resource_iri(ctx, model, &r.id)));
    o.insert("@type".into(), Json::String(r.class.name().to_string()));
    for (k, v) in &r.props {
        let out = match v {
            Value::Ref(id) => Json::String(resource_iri(ctx, model, id)),
            Value::Refs(ids) => Json::Array(
                ids.iter()
                    .map(|i| Json::String(resource_iri(ctx, model, i)))
                    .collect(),
            ),
            other => value_to_json(other),
        };
        o.insert(k.clone(), out);
    }
    Json::Object(o)
}

pub fn serialize_json_ld(
    gen: &GeneratedModel,
    ctx: &JsonLdContext,
) -> Result<String, ValidationReport> {
    to_json_ld(gen, ctx).map(|d| to_canonical_string(&d))
}

/// Resource map entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapEntry {
    pub class: String,
    pub ontology_terms: Vec<String>,
    pub generated: bool,
    pub namespace: String,
}

/// Every resource of a generated model keyed by id.
pub fn resource_map(gen: &GeneratedModel) -> BTreeMap<Identifier, MapEntry> {
    let model = gen.model();
    let home = home_namespace(model);
    model
        .resources()
        .map(|r| {
            let entry = MapEntry {
                class: r.class.name().to_string(),
                ontology_terms: r.ontology_terms().iter().map(ToString::to_string).collect(),
                generated: r.is_generated(),
                namespace: r.id.prefix().unwrap_or(home).to_string(),
            };
            (r.id.clone(), entry)
        })
        .collect()
}

pub fn resource_map_json(gen: &GeneratedModel) -> Json {
    let entries: Map<String, Json> = resource_map(gen)
        .into_iter()
        .map(|(id, e)| {
            let provenance = if e.generated { "generated" } else { "declared" };
            (
                id.to_string(),
                json!({
                    "class": e.class,
                    "ontologyTerms": e.ontology_terms,
                    "provenance": provenance,
                    "namespace": e.namespace,
                }),
            )
        })
        .collect();
    json!({"namespace": home_namespace(gen.model()), "resources": entries})
}

pub fn serialize_resource_map(gen: &GeneratedModel) -> String {
    to_canonical_string(&resource_map_json(gen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_model;
    use crate::generator::generate;

    fn gen(text: &str) -> GeneratedModel {
        generate(&parse_model(text).unwrap()).unwrap().model
    }

    #[test]
    fn empty_model_has_context_and_empty_graph() {
        let d = to_json_ld(&gen("{}"), &JsonLdContext::default()).unwrap();
        assert_eq!(d["@graph"], json!([]));
        assert_eq!(d["@context"]["@vocab"], json!(VOCAB_IRI));
    }

    #[test]
    fn link_references_use_node_iris() {
        let g = gen(
            r#"{"namespace": "demo", "nodes": [{"id": "a"}, {"id": "b"}],
            "links": [{"id": "l", "source": "a", "target": "b"}]}"#,
        );
        let d = to_json_ld(&g, &JsonLdContext::default()).unwrap();
        let link = d["@graph"]
            .as_array()
            .unwrap()
            .iter()
            .find(|n| n["@type"] == "Link")
            .unwrap();
        assert_eq!(
            link["source"],
            json!("https://apinatomy.example/models/demo#a")
        );
        assert_eq!(
            link["target"],
            json!("https://apinatomy.example/models/demo#b")
        );
        assert_eq!(d["@context"]["source"]["@type"], json!("@id"));
    }

    #[test]
    fn unknown_property_without_term_fails() {
        let g = gen(r#"{"nodes": [{"id": "a", "colour": "red", "weight": 2}]}"#);
        let err = to_json_ld(&g, &JsonLdContext::default()).unwrap_err();
        let msg = err.render();
        assert!(msg.contains("colour, weight"), "{msg}");
        assert!(to_json_ld(&g, &JsonLdContext::for_model(DEFAULT_BASE_IRI, g.model())).is_ok());
    }

    #[test]
    fn layers_are_lists() {
        let ctx = JsonLdContext::default();
        assert!(ctx.terms["layers"].list);
        assert!(!ctx.terms["internalLyphs"].list);
        assert!(ctx.terms["ontologyTerms"].reference);
    }

    #[test]
    fn resource_map_tags_provenance_and_namespace() {
        let mut m =
            parse_model(r#"{"namespace": "a", "nodes": [{"id": "n"}], "lyphs": [{"id": "l"}]}"#)
                .unwrap();
        m.push(
            Resource::new(
                crate::model::ResourceClass::Anchor,
                Identifier::parse("too:x").unwrap(),
            )
            .with("external", true),
        );
        let g = GeneratedModel::assume_generated(m);
        let map = resource_map(&g);
        assert_eq!(map.len(), 3);
        assert_eq!(map[&Identifier::parse("too:x").unwrap()].namespace, "too");
        assert_eq!(map[&Identifier::local("n")].namespace, "a");
        assert!(map[&Identifier::local("l")].ontology_terms.is_empty());
    }
}
