//! Structural validation of raw model documents against the catalog.

use serde_json::{Map, Value as Json};

use crate::id::{is_valid_namespace, Curie, Identifier};
use crate::model::ResourceClass;
use crate::schema::catalog::{self, PropKind, PropertySpec, SCHEMA_VERSION};
use crate::schema::{Issue, ValidationReport};

/// Checks a model document for well-formedness and conformance to the
/// schema: value types, required ids, enum values and per-class rules.
///
/// Unknown properties are reported as warnings. An unreadable document
/// yields a single error.
pub fn validate_syntax(text: &str) -> ValidationReport {
    match serde_json::from_str::<Json>(text) {
        Ok(doc) => validate_document(&doc),
        Err(e) => Issue::error(
            "unreadable",
            format!(
                "not a JSON document: {e} (line {}, column {})",
                e.line(),
                e.column()
            ),
        )
        .into(),
    }
}

/// Same checks as [`validate_syntax`] on an already parsed document.
pub fn validate_document(doc: &Json) -> ValidationReport {
    let mut report = ValidationReport::new();
    let Some(obj) = doc.as_object() else {
        report.push(Issue::error("type", "model document must be a JSON object").at(""));
        return report;
    };
    for (key, value) in obj {
        let ptr = format!("/{}", escape(key));
        match key.as_str() {
            "id" | "name" | "description" => expect_string(value, &ptr, &mut report),
            "namespace" => match value.as_str() {
                Some(ns) if is_valid_namespace(ns) => {}
                Some(ns) => report.push(
                    Issue::error(
                        "bad-namespace",
                        format!("namespace {ns:?} must match [A-Za-z0-9_-]+"),
                    )
                    .at(ptr),
                ),
                None => type_error(value, "a string", &ptr, &mut report),
            },
            "schemaVersion" => match value.as_str() {
                Some(v) if major(v) == major(SCHEMA_VERSION) => {}
                Some(v) => report.push(
                    Issue::error(
                        "schema-version",
                        format!("schema version {v} is not compatible with {SCHEMA_VERSION}"),
                    )
                    .at(ptr),
                ),
                None => type_error(value, "a string", &ptr, &mut report),
            },
            "generated" => {
                if !value.is_boolean() {
                    type_error(value, "a boolean", &ptr, &mut report);
                }
            }
            "imports" => validate_imports(value, &ptr, &mut report),
            "variance" => validate_variance(value, &ptr, &mut report),
            _ => match ResourceClass::from_collection(key) {
                Some(class) => match value.as_array() {
                    Some(items) => {
                        for (i, item) in items.iter().enumerate() {
                            validate_resource(class, item, &format!("{ptr}/{i}"), &mut report);
                        }
                    }
                    None => type_error(value, "an array", &ptr, &mut report),
                },
                None => report.push(
                    Issue::warning(
                        "unknown-property",
                        format!("unknown top-level property {key:?} is kept as is"),
                    )
                    .at(ptr),
                ),
            },
        }
    }
    report
}

fn major(version: &str) -> &str {
    version.split('.').next().unwrap_or(version)
}

fn validate_imports(value: &Json, ptr: &str, report: &mut ValidationReport) {
    let Some(items) = value.as_array() else {
        return type_error(value, "an array", ptr, report);
    };
    for (i, item) in items.iter().enumerate() {
        let ptr = format!("{ptr}/{i}");
        match item {
            Json::String(_) => {}
            Json::Object(o) => {
                match o.get("url") {
                    Some(Json::String(_)) => {}
                    Some(other) => type_error(other, "a string", &format!("{ptr}/url"), report),
                    None => report.push(
                        Issue::error("missing-url", "import entry without url").at(ptr.clone()),
                    ),
                }
                if let Some(ns) = o.get("namespace") {
                    if !ns.as_str().is_some_and(is_valid_namespace) {
                        report.push(
                            Issue::error(
                                "bad-namespace",
                                "import namespace must match [A-Za-z0-9_-]+",
                            )
                            .at(format!("{ptr}/namespace")),
                        );
                    }
                }
            }
            other => type_error(other, "a string or an object", &ptr, report),
        }
    }
}

fn validate_variance(value: &Json, ptr: &str, report: &mut ValidationReport) {
    let Some(obj) = value.as_object() else {
        return type_error(value, "an object", ptr, report);
    };
    let mut clades = Vec::new();
    match obj.get("clades") {
        Some(Json::Array(items)) => {
            for (i, c) in items.iter().enumerate() {
                match c.as_str() {
                    Some(s) => clades.push(s.to_string()),
                    None => type_error(c, "a string", &format!("{ptr}/clades/{i}"), report),
                }
            }
        }
        Some(other) => type_error(other, "an array", &format!("{ptr}/clades"), report),
        None => {}
    }
    match obj.get("presence") {
        Some(Json::Object(presence)) => {
            for (id, list) in presence {
                let p = format!("{ptr}/presence/{}", escape(id));
                if let Err(e) = Identifier::parse(id) {
                    report.push(Issue::error("bad-identifier", e.to_string()).at(p.clone()));
                }
                let Some(items) = list.as_array() else {
                    type_error(list, "an array", &p, report);
                    continue;
                };
                for (i, c) in items.iter().enumerate() {
                    match c.as_str() {
                        Some(s) if clades.iter().any(|k| k == s) => {}
                        Some(s) => report.push(
                            Issue::error(
                                "undeclared-clade",
                                format!("clade {s:?} is not declared in variance.clades"),
                            )
                            .at(format!("{p}/{i}")),
                        ),
                        None => type_error(c, "a string", &format!("{p}/{i}"), report),
                    }
                }
            }
        }
        Some(other) => type_error(other, "an object", &format!("{ptr}/presence"), report),
        None => {}
    }
    for key in obj.keys() {
        if key != "clades" && key != "presence" {
            report.push(
                Issue::warning(
                    "unknown-property",
                    format!("unknown variance property {key:?}"),
                )
                .at(format!("{ptr}/{}", escape(key))),
            );
        }
    }
}

fn validate_resource(class: ResourceClass, value: &Json, ptr: &str, report: &mut ValidationReport) {
    let Some(obj) = value.as_object() else {
        return type_error(value, &format!("a {class} object"), ptr, report);
    };
    let id = match obj.get("id") {
        Some(Json::String(s)) => match Identifier::parse(s) {
            Ok(id) => Some(id),
            Err(e) => {
                report.push(Issue::error("bad-identifier", e.to_string()).at(format!("{ptr}/id")));
                None
            }
        },
        Some(other) => {
            type_error(other, "a string", &format!("{ptr}/id"), report);
            None
        }
        None => {
            report.push(
                Issue::error("missing-id", format!("{class} without id")).at(ptr.to_string()),
            );
            None
        }
    };
    let tag = |issue: Issue| match &id {
        Some(id) => issue.on(id),
        None => issue,
    };
    for (key, v) in obj {
        if key == "id" {
            continue;
        }
        let p = format!("{ptr}/{}", escape(key));
        match catalog::property(class, key) {
            Some(spec) => {
                let mut sub = ValidationReport::new();
                validate_value(spec, v, &p, &mut sub);
                for issue in sub.issues {
                    report.push(if issue.resource.is_none() {
                        tag(issue)
                    } else {
                        issue
                    });
                }
            }
            None => report.push(tag(Issue::warning(
                "unknown-property",
                format!("{class} has no property {key:?}; kept as is"),
            )
            .at(p))),
        }
    }
    for issue in class_rules(class, obj, ptr) {
        report.push(tag(issue));
    }
}

/// Checks one property value against its catalog entry. Inline resource
/// definitions in reference slots are validated recursively.
pub fn validate_value(spec: &PropertySpec, v: &Json, ptr: &str, report: &mut ValidationReport) {
    match spec.kind {
        PropKind::Bool => {
            if !v.is_boolean() {
                type_error(v, "a boolean", ptr, report);
            }
        }
        PropKind::Int { min } => match v.as_i64() {
            Some(i) if i >= min => {}
            Some(i) => report.push(
                Issue::error(
                    "out-of-range",
                    format!("{} = {i} must be at least {min}", spec.name),
                )
                .at(ptr),
            ),
            None => type_error(v, "an integer", ptr, report),
        },
        PropKind::Number => {
            if !v.is_number() {
                type_error(v, "a number", ptr, report);
            }
        }
        PropKind::Fraction => match v.as_f64() {
            Some(x) if (0.0..=1.0).contains(&x) => {}
            Some(x) => report.push(
                Issue::error(
                    "out-of-range",
                    format!("{} = {x} must lie in [0, 1]", spec.name),
                )
                .at(ptr),
            ),
            None => type_error(v, "a number", ptr, report),
        },
        PropKind::Text => expect_string(v, ptr, report),
        PropKind::Enum(values) => match v.as_str() {
            Some(s) if values.contains(&s) => {}
            Some(s) => report.push(
                Issue::error(
                    "bad-enum",
                    format!("{} = {s:?} is not one of {}", spec.name, values.join(", ")),
                )
                .at(ptr),
            ),
            None => type_error(v, "a string", ptr, report),
        },
        PropKind::Coords { min, max } => match v.as_array() {
            Some(items)
                if items.iter().all(Json::is_number) && (min..=max).contains(&items.len()) => {}
            Some(_) => report.push(
                Issue::error(
                    "type",
                    format!("{} must hold {min} to {max} numbers", spec.name),
                )
                .at(ptr),
            ),
            None => type_error(v, "an array of numbers", ptr, report),
        },
        PropKind::Ref(targets) => validate_ref(targets[0], v, ptr, report),
        PropKind::Refs(targets) => match v.as_array() {
            Some(items) => {
                for (i, item) in items.iter().enumerate() {
                    validate_ref(targets[0], item, &format!("{ptr}/{i}"), report);
                }
            }
            None => type_error(v, "an array", ptr, report),
        },
        PropKind::Terms => match v.as_array() {
            Some(items) => {
                for (i, item) in items.iter().enumerate() {
                    let p = format!("{ptr}/{i}");
                    match item.as_str() {
                        Some(s) => {
                            if let Err(e) = Curie::parse(s) {
                                report.push(Issue::error("bad-curie", e.to_string()).at(p));
                            }
                        }
                        None => type_error(item, "a CURIE string", &p, report),
                    }
                }
            }
            None => type_error(v, "an array", ptr, report),
        },
    }
}

fn validate_ref(class: ResourceClass, v: &Json, ptr: &str, report: &mut ValidationReport) {
    match v {
        Json::String(s) => {
            if let Err(e) = Identifier::parse(s) {
                report.push(Issue::error("bad-identifier", e.to_string()).at(ptr));
            }
        }
        Json::Object(_) => validate_resource(class, v, ptr, report),
        other => type_error(other, "an identifier", ptr, report),
    }
}

fn class_rules(class: ResourceClass, obj: &Map<String, Json>, ptr: &str) -> Vec<Issue> {
    let mut out = Vec::new();
    let has = |k: &str| obj.get(k).is_some_and(|v| !v.is_null());
    match class {
        ResourceClass::Chain => {
            let methods: Vec<&str> = ["numLevels", "lyphs", "housingLyphs"]
                .into_iter()
                .filter(|k| has(k))
                .collect();
            if methods.len() > 1 || (has("lyphs") && has("lyphTemplate")) {
                let mut named = methods.clone();
                if has("lyphTemplate") && has("lyphs") {
                    named.push("lyphTemplate");
                }
                out.push(
                    Issue::error(
                        "ambiguous-chain",
                        format!(
                            "ambiguous chain definition: {} are mutually exclusive",
                            named.join(", ")
                        ),
                    )
                    .at(ptr),
                );
            }
            let has_levels = obj
                .get("levels")
                .and_then(Json::as_array)
                .is_some_and(|l| !l.is_empty());
            if methods.is_empty() && !has_levels {
                out.push(
                    Issue::error(
                        "undefined-chain",
                        "chain needs one of numLevels, lyphs or housingLyphs",
                    )
                    .at(ptr),
                );
            }
        }
        ResourceClass::Lyph => {
            if obj.get("isTemplate").and_then(Json::as_bool) == Some(true) && has("conveys") {
                out.push(
                    Issue::error("template-conveys", "a lyph template cannot convey a link")
                        .at(format!("{ptr}/conveys")),
                );
            }
        }
        ResourceClass::Link | ResourceClass::Wire => {
            if let (Some(s), Some(t)) = (obj.get("source"), obj.get("target")) {
                if s.is_string() && s == t {
                    out.push(
                        Issue::error(
                            "self-loop",
                            format!("{class} source and target must differ"),
                        )
                        .at(format!("{ptr}/target")),
                    );
                }
            }
        }
        ResourceClass::Node | ResourceClass::Anchor => {
            if has("offset") && !has("hostedBy") {
                out.push(
                    Issue::error("offset-without-host", "offset requires hostedBy")
                        .at(format!("{ptr}/offset")),
                );
            }
        }
        ResourceClass::Coalescence => {
            let n = obj
                .get("lyphs")
                .and_then(Json::as_array)
                .map_or(0, Vec::len);
            if n < 2 {
                out.push(
                    Issue::error(
                        "coalescence-arity",
                        format!("a coalescence joins at least 2 lyphs, found {n}"),
                    )
                    .at(ptr),
                );
            }
        }
        _ => {}
    }
    out
}

fn expect_string(v: &Json, ptr: &str, report: &mut ValidationReport) {
    if !v.is_string() {
        type_error(v, "a string", ptr, report);
    }
}

fn type_error(v: &Json, expected: &str, ptr: &str, report: &mut ValidationReport) {
    report.push(
        Issue::error(
            "type",
            format!("expected {expected}, found {}", json_type(v)),
        )
        .at(ptr),
    );
}

fn json_type(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) => "a boolean",
        Json::Number(_) => "a number",
        Json::String(_) => "a string",
        Json::Array(_) => "an array",
        Json::Object(_) => "an object",
    }
}

/// Escapes a key as a JSON pointer token.
pub(crate) fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_model_is_clean() {
        let r = validate_syntax(r#"{"id": "m", "lyphs": [{"id": "L"}]}"#);
        assert!(r.is_empty(), "{r}");
    }

    #[test]
    fn scalar_layers_point_at_field() {
        let r = validate_syntax(r#"{"id": "m", "lyphs": [{"id": "L", "layers": "A"}]}"#);
        assert!(r.has_errors());
        assert_eq!(r.issues[0].location.pointer, "/lyphs/0/layers");
    }

    #[test]
    fn ambiguous_chain() {
        let r = validate_syntax(r#"{"chains": [{"id": "c", "numLevels": 2, "lyphs": ["a"]}]}"#);
        assert_eq!(r.count("ambiguous-chain"), 1);
        assert!(r.render().contains("ambiguous chain definition"));
    }

    #[test]
    fn unreadable_is_single_error() {
        let r = validate_syntax("{ not json");
        assert_eq!(r.issues.len(), 1);
        assert!(r.has_errors());
    }

    #[test]
    fn unknown_property_warns() {
        let r = validate_syntax(r#"{"nodes": [{"id": "n", "colour": "red"}]}"#);
        assert_eq!(r.max_severity(), Some(crate::schema::Severity::Warning));
    }

    #[test]
    fn nested_definition_checked() {
        let r = validate_syntax(r#"{"lyphs": [{"id": "L", "layers": [{"name": "no id"}]}]}"#);
        assert_eq!(r.count("missing-id"), 1);
        assert_eq!(r.issues[0].location.pointer, "/lyphs/0/layers/0");
    }

    #[test]
    fn undeclared_clade() {
        let r =
            validate_syntax(r#"{"variance": {"clades": ["rat"], "presence": {"L": ["human"]}}}"#);
        assert_eq!(r.count("undeclared-clade"), 1);
    }
}
