use std::collections::BTreeSet;

use crate::model::{resolve_as, Model, Resolution, ResourceClass};
use crate::schema::catalog;
use crate::schema::{Issue, ValidationReport};

/// Reference integrity of a parsed model.
///
/// `linked` names the namespaces whose definitions have been brought into
/// `model` (by import or join). Dangling references into other namespaces
/// are errors; dangling local references are warnings since the generator
/// can stub them; duplicate identifiers are warnings.
pub fn validate_references(model: &Model, linked: &BTreeSet<String>) -> ValidationReport {
    let mut report = ValidationReport::new();
    for id in model.duplicate_ids() {
        let n = model.declaration_count(&id);
        report.push(
            Issue::warning(
                "duplicate-id",
                format!("{id} is defined {n} times; the first definition wins"),
            )
            .on(&id),
        );
    }
    for r in model.resources() {
        let origin = r.origin.clone().unwrap_or_default();
        for spec in catalog::reference_properties(r.class) {
            let targets = spec.kind.targets();
            for (i, target) in r.references(spec.name).iter().enumerate() {
                let ptr = if origin.is_empty() {
                    String::new()
                } else if matches!(spec.kind, catalog::PropKind::Refs(_)) {
                    format!("{origin}/{}/{i}", spec.name)
                } else {
                    format!("{origin}/{}", spec.name)
                };
                match resolve_as(target, model, targets) {
                    Resolution::Found(_) => {}
                    _ if model.contains(target) => {
                        let found = model
                            .get(target)
                            .map(|x| x.class)
                            .unwrap_or(ResourceClass::Node);
                        report.push(
                            Issue::error(
                                "wrong-class",
                                format!(
                                    "{}.{} expects {}, but {target} is a {found}",
                                    r.id,
                                    spec.name,
                                    class_list(targets)
                                ),
                            )
                            .on(&r.id)
                            .at(ptr),
                        );
                    }
                    Resolution::UnresolvedForeign => {
                        let ns = model
                            .normalize(target)
                            .prefix()
                            .unwrap_or_default()
                            .to_string();
                        let msg = if linked.contains(&ns) {
                            format!(
                                "{}.{}: {target} is not defined in linked namespace {ns}",
                                r.id, spec.name
                            )
                        } else {
                            format!(
                                "{}.{}: {target} refers to namespace {ns}, which is not linked",
                                r.id, spec.name
                            )
                        };
                        report.push(Issue::error("unresolved-foreign", msg).on(&r.id).at(ptr));
                    }
                    Resolution::UnresolvedLocal => report.push(
                        Issue::warning(
                            "dangling-local",
                            format!(
                                "{}.{}: {target} is not defined and will be generated",
                                r.id, spec.name
                            ),
                        )
                        .on(&r.id)
                        .at(ptr),
                    ),
                }
            }
        }
    }
    if let Some(variance) = &model.variance {
        for id in variance.presence.keys() {
            if !model.contains(id) {
                report.push(
                    Issue::warning(
                        "unknown-variance-target",
                        format!("variance names undefined resource {id}"),
                    )
                    .at(format!(
                        "/variance/presence/{}",
                        super::syntax::escape(&id.to_string())
                    )),
                );
            }
        }
    }
    report
}

fn class_list(classes: &[ResourceClass]) -> String {
    classes
        .iter()
        .map(|c| c.name())
        .collect::<Vec<_>>()
        .join(" or ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::Identifier;
    use crate::model::Resource;
    use crate::schema::Severity;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    #[test]
    fn foreign_dangling_is_error() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Chain, id("c")).with("lyphTemplate", id("wbkg:K_77")));
        let r = validate_references(&m, &BTreeSet::new());
        assert_eq!(r.count("unresolved-foreign"), 1);
        assert!(r.has_errors());
    }

    #[test]
    fn duplicate_after_merge_warns_once() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("mat-blood")));
        m.push(Resource::new(ResourceClass::Lyph, id("mat-blood")));
        let r = validate_references(&m, &BTreeSet::new());
        assert_eq!(r.count("duplicate-id"), 1);
        assert_eq!(r.max_severity(), Some(Severity::Warning));
    }

    #[test]
    fn local_dangling_warns() {
        let mut m = Model::new();
        m.push(
            Resource::new(ResourceClass::Link, id("l"))
                .with("source", id("n5"))
                .with("target", id("n6")),
        );
        let r = validate_references(&m, &BTreeSet::new());
        assert_eq!(r.count("dangling-local"), 2);
        assert!(!r.has_errors());
    }

    #[test]
    fn wrong_class_is_error() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("x")));
        m.push(Resource::new(ResourceClass::Link, id("l")).with("source", id("x")));
        assert_eq!(
            validate_references(&m, &BTreeSet::new()).count("wrong-class"),
            1
        );
    }
}
