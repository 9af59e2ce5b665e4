use crate::id::Identifier;
use crate::model::{resolve_as, Model, Resolution, Resource, ResourceClass};
use crate::schema::catalog;
use crate::schema::{Issue, ValidationReport};

use super::{Cause, GenerationTrace};

/// Creates a generated resource for every dangling local reference.
///
/// The class comes from the referencing property. When the same id is
/// expected with incompatible classes (say, as a layer and as a link end) no
/// stub is created and an error names the conflicting uses. Foreign
/// references are left alone.
pub fn autogenerate_stubs(model: &mut Model, trace: &mut GenerationTrace) -> ValidationReport {
    let mut report = ValidationReport::new();
    // (stub id, candidate classes, uses) in order of first reference.
    let mut wanted: Vec<(Identifier, Vec<ResourceClass>, Vec<String>)> = Vec::new();
    for r in model.resources() {
        for spec in catalog::reference_properties(r.class) {
            let targets = spec.kind.targets();
            for target in r.references(spec.name) {
                if resolve_as(target, model, targets) != Resolution::UnresolvedLocal
                    || model.contains(target)
                {
                    continue;
                }
                let id = model.normalize(target).into_owned();
                let use_site = format!("{}.{}", r.id, spec.name);
                match wanted.iter_mut().find(|(w, _, _)| *w == id) {
                    Some((_, classes, uses)) => {
                        classes.retain(|c| targets.contains(c));
                        uses.push(use_site);
                    }
                    None => wanted.push((id, targets.to_vec(), vec![use_site])),
                }
            }
        }
    }
    for (id, classes, uses) in wanted {
        match classes.first() {
            Some(&class) => {
                model.push(Resource::new(class, id.clone()).with("generated", true));
                trace.record(&id, Cause::Stub);
            }
            None => report.push(
                Issue::error(
                    "ambiguous-stub",
                    format!(
                        "{id} is used with incompatible classes by {}",
                        uses.join(", ")
                    ),
                )
                .on(&id),
            ),
        }
    }
    report
}
