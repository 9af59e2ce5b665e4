//! Closure of bidirectional relationships.

use crate::id::Identifier;
use crate::model::{Model, ResourceClass, Value};
use crate::schema::catalog::{self, PropKind, RelationPair, RELATION_PAIRS};
use crate::schema::{Issue, ValidationReport};

type Slot = (ResourceClass, usize);

/// Populates both directions of every relation pair so that they are
/// mutually consistent. Dangling references are skipped.
///
/// Conflicting single-valued assertions (for example a lyph declaring
/// `layerIn: A` while `B` lists it among its layers) are reported as errors
/// and left untouched. The operation is idempotent.
pub fn sync_relations(model: &mut Model) -> ValidationReport {
    let mut report = ValidationReport::new();
    for rel in RELATION_PAIRS {
        for &owner in rel.owners {
            complete(
                model,
                rel,
                owner,
                rel.forward,
                rel.targets,
                rel.inverse,
                &mut report,
            );
        }
    }
    for rel in RELATION_PAIRS {
        for &target in rel.targets {
            complete(
                model,
                rel,
                target,
                rel.inverse,
                rel.owners,
                rel.forward,
                &mut report,
            );
        }
    }
    report
}

/// For every resource of `class`, ensures that each resource referenced via
/// `prop` points back through `back`.
fn complete(
    model: &mut Model,
    rel: &RelationPair,
    class: ResourceClass,
    prop: &str,
    other_classes: &[ResourceClass],
    back: &str,
    report: &mut ValidationReport,
) {
    for idx in 0..model.of_class(class).len() {
        let here = model.at(class, idx);
        let here_id = here.id.clone();
        let refs: Vec<Identifier> = here.references(prop).to_vec();
        for other in refs {
            let Some(slot) = slot_of(model, &other, other_classes) else {
                continue;
            };
            // The back-pointer only exists on classes whose catalog declares it.
            let Some(spec) = catalog::property(slot.0, back) else {
                continue;
            };
            if !spec.kind.targets().contains(&class) {
                continue;
            }
            let existing = model.at(slot.0, slot.1).references(back).to_vec();
            match spec.kind {
                PropKind::Ref(_) => {
                    if let Some(current) = existing.first() {
                        if slot_of(model, current, &[class]) != Some((class, idx)) {
                            let that = model.at(slot.0, slot.1).id.clone();
                            report.push(
                                Issue::error(
                                    "relation-conflict",
                                    format!(
                                        "{that}.{back} = {current}, but {here_id}.{prop} also claims {that} \
                                         ({}/{} relation)",
                                        rel.forward, rel.inverse
                                    ),
                                )
                                .on(&that),
                            );
                        }
                    } else {
                        model
                            .at_mut(slot.0, slot.1)
                            .set(back, Value::Ref(here_id.clone()));
                    }
                }
                PropKind::Refs(_) => {
                    let present = existing
                        .iter()
                        .any(|e| slot_of(model, e, &[class]) == Some((class, idx)));
                    if !present {
                        model.at_mut(slot.0, slot.1).push_ref(back, here_id.clone());
                    }
                }
                _ => {}
            }
        }
    }
}

fn slot_of(model: &Model, id: &Identifier, classes: &[ResourceClass]) -> Option<Slot> {
    model.locate(id, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Resource;
    use ResourceClass::*;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    #[test]
    fn completes_conveys_from_conveying_lyph() {
        let mut m = Model::new();
        m.push(Resource::new(Link, id("l1")).with("conveyingLyph", id("L")));
        m.push(Resource::new(Lyph, id("L")));
        let report = sync_relations(&mut m);
        assert!(report.is_empty());
        assert_eq!(
            m.get(&id("L")).unwrap().reference("conveys"),
            Some(&id("l1"))
        );
    }

    #[test]
    fn consistent_input_is_fixpoint() {
        let mut m = Model::new();
        m.push(Resource::new(Link, id("l1")).with("conveyingLyph", id("L")));
        m.push(Resource::new(Lyph, id("L")).with("conveys", id("l1")));
        let before = m.clone();
        assert!(sync_relations(&mut m).is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn conflicting_layer_in_names_all_three() {
        let mut m = Model::new();
        m.push(Resource::new(Lyph, id("A")));
        m.push(Resource::new(Lyph, id("B")).with("layers", vec![id("L")]));
        m.push(Resource::new(Lyph, id("L")).with("layerIn", id("A")));
        let report = sync_relations(&mut m);
        assert!(report.has_errors());
        let msg = &report.errors().next().unwrap().message;
        for name in ["A", "B", "L"] {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn link_ends_get_source_of_and_target_of() {
        let mut m = Model::new();
        m.push(Resource::new(Node, id("a")));
        m.push(Resource::new(Node, id("b")));
        m.push(
            Resource::new(Link, id("l"))
                .with("source", id("a"))
                .with("target", id("b")),
        );
        sync_relations(&mut m);
        assert_eq!(m.get(&id("a")).unwrap().references("sourceOf"), &[id("l")]);
        assert_eq!(m.get(&id("b")).unwrap().references("targetOf"), &[id("l")]);
    }

    #[test]
    fn inverse_side_only_fills_forward() {
        let mut m = Model::new();
        m.push(Resource::new(Lyph, id("T")).with("subtypes", vec![id("S")]));
        m.push(Resource::new(Lyph, id("S")));
        sync_relations(&mut m);
        assert_eq!(
            m.get(&id("S")).unwrap().reference("supertype"),
            Some(&id("T"))
        );
    }

    #[test]
    fn material_layer_gets_list_inverse() {
        let mut m = Model::new();
        m.push(Resource::new(Material, id("blood")));
        m.push(Resource::new(Lyph, id("A")).with("layers", vec![id("blood")]));
        m.push(Resource::new(Lyph, id("B")).with("layers", vec![id("blood")]));
        assert!(sync_relations(&mut m).is_empty());
        assert_eq!(
            m.get(&id("blood")).unwrap().references("layerIn"),
            &[id("A"), id("B")]
        );
    }
}
