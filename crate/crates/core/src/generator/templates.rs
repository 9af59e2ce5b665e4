use std::collections::HashSet;

use crate::id::Identifier;
use crate::model::{Model, Resource, ResourceClass, Value};
use crate::schema::Issue;

use super::{Cause, GenerationTrace};

/// Properties a copy inherits from the lyph it was made from.
const INHERITED: &[&str] = &[
    "name",
    "description",
    "ontologyTerms",
    "topology",
    "materials",
    "angle",
];

/// Creates a concrete lyph from a template for use in `context` (usually a
/// generated link).
///
/// The instance is named `<template>_<context>`, gets `supertype` set to the
/// template and a deep copy of its layers: the `i`-th layer (1-based) of an
/// instance `x` becomes `x_i`. A material layer becomes a lyph made of that
/// material.
pub fn instantiate_lyph_template(
    model: &mut Model,
    template: &Identifier,
    context: &Identifier,
    trace: &mut GenerationTrace,
) -> Result<Identifier, Issue> {
    let Some(t) = model.get_in(template, ResourceClass::Lyph) else {
        return Err(
            Issue::error("not-a-template", format!("{template} is not a lyph")).on(template),
        );
    };
    if !t.flag("isTemplate") {
        return Err(Issue::error(
            "not-a-template",
            format!("{template} is not a lyph template"),
        )
        .on(template));
    }
    let template = t.id.clone();
    let id = fresh(
        model,
        &format!("{}_{}", template.local_part(), context.local_part()),
    )?;
    let mut visiting = HashSet::new();
    copy_lyph(model, &template, id.clone(), trace, &mut visiting)?;
    model
        .get_mut_in(&template, ResourceClass::Lyph)
        .expect("template exists")
        .push_ref("subtypes", id.clone());
    Ok(id)
}

fn fresh(model: &Model, local: &str) -> Result<Identifier, Issue> {
    let id =
        Identifier::new(None, local).map_err(|e| Issue::error("bad-identifier", e.to_string()))?;
    if model.contains(&id) {
        return Err(Issue::error(
            "id-collision",
            format!("generated id {id} collides with an existing definition"),
        )
        .on(&id));
    }
    Ok(id)
}

/// Copies lyph `source` under `id` (supertype = source) with fresh layers.
fn copy_lyph(
    model: &mut Model,
    source: &Identifier,
    id: Identifier,
    trace: &mut GenerationTrace,
    visiting: &mut HashSet<Identifier>,
) -> Result<(), Issue> {
    if !visiting.insert(source.clone()) {
        return Err(Issue::error(
            "composition-cycle",
            format!("cannot instantiate {source}: its layers contain it"),
        )
        .on(source));
    }
    let src = model
        .get_in(source, ResourceClass::Lyph)
        .expect("source lyph exists")
        .clone();
    let mut copy = Resource::new(ResourceClass::Lyph, id.clone())
        .with("supertype", src.id.clone())
        .with("generated", true);
    for &p in INHERITED {
        if let Some(v) = src.get(p) {
            copy.set(p, v.clone());
        }
    }
    model.push(copy);
    trace.record(&id, Cause::TemplateInstance);
    trace.source_template.insert(id.clone(), src.id.clone());

    let mut layers = Vec::new();
    for (i, layer) in src.references("layers").iter().enumerate() {
        let layer_id = fresh(model, &format!("{}_{}", id.local_part(), i + 1))?;
        match model.locate(layer, &[ResourceClass::Lyph, ResourceClass::Material]) {
            Some((ResourceClass::Lyph, _)) => {
                let layer = model.get_in(layer, ResourceClass::Lyph).unwrap().id.clone();
                copy_lyph(model, &layer, layer_id.clone(), trace, visiting)?;
                model
                    .get_mut_in(&layer, ResourceClass::Lyph)
                    .unwrap()
                    .push_ref("subtypes", layer_id.clone());
            }
            Some((ResourceClass::Material, idx)) => {
                let mat = model.at(ResourceClass::Material, idx).clone();
                let mut r = Resource::new(ResourceClass::Lyph, layer_id.clone())
                    .with("materials", vec![mat.id.clone()])
                    .with("generated", true);
                if let Some(name) = mat.name() {
                    r.set("name", name);
                }
                model.push(r);
                trace.record(&layer_id, Cause::TemplateInstance);
                trace
                    .source_template
                    .insert(layer_id.clone(), mat.id.clone());
            }
            // Dangling layers were stubbed or reported before expansion.
            _ => continue,
        }
        layers.push(layer_id);
    }
    if !layers.is_empty() {
        model
            .get_mut_in(&id, ResourceClass::Lyph)
            .unwrap()
            .set("layers", Value::Refs(layers));
    }
    visiting.remove(source);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    fn template(layers: &[&str]) -> Model {
        let mut m = Model::new();
        let mut t = Resource::new(ResourceClass::Lyph, id("neuron-seg")).with("isTemplate", true);
        if !layers.is_empty() {
            t.set("layers", layers.iter().map(|l| id(l)).collect::<Vec<_>>());
        }
        m.push(t.with("topology", "CYST"));
        for l in layers {
            m.push(Resource::new(ResourceClass::Lyph, id(l)));
        }
        m
    }

    #[test]
    fn two_layer_instance() {
        let mut m = template(&["cyto", "membrane"]);
        let mut t = GenerationTrace::default();
        let inst =
            instantiate_lyph_template(&mut m, &id("neuron-seg"), &id("ch1_lnk1"), &mut t).unwrap();
        assert_eq!(inst, id("neuron-seg_ch1_lnk1"));
        let r = m.get(&inst).unwrap();
        assert_eq!(
            r.references("layers"),
            &[id("neuron-seg_ch1_lnk1_1"), id("neuron-seg_ch1_lnk1_2")]
        );
        assert_eq!(r.text("topology"), Some("CYST"));
        assert_eq!(r.reference("supertype"), Some(&id("neuron-seg")));
        assert_eq!(t.created.len(), 3);
    }

    #[test]
    fn empty_template_and_freshness() {
        let mut m = template(&[]);
        let mut t = GenerationTrace::default();
        let a = instantiate_lyph_template(&mut m, &id("neuron-seg"), &id("a"), &mut t).unwrap();
        let b = instantiate_lyph_template(&mut m, &id("neuron-seg"), &id("b"), &mut t).unwrap();
        assert_ne!(a, b);
        assert!(m.get(&a).unwrap().references("layers").is_empty());
        assert_eq!(
            m.get(&id("neuron-seg")).unwrap().references("subtypes"),
            &[a, b]
        );
    }

    #[test]
    fn non_template_rejected() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("L")));
        let mut t = GenerationTrace::default();
        let e = instantiate_lyph_template(&mut m, &id("L"), &id("c"), &mut t).unwrap_err();
        assert_eq!(e.code, "not-a-template");
    }

    #[test]
    fn material_layer_becomes_lyph() {
        let mut m = Model::new();
        m.push(
            Resource::new(ResourceClass::Lyph, id("T"))
                .with("isTemplate", true)
                .with("layers", vec![id("blood")]),
        );
        m.push(Resource::new(ResourceClass::Material, id("blood")));
        let mut t = GenerationTrace::default();
        let inst = instantiate_lyph_template(&mut m, &id("T"), &id("x"), &mut t).unwrap();
        let layer = m.get(&id("T_x_1")).unwrap();
        assert_eq!(layer.class, ResourceClass::Lyph);
        assert_eq!(layer.references("materials"), &[id("blood")]);
        assert_eq!(m.get(&inst).unwrap().references("layers"), &[id("T_x_1")]);
    }
}
