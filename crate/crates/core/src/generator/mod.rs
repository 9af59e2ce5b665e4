//! Expansion of an input model into a generated model: stubs for dangling
//! references, lyph-template instances, chain expansion, relation closure and
//! neurulated groups.

mod chains;
mod stubs;
mod templates;

use std::collections::{BTreeMap, BTreeSet};

pub use chains::{expand_chain, needs_expansion, ChainExpansion, ChainMethod};
pub use stubs::autogenerate_stubs;
pub use templates::instantiate_lyph_template;

use crate::analysis;
use crate::id::Identifier;
use crate::model::{composition_cycle_check, sync_relations, GeneratedModel, Model, ResourceClass};
use crate::schema::{validate_references, ValidationReport};

/// Why a resource was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cause {
    Stub,
    TemplateInstance,
    ChainLevel,
    ChainNode,
    ChainGroup,
    Neurulated,
}

impl Cause {
    pub fn as_str(self) -> &'static str {
        match self {
            Cause::Stub => "stub",
            Cause::TemplateInstance => "template-instance",
            Cause::ChainLevel => "chain-level",
            Cause::ChainNode => "chain-node",
            Cause::ChainGroup => "chain-group",
            Cause::Neurulated => "neurulated",
        }
    }
}

/// Provenance of every resource created by one generation run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenerationTrace {
    pub created: Vec<(Identifier, Cause)>,
    /// Template (or copied layer) each instance was made from.
    pub source_template: BTreeMap<Identifier, Identifier>,
}

impl GenerationTrace {
    pub fn record(&mut self, id: &Identifier, cause: Cause) {
        self.created.push((id.clone(), cause));
    }

    pub fn extend(&mut self, other: GenerationTrace) {
        self.created.extend(other.created);
        self.source_template.extend(other.source_template);
    }

    pub fn of_cause(&self, cause: Cause) -> impl Iterator<Item = &Identifier> {
        self.created
            .iter()
            .filter(move |(_, c)| *c == cause)
            .map(|(id, _)| id)
    }

    pub fn contains(&self, id: &Identifier) -> bool {
        self.created.iter().any(|(c, _)| c == id)
    }
}

/// Result of a successful generation run; `report` holds warnings only.
#[derive(Clone, Debug)]
pub struct Generated {
    pub model: GeneratedModel,
    pub trace: GenerationTrace,
    pub report: ValidationReport,
}

/// Namespaces whose definitions are present in `model`: declared import
/// namespaces and prefixes of resources brought in by linking.
pub fn linked_namespaces(model: &Model) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = model
        .imports
        .iter()
        .filter_map(|i| i.namespace.clone())
        .collect();
    for r in model.resources() {
        if let Some(p) = r.id.prefix() {
            out.insert(p.to_string());
        }
    }
    out
}

/// Runs the full expansion pipeline.
///
/// Stages: reference check → stubs → chain expansion (declaration order) →
/// relation closure → composition cycle check → neurulated groups. The first
/// stage that reports an error aborts the run, and the accumulated report is
/// returned as the error value.
///
/// Chains that already carry `levels` are not expanded again, so a
/// serialized generated model regenerates to itself.
pub fn generate(spec: &Model) -> Result<Generated, ValidationReport> {
    let mut model = spec.clone();
    let mut trace = GenerationTrace::default();
    let mut report = ValidationReport::new();

    let linked = linked_namespaces(&model);
    let mut refs = validate_references(&model, &linked);
    // Dangling local references are resolved by stubs right below.
    refs.issues.retain(|i| i.code != "dangling-local");
    absorb(&mut report, refs)?;

    let stubs = autogenerate_stubs(&mut model, &mut trace);
    absorb(&mut report, stubs)?;

    let mut chains = ValidationReport::new();
    for idx in 0..model.of_class(ResourceClass::Chain).len() {
        if !needs_expansion(model.at(ResourceClass::Chain, idx)) {
            continue;
        }
        if let Err(issue) = expand_chain(&mut model, idx, &mut trace) {
            chains.push(issue);
        }
    }
    absorb(&mut report, chains)?;

    let sync = sync_relations(&mut model);
    absorb(&mut report, sync)?;

    let cycles = composition_cycle_check(&model);
    absorb(&mut report, cycles)?;

    let neurulation = analysis::neurulate(&model);
    for g in &neurulation.groups {
        if !model.contains(&g.id) {
            trace.record(&g.id, Cause::Neurulated);
        }
    }
    analysis::replace_neurulated(&mut model, &neurulation.groups);
    absorb(&mut report, neurulation.report)?;

    Ok(Generated {
        model: GeneratedModel::assume_generated(model),
        trace,
        report,
    })
}

/// Appends `stage` to `report`; fails with the whole report on any error.
fn absorb(report: &mut ValidationReport, stage: ValidationReport) -> Result<(), ValidationReport> {
    let failed = stage.has_errors();
    report.extend(stage);
    if failed {
        Err(report.clone())
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{parse_model, serialize_generated};

    #[test]
    fn empty_spec() {
        let g = generate(&Model::new()).unwrap();
        assert!(g.model.is_empty());
        assert!(g.report.is_empty());
        assert!(g.model.generated);
    }

    #[test]
    fn reload_bypasses_generation() {
        let spec = parse_model(
            r#"{"lyphs": [{"id": "seg", "isTemplate": true}],
                "chains": [{"id": "c", "numLevels": 2, "lyphTemplate": "seg"}]}"#,
        )
        .unwrap();
        let first = generate(&spec).unwrap();
        assert_eq!(first.model.of_class(ResourceClass::Link).len(), 2);
        let text = serialize_generated(&first.model);
        let second = generate(&parse_model(&text).unwrap()).unwrap();
        assert_eq!(second.model, first.model);
        assert!(second.trace.created.is_empty());
    }

    #[test]
    fn foreign_reference_aborts() {
        let spec =
            parse_model(r#"{"chains": [{"id": "c", "numLevels": 1, "lyphTemplate": "wbkg:lt"}]}"#)
                .unwrap();
        let report = generate(&spec).unwrap_err();
        assert_eq!(report.count("unresolved-foreign"), 1);
    }
}
