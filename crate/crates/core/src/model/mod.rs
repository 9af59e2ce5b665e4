//! The resource-graph vocabulary: resources, models, relation closure and
//! composition checks.

mod class;
mod composition;
mod kinds;
mod relations;
mod resolve;
mod resource;
mod value;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Deref;

pub use class::ResourceClass;
pub use composition::composition_cycle_check;
pub use kinds::{CoalescenceKind, GroupOrigin, Topology, WireGeometry};
pub use relations::sync_relations;
pub use resolve::{resolve, resolve_as, Resolution};
pub use resource::Resource;
pub use value::Value;

use crate::id::Identifier;

/// An entry of a model's `imports` statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportRef {
    pub url: String,
    /// Expected namespace of the imported model, when stated.
    pub namespace: Option<String>,
}

impl ImportRef {
    pub fn new(url: impl Into<String>) -> Self {
        ImportRef {
            url: url.into(),
            namespace: None,
        }
    }
}

/// Per-clade presence of resources. Resources absent from `presence` exist
/// in every clade.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarianceSpec {
    pub clades: Vec<String>,
    pub presence: BTreeMap<Identifier, BTreeSet<String>>,
}

impl VarianceSpec {
    pub fn present_in(&self, id: &Identifier, clade: &str) -> bool {
        self.presence.get(id).is_none_or(|c| c.contains(clade))
    }
}

type Slot = (ResourceClass, usize);

/// A model document: metadata plus one ordered registry per resource class.
///
/// Both input models and generated models use this shape; see
/// [`GeneratedModel`] for the expanded form.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub id: Option<String>,
    pub name: Option<String>,
    pub namespace: Option<String>,
    pub description: Option<String>,
    pub schema_version: Option<String>,
    pub imports: Vec<ImportRef>,
    pub generated: bool,
    pub variance: Option<VarianceSpec>,
    /// Unknown top-level properties, preserved verbatim.
    pub extra: BTreeMap<String, serde_json::Value>,
    registries: [Vec<Resource>; ResourceClass::COUNT],
    index: HashMap<Identifier, Vec<Slot>>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.name == other.name
            && self.namespace == other.namespace
            && self.description == other.description
            && self.schema_version == other.schema_version
            && self.imports == other.imports
            && self.generated == other.generated
            && self.variance == other.variance
            && self.extra == other.extra
            && self.registries == other.registries
    }
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn with_namespace(ns: &str) -> Self {
        Model {
            namespace: Some(ns.to_string()),
            ..Model::default()
        }
    }

    pub fn of_class(&self, class: ResourceClass) -> &[Resource] {
        &self.registries[class.index()]
    }

    /// All resources in canonical order (class, then declaration order).
    pub fn resources(&self) -> impl Iterator<Item = &Resource> {
        self.registries.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.registries.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First resource declared with `id`, in any class.
    pub fn get(&self, id: &Identifier) -> Option<&Resource> {
        let id = self.normalize(id);
        let (class, idx) = *self.index.get(id.as_ref())?.first()?;
        Some(&self.registries[class.index()][idx])
    }

    /// First resource declared with `id` among the given classes.
    pub fn get_as(&self, id: &Identifier, classes: &[ResourceClass]) -> Option<&Resource> {
        let (class, idx) = self.slot_as(id, classes)?;
        Some(&self.registries[class.index()][idx])
    }

    pub fn get_in(&self, id: &Identifier, class: ResourceClass) -> Option<&Resource> {
        self.get_as(id, &[class])
    }

    pub fn get_mut_in(&mut self, id: &Identifier, class: ResourceClass) -> Option<&mut Resource> {
        let (c, idx) = self.slot_as(id, &[class])?;
        Some(&mut self.registries[c.index()][idx])
    }

    pub fn get_mut(&mut self, id: &Identifier) -> Option<&mut Resource> {
        let id = self.normalize(id).into_owned();
        let (class, idx) = *self.index.get(&id)?.first()?;
        Some(&mut self.registries[class.index()][idx])
    }

    /// Position of the first declaration of `id`.
    pub fn position(&self, id: &Identifier) -> Option<(ResourceClass, usize)> {
        let id = self.normalize(id);
        self.index.get(id.as_ref())?.first().copied()
    }

    /// Position of the first declaration of `id` among `classes`.
    pub fn locate(
        &self,
        id: &Identifier,
        classes: &[ResourceClass],
    ) -> Option<(ResourceClass, usize)> {
        self.slot_as(id, classes)
    }

    fn slot_as(&self, id: &Identifier, classes: &[ResourceClass]) -> Option<Slot> {
        let id = self.normalize(id);
        self.index
            .get(id.as_ref())?
            .iter()
            .find(|(c, _)| classes.contains(c))
            .copied()
    }

    /// Number of declarations sharing `id` (more than one after a merge).
    pub fn declaration_count(&self, id: &Identifier) -> usize {
        let id = self.normalize(id);
        self.index.get(id.as_ref()).map_or(0, Vec::len)
    }

    pub fn contains(&self, id: &Identifier) -> bool {
        self.declaration_count(id) > 0
    }

    /// Strips a prefix naming this model's own namespace.
    pub fn normalize<'a>(&self, id: &'a Identifier) -> std::borrow::Cow<'a, Identifier> {
        match (id.prefix(), self.namespace.as_deref()) {
            (Some(p), Some(ns)) if p == ns => std::borrow::Cow::Owned(id.without_prefix()),
            _ => std::borrow::Cow::Borrowed(id),
        }
    }

    /// Appends a resource at the end of its class registry.
    pub fn push(&mut self, resource: Resource) {
        let class = resource.class;
        let idx = self.registries[class.index()].len();
        self.index
            .entry(resource.id.clone())
            .or_default()
            .push((class, idx));
        self.registries[class.index()].push(resource);
    }

    pub fn insert_at(&mut self, class: ResourceClass, idx: usize, resource: Resource) {
        assert_eq!(resource.class, class);
        self.registries[class.index()].insert(idx, resource);
        self.reindex();
    }

    pub fn remove_at(&mut self, class: ResourceClass, idx: usize) -> Resource {
        let r = self.registries[class.index()].remove(idx);
        self.reindex();
        r
    }

    pub fn at(&self, class: ResourceClass, idx: usize) -> &Resource {
        &self.registries[class.index()][idx]
    }

    /// Mutable access by position. Callers must not change the id; use
    /// [`Model::replace_at`] for that.
    pub fn at_mut(&mut self, class: ResourceClass, idx: usize) -> &mut Resource {
        &mut self.registries[class.index()][idx]
    }

    pub fn replace_at(&mut self, class: ResourceClass, idx: usize, resource: Resource) -> Resource {
        assert_eq!(resource.class, class);
        let old = std::mem::replace(&mut self.registries[class.index()][idx], resource);
        if old.id != self.registries[class.index()][idx].id {
            self.reindex();
        }
        old
    }

    /// Replaces the whole registry of `class`.
    pub fn set_registry(&mut self, class: ResourceClass, resources: Vec<Resource>) {
        debug_assert!(resources.iter().all(|r| r.class == class));
        self.registries[class.index()] = resources;
        self.reindex();
    }

    /// Applies `f` to every resource; ids must be left untouched.
    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut Resource)) {
        for r in self.registries.iter_mut().flatten() {
            f(r);
        }
    }

    /// Removes all resources matching `pred`, returning them.
    pub fn retain(&mut self, mut pred: impl FnMut(&Resource) -> bool) -> Vec<Resource> {
        let mut removed = Vec::new();
        for reg in self.registries.iter_mut() {
            let (keep, gone): (Vec<_>, Vec<_>) =
                std::mem::take(reg).into_iter().partition(&mut pred);
            *reg = keep;
            removed.extend(gone);
        }
        self.reindex();
        removed
    }

    /// Rebuilds the id index after bulk edits.
    pub fn reindex(&mut self) {
        self.index.clear();
        for class in ResourceClass::ALL {
            for (idx, r) in self.registries[class.index()].iter().enumerate() {
                self.index
                    .entry(r.id.clone())
                    .or_default()
                    .push((class, idx));
            }
        }
        for slots in self.index.values_mut() {
            slots.sort_by_key(|&(c, i)| (c, i));
        }
    }

    /// Identifiers declared more than once, in canonical order.
    pub fn duplicate_ids(&self) -> Vec<Identifier> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for r in self.resources() {
            if self.declaration_count(&r.id) > 1 && seen.insert(r.id.clone()) {
                out.push(r.id.clone());
            }
        }
        out
    }

    /// Resource ids in canonical order.
    pub fn ids(&self) -> Vec<Identifier> {
        self.resources().map(|r| r.id.clone()).collect()
    }

    /// The namespace a resource belongs to: its prefix, else the model's.
    pub fn namespace_of(&self, id: &Identifier) -> Option<String> {
        id.prefix()
            .map(str::to_string)
            .or_else(|| self.namespace.clone())
    }
}

/// A fully expanded, relation-closed model.
///
/// Holds the same shape as an input [`Model`] and can be serialized with the
/// same schema; the wrapper marks that expansion has happened.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedModel(Model);

impl GeneratedModel {
    /// Wraps an already expanded model, setting its `generated` flag.
    pub fn assume_generated(mut model: Model) -> Self {
        model.generated = true;
        GeneratedModel(model)
    }

    pub fn model(&self) -> &Model {
        &self.0
    }

    pub fn model_mut(&mut self) -> &mut Model {
        &mut self.0
    }

    pub fn into_model(self) -> Model {
        self.0
    }
}

impl Deref for GeneratedModel {
    type Target = Model;
    fn deref(&self) -> &Model {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    #[test]
    fn first_declaration_wins_lookup() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("blood")).with("name", "first"));
        m.push(Resource::new(ResourceClass::Lyph, id("blood")).with("name", "second"));
        assert_eq!(m.get(&id("blood")).unwrap().name(), Some("first"));
        assert_eq!(m.duplicate_ids(), vec![id("blood")]);
    }

    #[test]
    fn own_namespace_prefix_is_local() {
        let mut m = Model::with_namespace("vasc");
        m.push(Resource::new(ResourceClass::Node, id("n1")));
        assert!(m.get(&id("vasc:n1")).is_some());
        assert!(m.get(&id("wbkg:n1")).is_none());
    }

    #[test]
    fn class_filtered_lookup() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("x")));
        m.push(Resource::new(ResourceClass::Lyph, id("x")));
        assert_eq!(
            m.get_in(&id("x"), ResourceClass::Lyph).unwrap().class,
            ResourceClass::Lyph
        );
        m.remove_at(ResourceClass::Node, 0);
        assert_eq!(m.get(&id("x")).unwrap().class, ResourceClass::Lyph);
    }
}
