use std::collections::BTreeSet;

use crate::id::Identifier;
use crate::model::{GroupOrigin, Model, ResourceClass};
use crate::schema::{Issue, ValidationReport};

use super::neurulator::{link_components, members, neurulate};
use super::DynamicGroup;

/// Answers soma-process queries. [`LocalReachability`] evaluates them over
/// the in-memory model; other backends may delegate to a graph database.
pub trait QueryBackend {
    fn soma_processes(
        &self,
        model: &Model,
        start: &Identifier,
    ) -> Result<(DynamicGroup, ValidationReport), Issue>;
}

/// The built-in backend, see [`soma_processes`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LocalReachability;

impl QueryBackend for LocalReachability {
    fn soma_processes(
        &self,
        model: &Model,
        start: &Identifier,
    ) -> Result<(DynamicGroup, ValidationReport), Issue> {
        soma_processes(model, start)
    }
}

/// All processes of the neuron(s) whose soma is at `start`.
///
/// `start` may be a node, a link, or a lyph: the conveyed lyph of the soma
/// segment, or a housing lyph in which chain levels run. The result is the
/// union of every closed (neurulated) component that contains one of the
/// seed links, with no attempt to tell individual axon collaterals apart.
/// A start that lies only in open components yields an empty group and a
/// warning.
pub fn soma_processes(
    model: &Model,
    start: &Identifier,
) -> Result<(DynamicGroup, ValidationReport), Issue> {
    let seeds = seed_links(model, start)?;
    let mut report = ValidationReport::new();
    let closed: BTreeSet<Identifier> = neurulate(model)
        .groups
        .into_iter()
        .flat_map(|g| g.links)
        .collect();
    let links = model.of_class(ResourceClass::Link);
    let mut selected = Vec::new();
    for comp in link_components(model) {
        let hit = comp.links.iter().any(|i| seeds.contains(i));
        // Components are emitted by neurulate whole or not at all.
        if hit && closed.contains(&links[comp.links[0]].id) {
            selected.extend(comp.links);
        }
    }
    selected.sort_unstable();
    let id = Identifier::new(None, &format!("query_{}", start.flat())).expect("valid fragment");
    let group = members(
        model,
        &selected,
        id,
        GroupOrigin::Query,
        Some(start.clone()),
    );
    if group.is_empty() {
        report.push(
            Issue::warning(
                "open-component",
                format!("{start} is not part of a closed component; no processes found"),
            )
            .on(start),
        );
    }
    Ok((group, report))
}

/// Link positions a query starts from.
fn seed_links(model: &Model, start: &Identifier) -> Result<BTreeSet<usize>, Issue> {
    let Some(r) = model.get(start) else {
        return Err(Issue::error(
            "unknown-start",
            format!("query start {start} is not defined"),
        )
        .on(start));
    };
    let links = model.of_class(ResourceClass::Link);
    let is =
        |a: Option<&Identifier>| a.is_some_and(|a| model.normalize(a) == model.normalize(&r.id));
    let seeds: BTreeSet<usize> = match r.class {
        ResourceClass::Node => links
            .iter()
            .enumerate()
            .filter(|(_, l)| is(l.reference("source")) || is(l.reference("target")))
            .map(|(i, _)| i)
            .collect(),
        ResourceClass::Link => links
            .iter()
            .position(|l| l.id == r.id)
            .into_iter()
            .collect(),
        ResourceClass::Lyph => links
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                is(l.reference("conveyingLyph"))
                    || is(l.reference("housedIn"))
                    || l.reference("conveyingLyph")
                        .and_then(|x| model.get_in(x, ResourceClass::Lyph))
                        .is_some_and(|x| is(x.reference("internalIn")))
            })
            .map(|(i, _)| i)
            .collect(),
        other => {
            return Err(Issue::error(
                "bad-start",
                format!("query start {start} is a {other}; expected a node, link or lyph"),
            )
            .on(start))
        }
    };
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Resource;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    fn neuron(soma_topology: &str) -> Model {
        let mut m = Model::new();
        for n in ["a", "b", "c", "d"] {
            m.push(Resource::new(ResourceClass::Node, id(n)));
        }
        let segs = [
            ("dend", "a", "b", "BAG-right"),
            ("soma", "b", "c", soma_topology),
            ("axon", "c", "d", "BAG-left"),
        ];
        for (name, s, t, topo) in segs {
            m.push(
                Resource::new(ResourceClass::Link, id(&format!("{name}-lnk")))
                    .with("source", id(s))
                    .with("target", id(t))
                    .with("conveyingLyph", id(name)),
            );
            m.push(Resource::new(ResourceClass::Lyph, id(name)).with("topology", topo));
        }
        m
    }

    #[test]
    fn soma_link_gives_whole_neuron() {
        let m = neuron("TUBE");
        let (g, report) = soma_processes(&m, &id("soma")).unwrap();
        assert!(report.is_empty());
        assert_eq!(g.links.len(), 3);
        assert_eq!(g.seed, Some(id("soma")));
    }

    #[test]
    fn open_component_is_empty_with_warning() {
        let mut m = neuron("TUBE");
        m.get_mut(&id("axon")).unwrap().set("topology", "TUBE");
        let (g, report) = soma_processes(&m, &id("b")).unwrap();
        assert!(g.is_empty());
        assert_eq!(report.count("open-component"), 1);
    }

    #[test]
    fn unknown_start() {
        assert_eq!(
            soma_processes(&neuron("TUBE"), &id("zzz"))
                .unwrap_err()
                .code,
            "unknown-start"
        );
    }
}
