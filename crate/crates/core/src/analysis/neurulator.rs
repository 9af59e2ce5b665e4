use std::collections::{BTreeMap, HashMap, HashSet};

use petgraph::unionfind::UnionFind;

use crate::id::Identifier;
use crate::model::{GroupOrigin, Model, ResourceClass, Topology, Value};
use crate::schema::{Issue, ValidationReport};

use super::DynamicGroup;

/// Link end: `(link position, at_source)`.
type End = (usize, bool);

/// A set of links connected through shared end nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Link positions in declaration order.
    pub links: Vec<usize>,
    /// Ends that sit on a node touched by no other link end.
    pub terminals: Vec<End>,
}

/// Partitions the links with resolvable ends into connected components,
/// ordered by their first link.
pub fn link_components(model: &Model) -> Vec<Component> {
    let links = model.of_class(ResourceClass::Link);
    let ends: Vec<Option<(usize, usize)>> = links
        .iter()
        .map(|l| {
            let s = model
                .locate(l.reference("source")?, &[ResourceClass::Node])?
                .1;
            let t = model
                .locate(l.reference("target")?, &[ResourceClass::Node])?
                .1;
            Some((s, t))
        })
        .collect();
    let node_count = model.of_class(ResourceClass::Node).len();
    let mut uf = UnionFind::new(node_count);
    let mut degree = vec![0usize; node_count];
    for &(s, t) in ends.iter().flatten() {
        uf.union(s, t);
        degree[s] += 1;
        degree[t] += 1;
    }
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out: Vec<Component> = Vec::new();
    for (i, e) in ends.iter().enumerate() {
        let Some((s, t)) = *e else { continue };
        let root = uf.find(s);
        let slot = *by_root.entry(root).or_insert_with(|| {
            out.push(Component {
                links: Vec::new(),
                terminals: Vec::new(),
            });
            out.len() - 1
        });
        let c = &mut out[slot];
        c.links.push(i);
        if degree[s] == 1 {
            c.terminals.push((i, true));
        }
        if degree[t] == 1 {
            c.terminals.push((i, false));
        }
    }
    out
}

/// Outcome of [`neurulate`].
#[derive(Clone, Debug, Default)]
pub struct Neurulation {
    pub groups: Vec<DynamicGroup>,
    pub report: ValidationReport,
}

/// Finds closed components: connected sets of links whose every terminal
/// end is sealed by the topology of the lyph conveyed there.
///
/// A terminal end is a link end at a node of degree one. Branching inside a
/// component is allowed; components without terminal ends (pure cycles) are
/// not emitted. A link without a conveyed lyph, or with a lyph lacking a
/// topology, counts as an open tube; the latter is warned about when the
/// component has some sealed terminal, since the missing value then decides
/// the outcome.
pub fn neurulate(model: &Model) -> Neurulation {
    let links = model.of_class(ResourceClass::Link);
    let mut result = Neurulation::default();
    for comp in link_components(model) {
        if comp.terminals.is_empty() {
            continue;
        }
        let mut sealed_any = false;
        let mut all_sealed = true;
        let mut untyped = Vec::new();
        for &(li, at_source) in &comp.terminals {
            let (topology, explicit, lyph) = conveyed_topology(model, li);
            let sealed = if at_source {
                topology.seals_source()
            } else {
                topology.seals_target()
            };
            sealed_any |= sealed;
            all_sealed &= sealed;
            if !explicit {
                if let Some(lyph) = lyph {
                    untyped.push(lyph);
                }
            }
        }
        if sealed_any {
            untyped.sort();
            untyped.dedup();
            for lyph in untyped {
                result.report.push(
                    Issue::warning(
                        "missing-topology",
                        format!("{lyph} has no topology; treated as TUBE"),
                    )
                    .on(&lyph),
                );
            }
        }
        if !all_sealed {
            continue;
        }
        let first = &links[comp.links[0]].id;
        let id =
            Identifier::new(None, &format!("neurulated_{}", first.flat())).expect("valid fragment");
        result.groups.push(members(
            model,
            &comp.links,
            id,
            GroupOrigin::Neurulated,
            None,
        ));
    }
    for g in &result.groups {
        if let Some(existing) = model.get(&g.id) {
            if !is_neurulated(existing) {
                result.report.push(
                    Issue::error(
                        "id-collision",
                        format!("neurulated group id {} is already used", g.id),
                    )
                    .on(&g.id),
                );
            }
        }
    }
    result
}

/// Topology at a link (default tube), whether it was stated, and the lyph.
fn conveyed_topology(model: &Model, link: usize) -> (Topology, bool, Option<Identifier>) {
    let l = model.at(ResourceClass::Link, link);
    let Some(lyph) = l
        .reference("conveyingLyph")
        .and_then(|id| model.get_in(id, ResourceClass::Lyph))
    else {
        return (Topology::Tube, false, None);
    };
    match lyph.text("topology").and_then(Topology::parse) {
        Some(t) => (t, true, Some(lyph.id.clone())),
        None => (Topology::Tube, false, Some(lyph.id.clone())),
    }
}

/// Group over the given links, their end nodes and conveyed lyphs.
pub(crate) fn members(
    model: &Model,
    link_positions: &[usize],
    id: Identifier,
    origin: GroupOrigin,
    seed: Option<Identifier>,
) -> DynamicGroup {
    let mut g = DynamicGroup {
        id,
        origin,
        seed,
        links: Vec::new(),
        nodes: Vec::new(),
        lyphs: Vec::new(),
    };
    let mut seen_nodes = HashSet::new();
    let mut seen_lyphs = HashSet::new();
    for &li in link_positions {
        let l = model.at(ResourceClass::Link, li);
        g.links.push(l.id.clone());
        for end in ["source", "target"] {
            if let Some(n) = l
                .reference(end)
                .and_then(|n| model.get_in(n, ResourceClass::Node))
            {
                if seen_nodes.insert(n.id.clone()) {
                    g.nodes.push(n.id.clone());
                }
            }
        }
        if let Some(lyph) = l
            .reference("conveyingLyph")
            .and_then(|x| model.get_in(x, ResourceClass::Lyph))
        {
            if seen_lyphs.insert(lyph.id.clone()) {
                g.lyphs.push(lyph.id.clone());
            }
        }
    }
    g
}

fn is_neurulated(r: &crate::model::Resource) -> bool {
    r.class == ResourceClass::Group && r.text("origin") == Some(GroupOrigin::Neurulated.as_str())
}

/// Stores neurulated groups in `model`: existing ones are updated in place,
/// new ones appended, and stale ones removed.
pub fn replace_neurulated(model: &mut Model, groups: &[DynamicGroup]) {
    let wanted: HashMap<&Identifier, &DynamicGroup> = groups.iter().map(|g| (&g.id, g)).collect();
    model.retain(|r| !is_neurulated(r) || wanted.contains_key(&r.id));
    for g in groups {
        let resource = g.to_resource();
        let existing = model
            .of_class(ResourceClass::Group)
            .iter()
            .position(|r| r.id == g.id && is_neurulated(r));
        match existing {
            Some(idx) => {
                let old = model.at_mut(ResourceClass::Group, idx);
                // Keep user-visible flags such as isVisible.
                let visible = old.get("isVisible").cloned();
                *old = resource;
                if let Some(Value::Bool(v)) = visible {
                    old.set("isVisible", v);
                }
            }
            None => model.push(resource),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Resource;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    /// A path of links conveying lyphs with the given topologies.
    fn path(topologies: &[Option<&str>]) -> Model {
        let mut m = Model::new();
        for i in 0..=topologies.len() {
            m.push(Resource::new(ResourceClass::Node, id(&format!("n{i}"))));
        }
        for (i, t) in topologies.iter().enumerate() {
            m.push(
                Resource::new(ResourceClass::Link, id(&format!("l{i}")))
                    .with("source", id(&format!("n{i}")))
                    .with("target", id(&format!("n{}", i + 1)))
                    .with("conveyingLyph", id(&format!("L{i}"))),
            );
            let mut lyph = Resource::new(ResourceClass::Lyph, id(&format!("L{i}")));
            if let Some(t) = t {
                lyph.set("topology", *t);
            }
            m.push(lyph);
        }
        m
    }

    #[test]
    fn single_cyst() {
        let n = neurulate(&path(&[Some("CYST")]));
        assert_eq!(n.groups.len(), 1);
        assert_eq!(n.groups[0].id, id("neurulated_l0"));
    }

    #[test]
    fn open_tubes() {
        assert!(neurulate(&path(&[Some("TUBE"); 3])).groups.is_empty());
    }

    #[test]
    fn caps_outward() {
        let n = neurulate(&path(&[Some("BAG-right"), Some("TUBE"), Some("BAG-left")]));
        assert_eq!(n.groups.len(), 1);
        assert_eq!(n.groups[0].links.len(), 3);
        assert_eq!(n.groups[0].nodes.len(), 4);
    }

    #[test]
    fn caps_inward_stay_open() {
        assert!(neurulate(&path(&[Some("BAG-left"), Some("BAG-right")]))
            .groups
            .is_empty());
    }

    #[test]
    fn missing_topology_warns_only_when_relevant() {
        let n = neurulate(&path(&[Some("BAG-right"), None]));
        assert!(n.groups.is_empty());
        assert_eq!(n.report.count("missing-topology"), 1);
        assert!(neurulate(&path(&[None, None])).report.is_empty());
    }

    #[test]
    fn replace_is_idempotent() {
        let mut m = path(&[Some("CYST")]);
        let n = neurulate(&m);
        replace_neurulated(&mut m, &n.groups);
        let once = m.clone();
        replace_neurulated(&mut m, &neurulate(&once).groups);
        assert_eq!(m, once);
    }
}
