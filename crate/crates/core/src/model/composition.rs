use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::id::Identifier;
use crate::model::{Model, ResourceClass};
use crate::schema::{Issue, ValidationReport};

/// Properties that make up the composition graph: `(owner class, property)`.
const COMPOSITION_EDGES: &[(ResourceClass, &str)] = &[
    (ResourceClass::Lyph, "layers"),
    (ResourceClass::Lyph, "internalLyphs"),
    (ResourceClass::Lyph, "materials"),
    (ResourceClass::Material, "materials"),
];

/// Reports every cycle in material, layer and internal-lyph composition.
///
/// One error is emitted per strongly connected component that contains a
/// cycle; the message lists one concrete cycle through it.
pub fn composition_cycle_check(model: &Model) -> ValidationReport {
    let mut graph: DiGraph<Identifier, ()> = DiGraph::new();
    let mut nodes: HashMap<(ResourceClass, usize), NodeIndex> = HashMap::new();
    let mut node_of = |graph: &mut DiGraph<Identifier, ()>, slot: (ResourceClass, usize)| {
        *nodes
            .entry(slot)
            .or_insert_with(|| graph.add_node(model.at(slot.0, slot.1).id.clone()))
    };

    for &(class, prop) in COMPOSITION_EDGES {
        for (idx, r) in model.of_class(class).iter().enumerate() {
            let from = node_of(&mut graph, (class, idx));
            for target in r.references(prop) {
                let Some(slot) =
                    model.locate(target, &[ResourceClass::Lyph, ResourceClass::Material])
                else {
                    continue;
                };
                let to = node_of(&mut graph, slot);
                graph.update_edge(from, to, ());
            }
        }
    }

    let mut report = ValidationReport::new();
    let mut components = tarjan_scc(&graph);
    for comp in &mut components {
        comp.sort();
    }
    components.sort();
    for comp in components {
        let cyclic = comp.len() > 1 || graph.contains_edge(comp[0], comp[0]);
        if !cyclic {
            continue;
        }
        let cycle = find_cycle(&graph, &comp);
        let names: Vec<String> = cycle.iter().map(|&n| graph[n].to_string()).collect();
        let first = &graph[cycle[0]];
        report.push(
            Issue::error(
                "composition-cycle",
                format!("composition cycle: {} -> {}", names.join(" -> "), names[0]),
            )
            .on(first),
        );
    }
    report
}

/// A simple cycle inside a strongly connected component, starting at its
/// first member.
fn find_cycle(graph: &DiGraph<Identifier, ()>, comp: &[NodeIndex]) -> Vec<NodeIndex> {
    let start = comp[0];
    if graph.contains_edge(start, start) {
        return vec![start];
    }
    // BFS back to `start` within the component gives a shortest cycle.
    let mut prev: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        let mut next: Vec<NodeIndex> = graph.neighbors(n).filter(|m| comp.contains(m)).collect();
        next.sort();
        for m in next {
            if m == start {
                let mut path = vec![n];
                let mut cur = n;
                while cur != start {
                    cur = prev[&cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(m) {
                e.insert(n);
                queue.push_back(m);
            }
        }
    }
    comp.to_vec()
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
    fn two_material_loop() {
        let mut m = Model::new();
        m.push(Resource::new(Material, id("M1")).with("materials", vec![id("M2")]));
        m.push(Resource::new(Material, id("M2")).with("materials", vec![id("M1")]));
        let r = composition_cycle_check(&m);
        assert_eq!(r.issues.len(), 1);
        assert!(
            r.issues[0].message.contains("M1 -> M2 -> M1"),
            "{}",
            r.issues[0].message
        );
    }

    #[test]
    fn deep_acyclic_layers() {
        let mut m = Model::new();
        for i in 0..5 {
            m.push(
                Resource::new(Lyph, id(&format!("L{i}")))
                    .with("layers", vec![id(&format!("L{}", i + 1))]),
            );
        }
        m.push(Resource::new(Lyph, id("L5")));
        assert!(composition_cycle_check(&m).is_empty());
    }

    #[test]
    fn internal_self_containment_depth_three() {
        let mut m = Model::new();
        m.push(Resource::new(Lyph, id("A")).with("internalLyphs", vec![id("B")]));
        m.push(Resource::new(Lyph, id("B")).with("internalLyphs", vec![id("C")]));
        m.push(Resource::new(Lyph, id("C")).with("internalLyphs", vec![id("A")]));
        let r = composition_cycle_check(&m);
        assert!(r.has_errors());
        assert_eq!(r.count("composition-cycle"), 1);
    }

    #[test]
    fn self_loop() {
        let mut m = Model::new();
        m.push(Resource::new(Lyph, id("A")).with("layers", vec![id("A")]));
        assert_eq!(composition_cycle_check(&m).issues.len(), 1);
    }
}
