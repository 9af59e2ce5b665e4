//! Synthetic models for the benchmarks.

use lyphforge::{Identifier, Model, Resource, ResourceClass};

/// `chains` chains of `levels` levels each, all built from one two-layer
/// template, joined end to end through shared nodes.
pub fn chain_model(chains: usize, levels: usize) -> Model {
    let mut m = Model::with_namespace("bench");
    for layer in ["inner", "outer"] {
        m.push(
            Resource::new(ResourceClass::Lyph, Identifier::local(layer)).with("isTemplate", true),
        );
    }
    m.push(
        Resource::new(ResourceClass::Lyph, Identifier::local("seg"))
            .with("isTemplate", true)
            .with(
                "layers",
                vec![Identifier::local("inner"), Identifier::local("outer")],
            ),
    );
    for c in 0..chains {
        let mut chain = Resource::new(ResourceClass::Chain, Identifier::local(format!("c{c}")))
            .with("numLevels", levels as i64)
            .with("lyphTemplate", Identifier::local("seg"))
            .with("root", Identifier::local(format!("j{c}")));
        if c + 1 < chains {
            chain = chain.with("leaf", Identifier::local(format!("j{}", c + 1)));
        }
        m.push(chain);
    }
    m
}

/// A model of `links` links over `nodes` nodes; `ends[i]` gives the end
/// nodes of link `i` and `topologies[i]` the topology of its lyph.
pub fn graph_model(nodes: usize, ends: &[(usize, usize)], topologies: &[&str]) -> Model {
    let mut m = Model::new();
    for i in 0..nodes {
        m.push(Resource::new(
            ResourceClass::Node,
            Identifier::local(format!("n{i}")),
        ));
    }
    for (i, &(s, t)) in ends.iter().enumerate() {
        let lyph = Identifier::local(format!("y{i}"));
        m.push(
            Resource::new(ResourceClass::Lyph, lyph.clone())
                .with("topology", topologies[i % topologies.len()]),
        );
        m.push(
            Resource::new(ResourceClass::Link, Identifier::local(format!("l{i}")))
                .with("source", Identifier::local(format!("n{s}")))
                .with("target", Identifier::local(format!("n{t}")))
                .with("conveyingLyph", lyph),
        );
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use lyphforge::generator::generate;

    #[test]
    fn chain_model_generates() {
        let g = generate(&chain_model(3, 4)).unwrap();
        assert_eq!(g.model.model().of_class(ResourceClass::Link).len(), 12);
    }

    #[test]
    fn graph_model_has_every_link() {
        let m = graph_model(3, &[(0, 1), (1, 2)], &["CYST"]);
        assert_eq!(m.of_class(ResourceClass::Link).len(), 2);
    }
}
