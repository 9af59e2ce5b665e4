//! Deterministic constrained force-directed placement of the visible part
//! of a generated model.
//!
//! A run resolves a [`Scene`] (visible nodes and links, node positioning
//! rules, scaffold anchors and wires, coalescences), starts from seeded
//! random positions, and alternates spring-electric steps with a projection
//! of the positioning rules. Lyph sizes follow from the final positions.

mod crossing;
pub mod geometry;
mod output;
mod scene;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

pub use crossing::{order_chain_in_host, order_slots, CrossingInstance, EXACT_LIMIT};
pub use output::{snapshot, to_svg};
pub use scene::{ConstraintRank, Scene};
pub use solver::EPSILON_SIZE;

use crate::analysis::filter_by_clade;
use crate::id::Identifier;
use crate::model::{Model, ResourceClass};
use crate::schema::{Issue, ValidationReport};

use geometry::V3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    TwoD,
    ThreeD,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TwoD => "2d",
            Mode::ThreeD => "3d",
        }
    }
}

/// Solver parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutConfig {
    pub seed: u64,
    pub iterations: usize,
    pub mode: Mode,
    /// Groups to show; `None` shows every visible resource.
    pub groups: Option<BTreeSet<Identifier>>,
    /// Clade whose variance filter applies.
    pub clade: Option<String>,
    pub repulsion: f64,
    pub spring: f64,
    /// Rest length of links without a declared `length`.
    pub rest_length: f64,
    pub magnet: f64,
    pub dt: f64,
    /// Fraction of the velocity lost at each step.
    pub damping: f64,
    pub max_speed: f64,
    /// Length of a conveyed lyph relative to its link.
    pub link_fraction: f64,
    /// Margin around the grid of internal lyphs, relative to the host size.
    pub margin: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            seed: 0,
            iterations: 300,
            mode: Mode::TwoD,
            groups: None,
            clade: None,
            repulsion: 30.0,
            spring: 4.0,
            rest_length: 5.0,
            magnet: 1.0,
            dt: 0.2,
            damping: 0.9,
            max_speed: 25.0,
            link_fraction: 0.8,
            margin: 0.1,
        }
    }
}

/// Visible nodes and links.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Visible {
    pub nodes: BTreeSet<Identifier>,
    pub links: BTreeSet<Identifier>,
}

/// Nodes and links shown for the given group toggles.
///
/// With `None`, every node and link not flagged `isVisible: false` is shown.
/// Otherwise only members of the active groups (and of groups nested in
/// them) are shown, with closure: a link brings its end nodes, a lyph or a
/// chain brings its links, and a link whose two ends are shown is shown.
/// Resources flagged `isVisible: false`, and links touching them, stay
/// hidden either way.
pub fn visible_subgraph(model: &Model, active: Option<&BTreeSet<Identifier>>) -> Visible {
    let key = |id: &Identifier| model.get(id).map(|r| r.id.clone());
    let mut nodes = BTreeSet::new();
    let mut links = BTreeSet::new();
    match active {
        None => {
            nodes.extend(
                model
                    .of_class(ResourceClass::Node)
                    .iter()
                    .map(|n| n.id.clone()),
            );
            links.extend(
                model
                    .of_class(ResourceClass::Link)
                    .iter()
                    .map(|l| l.id.clone()),
            );
        }
        Some(groups) => {
            let mut queue: Vec<Identifier> = groups.iter().filter_map(&key).collect();
            let mut seen = BTreeSet::new();
            while let Some(g) = queue.pop() {
                if !seen.insert(g.clone()) {
                    continue;
                }
                let Some(g) = model.get_in(&g, ResourceClass::Group) else {
                    continue;
                };
                queue.extend(g.references("groups").iter().filter_map(&key));
                nodes.extend(g.references("nodes").iter().filter_map(&key));
                links.extend(g.references("links").iter().filter_map(&key));
                for lyph in g.references("lyphs") {
                    if let Some(l) = model
                        .get_in(lyph, ResourceClass::Lyph)
                        .and_then(|l| l.reference("conveys"))
                    {
                        links.extend(key(l));
                    }
                }
                for c in g.references("chains") {
                    if let Some(c) = model.get_in(c, ResourceClass::Chain) {
                        links.extend(c.references("levels").iter().filter_map(&key));
                    }
                }
            }
            for l in &links {
                if let Some(l) = model.get_in(l, ResourceClass::Link) {
                    for end in ["source", "target"] {
                        nodes.extend(l.reference(end).and_then(key));
                    }
                }
            }
            for l in model.of_class(ResourceClass::Link) {
                let ends_shown = ["source", "target"].iter().all(|e| {
                    l.reference(e)
                        .and_then(key)
                        .is_some_and(|n| nodes.contains(&n))
                });
                if ends_shown {
                    links.insert(l.id.clone());
                }
            }
        }
    }
    nodes.retain(|n| {
        model
            .get_in(n, ResourceClass::Node)
            .is_some_and(|r| r.is_visible())
    });
    links.retain(|l| {
        model.get_in(l, ResourceClass::Link).is_some_and(|r| {
            r.is_visible()
                && ["source", "target"].iter().all(|e| {
                    r.reference(e)
                        .and_then(key)
                        .is_some_and(|n| nodes.contains(&n))
                })
        })
    });
    Visible { nodes, links }
}

/// Positions and lyph geometry of a layout.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LayoutState {
    pub positions: BTreeMap<Identifier, V3>,
    /// Rotation of each placed lyph around its axis, in degrees.
    pub rotations: BTreeMap<Identifier, f64>,
    /// `(length, width)` of each placed lyph.
    pub sizes: BTreeMap<Identifier, (f64, f64)>,
    pub centers: BTreeMap<Identifier, V3>,
    /// Unit length axis of each placed lyph.
    pub axes: BTreeMap<Identifier, V3>,
    pub anchors: BTreeMap<Identifier, V3>,
    pub iteration: usize,
    pub seed: u64,
}

impl LayoutState {
    pub fn new(seed: u64) -> Self {
        LayoutState {
            seed,
            ..Default::default()
        }
    }
}

/// A finished layout and the warnings raised while computing it.
#[derive(Clone, Debug)]
pub struct Layout {
    pub state: LayoutState,
    pub scene: Scene,
    pub report: ValidationReport,
}

/// Runs `iterations` solver steps. A budget of zero leaves the state as is.
pub fn solve(scene: &Scene, mut state: LayoutState, iterations: usize) -> LayoutState {
    if iterations == 0 {
        return state;
    }
    let mut pos = scene.positions(&state);
    let mut vel = vec![[0.0; 3]; pos.len()];
    for _ in 0..iterations {
        scene.step(&mut pos, &mut vel);
    }
    scene.store(&mut state, &pos);
    state.iteration += iterations;
    state
}

/// Pins wired-chain nodes to their places along the wires and re-applies
/// the rules that depend on them.
pub fn stretch_along_wires(scene: &Scene, mut state: LayoutState) -> LayoutState {
    let mut pos = scene.positions(&state);
    scene.settle(&mut pos);
    scene.store(&mut state, &pos);
    state
}

/// Places the links of coalescing lyphs side by side and re-applies the
/// rules that depend on them.
pub fn align_coalescences(scene: &Scene, mut state: LayoutState) -> LayoutState {
    let mut pos = scene.positions(&state);
    scene.align(&mut pos);
    scene.settle(&mut pos);
    scene.store(&mut state, &pos);
    state
}

/// Computes lyph sizes, centres and rotations from the node positions.
pub fn compute_scaling(
    scene: &Scene,
    mut state: LayoutState,
    report: &mut ValidationReport,
) -> LayoutState {
    scene.scaling(&mut state, report);
    state
}

/// Full layout of `model`.
pub fn layout(model: &Model, config: &LayoutConfig) -> Layout {
    let mut report = ValidationReport::new();
    let mut view = model.clone();
    if let Some(clade) = &config.clade {
        match filter_by_clade(model, clade) {
            Ok(v) => v.apply(&mut view),
            Err(e) => report.push(e),
        }
    }
    if let Some(groups) = &config.groups {
        for g in groups {
            if view.get_in(g, ResourceClass::Group).is_none() {
                report.push(
                    Issue::warning("unknown-group", format!("group {g} is not defined")).on(g),
                );
            }
        }
    }
    let visible = visible_subgraph(&view, config.groups.as_ref());
    let scene = Scene::new(&view, &visible, config);
    report.extend(scene.report.clone());
    let state = scene.initial_state();
    let state = solve(&scene, state, config.iterations);
    let state = stretch_along_wires(&scene, state);
    let state = align_coalescences(&scene, state);
    let mut state = compute_scaling(&scene, state, &mut report);
    state.anchors = scene.anchors.clone();
    Layout {
        state,
        scene,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::geometry::{dist, project_on_segment};
    use super::*;
    use crate::model::Resource;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    fn link(m: &mut Model, name: &str, s: &str, t: &str) {
        m.push(
            Resource::new(ResourceClass::Link, id(name))
                .with("source", id(s))
                .with("target", id(t)),
        );
    }

    #[test]
    fn fixed_node_stays() {
        let mut m = Model::new();
        m.push(
            Resource::new(ResourceClass::Node, id("a"))
                .with("layout", vec![3.0, 4.0])
                .with("fixed", true),
        );
        let l = layout(&m, &LayoutConfig::default());
        assert_eq!(l.state.positions[&id("a")], [3.0, 4.0, 0.0]);
    }

    #[test]
    fn pair_near_rest_length() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("a")));
        m.push(Resource::new(ResourceClass::Node, id("b")));
        link(&mut m, "l", "a", "b");
        let l = layout(&m, &LayoutConfig::default());
        let d = dist(l.state.positions[&id("a")], l.state.positions[&id("b")]);
        assert!((d - 5.0).abs() <= 0.5, "{d}");
    }

    #[test]
    fn hosted_default_offsets() {
        let mut m = Model::new();
        for (n, x) in [("a", 0.0), ("b", 12.0)] {
            m.push(
                Resource::new(ResourceClass::Node, id(n))
                    .with("layout", vec![x, 0.0])
                    .with("fixed", true),
            );
        }
        link(&mut m, "l", "a", "b");
        for h in ["h1", "h2", "h3"] {
            m.push(Resource::new(ResourceClass::Node, id(h)).with("hostedBy", id("l")));
        }
        m.get_mut(&id("l"))
            .unwrap()
            .set("hostedNodes", vec![id("h1"), id("h2"), id("h3")]);
        let l = layout(&m, &LayoutConfig::default());
        for (h, x) in [("h1", 3.0), ("h2", 6.0), ("h3", 9.0)] {
            let p = l.state.positions[&id(h)];
            assert!((p[0] - x).abs() < 1e-9 && p[1].abs() < 1e-9, "{h}: {p:?}");
            let on = project_on_segment(p, [0.0; 3], [12.0, 0.0, 0.0]);
            assert!(dist(on, p) < 1e-9);
        }
    }

    #[test]
    fn deterministic() {
        let mut m = Model::new();
        for n in ["a", "b", "c"] {
            m.push(Resource::new(ResourceClass::Node, id(n)));
        }
        link(&mut m, "l1", "a", "b");
        link(&mut m, "l2", "b", "c");
        let a = snapshot(&layout(&m, &LayoutConfig::default()).state);
        let b = snapshot(&layout(&m, &LayoutConfig::default()).state);
        assert_eq!(a, b);
    }

    #[test]
    fn groups_off_shows_nothing() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("a")));
        m.push(Resource::new(ResourceClass::Node, id("b")));
        link(&mut m, "l", "a", "b");
        m.push(Resource::new(ResourceClass::Group, id("g")).with("nodes", vec![id("a"), id("b")]));
        assert_eq!(
            visible_subgraph(&m, Some(&BTreeSet::new())),
            Visible::default()
        );
        let v = visible_subgraph(&m, Some(&[id("g")].into()));
        assert!(v.links.contains(&id("l")));
    }

    #[test]
    fn wired_chain_midpoint() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Anchor, id("s")).with("layout", vec![0.0, 0.0]));
        m.push(Resource::new(ResourceClass::Anchor, id("t")).with("layout", vec![10.0, 0.0]));
        m.push(
            Resource::new(ResourceClass::Wire, id("w"))
                .with("source", id("s"))
                .with("target", id("t")),
        );
        for n in ["r", "mid", "f"] {
            m.push(Resource::new(ResourceClass::Node, id(n)));
        }
        link(&mut m, "l1", "r", "mid");
        link(&mut m, "l2", "mid", "f");
        m.push(
            Resource::new(ResourceClass::Chain, id("c"))
                .with("levels", vec![id("l1"), id("l2")])
                .with("wiredTo", id("w")),
        );
        let l = layout(&m, &LayoutConfig::default());
        assert_eq!(l.state.positions[&id("mid")], [5.0, 0.0, 0.0]);
        m.get_mut(&id("c")).unwrap().set("startFromLeaf", true);
        let l = layout(&m, &LayoutConfig::default());
        assert_eq!(l.state.positions[&id("r")], [10.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_iterations_is_noop() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("a")));
        let cfg = LayoutConfig::default();
        let scene = Scene::new(&m, &visible_subgraph(&m, None), &cfg);
        let s = scene.initial_state();
        assert_eq!(solve(&scene, s.clone(), 0), s);
    }
}
