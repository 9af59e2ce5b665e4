use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::id::Identifier;
use crate::model::{CoalescenceKind, Model, Resource, ResourceClass, WireGeometry};
use crate::schema::{Issue, ValidationReport};

use super::crossing::order_chain_in_host;
use super::geometry::{Curve, V3};
use super::{LayoutConfig, Mode, Visible};

/// Positioning rule of a node, in precedence order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintRank {
    Anchored,
    Fixed,
    HostedByLink,
    BorderHosted,
    InternalIn,
    ControlCentroid,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Rule {
    /// Pinned to an anchor or to a point of a wire.
    Anchored(V3),
    Fixed(V3),
    Hosted {
        link: usize,
        offset: f64,
    },
    Border {
        lyphs: Vec<usize>,
    },
    Internal {
        lyph: usize,
        k: usize,
        n: usize,
    },
    Control(Vec<usize>),
    Free,
}

impl Rule {
    pub fn rank(&self) -> ConstraintRank {
        match self {
            Rule::Anchored(_) => ConstraintRank::Anchored,
            Rule::Fixed(_) => ConstraintRank::Fixed,
            Rule::Hosted { .. } => ConstraintRank::HostedByLink,
            Rule::Border { .. } => ConstraintRank::BorderHosted,
            Rule::Internal { .. } => ConstraintRank::InternalIn,
            Rule::Control(_) => ConstraintRank::ControlCentroid,
            Rule::Free => ConstraintRank::Free,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct LinkInfo {
    pub id: Identifier,
    pub source: usize,
    pub target: usize,
    pub rest: f64,
    pub lyph: Option<usize>,
}

/// How a lyph gets its place.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Placement {
    Conveyed(usize),
    /// Slot `k` of `n` in a grid inside another lyph.
    Internal {
        host: usize,
        k: usize,
        n: usize,
    },
    /// Slot `k` of `n` in a grid inside a region's bounding box.
    Region {
        min: [f64; 2],
        max: [f64; 2],
        k: usize,
        n: usize,
    },
    /// In the outer layer of the host lyph of an embedding coalescence.
    Embedded {
        host: usize,
    },
    Unplaced,
}

#[derive(Clone, Debug)]
pub(crate) struct LyphInfo {
    pub id: Identifier,
    pub layers: usize,
    pub angle: f64,
    pub placement: Placement,
}

#[derive(Clone, Debug)]
pub(crate) struct CoalescenceInfo {
    pub kind: CoalescenceKind,
    /// Member lyph positions; the first is the reference (or host).
    pub lyphs: Vec<usize>,
    /// Whether the solver may move the conveying link of each member.
    pub movable: Vec<bool>,
}

/// Everything the solver needs, resolved once per layout run.
#[derive(Clone, Debug)]
pub struct Scene {
    pub(crate) mode: Mode,
    pub(crate) nodes: Vec<Identifier>,
    pub(crate) rules: Vec<Rule>,
    pub(crate) magnets: Vec<Option<V3>>,
    pub(crate) links: Vec<LinkInfo>,
    pub(crate) lyphs: Vec<LyphInfo>,
    pub(crate) coalescences: Vec<CoalescenceInfo>,
    pub(crate) anchors: BTreeMap<Identifier, V3>,
    pub(crate) wires: BTreeMap<Identifier, Curve>,
    /// Wired-chain pins: node → position.
    pub(crate) wired: BTreeMap<usize, V3>,
    pub(crate) config: LayoutConfig,
    pub report: ValidationReport,
}

fn key(model: &Model, id: &Identifier) -> Identifier {
    model
        .get(id)
        .map(|r| r.id.clone())
        .unwrap_or_else(|| id.clone())
}

fn coords(r: &Resource, mode: Mode) -> Option<V3> {
    let c = r.coords("layout")?;
    let z = if mode == Mode::TwoD {
        0.0
    } else {
        c.get(2).copied().unwrap_or(0.0)
    };
    Some([*c.first()?, *c.get(1)?, z])
}

impl Scene {
    pub fn new(model: &Model, visible: &Visible, config: &LayoutConfig) -> Scene {
        let mut report = ValidationReport::new();
        let nodes: Vec<Identifier> = model
            .of_class(ResourceClass::Node)
            .iter()
            .filter(|n| visible.nodes.contains(&n.id))
            .map(|n| n.id.clone())
            .collect();
        let node_idx: HashMap<Identifier, usize> = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, n)| (n, i))
            .collect();
        let lyph_res = model.of_class(ResourceClass::Lyph);
        let lyph_idx: HashMap<Identifier, usize> = lyph_res
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.clone(), i))
            .rev()
            .collect();
        let find_lyph = |id: &Identifier| lyph_idx.get(&key(model, id)).copied();
        let find_node = |id: &Identifier| node_idx.get(&key(model, id)).copied();

        let mut links = Vec::new();
        for l in model.of_class(ResourceClass::Link) {
            if !visible.links.contains(&l.id) {
                continue;
            }
            let (Some(s), Some(t)) = (
                l.reference("source").and_then(find_node),
                l.reference("target").and_then(find_node),
            ) else {
                continue;
            };
            links.push(LinkInfo {
                id: l.id.clone(),
                source: s,
                target: t,
                rest: l
                    .number("length")
                    .filter(|x| *x > 0.0)
                    .unwrap_or(config.rest_length),
                lyph: l.reference("conveyingLyph").and_then(find_lyph),
            });
        }
        let link_idx: HashMap<Identifier, usize> = links
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.clone(), i))
            .rev()
            .collect();

        let mut scene = Scene {
            mode: config.mode,
            rules: Vec::new(),
            magnets: Vec::new(),
            lyphs: Vec::new(),
            coalescences: Vec::new(),
            anchors: BTreeMap::new(),
            wires: BTreeMap::new(),
            wired: BTreeMap::new(),
            config: config.clone(),
            nodes,
            links,
            report: ValidationReport::new(),
        };
        scene.resolve_scaffold(model, &mut report);
        scene.resolve_lyphs(model, &lyph_idx);
        scene.resolve_coalescences(model, &lyph_idx, &mut report);
        scene.prune_placements();
        scene.resolve_wired(model, &node_idx, &mut report);

        // Node rules.
        for (i, id) in scene.nodes.clone().iter().enumerate() {
            let n = model
                .get_in(id, ResourceClass::Node)
                .expect("visible node exists");
            scene.magnets.push(if n.flag("fixed") {
                None
            } else {
                coords(n, config.mode)
            });
            let rule = scene.node_rule(model, n, i, &node_idx, &link_idx, &lyph_idx);
            scene.rules.push(rule);
        }
        scene.mark_movable(&mut report);
        scene.report = report;
        scene
    }

    fn node_rule(
        &self,
        model: &Model,
        n: &Resource,
        i: usize,
        node_idx: &HashMap<Identifier, usize>,
        link_idx: &HashMap<Identifier, usize>,
        lyph_idx: &HashMap<Identifier, usize>,
    ) -> Rule {
        if let Some(p) = n
            .reference("anchoredTo")
            .and_then(|a| self.anchors.get(&key(model, a)))
        {
            return Rule::Anchored(*p);
        }
        if let Some(p) = self.wired.get(&i) {
            return Rule::Anchored(*p);
        }
        if n.flag("fixed") {
            if let Some(p) = coords(n, self.mode) {
                return Rule::Fixed(p);
            }
        }
        if let Some(link) = n
            .reference("hostedBy")
            .and_then(|l| link_idx.get(&key(model, l)))
        {
            let offset = n
                .number("offset")
                .unwrap_or_else(|| default_offset(model, n, &self.links[*link].id));
            return Rule::Hosted {
                link: *link,
                offset,
            };
        }
        let placeable = |id: &Identifier| {
            lyph_idx
                .get(&key(model, id))
                .copied()
                .filter(|&l| self.lyphs[l].placement != Placement::Unplaced)
        };
        let border: Vec<usize> = n
            .references("borderIn")
            .iter()
            .filter_map(placeable)
            .collect();
        if !border.is_empty() {
            return Rule::Border { lyphs: border };
        }
        if let Some(l) = n.reference("internalIn").and_then(placeable) {
            let host = &model.of_class(ResourceClass::Lyph)[l];
            let list: Vec<Identifier> = host
                .references("internalNodes")
                .iter()
                .map(|x| key(model, x))
                .collect();
            let (k, count) = match list.iter().position(|x| *x == n.id) {
                Some(k) => (k, list.len()),
                None => (list.len(), list.len() + 1),
            };
            return Rule::Internal {
                lyph: l,
                k,
                n: count,
            };
        }
        let control: Vec<usize> = n
            .references("controlNodes")
            .iter()
            .filter_map(|c| node_idx.get(&key(model, c)).copied())
            .filter(|&c| c != i)
            .collect();
        if !control.is_empty() {
            return Rule::Control(control);
        }
        Rule::Free
    }

    fn resolve_scaffold(&mut self, model: &Model, report: &mut ValidationReport) {
        let mut visiting = BTreeSet::new();
        for a in model.of_class(ResourceClass::Anchor) {
            anchor_position(model, &a.id, &mut self.anchors, &mut visiting, report);
        }
        for w in model.of_class(ResourceClass::Wire) {
            if let Some(c) = wire_curve(model, w, &mut self.anchors, report) {
                self.wires.entry(w.id.clone()).or_insert(c);
            }
        }
    }

    fn resolve_lyphs(&mut self, model: &Model, lyph_idx: &HashMap<Identifier, usize>) {
        let lyph_res = model.of_class(ResourceClass::Lyph);
        let mut conveyed: HashMap<usize, usize> = HashMap::new();
        for (li, l) in self.links.iter().enumerate() {
            if let Some(y) = l.lyph {
                conveyed.entry(y).or_insert(li);
            }
        }
        self.lyphs = lyph_res
            .iter()
            .enumerate()
            .map(|(i, l)| LyphInfo {
                id: l.id.clone(),
                layers: l.references("layers").len().max(1),
                angle: l.number("angle").unwrap_or(0.0),
                placement: match conveyed.get(&i) {
                    Some(&li) => Placement::Conveyed(li),
                    None => Placement::Unplaced,
                },
            })
            .collect();

        // Grid slots inside host lyphs and regions, ordered to reduce
        // crossings of chains laid through them.
        let mut slots: Vec<(usize, Placement)> = Vec::new();
        for (h, host) in lyph_res.iter().enumerate() {
            let order = ordered_slots(model, host, "internalLyphs");
            let n = order.len();
            for (k, id) in order.iter().enumerate() {
                if let Some(&c) = lyph_idx.get(&key(model, id)) {
                    slots.push((c, Placement::Internal { host: h, k, n }));
                }
            }
        }
        for region in model.of_class(ResourceClass::Region) {
            let Some((min, max)) = region_bounds(model, region, &self.anchors, &self.wires) else {
                continue;
            };
            let mut members = Vec::new();
            for id in ordered_slots(model, region, "hostedLyphs") {
                match model.get_as(&id, &[ResourceClass::Lyph, ResourceClass::Group]) {
                    Some(g) if g.class == ResourceClass::Group => {
                        members.extend(g.references("lyphs").iter().cloned())
                    }
                    Some(_) => members.push(id),
                    None => {}
                }
            }
            let n = members.len();
            for (k, id) in members.iter().enumerate() {
                if let Some(&c) = lyph_idx.get(&key(model, id)) {
                    slots.push((c, Placement::Region { min, max, k, n }));
                }
            }
        }
        for (c, p) in slots {
            if self.lyphs[c].placement == Placement::Unplaced {
                self.lyphs[c].placement = p;
            }
        }
    }

    /// A lyph inside an unplaceable host cannot be placed either.
    fn prune_placements(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.lyphs.len() {
                let host = match self.lyphs[i].placement {
                    Placement::Internal { host, .. } | Placement::Embedded { host } => host,
                    _ => continue,
                };
                if self.lyphs[host].placement == Placement::Unplaced
                    || host_depth(&self.lyphs, i) > 16
                {
                    self.lyphs[i].placement = Placement::Unplaced;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn resolve_coalescences(
        &mut self,
        model: &Model,
        lyph_idx: &HashMap<Identifier, usize>,
        report: &mut ValidationReport,
    ) {
        let mut claimed: BTreeSet<usize> = BTreeSet::new();
        for c in model.of_class(ResourceClass::Coalescence) {
            let kind = c
                .text("kind")
                .and_then(CoalescenceKind::parse)
                .unwrap_or(CoalescenceKind::Connecting);
            let mut members = Vec::new();
            for id in c.references("lyphs") {
                let Some(&l) = lyph_idx.get(&key(model, id)) else {
                    continue;
                };
                if claimed.contains(&l) {
                    report.push(
                        Issue::warning(
                            "coalescence-conflict",
                            format!(
                                "{} takes part in several coalescences; {} is not applied to it",
                                self.lyphs[l].id, c.id
                            ),
                        )
                        .on(&c.id),
                    );
                    continue;
                }
                members.push(l);
            }
            if members.len() < 2 {
                continue;
            }
            claimed.extend(members.iter().copied());
            if kind == CoalescenceKind::Embedding {
                for &m in &members[1..] {
                    if self.lyphs[m].placement == Placement::Unplaced {
                        self.lyphs[m].placement = Placement::Embedded { host: members[0] };
                    }
                }
            }
            let movable = vec![false; members.len()];
            self.coalescences.push(CoalescenceInfo {
                kind,
                lyphs: members,
                movable,
            });
        }
    }

    /// Positions of nodes of chains wired to scaffold wires.
    fn resolve_wired(
        &mut self,
        model: &Model,
        node_idx: &HashMap<Identifier, usize>,
        report: &mut ValidationReport,
    ) {
        for chain in model.of_class(ResourceClass::Chain) {
            let Some(wire) = chain.reference("wiredTo") else {
                continue;
            };
            let Some(curve) = self.wires.get(&key(model, wire)) else {
                continue;
            };
            let mut path = chain_path(model, chain);
            if path.len() < 2 {
                continue;
            }
            if chain.flag("startFromLeaf") {
                path.reverse();
            }
            let n = path.len() - 1;
            let degenerate = curve.length() < 1e-9;
            if degenerate {
                report.push(
                    Issue::warning(
                        "degenerate-wire",
                        format!("wire {wire} has coincident ends; nodes of chain {} collapse onto its anchor", chain.id),
                    )
                    .on(&chain.id),
                );
            }
            for (i, node) in path.iter().enumerate() {
                let Some(&ni) = node_idx.get(&key(model, node)) else {
                    continue;
                };
                let p = if degenerate {
                    curve.start()
                } else {
                    curve.point_at_fraction(i as f64 / n as f64)
                };
                self.wired.entry(ni).or_insert(p);
            }
        }
    }

    /// A coalescing lyph's link can be moved when both its ends are free
    /// and not shared with the link of another member.
    fn mark_movable(&mut self, report: &mut ValidationReport) {
        for c in &mut self.coalescences {
            let mut used: BTreeSet<usize> = BTreeSet::new();
            if let Placement::Conveyed(l) = self.lyphs[c.lyphs[0]].placement {
                used.insert(self.links[l].source);
                used.insert(self.links[l].target);
            }
            for (k, &m) in c.lyphs.iter().enumerate().skip(1) {
                let Placement::Conveyed(l) = self.lyphs[m].placement else {
                    continue;
                };
                let (s, t) = (self.links[l].source, self.links[l].target);
                let free = self.rules[s] == Rule::Free && self.rules[t] == Rule::Free;
                if free && !used.contains(&s) && !used.contains(&t) && s != t {
                    c.movable[k] = true;
                    used.insert(s);
                    used.insert(t);
                } else {
                    report.push(
                        Issue::warning(
                            "coalescence-pinned",
                            format!(
                                "link {} of coalescing lyph {} is constrained and cannot be aligned",
                                self.links[l].id, self.lyphs[m].id
                            ),
                        )
                        .on(&self.lyphs[m].id),
                    );
                }
            }
        }
    }

    pub fn node_ids(&self) -> &[Identifier] {
        &self.nodes
    }

    pub fn rank(&self, node: &Identifier) -> Option<ConstraintRank> {
        let i = self.nodes.iter().position(|n| n == node)?;
        Some(self.rules[i].rank())
    }
}

fn host_depth(lyphs: &[LyphInfo], mut i: usize) -> usize {
    let mut d = 0;
    while let Placement::Internal { host, .. } | Placement::Embedded { host } = lyphs[i].placement {
        i = host;
        d += 1;
        if d > 16 {
            break;
        }
    }
    d
}

/// Path nodes of an expanded chain, root first.
pub(crate) fn chain_path(model: &Model, chain: &Resource) -> Vec<Identifier> {
    let mut path = Vec::new();
    for (i, l) in chain.references("levels").iter().enumerate() {
        let Some(link) = model.get_in(l, ResourceClass::Link) else {
            continue;
        };
        if i == 0 || path.is_empty() {
            if let Some(s) = link.reference("source") {
                path.push(key(model, s));
            }
        }
        if let Some(t) = link.reference("target") {
            path.push(key(model, t));
        }
    }
    path
}

/// Members of `prop`, reordered for the first chain running through them.
fn ordered_slots(model: &Model, host: &Resource, prop: &str) -> Vec<Identifier> {
    let members = host.references(prop);
    if members.len() < 2 {
        return members.to_vec();
    }
    let inside: BTreeSet<Identifier> = members.iter().map(|m| key(model, m)).collect();
    for chain in model.of_class(ResourceClass::Chain) {
        let runs_through = chain.references("levels").iter().any(|l| {
            model
                .get_in(l, ResourceClass::Link)
                .and_then(|l| l.reference("conveyingLyph"))
                .is_some_and(|y| inside.contains(&key(model, y)))
        });
        if runs_through {
            return order_chain_in_host(model, &chain.id, &host.id);
        }
    }
    members.to_vec()
}

/// Default offset of a hosted node without one: node `k` (1-based) of the
/// `n` such nodes on the link sits at `k / (n + 1)`.
fn default_offset(model: &Model, node: &Resource, link: &Identifier) -> f64 {
    let Some(l) = model.get_in(link, ResourceClass::Link) else {
        return 0.5;
    };
    let mut unset: Vec<Identifier> = l
        .references("hostedNodes")
        .iter()
        .filter(|n| {
            model
                .get_in(n, ResourceClass::Node)
                .is_some_and(|r| r.get("offset").is_none())
        })
        .map(|n| key(model, n))
        .collect();
    if !unset.contains(&node.id) {
        unset.push(node.id.clone());
    }
    let k = unset.iter().position(|n| *n == node.id).unwrap_or(0) + 1;
    k as f64 / (unset.len() + 1) as f64
}

fn anchor_position(
    model: &Model,
    id: &Identifier,
    done: &mut BTreeMap<Identifier, V3>,
    visiting: &mut BTreeSet<Identifier>,
    report: &mut ValidationReport,
) -> Option<V3> {
    let a = model.get_in(id, ResourceClass::Anchor)?;
    if let Some(p) = done.get(&a.id) {
        return Some(*p);
    }
    if !visiting.insert(a.id.clone()) {
        return None;
    }
    let mut pos = a.coords("layout").map(|c| [c[0], c[1], 0.0]);
    if pos.is_none() {
        if let Some(host) = a.reference("hostedBy") {
            if let Some(w) = model.get_in(host, ResourceClass::Wire) {
                let curve = curve_of(model, w, done, visiting, report);
                let offset = a.number("offset").unwrap_or_else(|| {
                    let siblings: Vec<&Resource> = model
                        .of_class(ResourceClass::Anchor)
                        .iter()
                        .filter(|s| {
                            s.get("offset").is_none()
                                && s.coords("layout").is_none()
                                && s.reference("hostedBy")
                                    .is_some_and(|h| key(model, h) == w.id)
                        })
                        .collect();
                    let k = siblings.iter().position(|s| s.id == a.id).unwrap_or(0) + 1;
                    k as f64 / (siblings.len() + 1) as f64
                });
                pos = curve.map(|c| c.point_at_fraction(offset));
            } else if let Some(r) = model.get_in(host, ResourceClass::Region) {
                let pts = border_points(model, r, done, visiting, report);
                if !pts.is_empty() {
                    let n = pts.len() as f64;
                    pos = Some([
                        pts.iter().map(|p| p[0]).sum::<f64>() / n,
                        pts.iter().map(|p| p[1]).sum::<f64>() / n,
                        0.0,
                    ]);
                }
            }
        }
    }
    visiting.remove(&a.id);
    let p = match pos {
        Some(p) => p,
        None => {
            report.push(
                Issue::warning(
                    "unplaced-anchor",
                    format!("anchor {} has no position; placed at the origin", a.id),
                )
                .on(&a.id),
            );
            [0.0; 3]
        }
    };
    done.insert(a.id.clone(), p);
    Some(p)
}

fn curve_of(
    model: &Model,
    w: &Resource,
    done: &mut BTreeMap<Identifier, V3>,
    visiting: &mut BTreeSet<Identifier>,
    report: &mut ValidationReport,
) -> Option<Curve> {
    let a = anchor_position(model, w.reference("source")?, done, visiting, report)?;
    let b = anchor_position(model, w.reference("target")?, done, visiting, report)?;
    let xy = |c: &[f64]| [c[0], c[1], 0.0];
    Some(
        match w
            .text("geometry")
            .and_then(WireGeometry::parse)
            .unwrap_or_default()
        {
            WireGeometry::Line => Curve::Line { a, b },
            WireGeometry::Arc => {
                let center = w.coords("arcCenter").map(xy).unwrap_or([
                    (a[0] + b[0]) / 2.0,
                    (a[1] + b[1]) / 2.0,
                    0.0,
                ]);
                Curve::arc(a, b, center)
            }
            WireGeometry::Spline => match w.coords("controlPoint") {
                Some(c) => Curve::Quad { a, c: xy(c), b },
                None => Curve::Line { a, b },
            },
        },
    )
}

fn wire_curve(
    model: &Model,
    w: &Resource,
    anchors: &mut BTreeMap<Identifier, V3>,
    report: &mut ValidationReport,
) -> Option<Curve> {
    curve_of(model, w, anchors, &mut BTreeSet::new(), report)
}

fn border_points(
    model: &Model,
    region: &Resource,
    done: &mut BTreeMap<Identifier, V3>,
    visiting: &mut BTreeSet<Identifier>,
    report: &mut ValidationReport,
) -> Vec<V3> {
    let mut pts = Vec::new();
    for b in region.references("border") {
        if let Some(w) = model.get_in(b, ResourceClass::Wire) {
            if let Some(c) = curve_of(model, w, done, visiting, report) {
                pts.extend(c.sample(16));
            }
        } else if let Some(p) = anchor_position(model, b, done, visiting, report) {
            pts.push(p);
        }
    }
    pts
}

/// Bounding box of a region's border in the xy-plane.
pub(crate) fn region_bounds(
    model: &Model,
    region: &Resource,
    anchors: &BTreeMap<Identifier, V3>,
    wires: &BTreeMap<Identifier, Curve>,
) -> Option<([f64; 2], [f64; 2])> {
    let mut pts = Vec::new();
    for b in region.references("border") {
        let k = key(model, b);
        if let Some(c) = wires.get(&k) {
            pts.extend(c.sample(16));
        } else if let Some(p) = anchors.get(&k) {
            pts.push(*p);
        }
    }
    if pts.is_empty() {
        return None;
    }
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in pts {
        for d in 0..2 {
            min[d] = min[d].min(p[d]);
            max[d] = max[d].max(p[d]);
        }
    }
    Some((min, max))
}
