use std::collections::{BTreeMap, BTreeSet};

use crate::document::{property_value, resource_from_json};
use crate::id::{Curie, Identifier};
use crate::model::{Model, Resource, ResourceClass, Value};
use crate::schema::Issue;

use super::{Diff, EditOp};

/// Effects of an operation that the generic before/after comparison cannot see.
#[derive(Default)]
pub(super) struct Effects {
    pub rewrites: usize,
    pub renamed: Vec<(Identifier, Identifier)>,
    pub invalidated: Vec<Identifier>,
}

fn norm(ns: Option<&str>, id: &Identifier) -> Identifier {
    match (id.prefix(), ns) {
        (Some(p), Some(n)) if p == n => id.without_prefix(),
        _ => id.clone(),
    }
}

fn parse_id(raw: &str) -> Result<Identifier, Issue> {
    Identifier::parse(raw).map_err(|e| Issue::error("bad-identifier", e.to_string()))
}

/// Canonical id and class of an existing resource.
fn target(model: &Model, raw: &str) -> Result<(Identifier, ResourceClass), Issue> {
    let id = parse_id(raw)?;
    let r = model
        .get(&id)
        .ok_or_else(|| Issue::error("dangling-target", format!("{id} is not defined")).on(&id))?;
    Ok((r.id.clone(), r.class))
}

fn target_in(model: &Model, raw: &str, class: ResourceClass) -> Result<Identifier, Issue> {
    let (id, c) = target(model, raw)?;
    if c != class {
        return Err(
            Issue::error("wrong-class", format!("{id} is a {c}, expected a {class}")).on(&id),
        );
    }
    Ok(id)
}

fn fresh(model: &Model, id: &Identifier, code: &str) -> Result<(), Issue> {
    if model.contains(id) {
        return Err(Issue::error(code, format!("{id} is already defined")).on(id));
    }
    Ok(())
}

/// Local references of `r` that resolve nowhere in `model`.
fn check_refs(model: &Model, r: &Resource) -> Result<(), Issue> {
    for (prop, id) in r.outgoing() {
        let id = norm(model.namespace.as_deref(), id);
        if id.prefix().is_none() && id != r.id && !model.contains(&id) {
            return Err(Issue::error(
                "dangling-reference",
                format!("{}.{prop} refers to undefined {id}", r.id),
            )
            .on(&r.id));
        }
    }
    Ok(())
}

/// Rewrites every reference in the model through `f`. Returns the number of
/// references changed or dropped.
fn rewrite_all(model: &mut Model, mut f: impl FnMut(&Identifier) -> Option<Identifier>) -> usize {
    let ns = model.namespace.clone();
    let mut count = 0;
    model.for_each_mut(|r| {
        r.rewrite_refs(|_, id| {
            let out = f(&norm(ns.as_deref(), id));
            match &out {
                Some(new) if new == &norm(ns.as_deref(), id) => Some(id.clone()),
                _ => {
                    count += 1;
                    out
                }
            }
        });
        for v in r.props.values_mut() {
            if let Value::Refs(ids) = v {
                let mut seen = BTreeSet::new();
                ids.retain(|i| seen.insert(i.clone()));
            }
        }
    });
    count
}

fn remove_resource(model: &mut Model, id: &Identifier) -> usize {
    model.retain(|r| &r.id != id);
    if let Some(v) = model.variance.as_mut() {
        v.presence.remove(id);
    }
    rewrite_all(model, |x| if x == id { None } else { Some(x.clone()) })
}

pub(super) fn run(model: &mut Model, op: &EditOp) -> Result<Effects, Issue> {
    let mut fx = Effects::default();
    match op {
        EditOp::Create { class, definition } => {
            let class: ResourceClass = class
                .parse()
                .or_else(|e| ResourceClass::from_collection(class).ok_or(e))
                .map_err(|e| Issue::error("bad-class", e))?;
            let r = resource_from_json(class, definition)
                .map_err(|e| Issue::error("bad-definition", e.to_string()))?;
            fresh(model, &r.id, "id-collision")?;
            check_refs(model, &r)?;
            model.push(r);
        }
        EditOp::Update {
            target: t,
            set,
            unset,
        } => {
            let (id, class) = target(model, t)?;
            let mut r = model.get(&id).unwrap().clone();
            for (k, v) in set {
                if k == "id" {
                    return Err(Issue::error("bad-update", "ids change through RENAME").on(&id));
                }
                let v = property_value(class, k, v)
                    .map_err(|e| Issue::error("bad-value", e.to_string()).on(&id))?;
                r.set(k, v);
            }
            for k in unset {
                r.remove(k);
            }
            check_refs(model, &r)?;
            let (c, i) = model.position(&id).unwrap();
            model.replace_at(c, i, r);
        }
        EditOp::Delete { target: t } => {
            let (id, _) = target(model, t)?;
            let doomed = invalidated_expansion(model, &id, &mut fx.invalidated);
            fx.rewrites += remove_resource(model, &id);
            for d in doomed {
                fx.rewrites += remove_resource(model, &d);
            }
            for c in &fx.invalidated {
                if let Some(chain) = model.get_mut_in(c, ResourceClass::Chain) {
                    chain.remove("levels");
                }
            }
            if !fx.invalidated.is_empty() {
                model.generated = false;
            }
        }
        EditOp::Rename { target: t, to } => {
            let (id, _) = target(model, t)?;
            let new = norm(model.namespace.as_deref(), &parse_id(to)?);
            fresh(model, &new, "rename-collision")?;
            let (c, i) = model.position(&id).unwrap();
            let mut r = model.at(c, i).clone();
            r.id = new.clone();
            model.replace_at(c, i, r);
            if let Some(v) = model.variance.as_mut() {
                if let Some(p) = v.presence.remove(&id) {
                    v.presence.insert(new.clone(), p);
                }
            }
            fx.rewrites = rewrite_all(model, |x| {
                Some(if x == &id { new.clone() } else { x.clone() })
            });
            fx.renamed.push((id, new));
        }
        EditOp::CloneSubgraph { target: t, suffix } => {
            let group = target_in(model, t, ResourceClass::Group)?;
            clone_subgraph(model, &group, suffix)?;
        }
        EditOp::SplitChain {
            target: t,
            at,
            into,
        } => {
            let chain = target_in(model, t, ResourceClass::Chain)?;
            split_chain(model, &chain, *at, into.as_deref())?;
        }
        EditOp::MergeChains { target: t, other } => {
            let a = target_in(model, t, ResourceClass::Chain)?;
            let b = target_in(model, other, ResourceClass::Chain)?;
            if a == b {
                return Err(
                    Issue::error("bad-merge", format!("cannot merge {a} with itself")).on(&a),
                );
            }
            fx.rewrites = merge_chains(model, &a, &b)?;
        }
        EditOp::Annotate {
            target: t,
            add,
            remove,
        } => {
            let (id, _) = target(model, t)?;
            let parse = |s: &String| {
                Curie::parse(s).map_err(|e| Issue::error("bad-curie", e.to_string()).on(&id))
            };
            let add: Vec<Curie> = add.iter().map(parse).collect::<Result<_, _>>()?;
            let remove: Vec<Curie> = remove.iter().map(parse).collect::<Result<_, _>>()?;
            let r = model.get_mut(&id).unwrap();
            let mut terms = r.ontology_terms().to_vec();
            terms.retain(|c| !remove.contains(c));
            for c in add {
                if !terms.contains(&c) {
                    terms.push(c);
                }
            }
            if terms.is_empty() {
                r.remove("ontologyTerms");
            } else {
                r.set("ontologyTerms", Value::Terms(terms));
            }
        }
    }
    Ok(fx)
}

/// When `id` is a generated part of an expanded chain, the chains it belongs
/// to are recorded in `chains` and the rest of their generated expansion is
/// returned for removal.
fn invalidated_expansion(
    model: &Model,
    id: &Identifier,
    chains: &mut Vec<Identifier>,
) -> Vec<Identifier> {
    if !model.get(id).is_some_and(Resource::is_generated) {
        return Vec::new();
    }
    let mut doomed: Vec<Identifier> = Vec::new();
    for c in model.of_class(ResourceClass::Chain) {
        let mut parts: Vec<Identifier> = Vec::new();
        for l in c.references("levels") {
            let Some(link) = model.get_in(l, ResourceClass::Link) else {
                continue;
            };
            parts.push(link.id.clone());
            for p in ["source", "target", "conveyingLyph"] {
                if let Some(x) = link.reference(p).and_then(|x| model.get(x)) {
                    parts.push(x.id.clone());
                }
            }
        }
        if let Ok(g) = Identifier::new(None, &format!("{}_group", c.id.flat())) {
            parts.push(g);
        }
        if !parts.contains(id) {
            continue;
        }
        chains.push(c.id.clone());
        // Layers copied into generated instances go with them.
        let mut k = 0;
        while k < parts.len() {
            if let Some(l) = model.get_in(&parts[k], ResourceClass::Lyph) {
                parts.extend(
                    l.references("layers")
                        .iter()
                        .filter_map(|x| model.get(x))
                        .map(|x| x.id.clone()),
                );
            }
            k += 1;
        }
        for p in parts {
            let generated = model.get(&p).is_some_and(Resource::is_generated);
            if generated && &p != id && !doomed.contains(&p) {
                doomed.push(p);
            }
        }
    }
    doomed
}

const MEMBER_LISTS: [&str; 11] = [
    "nodes",
    "links",
    "lyphs",
    "materials",
    "chains",
    "coalescences",
    "groups",
    "scaffolds",
    "anchors",
    "wires",
    "regions",
];

fn clone_subgraph(model: &mut Model, group: &Identifier, suffix: &str) -> Result<(), Issue> {
    let mut members: Vec<Identifier> = vec![group.clone()];
    let mut k = 0;
    while k < members.len() {
        if let Some(g) = model.get_in(&members[k], ResourceClass::Group) {
            for list in MEMBER_LISTS {
                for m in g.references(list) {
                    if let Some(r) = model.get(m) {
                        if !members.contains(&r.id) {
                            members.push(r.id.clone());
                        }
                    }
                }
            }
        }
        k += 1;
    }
    let mut renamed: BTreeMap<Identifier, Identifier> = BTreeMap::new();
    for m in &members {
        let new = m
            .suffixed(suffix)
            .map_err(|e| Issue::error("bad-identifier", e.to_string()))?;
        fresh(model, &new, "suffix-collision")?;
        renamed.insert(m.clone(), new);
    }
    let ns = model.namespace.clone();
    let copies: Vec<Resource> = model
        .resources()
        .filter(|r| renamed.contains_key(&r.id))
        .map(|r| {
            let mut c = r.clone();
            c.id = renamed[&r.id].clone();
            c.origin = None;
            c.rewrite_refs(|_, id| {
                Some(
                    renamed
                        .get(&norm(ns.as_deref(), id))
                        .cloned()
                        .unwrap_or_else(|| id.clone()),
                )
            });
            c
        })
        .collect();
    for c in copies {
        model.push(c);
    }
    Ok(())
}

const SPLIT_LISTS: [&str; 3] = ["levels", "lyphs", "housingLyphs"];

fn split_chain(
    model: &mut Model,
    chain: &Identifier,
    at: usize,
    into: Option<&str>,
) -> Result<(), Issue> {
    let c = model.get_in(chain, ResourceClass::Chain).unwrap().clone();
    let levels = c.references("levels").to_vec();
    let n = if !levels.is_empty() {
        levels.len()
    } else if !c.references("lyphs").is_empty() {
        c.references("lyphs").len()
    } else if !c.references("housingLyphs").is_empty() {
        c.references("housingLyphs").len()
    } else {
        c.int("numLevels").unwrap_or(0).max(0) as usize
    };
    if at == 0 || at >= n {
        return Err(Issue::error(
            "bad-split",
            format!("chain {chain} has {n} levels; cannot split at {at}"),
        )
        .on(chain));
    }
    let new = match into {
        Some(raw) => norm(model.namespace.as_deref(), &parse_id(raw)?),
        None => Identifier::new(None, &format!("{}_part2", chain.flat()))
            .map_err(|e| Issue::error("bad-identifier", e.to_string()))?,
    };
    fresh(model, &new, "id-collision")?;

    let mut first = c.clone();
    let mut second = Resource::new(ResourceClass::Chain, new.clone());
    for (k, v) in &c.props {
        if !matches!(
            k.as_str(),
            "levels"
                | "lyphs"
                | "housingLyphs"
                | "numLevels"
                | "root"
                | "leaf"
                | "wiredTo"
                | "name"
                | "ontologyTerms"
                | "generated"
        ) {
            second.set(k, v.clone());
        }
    }
    for list in SPLIT_LISTS {
        let ids = c.references(list);
        if ids.len() == n {
            first.set(list, ids[..at].to_vec());
            second.set(list, ids[at..].to_vec());
        }
    }
    if c.get("numLevels").is_some() {
        first.set("numLevels", at as i64);
        second.set("numLevels", (n - at) as i64);
    }
    let joint = if levels.is_empty() {
        let j = Identifier::new(None, &format!("{}_split{at}", chain.flat()))
            .map_err(|e| Issue::error("bad-identifier", e.to_string()))?;
        fresh(model, &j, "id-collision")?;
        model.push(Resource::new(ResourceClass::Node, j.clone()));
        j
    } else {
        model
            .get_in(&levels[at], ResourceClass::Link)
            .and_then(|l| l.reference("source"))
            .and_then(|s| model.get(s))
            .map(|s| s.id.clone())
            .ok_or_else(|| {
                Issue::error(
                    "bad-split",
                    format!("level {at} of chain {chain} has no source node"),
                )
                .on(chain)
            })?
    };
    if let Some(leaf) = c.reference("leaf") {
        second.set("leaf", leaf.clone());
    }
    first.set("leaf", joint.clone());
    second.set("root", joint.clone());

    let (ci, ii) = model.position(chain).unwrap();
    model.replace_at(ci, ii, first);
    model.insert_at(ResourceClass::Chain, ii + 1, second);

    let closed = model.generated;
    for l in &levels[at..] {
        if let Some(link) = model.get_mut_in(l, ResourceClass::Link) {
            if link.get("levelIn").is_some() {
                link.set("levelIn", new.clone());
            }
        }
    }
    if closed {
        if let Some(j) = model.get_mut_in(&joint, ResourceClass::Node) {
            j.push_ref("leafOf", chain.clone());
            j.push_ref("rootOf", new.clone());
        }
        if let Some(leaf) = c.reference("leaf").cloned() {
            if let Some(node) = model.get_mut(&leaf) {
                node.rewrite_refs(|p, x| {
                    Some(if p == "leafOf" && x == chain {
                        new.clone()
                    } else {
                        x.clone()
                    })
                });
            }
        }
    }
    model.for_each_mut(|r| {
        if r.class == ResourceClass::Group && r.references("chains").contains(chain) {
            r.push_ref("chains", new.clone());
        }
    });
    Ok(())
}

fn merge_chains(model: &mut Model, a: &Identifier, b: &Identifier) -> Result<usize, Issue> {
    let ca = model.get_in(a, ResourceClass::Chain).unwrap().clone();
    let cb = model.get_in(b, ResourceClass::Chain).unwrap().clone();
    let ns = model.namespace.clone();
    let end = |r: &Resource, p: &str| r.reference(p).map(|x| norm(ns.as_deref(), x));
    let expanded = (
        !ca.references("levels").is_empty(),
        !cb.references("levels").is_empty(),
    );
    if expanded.0 != expanded.1 {
        return Err(Issue::error(
            "bad-merge",
            format!("{a} and {b} must both be expanded or both unexpanded"),
        )
        .on(a));
    }
    let joint = end(&ca, "leaf");
    match (&joint, end(&cb, "root")) {
        (Some(x), Some(y)) if *x == y => {}
        (None, None) if !expanded.0 => {}
        _ => {
            return Err(Issue::error(
                "chains-not-adjacent",
                format!("the leaf of {a} is not the root of {b}"),
            )
            .on(a));
        }
    }
    let mut merged = ca.clone();
    for list in SPLIT_LISTS {
        let (x, y) = (ca.references(list), cb.references(list));
        if x.is_empty() != y.is_empty() {
            return Err(Issue::error("bad-merge", format!("{a} and {b} disagree on {list}")).on(a));
        }
        if !x.is_empty() {
            merged.set(list, [x, y].concat());
        }
    }
    if let (Some(x), Some(y)) = (ca.int("numLevels"), cb.int("numLevels")) {
        merged.set("numLevels", x + y);
    }
    match cb.reference("leaf") {
        Some(l) => merged.set("leaf", l.clone()),
        None => {
            merged.remove("leaf");
        }
    }
    let (ci, ii) = model.position(a).unwrap();
    model.replace_at(ci, ii, merged);
    if let Some(j) = joint.and_then(|j| model.get_mut_in(&j, ResourceClass::Node)) {
        j.rewrite_refs(|p, x| {
            let x_n = norm(ns.as_deref(), x);
            if (p == "leafOf" && x_n == *a) || (p == "rootOf" && x_n == *b) {
                None
            } else {
                Some(x.clone())
            }
        });
    }
    model.retain(|r| &r.id != b);
    if let Some(v) = model.variance.as_mut() {
        v.presence.remove(b);
    }
    Ok(rewrite_all(model, |x| {
        Some(if x == b { a.clone() } else { x.clone() })
    }))
}

/// Created, deleted and modified ids between two states of a model.
pub(super) fn compare(before: &Model, after: &Model, fx: Effects) -> Diff {
    let index = |m: &Model| -> BTreeMap<Identifier, Resource> {
        let mut out = BTreeMap::new();
        for r in m.resources() {
            out.entry(r.id.clone()).or_insert_with(|| r.clone());
        }
        out
    };
    let (b, a) = (index(before), index(after));
    let renamed_from: BTreeSet<&Identifier> = fx.renamed.iter().map(|(o, _)| o).collect();
    let renamed_to: BTreeSet<&Identifier> = fx.renamed.iter().map(|(_, n)| n).collect();
    let mut diff = Diff {
        rewrites: fx.rewrites,
        invalidated: fx.invalidated.clone(),
        renamed: fx.renamed.clone(),
        ..Diff::default()
    };
    for (id, r) in &a {
        match b.get(id) {
            None if !renamed_to.contains(id) => diff.created.push(id.clone()),
            Some(old) if old != r => diff.modified.push(id.clone()),
            _ => {}
        }
    }
    for id in b.keys() {
        if !a.contains_key(id) && !renamed_from.contains(id) {
            diff.deleted.push(id.clone());
        }
    }
    diff
}
