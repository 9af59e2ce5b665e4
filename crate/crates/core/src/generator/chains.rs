use crate::id::Identifier;
use crate::model::{Model, Resource, ResourceClass, Value};
use crate::schema::Issue;

use super::templates::instantiate_lyph_template;
use super::{Cause, GenerationTrace};

/// How a chain was defined in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainMethod {
    /// `numLevels` links, each conveying an instance of `lyphTemplate` (if any).
    Levels {
        count: usize,
        template: Option<Identifier>,
    },
    /// One link per lyph of `lyphs`.
    Lyphs(Vec<Identifier>),
    /// One link per housing lyph; conveyed lyphs come from `lyphTemplate`.
    Housing {
        housing: Vec<Identifier>,
        template: Option<Identifier>,
    },
}

impl ChainMethod {
    pub fn of(chain: &Resource) -> Option<ChainMethod> {
        let template = chain.reference("lyphTemplate").cloned();
        if let Some(n) = chain.int("numLevels") {
            return Some(ChainMethod::Levels {
                count: n.max(0) as usize,
                template,
            });
        }
        if chain.get("lyphs").is_some() {
            return Some(ChainMethod::Lyphs(chain.references("lyphs").to_vec()));
        }
        if chain.get("housingLyphs").is_some() {
            return Some(ChainMethod::Housing {
                housing: chain.references("housingLyphs").to_vec(),
                template,
            });
        }
        None
    }

    pub fn len(&self) -> usize {
        match self {
            ChainMethod::Levels { count, .. } => *count,
            ChainMethod::Lyphs(l) => l.len(),
            ChainMethod::Housing { housing, .. } => housing.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Resources created for one chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainExpansion {
    pub links: Vec<Identifier>,
    /// All path nodes from root to leaf, declared ones included.
    pub nodes: Vec<Identifier>,
    /// Conveyed lyphs, one per link that conveys any.
    pub lyphs: Vec<Identifier>,
    pub group: Identifier,
}

/// Whether a chain still needs expansion. Chains that already list their
/// `levels` (expanded earlier, or declared link by link) are left alone.
pub fn needs_expansion(chain: &Resource) -> bool {
    chain.references("levels").is_empty()
}

/// Expands the chain at `idx` into links, nodes, conveyed lyphs and a chain
/// group. The model is left untouched on error.
pub fn expand_chain(
    model: &mut Model,
    idx: usize,
    trace: &mut GenerationTrace,
) -> Result<ChainExpansion, Issue> {
    let chain = model.at(ResourceClass::Chain, idx).clone();
    let cid = chain.id.clone();
    let method = ChainMethod::of(&chain).ok_or_else(|| {
        Issue::error("undefined-chain", format!("chain {cid} has no definition")).on(&cid)
    })?;
    let n = method.len();
    if n == 0 {
        return Err(Issue::error("empty-chain", format!("chain {cid} has no levels")).on(&cid));
    }
    if let ChainMethod::Housing { housing, .. } = &method {
        for h in housing {
            if model.get_in(h, ResourceClass::Lyph).is_none() {
                return Err(Issue::error(
                    "unresolved-housing",
                    format!("housing lyph {h} of chain {cid} is not a defined lyph"),
                )
                .on(&cid));
            }
        }
    }

    // Work on a scratch copy so that a failure leaves `model` unchanged.
    let mut work = model.clone();
    let mut local_trace = GenerationTrace::default();
    let base = cid.flat();
    let fresh = |work: &Model, local: String| -> Result<Identifier, Issue> {
        let id = Identifier::new(None, &local)
            .map_err(|e| Issue::error("bad-identifier", e.to_string()))?;
        if work.contains(&id) {
            return Err(Issue::error(
                "id-collision",
                format!("generated id {id} of chain {cid} collides with an existing definition"),
            )
            .on(&id));
        }
        Ok(id)
    };

    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let declared = match i {
            0 => chain.reference("root"),
            _ if i == n => chain.reference("leaf"),
            _ => None,
        };
        let id = match declared {
            Some(id) => work.normalize(id).into_owned(),
            None => {
                let local = match i {
                    0 => format!("{base}_root"),
                    _ if i == n => format!("{base}_leaf"),
                    _ => format!("{base}_node{i}"),
                };
                let id = fresh(&work, local)?;
                work.push(Resource::new(ResourceClass::Node, id.clone()).with("generated", true));
                local_trace.record(&id, Cause::ChainNode);
                id
            }
        };
        nodes.push(id);
    }

    let mut links = Vec::with_capacity(n);
    let mut lyphs = Vec::new();
    for i in 0..n {
        let link = fresh(&work, format!("{base}_lnk{}", i + 1))?;
        let conveyed = match &method {
            ChainMethod::Levels { template, .. } | ChainMethod::Housing { template, .. } => {
                match template {
                    Some(t) => Some(instantiate_lyph_template(
                        &mut work,
                        t,
                        &link,
                        &mut local_trace,
                    )?),
                    None => None,
                }
            }
            ChainMethod::Lyphs(list) => {
                let lyph = &list[i];
                let is_template = work
                    .get_in(lyph, ResourceClass::Lyph)
                    .is_some_and(|l| l.flag("isTemplate"));
                if is_template {
                    Some(instantiate_lyph_template(
                        &mut work,
                        lyph,
                        &link,
                        &mut local_trace,
                    )?)
                } else {
                    Some(work.normalize(lyph).into_owned())
                }
            }
        };
        let mut r = Resource::new(ResourceClass::Link, link.clone())
            .with("source", nodes[i].clone())
            .with("target", nodes[i + 1].clone())
            .with("levelIn", cid.clone())
            .with("generated", true);
        if let Some(lyph) = &conveyed {
            r.set("conveyingLyph", lyph.clone());
            lyphs.push(lyph.clone());
        }
        if let ChainMethod::Housing { housing, .. } = &method {
            r.set("housedIn", housing[i].clone());
            if let Some(lyph) = &conveyed {
                work.get_mut_in(lyph, ResourceClass::Lyph)
                    .unwrap()
                    .set("internalIn", housing[i].clone());
            }
            if i > 0 {
                let node = work.get_mut_in(&nodes[i], ResourceClass::Node).unwrap();
                node.set("borderIn", vec![housing[i - 1].clone(), housing[i].clone()]);
            }
        }
        work.push(r);
        local_trace.record(&link, Cause::ChainLevel);
        links.push(link);
    }

    let group = fresh(&work, format!("{base}_group"))?;
    let mut g = Resource::new(ResourceClass::Group, group.clone())
        .with("description", "chain")
        .with("generated", true)
        .with("nodes", nodes.clone())
        .with("links", links.clone());
    if !lyphs.is_empty() {
        g.set("lyphs", lyphs.clone());
    }
    work.push(g);
    local_trace.record(&group, Cause::ChainGroup);

    let c = work.at_mut(ResourceClass::Chain, idx);
    c.set("levels", Value::Refs(links.clone()));
    c.set("root", nodes[0].clone());
    c.set("leaf", nodes[n].clone());

    *model = work;
    trace.extend(local_trace);
    Ok(ChainExpansion {
        links,
        nodes,
        lyphs,
        group,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    #[test]
    fn method_one_counts() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("seg")).with("isTemplate", true));
        m.push(
            Resource::new(ResourceClass::Chain, id("ch1"))
                .with("numLevels", 3i64)
                .with("lyphTemplate", id("seg")),
        );
        let mut t = GenerationTrace::default();
        let x = expand_chain(&mut m, 0, &mut t).unwrap();
        assert_eq!((x.links.len(), x.nodes.len(), x.lyphs.len()), (3, 4, 3));
        let g = m.get(&x.group).unwrap();
        let members: usize = ["nodes", "links", "lyphs"]
            .iter()
            .map(|p| g.references(p).len())
            .sum();
        assert_eq!(members, 10);
        assert_eq!(g.text("description"), Some("chain"));
    }

    #[test]
    fn single_lyph_chain() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("A")));
        m.push(Resource::new(ResourceClass::Chain, id("c")).with("lyphs", vec![id("A")]));
        let mut t = GenerationTrace::default();
        let x = expand_chain(&mut m, 0, &mut t).unwrap();
        assert_eq!(x.links.len(), 1);
        assert_eq!(x.nodes.len(), 2);
        assert_eq!(
            m.get(&x.links[0]).unwrap().reference("conveyingLyph"),
            Some(&id("A"))
        );
    }

    #[test]
    fn housing_interior_node_on_border() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("H1")));
        m.push(Resource::new(ResourceClass::Lyph, id("H2")));
        m.push(
            Resource::new(ResourceClass::Chain, id("c"))
                .with("housingLyphs", vec![id("H1"), id("H2")]),
        );
        let mut t = GenerationTrace::default();
        let x = expand_chain(&mut m, 0, &mut t).unwrap();
        let mid = m.get(&x.nodes[1]).unwrap();
        assert_eq!(mid.references("borderIn"), &[id("H1"), id("H2")]);
        assert!(x.lyphs.is_empty());
        assert_eq!(
            m.get(&x.links[1]).unwrap().reference("housedIn"),
            Some(&id("H2"))
        );
    }

    #[test]
    fn collision_leaves_model_untouched() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, id("A")));
        m.push(Resource::new(ResourceClass::Link, id("c_lnk1")));
        m.push(Resource::new(ResourceClass::Chain, id("c")).with("lyphs", vec![id("A")]));
        let before = m.clone();
        let mut t = GenerationTrace::default();
        assert_eq!(
            expand_chain(&mut m, 0, &mut t).unwrap_err().code,
            "id-collision"
        );
        assert_eq!(m, before);
        assert!(t.created.is_empty());
    }

    #[test]
    fn declared_root_and_leaf_reused() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("r")));
        m.push(Resource::new(ResourceClass::Node, id("l")));
        m.push(
            Resource::new(ResourceClass::Chain, id("c"))
                .with("numLevels", 2i64)
                .with("root", id("r"))
                .with("leaf", id("l")),
        );
        let mut t = GenerationTrace::default();
        let x = expand_chain(&mut m, 0, &mut t).unwrap();
        assert_eq!(x.nodes, vec![id("r"), id("c_node1"), id("l")]);
        assert_eq!(t.of_cause(Cause::ChainNode).count(), 1);
    }
}
