//! Combining models: merging definitions, joining models as groups, and
//! resolving `imports` into a linked model.

mod fetch;
mod imports;

use std::collections::BTreeSet;

#[cfg(feature = "http")]
pub use fetch::HttpFetcher;
pub use fetch::{
    default_cache_dir, CachePolicy, CachedFetcher, Fetcher, FileFetcher, Reply, SourceFetcher,
    Transport, CACHE_DIR_ENV,
};
pub use imports::{resolve_imports, ImportSource, Linked};

use crate::id::Identifier;
use crate::model::{ImportRef, Model, Resource, ResourceClass};
use crate::schema::catalog::group_member_property;
use crate::schema::{Issue, ValidationReport};

/// Mixes the definitions of `other` into `base`.
///
/// Resources of `other` land in `base`'s namespace. Every identifier defined
/// by both models is reported once; both definitions are kept and the one
/// from `base` wins on lookup.
pub fn merge(base: &Model, other: &Model) -> (Model, ValidationReport) {
    let mut out = base.clone();
    let mut report = ValidationReport::new();
    let mut collided = BTreeSet::new();
    for r in other.resources() {
        let r = localize(r, other.namespace.as_deref());
        if out.contains(&r.id) && collided.insert(r.id.clone()) {
            report.push(
                Issue::warning(
                    "duplicate-id",
                    format!(
                        "{} is defined by both models; the first definition wins",
                        r.id
                    ),
                )
                .on(&r.id),
            );
        }
        out.push(r);
    }
    merge_headers(&mut out, other, None);
    (out, report)
}

/// Adds `other` to `base` as a separate part: its resources keep their
/// namespace (unprefixed identifiers are qualified with it) and are listed
/// in a new group named after that namespace.
pub fn join(base: &Model, other: &Model) -> (Model, ValidationReport) {
    let mut out = base.clone();
    let mut report = ValidationReport::new();
    let ns = join_namespace(other);
    let mut group_id = Identifier::local(ns.as_str());
    while out.contains(&group_id) {
        group_id = group_id.suffixed("_group").expect("valid suffix");
    }
    let mut group = Resource::new(ResourceClass::Group, group_id.clone()).with("name", ns.as_str());
    for class in ResourceClass::ALL {
        let prop = group_member_property(class);
        for r in other.of_class(class) {
            let r = qualify(r, &ns);
            if out.contains(&r.id) {
                report.push(
                    Issue::warning(
                        "duplicate-id",
                        format!("{} is already defined; the first definition wins", r.id),
                    )
                    .on(&r.id),
                );
            }
            group.push_ref(prop, r.id.clone());
            out.push(r);
        }
    }
    out.push(group);
    merge_headers(&mut out, other, Some(&ns));
    (out, report)
}

/// Namespace used for a joined model: its own, else its id, else "joined".
fn join_namespace(other: &Model) -> String {
    other
        .namespace
        .clone()
        .or_else(|| {
            other
                .id
                .clone()
                .filter(|id| crate::id::is_valid_namespace(id))
        })
        .unwrap_or_else(|| "joined".to_string())
}

/// Copy of `r` with every unprefixed identifier put into namespace `ns`.
pub(crate) fn qualify(r: &Resource, ns: &str) -> Resource {
    let q = |id: &Identifier| {
        if id.is_foreign() {
            id.clone()
        } else {
            id.with_prefix(ns)
        }
    };
    let mut out = r.clone();
    out.id = q(&r.id);
    out.rewrite_refs(|_, id| Some(q(id)));
    out
}

/// Copy of `r` with `ns` prefixes stripped.
fn localize(r: &Resource, ns: Option<&str>) -> Resource {
    let Some(ns) = ns else { return r.clone() };
    let l = |id: &Identifier| {
        if id.prefix() == Some(ns) {
            id.without_prefix()
        } else {
            id.clone()
        }
    };
    let mut out = r.clone();
    out.id = l(&r.id);
    out.rewrite_refs(|_, id| Some(l(id)));
    out
}

/// Carries imports and variance data of `other` over to `out`.
fn merge_headers(out: &mut Model, other: &Model, ns: Option<&str>) {
    for imp in &other.imports {
        if !out.imports.iter().any(|i| i.url == imp.url) {
            out.imports.push(ImportRef {
                url: imp.url.clone(),
                namespace: imp.namespace.clone(),
            });
        }
    }
    if let Some(v) = &other.variance {
        let target = out.variance.get_or_insert_with(Default::default);
        for c in &v.clades {
            if !target.clades.contains(c) {
                target.clades.push(c.clone());
            }
        }
        for (id, clades) in &v.presence {
            let id = match ns {
                Some(ns) if !id.is_foreign() => id.with_prefix(ns),
                _ => id.clone(),
            };
            target
                .presence
                .entry(id)
                .or_default()
                .extend(clades.iter().cloned());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::validate_references;

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    fn small(ns: &str, lyph: &str) -> Model {
        let mut m = Model::with_namespace(ns);
        m.push(Resource::new(ResourceClass::Lyph, id(lyph)));
        m.push(
            Resource::new(ResourceClass::Link, id(&format!("{lyph}-lnk")))
                .with("conveyingLyph", id(lyph)),
        );
        m
    }

    #[test]
    fn merge_identity_and_duplicates() {
        let a = small("a", "blood");
        let (m, r) = merge(&a, &Model::new());
        assert_eq!(m, a);
        assert!(r.is_empty());
        let (m, r) = merge(&a, &small("b", "blood"));
        assert_eq!(r.count("duplicate-id"), 2);
        assert_eq!(m.len(), 4);
        assert_eq!(m.ids().into_iter().collect::<BTreeSet<_>>().len(), 2);
    }

    #[test]
    fn join_wraps_in_group() {
        let (m, r) = join(&small("a", "x"), &small("kid", "x"));
        assert!(r.is_empty());
        let g = m.get_in(&id("kid"), ResourceClass::Group).unwrap();
        assert_eq!(g.references("lyphs"), &[id("kid:x")]);
        assert_eq!(
            m.get(&id("kid:x-lnk")).unwrap().reference("conveyingLyph"),
            Some(&id("kid:x"))
        );
        let refs = validate_references(&m, &BTreeSet::new());
        assert!(!refs.has_errors(), "{}", refs.render());
    }

    #[test]
    fn join_nests_groups() {
        let (ab, _) = join(&small("a", "p"), &small("b", "q"));
        let (abc, _) = join(&ab, &small("c", "r"));
        for g in ["b", "c"] {
            assert!(abc.get_in(&id(g), ResourceClass::Group).is_some());
        }
    }

    #[test]
    fn join_empty() {
        let (m, _) = join(&small("a", "p"), &Model::with_namespace("e"));
        let g = m.get_in(&id("e"), ResourceClass::Group).unwrap();
        assert!(g.outgoing().next().is_none());
    }
}
