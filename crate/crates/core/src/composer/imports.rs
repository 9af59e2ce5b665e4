use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::document::parse_model;
use crate::model::Model;
use crate::schema::{Issue, ValidationReport};

use super::{qualify, CachePolicy, Fetcher};

/// One import to retrieve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportSource {
    /// URL or filesystem path.
    pub url: String,
    /// Namespace the imported model is expected to declare.
    pub namespace: Option<String>,
    pub cache_policy: CachePolicy,
}

impl ImportSource {
    pub fn new(url: impl Into<String>) -> Self {
        ImportSource {
            url: url.into(),
            namespace: None,
            cache_policy: CachePolicy::default(),
        }
    }
}

/// Result of [`resolve_imports`].
#[derive(Clone, Debug)]
pub struct Linked {
    /// The input with every imported resource appended, qualified with its
    /// namespace and flagged `external`.
    pub model: Model,
    /// Namespaces brought in, sorted.
    pub namespaces: BTreeSet<String>,
    /// Locations in the order they were fetched.
    pub fetched: Vec<String>,
    pub report: ValidationReport,
}

struct Resolver<'a> {
    fetcher: &'a dyn Fetcher,
    policy: CachePolicy,
    root_namespace: Option<String>,
    /// Location → namespace for every import already loaded.
    seen: BTreeMap<String, String>,
    loaded: BTreeMap<String, Model>,
    fetched: Vec<String>,
    report: ValidationReport,
}

/// Fetches the transitive imports of `spec` and links them into one model.
///
/// `location` is where `spec` was read from; relative import locations are
/// resolved against it. Imports are visited depth first in sorted order of
/// location and assembled in sorted order of namespace, so the result only
/// depends on what the fetcher returns. A failed fetch, an unreadable
/// document, a namespace mismatch or an import cycle is an error; the
/// remaining imports are still linked.
pub fn resolve_imports(
    spec: &Model,
    location: Option<&str>,
    fetcher: &dyn Fetcher,
    policy: CachePolicy,
) -> Linked {
    let mut r = Resolver {
        fetcher,
        policy,
        root_namespace: spec.namespace.clone(),
        seen: BTreeMap::new(),
        loaded: BTreeMap::new(),
        fetched: Vec::new(),
        report: ValidationReport::new(),
    };
    let mut stack: Vec<(String, String)> = Vec::new();
    if let Some(loc) = location {
        stack.push((loc.to_string(), spec.namespace.clone().unwrap_or_default()));
    }
    let mut found = BTreeMap::new();
    for imp in sorted(spec) {
        if let Some(ns) = r.visit(location, &imp.url, imp.namespace.as_deref(), &mut stack) {
            found.insert(imp.url.clone(), ns);
        }
    }

    let mut model = spec.clone();
    for imp in &mut model.imports {
        if imp.namespace.is_none() {
            imp.namespace = found.get(&imp.url).cloned();
        }
    }
    for (ns, imported) in &r.loaded {
        for res in imported.resources() {
            let mut q = qualify(res, ns);
            q.origin = None;
            q.set("external", true);
            if model.contains(&q.id) {
                r.report.push(
                    Issue::warning(
                        "duplicate-id",
                        format!(
                            "{} is defined more than once; the first definition wins",
                            q.id
                        ),
                    )
                    .on(&q.id),
                );
            }
            model.push(q);
        }
    }
    Linked {
        model,
        namespaces: r.loaded.keys().cloned().collect(),
        fetched: r.fetched,
        report: r.report,
    }
}

fn sorted(model: &Model) -> Vec<crate::model::ImportRef> {
    let mut v = model.imports.clone();
    v.sort_by(|a, b| a.url.cmp(&b.url));
    v
}

impl Resolver<'_> {
    /// Loads one import and, recursively, its own imports. Returns the
    /// namespace of the imported model.
    fn visit(
        &mut self,
        parent: Option<&str>,
        url: &str,
        expected: Option<&str>,
        stack: &mut Vec<(String, String)>,
    ) -> Option<String> {
        let loc = resolve_location(parent, url);
        if let Some(pos) = stack.iter().position(|(l, _)| *l == loc) {
            self.cycle(stack, pos, &loc);
            return None;
        }
        if let Some(ns) = self.seen.get(&loc) {
            return Some(ns.clone());
        }
        let source = super::ImportSource {
            url: loc.clone(),
            namespace: expected.map(str::to_string),
            cache_policy: self.policy,
        };
        self.fetched.push(loc.clone());
        let text = match self.fetcher.fetch(&source) {
            Ok(t) => t,
            Err(e) => {
                self.report.push(Issue::error(
                    "fetch-failed",
                    format!("import {loc} could not be fetched: {e}"),
                ));
                return None;
            }
        };
        let model = match parse_model(&text) {
            Ok(m) => m,
            Err(e) => {
                self.report.push(Issue::error(
                    "import-unreadable",
                    format!("import {loc} is not a model document: {e}"),
                ));
                return None;
            }
        };
        let ns = match (model.namespace.as_deref(), expected) {
            (Some(a), Some(b)) if a != b => {
                self.report.push(Issue::error(
                    "namespace-mismatch",
                    format!("import {loc} declares namespace {a}, expected {b}"),
                ));
                return None;
            }
            (Some(a), _) | (None, Some(a)) => a.to_string(),
            (None, None) => {
                self.report.push(Issue::error(
                    "import-namespace",
                    format!("import {loc} declares no namespace and none is given"),
                ));
                return None;
            }
        };
        if let Some(pos) = stack.iter().position(|(_, n)| *n == ns) {
            self.cycle(stack, pos, &loc);
            return None;
        }
        if self.root_namespace.as_deref() == Some(ns.as_str()) {
            self.report.push(Issue::error(
                "import-cycle",
                format!("import cycle: {loc} has the namespace {ns} of the importing model"),
            ));
            return None;
        }
        self.seen.insert(loc.clone(), ns.clone());
        if self.loaded.contains_key(&ns) {
            self.report.push(Issue::warning(
                "duplicate-namespace",
                format!("namespace {ns} is imported from more than one location; {loc} is ignored"),
            ));
            return Some(ns);
        }
        stack.push((loc.clone(), ns.clone()));
        for imp in sorted(&model) {
            self.visit(Some(&loc), &imp.url, imp.namespace.as_deref(), stack);
        }
        stack.pop();
        self.loaded.insert(ns.clone(), model);
        Some(ns)
    }

    fn cycle(&mut self, stack: &[(String, String)], from: usize, back_to: &str) {
        let mut path: Vec<&str> = stack[from..].iter().map(|(l, _)| l.as_str()).collect();
        path.push(back_to);
        self.report.push(Issue::error(
            "import-cycle",
            format!("import cycle: {}", path.join(" -> ")),
        ));
    }
}

/// Resolves `url` relative to the location of the importing document.
pub(crate) fn resolve_location(parent: Option<&str>, url: &str) -> String {
    let absolute = url.contains("://") || Path::new(url).is_absolute();
    match parent {
        Some(p) if !absolute => {
            if p.contains("://") {
                match p.rfind('/') {
                    Some(i) => format!("{}{url}", &p[..=i]),
                    None => url.to_string(),
                }
            } else {
                let dir = Path::new(p).parent().unwrap_or(Path::new(""));
                dir.join(url).to_string_lossy().into_owned()
            }
        }
        _ => url.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::Identifier;
    use crate::model::ImportRef;
    use std::collections::HashMap;

    struct Fixture(HashMap<&'static str, &'static str>);

    impl Fetcher for Fixture {
        fn fetch(&self, source: &ImportSource) -> Result<String, String> {
            self.0
                .get(source.url.as_str())
                .map(|s| s.to_string())
                .ok_or_else(|| "404".to_string())
        }
    }

    fn spec(imports: &[&str]) -> Model {
        let mut m = Model::with_namespace("main");
        m.imports = imports.iter().map(|u| ImportRef::new(*u)).collect();
        m
    }

    #[test]
    fn imports_are_qualified_and_external() {
        let f = Fixture(HashMap::from([(
            "http://x/too.json",
            r#"{"namespace":"too","anchors":[{"id":"a1"}],"wires":[{"id":"w","source":"a1"}]}"#,
        )]));
        let linked = resolve_imports(
            &spec(&["http://x/too.json"]),
            None,
            &f,
            CachePolicy::CacheOk,
        );
        assert!(linked.report.is_empty(), "{}", linked.report.render());
        let a = linked
            .model
            .get(&Identifier::parse("too:a1").unwrap())
            .unwrap();
        assert!(a.is_external());
        let w = linked
            .model
            .get(&Identifier::parse("too:w").unwrap())
            .unwrap();
        assert_eq!(
            w.reference("source"),
            Some(&Identifier::parse("too:a1").unwrap())
        );
        assert_eq!(linked.model.imports[0].namespace.as_deref(), Some("too"));
    }

    #[test]
    fn two_node_cycle() {
        let f = Fixture(HashMap::from([
            (
                "http://x/a.json",
                r#"{"namespace":"a","imports":["b.json"]}"#,
            ),
            (
                "http://x/b.json",
                r#"{"namespace":"b","imports":["a.json"]}"#,
            ),
        ]));
        let linked = resolve_imports(&spec(&["http://x/a.json"]), None, &f, CachePolicy::CacheOk);
        assert_eq!(linked.report.count("import-cycle"), 1);
        let msg = &linked.report.errors().next().unwrap().message;
        assert!(
            msg.contains("http://x/a.json -> http://x/b.json -> http://x/a.json"),
            "{msg}"
        );
    }

    #[test]
    fn fetch_failure_names_url() {
        let linked = resolve_imports(
            &spec(&["http://x/gone.json"]),
            None,
            &Fixture(HashMap::new()),
            CachePolicy::CacheOk,
        );
        let e = linked.report.errors().next().unwrap();
        assert_eq!(e.code, "fetch-failed");
        assert!(e.message.contains("http://x/gone.json"));
    }

    #[test]
    fn relative_locations() {
        assert_eq!(
            resolve_location(Some("http://h/d/a.json"), "b.json"),
            "http://h/d/b.json"
        );
        assert_eq!(resolve_location(Some("dir/a.json"), "b.json"), "dir/b.json");
        assert_eq!(
            resolve_location(Some("dir/a.json"), "/abs/b.json"),
            "/abs/b.json"
        );
    }
}
