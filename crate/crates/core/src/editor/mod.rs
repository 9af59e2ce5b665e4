//! Scripted edits with model-wide reference maintenance and undo/redo.
//!
//! Every applied operation is logged with the state of the class registries
//! it touched, before and after, so undo and redo restore exact states
//! (including declaration order).

mod ops;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use crate::document::{parse_variance, resource_from_json, resource_to_json, variance_to_json};
use crate::error::{Error, Result};
use crate::id::Identifier;
use crate::model::{Model, Resource, ResourceClass, VarianceSpec};
use crate::schema::Issue;

/// One edit. Targets are identifiers as written in the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum EditOp {
    /// `class` is a class name (`Lyph`) or collection key (`lyphs`).
    Create { class: String, definition: Json },
    Update {
        target: String,
        #[serde(default)]
        set: Map<String, Json>,
        #[serde(default)]
        unset: Vec<String>,
    },
    /// Removes the resource and every reference to it.
    Delete { target: String },
    /// Changes an id and every reference to it.
    Rename { target: String, to: String },
    /// Copies a group and everything it contains (nested groups included),
    /// appending `suffix` to every id.
    CloneSubgraph { target: String, suffix: String },
    /// Keeps levels `..at` in the chain and moves the rest to a new chain.
    SplitChain {
        target: String,
        at: usize,
        #[serde(default)]
        into: Option<String>,
    },
    /// Appends `other` to `target`, whose leaf must be the root of `other`.
    MergeChains { target: String, other: String },
    Annotate {
        target: String,
        #[serde(default)]
        add: Vec<String>,
        #[serde(default)]
        remove: Vec<String>,
    },
}

/// Resources touched by an operation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diff {
    pub created: Vec<Identifier>,
    pub deleted: Vec<Identifier>,
    pub modified: Vec<Identifier>,
    pub renamed: Vec<(Identifier, Identifier)>,
    /// References rewritten or cleared.
    pub rewrites: usize,
    /// Chains whose generated expansion was dropped; generate again to rebuild.
    pub invalidated: Vec<Identifier>,
}

impl Diff {
    pub fn touched(&self) -> Vec<Identifier> {
        let mut out: Vec<Identifier> = self
            .created
            .iter()
            .chain(&self.deleted)
            .chain(&self.modified)
            .cloned()
            .collect();
        for (a, b) in &self.renamed {
            out.push(a.clone());
            out.push(b.clone());
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_empty(&self) -> bool {
        self.touched().is_empty() && self.invalidated.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for id in &self.created {
            let _ = writeln!(s, "+ {id}");
        }
        for id in &self.deleted {
            let _ = writeln!(s, "- {id}");
        }
        for id in &self.modified {
            let _ = writeln!(s, "~ {id}");
        }
        for (a, b) in &self.renamed {
            let _ = writeln!(s, "> {a} -> {b}");
        }
        for c in &self.invalidated {
            let _ = writeln!(s, "! chain {c} needs regeneration");
        }
        let _ = writeln!(s, "{} reference(s) rewritten", self.rewrites);
        s
    }

    pub fn to_json(&self) -> Json {
        let ids =
            |v: &[Identifier]| Json::Array(v.iter().map(|i| Json::String(i.to_string())).collect());
        json!({
            "created": ids(&self.created),
            "deleted": ids(&self.deleted),
            "modified": ids(&self.modified),
            "renamed": self.renamed.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
            "rewrites": self.rewrites,
            "invalidated": ids(&self.invalidated),
        })
    }

    fn from_json(v: &Json) -> Result<Diff> {
        let ids = |k: &str| -> Result<Vec<Identifier>> {
            v[k].as_array()
                .map(|a| {
                    a.iter()
                        .filter_map(Json::as_str)
                        .map(Identifier::parse)
                        .collect::<Result<_, _>>()
                })
                .unwrap_or(Ok(Vec::new()))
                .map_err(Error::from)
        };
        let mut renamed = Vec::new();
        for pair in v["renamed"].as_array().into_iter().flatten() {
            if let (Some(a), Some(b)) = (pair[0].as_str(), pair[1].as_str()) {
                renamed.push((Identifier::parse(a)?, Identifier::parse(b)?));
            }
        }
        Ok(Diff {
            created: ids("created")?,
            deleted: ids("deleted")?,
            modified: ids("modified")?,
            renamed,
            rewrites: v["rewrites"].as_u64().unwrap_or(0) as usize,
            invalidated: ids("invalidated")?,
        })
    }
}

/// State of the registries an operation changed.
#[derive(Clone, Debug, PartialEq)]
struct Patch {
    classes: Vec<(ResourceClass, Vec<Resource>)>,
    variance: Option<VarianceSpec>,
    generated: bool,
}

impl Patch {
    fn capture(model: &Model, classes: &[ResourceClass]) -> Patch {
        Patch {
            classes: classes
                .iter()
                .map(|&c| (c, model.of_class(c).to_vec()))
                .collect(),
            variance: model.variance.clone(),
            generated: model.generated,
        }
    }

    fn restore(&self, model: &mut Model) {
        for (c, rs) in &self.classes {
            model.set_registry(*c, rs.clone());
        }
        model.variance = self.variance.clone();
        model.generated = self.generated;
    }

    fn to_json(&self) -> Json {
        let classes: Map<String, Json> = self
            .classes
            .iter()
            .map(|(c, rs)| {
                (
                    c.collection().to_string(),
                    Json::Array(rs.iter().map(resource_to_json).collect()),
                )
            })
            .collect();
        json!({
            "classes": classes,
            "variance": self.variance.as_ref().map(variance_to_json),
            "generated": self.generated,
        })
    }

    fn from_json(v: &Json) -> Result<Patch> {
        let mut classes = Vec::new();
        for (k, items) in v["classes"].as_object().into_iter().flatten() {
            let class = ResourceClass::from_collection(k)
                .ok_or_else(|| Error::document("/classes", format!("unknown collection {k}")))?;
            let rs = items
                .as_array()
                .into_iter()
                .flatten()
                .map(|r| resource_from_json(class, r))
                .collect::<Result<Vec<_>>>()?;
            classes.push((class, rs));
        }
        classes.sort_by_key(|(c, _)| *c);
        let variance = match &v["variance"] {
            Json::Null => None,
            x => Some(parse_variance(x)?),
        };
        Ok(Patch {
            classes,
            variance,
            generated: v["generated"].as_bool().unwrap_or(false),
        })
    }
}

/// Result of applying one operation.
#[derive(Clone, Debug)]
pub struct Applied {
    pub model: Model,
    pub diff: Diff,
    before: Patch,
    after: Patch,
}

/// Applies `op` to a copy of `model`. The input is never modified; on error
/// nothing is returned but the issue.
pub fn apply(model: &Model, op: &EditOp) -> std::result::Result<Applied, Issue> {
    let mut work = model.clone();
    let fx = ops::run(&mut work, op)?;
    let changed: Vec<ResourceClass> = ResourceClass::ALL
        .into_iter()
        .filter(|&c| model.of_class(c) != work.of_class(c))
        .collect();
    let diff = ops::compare(model, &work, fx);
    Ok(Applied {
        before: Patch::capture(model, &changed),
        after: Patch::capture(&work, &changed),
        model: work,
        diff,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub op: EditOp,
    pub diff: Diff,
    before: Patch,
    after: Patch,
}

/// History of one edit session. Entries before `cursor` are applied.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EditLog {
    entries: Vec<LogEntry>,
    cursor: usize,
}

impl EditLog {
    pub fn new() -> Self {
        EditLog::default()
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn can_undo(&self) -> bool {
        self.cursor > 0
    }

    pub fn can_redo(&self) -> bool {
        self.cursor < self.entries.len()
    }

    /// Applies `op` to `model` and records it, dropping any undone entries.
    pub fn apply(&mut self, model: &mut Model, op: EditOp) -> std::result::Result<&Diff, Issue> {
        let a = apply(model, &op)?;
        *model = a.model;
        self.entries.truncate(self.cursor);
        self.entries.push(LogEntry {
            op,
            diff: a.diff,
            before: a.before,
            after: a.after,
        });
        self.cursor += 1;
        Ok(&self.entries[self.cursor - 1].diff)
    }

    /// Reverts the last applied entry; `None` when there is nothing to undo.
    pub fn undo(&mut self, model: &mut Model) -> Option<&LogEntry> {
        if !self.can_undo() {
            return None;
        }
        self.cursor -= 1;
        let e = &self.entries[self.cursor];
        e.before.restore(model);
        Some(e)
    }

    /// Re-applies the next undone entry; `None` when there is nothing to redo.
    pub fn redo(&mut self, model: &mut Model) -> Option<&LogEntry> {
        if !self.can_redo() {
            return None;
        }
        let e = &self.entries[self.cursor];
        e.after.restore(model);
        self.cursor += 1;
        Some(e)
    }

    pub fn to_json(&self) -> Json {
        let entries: Vec<Json> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "op": serde_json::to_value(&e.op).expect("edit ops serialize"),
                    "diff": e.diff.to_json(),
                    "before": e.before.to_json(),
                    "after": e.after.to_json(),
                })
            })
            .collect();
        json!({"cursor": self.cursor, "entries": entries})
    }

    pub fn from_json(v: &Json) -> Result<EditLog> {
        let mut entries = Vec::new();
        for (i, e) in v["entries"].as_array().into_iter().flatten().enumerate() {
            let op: EditOp = serde_json::from_value(e["op"].clone())?;
            let ptr = format!("/entries/{i}");
            entries.push(LogEntry {
                op,
                diff: Diff::from_json(&e["diff"])?,
                before: Patch::from_json(&e["before"])
                    .map_err(|x| Error::document(&ptr, x.to_string()))?,
                after: Patch::from_json(&e["after"])
                    .map_err(|x| Error::document(&ptr, x.to_string()))?,
            });
        }
        let cursor = v["cursor"].as_u64().unwrap_or(entries.len() as u64) as usize;
        if cursor > entries.len() {
            return Err(Error::document("/cursor", "cursor past the end of the log"));
        }
        Ok(EditLog { entries, cursor })
    }
}

/// An edit-script entry: an operation, or `{"op": "UNDO"}` / `{"op": "REDO"}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Edit(EditOp),
    Undo,
    Redo,
}

pub fn parse_script(text: &str) -> Result<Vec<Step>> {
    let doc: Json = serde_json::from_str(text)?;
    let items = doc
        .as_array()
        .ok_or_else(|| Error::document("", "an edit script is a JSON list of operations"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| match item.get("op").and_then(Json::as_str) {
            Some("UNDO") => Ok(Step::Undo),
            Some("REDO") => Ok(Step::Redo),
            _ => serde_json::from_value(item.clone())
                .map(Step::Edit)
                .map_err(|e| Error::document(format!("/{i}"), e.to_string())),
        })
        .collect()
}

/// Outcome of a script run.
#[derive(Clone, Debug)]
pub struct ScriptRun {
    pub model: Model,
    pub log: EditLog,
    /// One line per step.
    pub summary: Vec<String>,
    /// Every resource touched by the applied edits, by step.
    pub diffs: BTreeMap<usize, Diff>,
}

/// Runs `steps` against `model` with `log` as prior history. All or nothing:
/// the first failing step aborts the run with its index.
pub fn run_script(
    model: &Model,
    steps: &[Step],
    log: EditLog,
) -> std::result::Result<ScriptRun, (usize, Issue)> {
    let mut run = ScriptRun {
        model: model.clone(),
        log,
        summary: Vec::new(),
        diffs: BTreeMap::new(),
    };
    for (i, step) in steps.iter().enumerate() {
        match step {
            Step::Edit(op) => {
                let diff = run
                    .log
                    .apply(&mut run.model, op.clone())
                    .map_err(|e| (i, e))?
                    .clone();
                run.summary.push(format!(
                    "{i}: {} ({} touched)",
                    op_name(op),
                    diff.touched().len()
                ));
                run.diffs.insert(i, diff);
            }
            Step::Undo => {
                let line = match run.log.undo(&mut run.model) {
                    Some(e) => format!("{i}: undo {}", op_name(&e.op)),
                    None => format!("{i}: nothing to undo"),
                };
                run.summary.push(line);
            }
            Step::Redo => {
                let line = match run.log.redo(&mut run.model) {
                    Some(e) => format!("{i}: redo {}", op_name(&e.op)),
                    None => format!("{i}: nothing to redo"),
                };
                run.summary.push(line);
            }
        }
    }
    Ok(run)
}

pub fn op_name(op: &EditOp) -> &'static str {
    match op {
        EditOp::Create { .. } => "CREATE",
        EditOp::Update { .. } => "UPDATE",
        EditOp::Delete { .. } => "DELETE",
        EditOp::Rename { .. } => "RENAME",
        EditOp::CloneSubgraph { .. } => "CLONE_SUBGRAPH",
        EditOp::SplitChain { .. } => "SPLIT_CHAIN",
        EditOp::MergeChains { .. } => "MERGE_CHAINS",
        EditOp::Annotate { .. } => "ANNOTATE",
    }
}
