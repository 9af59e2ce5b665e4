use std::collections::{BTreeSet, HashSet};

use crate::id::{Curie, Identifier};
use crate::model::{ImportRef, Model, Resource, ResourceClass, Value, VarianceSpec};
use crate::schema::catalog::{self, PropKind};
use crate::schema::{Issue, ValidationReport};

use super::{column_name, Table, Workbook, MAIN_PAGE, VARIANCE_PAGE};

/// Splits a list cell on `,`, trimming items. Empty items are dropped; the
/// second value tells whether any were found.
pub fn split_list(cell: &str) -> (Vec<&str>, bool) {
    let mut dropped = false;
    let items = cell
        .split(',')
        .map(str::trim)
        .filter(|s| {
            dropped |= s.is_empty();
            !s.is_empty()
        })
        .collect();
    (items, dropped)
}

/// Converts a workbook into a model. Each data row becomes one flat resource.
pub fn workbook_to_spec(wb: &Workbook) -> (Model, ValidationReport) {
    let mut model = Model::new();
    let mut report = ValidationReport::new();
    for (name, table) in &wb.pages {
        if name == MAIN_PAGE {
            read_main(table, &mut model, &mut report);
        } else if name == VARIANCE_PAGE {
            continue;
        } else if let Some(class) = ResourceClass::from_collection(name) {
            read_page(class, name, table, &mut model, &mut report);
        } else {
            report.push(
                Issue::warning(
                    "unknown-page",
                    format!("page {name:?} is not a resource page; ignored"),
                )
                .at(format!("{name}!A1")),
            );
        }
    }
    if let Some(table) = wb.page(VARIANCE_PAGE) {
        read_variances(table, &mut model, &mut report);
    }
    (model, report)
}

fn read_main(table: &Table, model: &mut Model, report: &mut ValidationReport) {
    // Two columns, key and value. A header of exactly "key,value" is skipped.
    let mut rows: Vec<&[String]> = Vec::new();
    let skipped = table.header.len() >= 2 && table.header[0] == "key" && table.header[1] == "value";
    if !skipped {
        rows.push(&table.header);
    }
    rows.extend(table.rows.iter().map(Vec::as_slice));
    let first_line = if skipped { 2 } else { 1 };
    for (i, row) in rows.iter().enumerate() {
        let line = first_line + i;
        let key = row.first().map(|s| s.trim()).unwrap_or("");
        let value = row.get(1).map(|s| s.trim()).unwrap_or("");
        if key.is_empty() || value.is_empty() {
            continue;
        }
        let at = format!("{MAIN_PAGE}!B{line}");
        match key {
            "id" => model.id = Some(value.to_string()),
            "name" => model.name = Some(value.to_string()),
            "namespace" => model.namespace = Some(value.to_string()),
            "description" => model.description = Some(value.to_string()),
            "schemaVersion" => model.schema_version = Some(value.to_string()),
            "imports" => {
                let (items, dropped) = split_list(value);
                if dropped {
                    report.push(empty_item_warning(&at));
                }
                model.imports = items.into_iter().map(ImportRef::new).collect();
            }
            "clades" => {
                let (items, dropped) = split_list(value);
                if dropped {
                    report.push(empty_item_warning(&at));
                }
                model
                    .variance
                    .get_or_insert_with(VarianceSpec::default)
                    .clades = items.into_iter().map(str::to_string).collect();
            }
            other => report.push(
                Issue::warning(
                    "unknown-property",
                    format!("unknown main-page key {other:?}"),
                )
                .at(format!("{MAIN_PAGE}!A{line}")),
            ),
        }
    }
}

fn read_page(
    class: ResourceClass,
    page: &str,
    table: &Table,
    model: &mut Model,
    report: &mut ValidationReport,
) {
    let Some(id_col) = table.header.iter().position(|h| h.trim() == "id") else {
        if !table.rows.is_empty() {
            report.push(
                Issue::error("missing-id", format!("page {page} has no id column"))
                    .at(format!("{page}!A1")),
            );
        }
        return;
    };
    for (col, h) in table.header.iter().enumerate() {
        let h = h.trim();
        if h != "id" && catalog::property(class, h).is_none() {
            report.push(
                Issue::warning(
                    "unknown-property",
                    format!("{class} has no property {h:?}; kept as text"),
                )
                .at(format!("{page}!{}1", column_name(col))),
            );
        }
    }
    for (r, row) in table.rows.iter().enumerate() {
        let line = r + 2;
        if row.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let raw_id = row.get(id_col).map(|s| s.trim()).unwrap_or("");
        if raw_id.is_empty() {
            report.push(
                Issue::error("missing-id", format!("row {line} of page {page} has no id"))
                    .at(format!("{page}!{}{line}", column_name(id_col))),
            );
            continue;
        }
        let id = match Identifier::parse(raw_id) {
            Ok(id) => id,
            Err(e) => {
                report.push(
                    Issue::error("bad-identifier", e.to_string())
                        .at(format!("{page}!{}{line}", column_name(id_col))),
                );
                continue;
            }
        };
        let mut res = Resource::new(class, id.clone());
        res.origin = Some(format!("{page}!A{line}"));
        for (col, header) in table.header.iter().enumerate() {
            let header = header.trim();
            let cell = row.get(col).map(|s| s.trim()).unwrap_or("");
            if col == id_col || cell.is_empty() {
                continue;
            }
            let at = format!("{page}!{}{line}", column_name(col));
            let value = match catalog::property(class, header) {
                Some(spec) => parse_cell(spec.kind, cell, &at, report),
                None => Some(Value::Other(serde_json::Value::String(cell.to_string()))),
            };
            match value {
                Some(v) => res.props.insert(header.to_string(), v),
                None => None,
            };
        }
        model.push(res);
    }
}

fn parse_cell(
    kind: PropKind,
    cell: &str,
    at: &str,
    report: &mut ValidationReport,
) -> Option<Value> {
    let bad = |report: &mut ValidationReport, what: &str| {
        report.push(Issue::error("bad-cell", format!("cannot read {cell:?} as {what}")).at(at));
        None
    };
    match kind {
        PropKind::Bool => match cell.to_ascii_uppercase().as_str() {
            "TRUE" => Some(Value::Bool(true)),
            "FALSE" => Some(Value::Bool(false)),
            _ => bad(report, "TRUE or FALSE"),
        },
        PropKind::Int { .. } => match cell.parse::<i64>() {
            Ok(i) => Some(Value::Int(i)),
            // Spreadsheet apps often store integers as "3.0".
            Err(_) => match cell.parse::<f64>() {
                Ok(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Some(Value::Int(x as i64)),
                _ => bad(report, "an integer"),
            },
        },
        PropKind::Number | PropKind::Fraction => match cell.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(Value::Number(x)),
            _ => bad(report, "a decimal number"),
        },
        PropKind::Text | PropKind::Enum(_) => Some(Value::Text(cell.to_string())),
        PropKind::Coords { .. } => {
            let parsed: Result<Vec<f64>, _> =
                cell.split_whitespace().map(str::parse::<f64>).collect();
            match parsed {
                Ok(c) if !c.is_empty() => Some(Value::Coords(c)),
                _ => bad(report, "space-separated coordinates"),
            }
        }
        PropKind::Ref(_) => match Identifier::parse(cell) {
            Ok(id) => Some(Value::Ref(id)),
            Err(e) => {
                report.push(Issue::error("bad-identifier", e.to_string()).at(at));
                None
            }
        },
        PropKind::Refs(_) => {
            let (items, dropped) = split_list(cell);
            if dropped {
                report.push(empty_item_warning(at));
            }
            let mut ids = Vec::new();
            for item in items {
                match Identifier::parse(item) {
                    Ok(id) => ids.push(id),
                    Err(e) => report.push(Issue::error("bad-identifier", e.to_string()).at(at)),
                }
            }
            Some(Value::Refs(ids))
        }
        PropKind::Terms => {
            let (items, dropped) = split_list(cell);
            if dropped {
                report.push(empty_item_warning(at));
            }
            let mut terms = Vec::new();
            for item in items {
                match Curie::parse(item) {
                    Ok(t) => terms.push(t),
                    Err(e) => report.push(Issue::error("bad-curie", e.to_string()).at(at)),
                }
            }
            Some(Value::Terms(terms))
        }
    }
}

fn read_variances(table: &Table, model: &mut Model, report: &mut ValidationReport) {
    let variance = model.variance.get_or_insert_with(VarianceSpec::default);
    let declared: HashSet<String> = variance.clades.iter().cloned().collect();
    for (r, row) in table.rows.iter().enumerate() {
        let line = r + 2;
        let (Some(id), Some(clades)) = (table.cell(row, "id"), table.cell(row, "clades")) else {
            continue;
        };
        let id = match Identifier::parse(id.trim()) {
            Ok(id) => id,
            Err(e) => {
                report.push(
                    Issue::error("bad-identifier", e.to_string())
                        .at(format!("{VARIANCE_PAGE}!A{line}")),
                );
                continue;
            }
        };
        let (items, dropped) = split_list(clades);
        if dropped {
            report.push(empty_item_warning(&format!("{VARIANCE_PAGE}!B{line}")));
        }
        let mut set = BTreeSet::new();
        for c in items {
            if !declared.contains(c) {
                report.push(
                    Issue::error(
                        "undeclared-clade",
                        format!("clade {c:?} is not declared on the main page"),
                    )
                    .at(format!("{VARIANCE_PAGE}!B{line}")),
                );
            }
            set.insert(c.to_string());
        }
        variance.presence.insert(id, set);
    }
}

fn empty_item_warning(at: &str) -> Issue {
    Issue::warning("empty-list-item", "empty list element dropped").at(at)
}

/// Converts a model into a workbook. Pages without rows are omitted;
/// imported resources are left out. Inline definitions must already be
/// hoisted (as [`parse_model`](crate::document::parse_model) does).
pub fn spec_to_workbook(model: &Model) -> Workbook {
    let mut wb = Workbook::default();
    let mut main = Table::new(vec!["key".into(), "value".into()]);
    let mut kv = |k: &str, v: &Option<String>| {
        if let Some(v) = v {
            main.rows.push(vec![k.to_string(), v.clone()]);
        }
    };
    kv("id", &model.id);
    kv("name", &model.name);
    kv("namespace", &model.namespace);
    kv("description", &model.description);
    kv("schemaVersion", &model.schema_version);
    if !model.imports.is_empty() {
        let urls: Vec<&str> = model.imports.iter().map(|i| i.url.as_str()).collect();
        main.rows.push(vec!["imports".into(), urls.join(",")]);
    }
    if let Some(v) = &model.variance {
        if !v.clades.is_empty() {
            main.rows.push(vec!["clades".into(), v.clades.join(",")]);
        }
    }
    if !main.rows.is_empty() {
        wb.pages.push((MAIN_PAGE.to_string(), main));
    }

    for class in ResourceClass::ALL {
        let resources: Vec<&Resource> = model
            .of_class(class)
            .iter()
            .filter(|r| !r.is_external())
            .collect();
        if resources.is_empty() {
            continue;
        }
        let columns: BTreeSet<&str> = resources
            .iter()
            .flat_map(|r| r.props.keys().map(String::as_str))
            .collect();
        let mut header = vec!["id".to_string()];
        header.extend(columns.iter().map(|c| c.to_string()));
        let mut table = Table::new(header);
        for r in resources {
            let mut row = vec![r.id.to_string()];
            row.extend(
                columns
                    .iter()
                    .map(|c| r.get(c).map(format_cell).unwrap_or_default()),
            );
            table.rows.push(row);
        }
        wb.pages.push((class.collection().to_string(), table));
    }

    if let Some(v) = &model.variance {
        if !v.presence.is_empty() {
            let mut table = Table::new(vec!["id".into(), "clades".into()]);
            for (id, clades) in &v.presence {
                let list: Vec<&str> = clades.iter().map(String::as_str).collect();
                table.rows.push(vec![id.to_string(), list.join(",")]);
            }
            wb.pages.push((VARIANCE_PAGE.to_string(), table));
        }
    }
    wb
}

fn format_cell(v: &Value) -> String {
    match v {
        Value::Bool(true) => "TRUE".into(),
        Value::Bool(false) => "FALSE".into(),
        Value::Int(i) => i.to_string(),
        Value::Number(x) => x.to_string(),
        Value::Text(s) => s.clone(),
        Value::Coords(c) => c.iter().map(f64::to_string).collect::<Vec<_>>().join(" "),
        Value::Ref(id) => id.to_string(),
        Value::Refs(ids) => ids
            .iter()
            .map(Identifier::to_string)
            .collect::<Vec<_>>()
            .join(","),
        Value::Terms(t) => t.iter().map(Curie::to_string).collect::<Vec<_>>().join(","),
        Value::Other(serde_json::Value::String(s)) => s.clone(),
        Value::Other(j) => j.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(header: &[&str], rows: &[&[&str]]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    #[test]
    fn lyph_row_with_two_layers() {
        let wb = Workbook {
            pages: vec![(
                "lyphs".into(),
                table(&["id", "layers"], &[&["K_77", "K_85,K_86"]]),
            )],
        };
        let (m, report) = workbook_to_spec(&wb);
        assert!(report.is_empty(), "{report}");
        let l = m.get(&Identifier::local("K_77")).unwrap();
        assert_eq!(l.references("layers").len(), 2);
    }

    #[test]
    fn main_only_workbook_is_empty_model() {
        let wb = Workbook {
            pages: vec![("main".into(), table(&["key", "value"], &[]))],
        };
        let (m, report) = workbook_to_spec(&wb);
        assert!(m.is_empty());
        assert!(report.is_empty());
    }

    #[test]
    fn empty_list_element_warns() {
        assert_eq!(split_list("a,,b"), (vec!["a", "b"], true));
        let wb = Workbook {
            pages: vec![("lyphs".into(), table(&["id", "layers"], &[&["L", "a,,b"]]))],
        };
        let (m, report) = workbook_to_spec(&wb);
        assert_eq!(report.count("empty-list-item"), 1);
        assert_eq!(
            m.get(&Identifier::local("L"))
                .unwrap()
                .references("layers")
                .len(),
            2
        );
    }

    #[test]
    fn missing_id_has_row_coordinate() {
        let wb = Workbook {
            pages: vec![(
                "nodes".into(),
                table(&["name", "id"], &[&["a", "n1"], &["b", ""]]),
            )],
        };
        let (_, report) = workbook_to_spec(&wb);
        assert!(report.has_errors());
        assert_eq!(report.issues[0].location.pointer, "nodes!B3");
    }

    #[test]
    fn booleans_are_case_insensitive_and_coords_split() {
        let wb = Workbook {
            pages: vec![(
                "nodes".into(),
                table(&["id", "fixed", "layout"], &[&["n", "true", "1 2 3"]]),
            )],
        };
        let (m, _) = workbook_to_spec(&wb);
        let n = m.get(&Identifier::local("n")).unwrap();
        assert!(n.flag("fixed"));
        assert_eq!(n.coords("layout"), Some(&[1.0, 2.0, 3.0][..]));
    }

    #[test]
    fn empty_pages_are_omitted() {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Lyph, Identifier::local("L")));
        let wb = spec_to_workbook(&m);
        assert_eq!(wb.page_names(), ["lyphs"]);
    }

    #[test]
    fn unknown_page_warns() {
        let wb = Workbook {
            pages: vec![("notes".into(), table(&["x"], &[]))],
        };
        let (_, report) = workbook_to_spec(&wb);
        assert_eq!(report.count("unknown-page"), 1);
    }
}
