use std::path::Path;

use calamine::{open_workbook_auto, Data, Reader};

use crate::error::{Error, Result};

use super::{known_pages, Table, Workbook};

/// Reads a workbook from an `.xlsx`/`.xls`/`.ods` file or from a directory of
/// `<page>.csv` files.
pub fn read_workbook(path: &Path) -> Result<Workbook> {
    if path.is_dir() {
        read_csv_dir(path)
    } else {
        read_xlsx(path)
    }
}

pub fn read_xlsx(path: &Path) -> Result<Workbook> {
    let mut book = open_workbook_auto(path)
        .map_err(|e| Error::Workbook(format!("{}: {e}", path.display())))?;
    let mut wb = Workbook::default();
    for name in book.sheet_names() {
        let range = book
            .worksheet_range(&name)
            .map_err(|e| Error::Workbook(format!("{}: sheet {name}: {e}", path.display())))?;
        let mut rows = range
            .rows()
            .map(|row| row.iter().map(cell_text).collect::<Vec<_>>());
        let header = rows.next().unwrap_or_default();
        wb.pages.push((
            name.clone(),
            Table {
                header,
                rows: rows.collect(),
            },
        ));
    }
    Ok(wb)
}

fn cell_text(cell: &Data) -> String {
    match cell {
        Data::Empty => String::new(),
        Data::Bool(true) => "TRUE".into(),
        Data::Bool(false) => "FALSE".into(),
        Data::Float(x) => x.to_string(),
        other => other.to_string(),
    }
}

/// Reads every `*.csv` file of `dir` as a page named after the file stem.
/// Known pages come first in canonical order, others follow by name.
pub fn read_csv_dir(dir: &Path) -> Result<Workbook> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                files.push((stem.to_string(), path.clone()));
            }
        }
    }
    let known = known_pages();
    files.sort_by_key(|(name, _)| {
        (
            known.iter().position(|k| k == name).unwrap_or(usize::MAX),
            name.clone(),
        )
    });
    let mut wb = Workbook::default();
    for (name, path) in files {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(&path)?;
        let mut rows = Vec::new();
        for record in reader.records() {
            rows.push(record?.iter().map(str::to_string).collect::<Vec<_>>());
        }
        let mut rows = rows.into_iter();
        let header = rows.next().unwrap_or_default();
        wb.pages.push((
            name,
            Table {
                header,
                rows: rows.collect(),
            },
        ));
    }
    Ok(wb)
}

/// Writes one `<page>.csv` file per page into `dir`, creating it if needed.
pub fn write_csv_dir(wb: &Workbook, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, table) in &wb.pages {
        let path = dir.join(format!("{name}.csv"));
        let mut writer = csv::WriterBuilder::new().flexible(true).from_path(&path)?;
        writer.write_record(&table.header)?;
        for row in &table.rows {
            writer.write_record(row)?;
        }
        writer.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
