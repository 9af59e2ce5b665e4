mod common;

use rust_xlsxwriter::Workbook as XlsxWorkbook;

use common::fixture;
use lyphforge::document::{read_model, serialize_spec};
use lyphforge::tabular::{read_xlsx, spec_to_workbook, workbook_to_spec, Workbook};

fn write_xlsx(wb: &Workbook, path: &std::path::Path) {
    let mut out = XlsxWorkbook::new();
    for (name, table) in &wb.pages {
        let sheet = out.add_worksheet();
        sheet.set_name(name).unwrap();
        for (c, h) in table.header.iter().enumerate() {
            sheet.write_string(0, c as u16, h).unwrap();
        }
        for (r, row) in table.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if !cell.is_empty() {
                    sheet.write_string(r as u32 + 1, c as u16, cell).unwrap();
                }
            }
        }
    }
    out.save(path).unwrap();
}

#[test]
fn fixtures_survive_an_xlsx_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "bladder.json",
        "variance.json",
        "too_scaffold.json",
        "materials.json",
    ] {
        let spec = read_model(&fixture(name)).unwrap();
        let path = dir.path().join(name.replace(".json", ".xlsx"));
        write_xlsx(&spec_to_workbook(&spec), &path);
        let (back, report) = workbook_to_spec(&read_xlsx(&path).unwrap());
        assert!(!report.has_errors(), "{name}: {}", report.render());
        assert_eq!(serialize_spec(&back), serialize_spec(&spec), "{name}");
    }
}

#[test]
fn numeric_cells_are_read_as_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.xlsx");
    let mut out = XlsxWorkbook::new();
    let sheet = out.add_worksheet();
    sheet.set_name("chains").unwrap();
    sheet.write_string(0, 0, "id").unwrap();
    sheet.write_string(0, 1, "numLevels").unwrap();
    sheet.write_string(1, 0, "c").unwrap();
    sheet.write_number(1, 1, 3.0).unwrap();
    out.save(&path).unwrap();
    let (spec, report) = workbook_to_spec(&read_xlsx(&path).unwrap());
    assert!(!report.has_errors(), "{}", report.render());
    let c = spec.get(&lyphforge::Identifier::local("c")).unwrap();
    assert_eq!(c.int("numLevels"), Some(3));
}
