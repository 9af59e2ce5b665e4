//! Spreadsheet workbooks: one page per resource class plus a `main` page of
//! model metadata and a `variances` page of per-clade presence.

mod convert;
mod files;

pub use convert::{spec_to_workbook, split_list, workbook_to_spec};
pub use files::{read_csv_dir, read_workbook, read_xlsx, write_csv_dir};

/// One page: a header row of property names and data rows of cell text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    /// Cell of `row` under column `name`; empty when the row is short.
    pub fn cell<'a>(&'a self, row: &'a [String], name: &str) -> Option<&'a str> {
        let col = self.header.iter().position(|h| h == name)?;
        row.get(col).map(String::as_str)
    }
}

/// Ordered pages of a workbook.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workbook {
    pub pages: Vec<(String, Table)>,
}

impl Workbook {
    pub fn page(&self, name: &str) -> Option<&Table> {
        self.pages.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn page_names(&self) -> Vec<&str> {
        self.pages.iter().map(|(n, _)| n.as_str()).collect()
    }
}

pub const MAIN_PAGE: &str = "main";
pub const VARIANCE_PAGE: &str = "variances";

/// Page names in canonical order.
pub fn known_pages() -> Vec<&'static str> {
    let mut pages = vec![MAIN_PAGE];
    pages.extend(
        crate::model::ResourceClass::ALL
            .iter()
            .map(|c| c.collection()),
    );
    pages.push(VARIANCE_PAGE);
    pages
}

/// Spreadsheet column letters for a 0-based index (`0` → `A`, `26` → `AA`).
pub(crate) fn column_name(mut idx: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (idx % 26) as u8);
        if idx < 26 {
            break;
        }
        idx = idx / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

#[cfg(test)]
mod tests {
    #[test]
    fn column_names() {
        assert_eq!(super::column_name(0), "A");
        assert_eq!(super::column_name(25), "Z");
        assert_eq!(super::column_name(26), "AA");
        assert_eq!(super::column_name(27), "AB");
    }
}
