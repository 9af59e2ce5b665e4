use std::fmt;

use crate::id::Identifier;

/// Issue severity. `Warning` never blocks export; `Error` does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn letter(self) -> char {
        match self {
            Severity::Warning => 'W',
            Severity::Error => 'E',
        }
    }
}

/// Where an issue was found: a file (when known) and a JSON pointer into it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub file: Option<String>,
    pub pointer: String,
}

impl Location {
    pub fn pointer(pointer: impl Into<String>) -> Self {
        Location {
            file: None,
            pointer: pointer.into(),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ptr = if self.pointer.is_empty() {
            "/"
        } else {
            &self.pointer
        };
        match &self.file {
            Some(file) => write!(f, "{file}#{ptr}"),
            None => write!(f, "#{ptr}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub resource: Option<Identifier>,
    pub location: Location,
}

impl Issue {
    pub fn new(severity: Severity, code: &str, message: impl Into<String>) -> Self {
        Issue {
            severity,
            code: code.to_string(),
            message: message.into(),
            resource: None,
            location: Location::default(),
        }
    }

    pub fn error(code: &str, message: impl Into<String>) -> Self {
        Issue::new(Severity::Error, code, message)
    }

    pub fn warning(code: &str, message: impl Into<String>) -> Self {
        Issue::new(Severity::Warning, code, message)
    }

    pub fn on(mut self, id: &Identifier) -> Self {
        self.resource = Some(id.clone());
        self
    }

    pub fn at(mut self, pointer: impl Into<String>) -> Self {
        self.location.pointer = pointer.into();
        self
    }

    fn sort_key(&self) -> impl Ord + '_ {
        (
            std::cmp::Reverse(self.severity),
            &self.location,
            &self.code,
            self.resource.as_ref().map(|r| r.to_string()),
            &self.message,
        )
    }

    /// One-line rendering: `<E|W> <code> <location> <resource|-> <message>`.
    pub fn render(&self) -> String {
        let resource = self
            .resource
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string);
        format!(
            "{} {} {} {} {}",
            self.severity.letter(),
            self.code,
            self.location,
            resource,
            self.message.replace('\n', " ")
        )
    }
}

/// A list of issues with a derived maximum severity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }

    /// `None` when the report is empty.
    pub fn max_severity(&self) -> Option<Severity> {
        self.issues.iter().map(|i| i.severity).max()
    }

    pub fn has_errors(&self) -> bool {
        self.max_severity() == Some(Severity::Error)
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Warning)
    }

    pub fn count(&self, code: &str) -> usize {
        self.issues.iter().filter(|i| i.code == code).count()
    }

    /// Sets the file of every issue that does not name one yet.
    pub fn in_file(mut self, file: &str) -> Self {
        for issue in &mut self.issues {
            if issue.location.file.is_none() {
                issue.location.file = Some(file.to_string());
            }
        }
        self
    }

    /// 0 for a clean report, 1 with warnings only, 2 with errors.
    pub fn exit_code(&self) -> i32 {
        match self.max_severity() {
            None => 0,
            Some(Severity::Warning) => 1,
            Some(Severity::Error) => 2,
        }
    }

    /// Stable rendering: `OK` when empty, otherwise one issue per line with
    /// errors first.
    pub fn render(&self) -> String {
        if self.issues.is_empty() {
            return "OK\n".to_string();
        }
        let mut sorted: Vec<&Issue> = self.issues.iter().collect();
        sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut out = String::new();
        for issue in sorted {
            out.push_str(&issue.render());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Issue> for ValidationReport {
    fn from(issue: Issue) -> Self {
        ValidationReport {
            issues: vec![issue],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_renders_ok() {
        let r = ValidationReport::new();
        assert_eq!(r.render(), "OK\n");
        assert_eq!(r.max_severity(), None);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn warning_line_prefix() {
        let r = ValidationReport::from(Issue::warning("duplicate-id", "dup").at("/lyphs/1"));
        assert!(r.render().starts_with("W "));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn errors_sort_first() {
        let mut r = ValidationReport::new();
        r.push(Issue::warning("a", "first pushed").at("/a"));
        r.push(Issue::error("z", "second pushed").at("/z"));
        let text = r.render();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("E z"));
        assert!(lines[1].starts_with("W a"));
        assert_eq!(r.max_severity(), Some(Severity::Error));
    }
}
