//! The model schema, syntactic validation, reference integrity and issue
//! reporting.

pub mod catalog;
mod references;
mod report;
mod syntax;

pub use catalog::SCHEMA_VERSION;
pub use references::validate_references;
pub use report::{Issue, Location, Severity, ValidationReport};
pub use syntax::{validate_document, validate_syntax, validate_value};
