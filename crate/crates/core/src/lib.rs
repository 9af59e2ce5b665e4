//! Compiler, linker and analysis toolkit for multiscale anatomical
//! connectivity models built from lyphs, links, chains and scaffolds.
//!
//! The usual pipeline is [`document::parse_model`] →
//! [`schema::validate_syntax`] → [`generator::generate`] →
//! [`exporter`]. Models can be combined with [`composer`], analyzed with
//! [`analysis`], laid out with [`layout`] and edited with [`editor`].

// Validation issues are the error type throughout and carry their location.
#![allow(clippy::result_large_err)]

pub mod analysis;
pub mod composer;
pub mod document;
pub mod editor;
pub mod error;
pub mod exporter;
pub mod generator;
pub mod id;
pub mod layout;
pub mod model;
pub mod schema;
pub mod tabular;

pub use error::{Error, Result};
pub use id::{Curie, IdError, Identifier};
pub use model::{GeneratedModel, Model, Resource, ResourceClass, Value};
pub use schema::{Issue, Severity, ValidationReport};
