#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lyphforge::composer::{resolve_imports, CachePolicy, FileFetcher};
use lyphforge::document::read_model;
use lyphforge::generator::{generate, Generated};
use lyphforge::Model;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

/// Every fixture model, sorted by file name.
pub fn fixture_paths() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .expect("fixture directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    out
}

pub fn file_name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

/// Reads a fixture and links its imports from the fixture directory.
pub fn load_linked(path: &Path) -> Result<Model, String> {
    let spec = read_model(path).map_err(|e| format!("{}: {e}", file_name(path)))?;
    if spec.imports.is_empty() {
        return Ok(spec);
    }
    let linked = resolve_imports(&spec, path.to_str(), &FileFetcher, CachePolicy::AlwaysFetch);
    if linked.report.has_errors() {
        return Err(format!("{}: {}", file_name(path), linked.report.render()));
    }
    Ok(linked.model)
}

pub fn generate_fixture(path: &Path) -> Result<Generated, String> {
    let spec = load_linked(path)?;
    generate(&spec).map_err(|r| format!("{}: {}", file_name(path), r.render()))
}
