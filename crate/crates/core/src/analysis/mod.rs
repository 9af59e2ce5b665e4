//! Connectivity analyses over generated models. Results are dynamic groups
//! that can be stored in the model like any other group.

mod neurulator;
mod query;
mod variance;

pub use neurulator::{link_components, neurulate, replace_neurulated, Neurulation};
pub use query::{soma_processes, LocalReachability, QueryBackend};
pub use variance::{filter_by_clade, Visibility};

use crate::id::Identifier;
use crate::model::{GroupOrigin, Resource, ResourceClass};

/// A group computed from the model rather than declared.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicGroup {
    pub id: Identifier,
    pub origin: GroupOrigin,
    /// Start resource of a query.
    pub seed: Option<Identifier>,
    pub links: Vec<Identifier>,
    pub nodes: Vec<Identifier>,
    pub lyphs: Vec<Identifier>,
}

impl DynamicGroup {
    pub fn is_empty(&self) -> bool {
        self.links.is_empty() && self.nodes.is_empty() && self.lyphs.is_empty()
    }

    pub fn to_resource(&self) -> Resource {
        let mut r = Resource::new(ResourceClass::Group, self.id.clone())
            .with("dynamic", true)
            .with("generated", true)
            .with("origin", self.origin.as_str())
            .with(
                "description",
                self.origin.as_str().to_ascii_lowercase().as_str(),
            );
        if let Some(seed) = &self.seed {
            r.set("seed", seed.clone());
        }
        for (prop, ids) in [
            ("links", &self.links),
            ("nodes", &self.nodes),
            ("lyphs", &self.lyphs),
        ] {
            if !ids.is_empty() {
                r.set(prop, ids.clone());
            }
        }
        r
    }
}
