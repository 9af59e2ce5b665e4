use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The resource classes of the vocabulary.
///
/// The declaration order is the canonical order of class collections in a
/// serialized document and in a [`Model`](super::Model)'s storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResourceClass {
    Node,
    Link,
    Lyph,
    Material,
    Chain,
    Group,
    Coalescence,
    Scaffold,
    Anchor,
    Wire,
    Region,
}

impl ResourceClass {
    pub const COUNT: usize = 11;

    pub const ALL: [ResourceClass; Self::COUNT] = [
        ResourceClass::Node,
        ResourceClass::Link,
        ResourceClass::Lyph,
        ResourceClass::Material,
        ResourceClass::Chain,
        ResourceClass::Group,
        ResourceClass::Coalescence,
        ResourceClass::Scaffold,
        ResourceClass::Anchor,
        ResourceClass::Wire,
        ResourceClass::Region,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ResourceClass::Node => "Node",
            ResourceClass::Link => "Link",
            ResourceClass::Lyph => "Lyph",
            ResourceClass::Material => "Material",
            ResourceClass::Chain => "Chain",
            ResourceClass::Group => "Group",
            ResourceClass::Coalescence => "Coalescence",
            ResourceClass::Scaffold => "Scaffold",
            ResourceClass::Anchor => "Anchor",
            ResourceClass::Wire => "Wire",
            ResourceClass::Region => "Region",
        }
    }

    /// Key of the class collection in a model document (also the workbook page name).
    pub fn collection(self) -> &'static str {
        match self {
            ResourceClass::Node => "nodes",
            ResourceClass::Link => "links",
            ResourceClass::Lyph => "lyphs",
            ResourceClass::Material => "materials",
            ResourceClass::Chain => "chains",
            ResourceClass::Group => "groups",
            ResourceClass::Coalescence => "coalescences",
            ResourceClass::Scaffold => "scaffolds",
            ResourceClass::Anchor => "anchors",
            ResourceClass::Wire => "wires",
            ResourceClass::Region => "regions",
        }
    }

    pub fn from_collection(key: &str) -> Option<ResourceClass> {
        ResourceClass::ALL
            .into_iter()
            .find(|c| c.collection() == key)
    }
}

impl fmt::Display for ResourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResourceClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResourceClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown resource class {s:?}"))
    }
}
