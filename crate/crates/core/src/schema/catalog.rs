//! The published model schema: every property of every resource class,
//! with its value kind.
//!
//! Parsing, syntax validation, reference integrity, relation closure, the
//! workbook converter and the JSON-LD context are all driven by this table.

use crate::model::ResourceClass::{self, *};

/// Version of the schema shipped with this crate.
pub const SCHEMA_VERSION: &str = "1.0";

pub const TOPOLOGIES: &[&str] = &["TUBE", "BAG-left", "BAG-right", "CYST"];
pub const COALESCENCE_KINDS: &[&str] = &["EMBEDDING", "CONNECTING"];
pub const WIRE_GEOMETRIES: &[&str] = &["LINE", "ARC", "SPLINE"];
pub const LINK_GEOMETRIES: &[&str] = &["LINE", "SPLINE"];
pub const GROUP_ORIGINS: &[&str] = &["NEURULATED", "QUERY", "VARIANCE"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropKind {
    Bool,
    /// Integer not smaller than `min`.
    Int {
        min: i64,
    },
    Number,
    /// Number in `[0, 1]`.
    Fraction,
    Text,
    Enum(&'static [&'static str]),
    /// Coordinate vector of `min..=max` components.
    Coords {
        min: usize,
        max: usize,
    },
    Ref(&'static [ResourceClass]),
    Refs(&'static [ResourceClass]),
    Terms,
}

impl PropKind {
    pub fn targets(&self) -> &'static [ResourceClass] {
        match self {
            PropKind::Ref(t) | PropKind::Refs(t) => t,
            _ => &[],
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, PropKind::Ref(_) | PropKind::Refs(_))
    }

    pub fn is_list(&self) -> bool {
        matches!(
            self,
            PropKind::Refs(_) | PropKind::Terms | PropKind::Coords { .. }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropertySpec {
    pub name: &'static str,
    pub kind: PropKind,
    /// List order is meaningful (affects JSON-LD list containers).
    pub ordered: bool,
}

const fn p(name: &'static str, kind: PropKind) -> PropertySpec {
    PropertySpec {
        name,
        kind,
        ordered: false,
    }
}

const fn ordered(name: &'static str, kind: PropKind) -> PropertySpec {
    PropertySpec {
        name,
        kind,
        ordered: true,
    }
}

const NODE: &[ResourceClass] = &[Node];
const LINK: &[ResourceClass] = &[Link];
const LYPH: &[ResourceClass] = &[Lyph];
const MATERIAL: &[ResourceClass] = &[Material];
const CHAIN: &[ResourceClass] = &[Chain];
const GROUP: &[ResourceClass] = &[Group];
const COALESCENCE: &[ResourceClass] = &[Coalescence];
const SCAFFOLD: &[ResourceClass] = &[Scaffold];
const ANCHOR: &[ResourceClass] = &[Anchor];
const WIRE: &[ResourceClass] = &[Wire];
const REGION: &[ResourceClass] = &[Region];
const LYPH_OR_MATERIAL: &[ResourceClass] = &[Lyph, Material];
const ANCHOR_OR_WIRE: &[ResourceClass] = &[Anchor, Wire];
const WIRE_OR_REGION: &[ResourceClass] = &[Wire, Region];
const LYPH_OR_GROUP: &[ResourceClass] = &[Lyph, Group];
const ANY: &[ResourceClass] = &ResourceClass::ALL;

/// Properties shared by every class (besides `id`).
const COMMON: &[PropertySpec] = &[
    p("name", PropKind::Text),
    p("description", PropKind::Text),
    p("ontologyTerms", PropKind::Terms),
    p("generated", PropKind::Bool),
    p("isVisible", PropKind::Bool),
    p("external", PropKind::Bool),
];

const NODE_PROPS: &[PropertySpec] = &[
    p("layout", PropKind::Coords { min: 2, max: 3 }),
    p("fixed", PropKind::Bool),
    p("controlNodes", PropKind::Refs(NODE)),
    p("hostedBy", PropKind::Ref(LINK)),
    p("offset", PropKind::Fraction),
    p("internalIn", PropKind::Ref(LYPH)),
    p("borderIn", PropKind::Refs(LYPH)),
    p("anchoredTo", PropKind::Ref(ANCHOR)),
    p("sourceOf", PropKind::Refs(LINK)),
    p("targetOf", PropKind::Refs(LINK)),
    p("rootOf", PropKind::Refs(CHAIN)),
    p("leafOf", PropKind::Refs(CHAIN)),
];

const LINK_PROPS: &[PropertySpec] = &[
    p("source", PropKind::Ref(NODE)),
    p("target", PropKind::Ref(NODE)),
    p("conveyingLyph", PropKind::Ref(LYPH)),
    p("hostedNodes", PropKind::Refs(NODE)),
    p("levelIn", PropKind::Ref(CHAIN)),
    p("housedIn", PropKind::Ref(LYPH)),
    p("length", PropKind::Number),
    p("geometry", PropKind::Enum(LINK_GEOMETRIES)),
];

const LYPH_PROPS: &[PropertySpec] = &[
    p("isTemplate", PropKind::Bool),
    p("supertype", PropKind::Ref(LYPH)),
    p("subtypes", PropKind::Refs(LYPH)),
    ordered("layers", PropKind::Refs(LYPH_OR_MATERIAL)),
    p("layerIn", PropKind::Ref(LYPH)),
    p("internalLyphs", PropKind::Refs(LYPH)),
    p("internalNodes", PropKind::Refs(NODE)),
    p("internalIn", PropKind::Ref(LYPH)),
    p("conveys", PropKind::Ref(LINK)),
    p("topology", PropKind::Enum(TOPOLOGIES)),
    p("hostedBy", PropKind::Ref(REGION)),
    p("angle", PropKind::Number),
    p("materials", PropKind::Refs(LYPH_OR_MATERIAL)),
    p("materialIn", PropKind::Refs(LYPH_OR_MATERIAL)),
];

const MATERIAL_PROPS: &[PropertySpec] = &[
    p("materials", PropKind::Refs(LYPH_OR_MATERIAL)),
    p("materialIn", PropKind::Refs(LYPH_OR_MATERIAL)),
    p("layerIn", PropKind::Refs(LYPH)),
];

const CHAIN_PROPS: &[PropertySpec] = &[
    p("numLevels", PropKind::Int { min: 1 }),
    p("lyphTemplate", PropKind::Ref(LYPH)),
    ordered("lyphs", PropKind::Refs(LYPH)),
    ordered("housingLyphs", PropKind::Refs(LYPH)),
    ordered("levels", PropKind::Refs(LINK)),
    p("root", PropKind::Ref(NODE)),
    p("leaf", PropKind::Ref(NODE)),
    p("wiredTo", PropKind::Ref(WIRE)),
    p("startFromLeaf", PropKind::Bool),
    p("hostedBy", PropKind::Ref(REGION)),
];

const GROUP_PROPS: &[PropertySpec] = &[
    p("nodes", PropKind::Refs(NODE)),
    p("links", PropKind::Refs(LINK)),
    p("lyphs", PropKind::Refs(LYPH)),
    p("materials", PropKind::Refs(MATERIAL)),
    p("chains", PropKind::Refs(CHAIN)),
    p("coalescences", PropKind::Refs(COALESCENCE)),
    p("groups", PropKind::Refs(GROUP)),
    p("scaffolds", PropKind::Refs(SCAFFOLD)),
    p("anchors", PropKind::Refs(ANCHOR)),
    p("wires", PropKind::Refs(WIRE)),
    p("regions", PropKind::Refs(REGION)),
    p("dynamic", PropKind::Bool),
    p("origin", PropKind::Enum(GROUP_ORIGINS)),
    p("seed", PropKind::Ref(ANY)),
];

const COALESCENCE_PROPS: &[PropertySpec] = &[
    p("lyphs", PropKind::Refs(LYPH)),
    p("kind", PropKind::Enum(COALESCENCE_KINDS)),
];

const SCAFFOLD_PROPS: &[PropertySpec] = &[
    p("anchors", PropKind::Refs(ANCHOR)),
    p("wires", PropKind::Refs(WIRE)),
    p("regions", PropKind::Refs(REGION)),
];

const ANCHOR_PROPS: &[PropertySpec] = &[
    p("layout", PropKind::Coords { min: 2, max: 2 }),
    p("hostedBy", PropKind::Ref(WIRE_OR_REGION)),
    p("offset", PropKind::Fraction),
];

const WIRE_PROPS: &[PropertySpec] = &[
    p("source", PropKind::Ref(ANCHOR)),
    p("target", PropKind::Ref(ANCHOR)),
    p("geometry", PropKind::Enum(WIRE_GEOMETRIES)),
    p("arcCenter", PropKind::Coords { min: 2, max: 2 }),
    p("controlPoint", PropKind::Coords { min: 2, max: 2 }),
];

const REGION_PROPS: &[PropertySpec] = &[
    ordered("border", PropKind::Refs(ANCHOR_OR_WIRE)),
    p("hostedLyphs", PropKind::Refs(LYPH_OR_GROUP)),
];

/// Class-specific properties (excluding the common ones).
pub fn class_properties(class: ResourceClass) -> &'static [PropertySpec] {
    match class {
        Node => NODE_PROPS,
        Link => LINK_PROPS,
        Lyph => LYPH_PROPS,
        Material => MATERIAL_PROPS,
        Chain => CHAIN_PROPS,
        Group => GROUP_PROPS,
        Coalescence => COALESCENCE_PROPS,
        Scaffold => SCAFFOLD_PROPS,
        Anchor => ANCHOR_PROPS,
        Wire => WIRE_PROPS,
        Region => REGION_PROPS,
    }
}

pub fn common_properties() -> &'static [PropertySpec] {
    COMMON
}

/// All known properties of a class: common ones first.
pub fn properties(class: ResourceClass) -> impl Iterator<Item = &'static PropertySpec> {
    COMMON.iter().chain(class_properties(class))
}

pub fn property(class: ResourceClass, name: &str) -> Option<&'static PropertySpec> {
    properties(class).find(|s| s.name == name)
}

/// Reference-valued properties of a class.
pub fn reference_properties(class: ResourceClass) -> impl Iterator<Item = &'static PropertySpec> {
    class_properties(class)
        .iter()
        .filter(|s| s.kind.is_reference())
}

/// Group member list holding resources of `class`.
pub fn group_member_property(class: ResourceClass) -> &'static str {
    class.collection()
}

/// One bidirectional relationship. `forward` lives on `owners`, pointing at
/// `targets`; `inverse` lives on the target and points back.
#[derive(Debug, Clone, Copy)]
pub struct RelationPair {
    pub owners: &'static [ResourceClass],
    pub forward: &'static str,
    pub targets: &'static [ResourceClass],
    pub inverse: &'static str,
}

const fn pair(
    owners: &'static [ResourceClass],
    forward: &'static str,
    targets: &'static [ResourceClass],
    inverse: &'static str,
) -> RelationPair {
    RelationPair {
        owners,
        forward,
        targets,
        inverse,
    }
}

/// Every bidirectional relationship kept in sync.
pub const RELATION_PAIRS: &[RelationPair] = &[
    pair(LYPH, "layers", LYPH_OR_MATERIAL, "layerIn"),
    pair(LINK, "conveyingLyph", LYPH, "conveys"),
    pair(LYPH, "internalNodes", NODE, "internalIn"),
    pair(LYPH, "internalLyphs", LYPH, "internalIn"),
    pair(LINK, "hostedNodes", NODE, "hostedBy"),
    pair(LINK, "source", NODE, "sourceOf"),
    pair(LINK, "target", NODE, "targetOf"),
    pair(CHAIN, "root", NODE, "rootOf"),
    pair(CHAIN, "leaf", NODE, "leafOf"),
    pair(LYPH, "supertype", LYPH, "subtypes"),
    pair(
        LYPH_OR_MATERIAL,
        "materials",
        LYPH_OR_MATERIAL,
        "materialIn",
    ),
    pair(CHAIN, "levels", LINK, "levelIn"),
    pair(REGION, "hostedLyphs", LYPH, "hostedBy"),
];

/// Whether `(class, prop)` is the inverse side of some relation pair.
pub fn is_inverse_side(class: ResourceClass, prop: &str) -> bool {
    RELATION_PAIRS
        .iter()
        .any(|r| r.inverse == prop && r.targets.contains(&class))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_pairs_reference_catalog_properties() {
        for r in RELATION_PAIRS {
            for &o in r.owners {
                let spec = property(o, r.forward).unwrap_or_else(|| panic!("{o}.{}", r.forward));
                for t in r.targets {
                    assert!(spec.kind.targets().contains(t), "{o}.{} -> {t}", r.forward);
                    let inv =
                        property(*t, r.inverse).unwrap_or_else(|| panic!("{t}.{}", r.inverse));
                    assert!(inv.kind.targets().contains(&o), "{t}.{} -> {o}", r.inverse);
                }
            }
        }
    }

    #[test]
    fn property_names_unique_per_class() {
        for c in ResourceClass::ALL {
            let mut names: Vec<_> = properties(c).map(|s| s.name).collect();
            let n = names.len();
            names.sort();
            names.dedup();
            assert_eq!(n, names.len(), "{c}");
        }
    }
}
