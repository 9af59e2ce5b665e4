use std::fmt;

/// Openness of a lyph's two axial ends.
///
/// The ends are named after the conveying link: the *source* end sits at the
/// link's source node, the *target* end at its target node. `BagLeft` is open
/// at the source end and sealed at the target end; `BagRight` is the mirror
/// image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Topology {
    #[default]
    Tube,
    BagLeft,
    BagRight,
    Cyst,
}

impl Topology {
    pub fn parse(s: &str) -> Option<Topology> {
        match s {
            "TUBE" => Some(Topology::Tube),
            "BAG-left" => Some(Topology::BagLeft),
            "BAG-right" => Some(Topology::BagRight),
            "CYST" => Some(Topology::Cyst),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Tube => "TUBE",
            Topology::BagLeft => "BAG-left",
            Topology::BagRight => "BAG-right",
            Topology::Cyst => "CYST",
        }
    }

    pub fn seals_source(self) -> bool {
        matches!(self, Topology::BagRight | Topology::Cyst)
    }

    pub fn seals_target(self) -> bool {
        matches!(self, Topology::BagLeft | Topology::Cyst)
    }

    pub const ALL: [Topology; 4] = [
        Topology::Tube,
        Topology::BagLeft,
        Topology::BagRight,
        Topology::Cyst,
    ];
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoalescenceKind {
    Embedding,
    Connecting,
}

impl CoalescenceKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "EMBEDDING" => Some(CoalescenceKind::Embedding),
            "CONNECTING" => Some(CoalescenceKind::Connecting),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WireGeometry {
    #[default]
    Line,
    Arc,
    Spline,
}

impl WireGeometry {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "LINE" => Some(WireGeometry::Line),
            "ARC" => Some(WireGeometry::Arc),
            "SPLINE" => Some(WireGeometry::Spline),
            _ => None,
        }
    }
}

/// Provenance tag of a dynamic group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOrigin {
    Neurulated,
    Query,
    Variance,
}

impl GroupOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupOrigin::Neurulated => "NEURULATED",
            GroupOrigin::Query => "QUERY",
            GroupOrigin::Variance => "VARIANCE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "NEURULATED" => Some(GroupOrigin::Neurulated),
            "QUERY" => Some(GroupOrigin::Query),
            "VARIANCE" => Some(GroupOrigin::Variance),
            _ => None,
        }
    }
}
