//! Decorated block-graph model of a Morse foliation.
//!
//! An [`Assembly`] is a set of foliated blocks glued along tangential
//! interfaces (leaves) or along transverse discs ([`Spot`]s). Singularities
//! live in one table and each names the block or gluing that hosts it.
//! Leaf families intrinsic to a block kind are not stored; [`census`]
//! synthesizes them. The declared leaf table only records leaves that carry
//! extra data (singular leaves, bubble attachment sites, non-compact markers).

use std::collections::BTreeMap;
use std::fmt;

use crate::ids::{BlockId, GluingId, LeafId, Level, SingId, SpotId};

pub mod canon;
pub mod census;
pub mod validate;

pub use census::{
    boundary_components, counts, index_sum, leaves, BoundaryComponent, CensusLeaf, LeafKey,
    SingularityCounts,
};
pub use validate::{validate, ValidationReport, Violation, ViolationKind};

/// The ambient manifold. Declared, never computed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ambient {
    S3,
    Other(String),
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::S3 => f.write_str("S3"),
            Ambient::Other(tag) => f.write_str(tag),
        }
    }
}

/// Where a singularity or a declared leaf lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Host {
    Block(BlockId),
    Gluing(GluingId),
}

impl fmt::Display for Host {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Host::Block(b) => b.fmt(f),
            Host::Gluing(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Singularity {
    /// Morse index: 0 or 3 for centers, 1 or 2 for conic points.
    pub index: u8,
    pub host: Host,
    pub leaf: Option<LeafId>,
}

impl Singularity {
    pub fn is_center(&self) -> bool {
        matches!(self.index, 0 | 3)
    }

    pub fn is_conic(&self) -> bool {
        matches!(self.index, 1 | 2)
    }

    /// `(-1)^index`
    pub fn sign(&self) -> i64 {
        if self.index.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Transverse co-orientation of the normal field on a spot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Inward,
    Outward,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Inward => Direction::Outward,
            Direction::Outward => Direction::Inward,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Direction::Inward => "in",
            Direction::Outward => "out",
        }
    }
}

/// A transverse disc on a block boundary (a perfect disc, or a sum site).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spot {
    pub owner: BlockId,
    /// Tangential interface of the owner the disc sits on, if the owner has one.
    pub interface: Option<u8>,
    pub direction: Direction,
    /// Conic singularity corresponding to this disc.
    pub associated: SingId,
    pub holonomy_trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockKind {
    CenterBall {
        center: SingId,
    },
    ReebSolidTorus {
        /// Declared flatness of the boundary torus holonomy.
        flat: bool,
    },
    MorseSolidTorus {
        center: SingId,
        conic: SingId,
    },
    ProductBand {
        genus: u32,
    },
    BallWithSpots {
        conics: Vec<SingId>,
    },
    /// Non-trivial bubble. `inner` is a closed assembly in which `cap` stands
    /// for everything outside the bubble's boundary sphere.
    Bubble {
        conic: SingId,
        host: LeafId,
        cap: BlockId,
        inner: Box<Assembly>,
    },
    TrivialBubble {
        center: SingId,
        conic: SingId,
        host: LeafId,
    },
    TruncatedBubble {
        conics: Vec<SingId>,
        host: LeafId,
        inward: SpotId,
        outward: SpotId,
    },
    /// Result of a corrective movement: a sphere leaf (declared, owned by
    /// this block) carrying two conic singularities.
    SpecialBubble {
        conics: Vec<SingId>,
        host: LeafId,
    },
    DoubleConeChart {
        around: SingId,
        cone: Level,
    },
    TruncatedReeb,
    TruncatedMorse {
        center: SingId,
        conic: SingId,
    },
}

impl BlockKind {
    pub fn token(&self) -> &'static str {
        match self {
            BlockKind::CenterBall { .. } => "center_ball",
            BlockKind::ReebSolidTorus { .. } => "reeb_solid_torus",
            BlockKind::MorseSolidTorus { .. } => "morse_solid_torus",
            BlockKind::ProductBand { .. } => "product_band",
            BlockKind::BallWithSpots { .. } => "ball_with_spots",
            BlockKind::Bubble { .. } => "bubble",
            BlockKind::TrivialBubble { .. } => "trivial_bubble",
            BlockKind::TruncatedBubble { .. } => "truncated_bubble",
            BlockKind::SpecialBubble { .. } => "special_bubble",
            BlockKind::DoubleConeChart { .. } => "double_cone_chart",
            BlockKind::TruncatedReeb => "truncated_reeb",
            BlockKind::TruncatedMorse { .. } => "truncated_morse",
        }
    }

    /// Genus of each tangential interface, by interface index.
    pub fn interfaces(&self) -> Vec<u32> {
        match self {
            BlockKind::CenterBall { .. } | BlockKind::BallWithSpots { .. } => vec![0],
            BlockKind::ReebSolidTorus { .. }
            | BlockKind::MorseSolidTorus { .. }
            | BlockKind::TruncatedReeb
            | BlockKind::TruncatedMorse { .. } => vec![1],
            BlockKind::ProductBand { genus } => vec![*genus, *genus],
            BlockKind::Bubble { .. }
            | BlockKind::TrivialBubble { .. }
            | BlockKind::TruncatedBubble { .. }
            | BlockKind::SpecialBubble { .. }
            | BlockKind::DoubleConeChart { .. } => vec![],
        }
    }

    /// Singularities hosted by this block at the top level (nested bubble
    /// interiors excluded).
    pub fn hosted(&self) -> Vec<SingId> {
        match self {
            BlockKind::CenterBall { center } => vec![*center],
            BlockKind::MorseSolidTorus { center, conic }
            | BlockKind::TruncatedMorse { center, conic } => {
                vec![*center, *conic]
            }
            BlockKind::TrivialBubble { center, conic, .. } => vec![*center, *conic],
            BlockKind::BallWithSpots { conics }
            | BlockKind::TruncatedBubble { conics, .. }
            | BlockKind::SpecialBubble { conics, .. } => conics.clone(),
            BlockKind::Bubble { conic, .. } => vec![*conic],
            BlockKind::ReebSolidTorus { .. }
            | BlockKind::ProductBand { .. }
            | BlockKind::DoubleConeChart { .. }
            | BlockKind::TruncatedReeb => vec![],
        }
    }

    /// Leaf the block is attached to, for blocks that sit on a leaf rather
    /// than being glued along interfaces.
    pub fn host_leaf(&self) -> Option<LeafId> {
        match self {
            BlockKind::Bubble { host, .. }
            | BlockKind::TrivialBubble { host, .. }
            | BlockKind::TruncatedBubble { host, .. }
            | BlockKind::SpecialBubble { host, .. } => Some(*host),
            _ => None,
        }
    }

    pub fn is_bubble_like(&self) -> bool {
        matches!(
            self,
            BlockKind::Bubble { .. } | BlockKind::SpecialBubble { .. }
        )
    }

    /// Whether spots may be attached to this kind of block.
    pub fn admits_spots(&self) -> bool {
        !matches!(
            self,
            BlockKind::Bubble { .. }
                | BlockKind::TrivialBubble { .. }
                | BlockKind::DoubleConeChart { .. }
                | BlockKind::ProductBand { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub kind: BlockKind,
}

/// A tangential interface of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub block: BlockId,
    pub interface: u8,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.t{}", self.block, self.interface)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GluingKind {
    /// Two tangential boundary components identified along a leaf.
    Tangent { a: Port, b: Port, genus: u32 },
    /// Two spots joined through singularity-free leaf material.
    SpotTransverse { a: SpotId, b: SpotId },
    /// Connected sum through two trivially foliated discs; adds one conic point.
    ConnectedSum { a: SpotId, b: SpotId, conic: SingId },
}

impl GluingKind {
    pub fn token(&self) -> &'static str {
        match self {
            GluingKind::Tangent { .. } => "tangent",
            GluingKind::SpotTransverse { .. } => "transverse",
            GluingKind::ConnectedSum { .. } => "sum",
        }
    }

    pub fn spots(&self) -> Option<(SpotId, SpotId)> {
        match self {
            GluingKind::Tangent { .. } => None,
            GluingKind::SpotTransverse { a, b } | GluingKind::ConnectedSum { a, b, .. } => {
                Some((*a, *b))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub kind: GluingKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeafShape {
    Sphere,
    Torus,
    Genus(u32),
    PseudoTorus,
    DoubleCone,
    PseudoDiscLeaf,
    Plane,
    Disc,
    Annulus,
    Generic,
    /// The degenerate leaf formed by a center.
    Center,
}

impl LeafShape {
    pub fn for_genus(genus: u32) -> Self {
        match genus {
            0 => LeafShape::Sphere,
            1 => LeafShape::Torus,
            g => LeafShape::Genus(g),
        }
    }

    /// Simple connectivity forced by the shape, if any.
    pub fn forced_simply_connected(self) -> Option<bool> {
        match self {
            LeafShape::Sphere | LeafShape::Plane | LeafShape::Disc | LeafShape::Center => {
                Some(true)
            }
            LeafShape::Torus
            | LeafShape::Genus(_)
            | LeafShape::Annulus
            | LeafShape::PseudoTorus => Some(false),
            LeafShape::DoubleCone | LeafShape::PseudoDiscLeaf | LeafShape::Generic => None,
        }
    }

    pub fn requires_singularity(self) -> bool {
        matches!(
            self,
            LeafShape::PseudoTorus | LeafShape::DoubleCone | LeafShape::PseudoDiscLeaf
        )
    }
}

impl fmt::Display for LeafShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeafShape::Sphere => f.write_str("sphere"),
            LeafShape::Torus => f.write_str("torus"),
            LeafShape::Genus(g) => write!(f, "genus{g}"),
            LeafShape::PseudoTorus => f.write_str("pseudo_torus"),
            LeafShape::DoubleCone => f.write_str("double_cone"),
            LeafShape::PseudoDiscLeaf => f.write_str("pseudo_disc_leaf"),
            LeafShape::Plane => f.write_str("plane"),
            LeafShape::Disc => f.write_str("disc"),
            LeafShape::Annulus => f.write_str("annulus"),
            LeafShape::Generic => f.write_str("generic"),
            LeafShape::Center => f.write_str("center"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeafDescriptor {
    pub owner: Host,
    pub compact: bool,
    pub shape: LeafShape,
    pub singularities: Vec<SingId>,
    pub simply_connected: bool,
}

/// Next free value for each identifier kind. Identifiers are never reused,
/// so consumed and produced references of a rewrite stay disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdAlloc {
    pub block: u32,
    pub gluing: u32,
    pub sing: u32,
    pub leaf: u32,
    pub spot: u32,
}

impl Default for IdAlloc {
    fn default() -> Self {
        IdAlloc {
            block: 1,
            gluing: 1,
            sing: 1,
            leaf: 1,
            spot: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assembly {
    pub name: String,
    pub ambient: Ambient,
    pub blocks: BTreeMap<BlockId, Block>,
    pub gluings: BTreeMap<GluingId, Gluing>,
    pub singularities: BTreeMap<SingId, Singularity>,
    pub leaves: BTreeMap<LeafId, LeafDescriptor>,
    pub spots: BTreeMap<SpotId, Spot>,
    pub next: IdAlloc,
}

impl Assembly {
    pub fn new(name: impl Into<String>, ambient: Ambient) -> Self {
        Assembly {
            name: name.into(),
            ambient,
            blocks: BTreeMap::new(),
            gluings: BTreeMap::new(),
            singularities: BTreeMap::new(),
            leaves: BTreeMap::new(),
            spots: BTreeMap::new(),
            next: IdAlloc::default(),
        }
    }

    pub fn alloc_block(&mut self) -> BlockId {
        let id = BlockId(self.next.block);
        self.next.block += 1;
        id
    }

    pub fn alloc_gluing(&mut self) -> GluingId {
        let id = GluingId(self.next.gluing);
        self.next.gluing += 1;
        id
    }

    pub fn alloc_sing(&mut self) -> SingId {
        let id = SingId(self.next.sing);
        self.next.sing += 1;
        id
    }

    pub fn alloc_leaf(&mut self) -> LeafId {
        let id = LeafId(self.next.leaf);
        self.next.leaf += 1;
        id
    }

    pub fn alloc_spot(&mut self) -> SpotId {
        let id = SpotId(self.next.spot);
        self.next.spot += 1;
        id
    }

    pub fn add_sing(&mut self, index: u8, host: Host) -> SingId {
        let id = self.alloc_sing();
        self.singularities.insert(
            id,
            Singularity {
                index,
                host,
                leaf: None,
            },
        );
        id
    }

    pub fn add_spot(
        &mut self,
        owner: BlockId,
        interface: Option<u8>,
        direction: Direction,
        associated: SingId,
    ) -> SpotId {
        let id = self.alloc_spot();
        self.spots.insert(
            id,
            Spot {
                owner,
                interface,
                direction,
                associated,
                holonomy_trivial: true,
            },
        );
        id
    }

    pub fn add_gluing(&mut self, kind: GluingKind) -> GluingId {
        let id = self.alloc_gluing();
        self.gluings.insert(id, Gluing { kind });
        id
    }

    /// Declares a leaf and links the listed singularities to it.
    pub fn add_leaf(&mut self, leaf: LeafDescriptor) -> LeafId {
        let id = self.alloc_leaf();
        for s in &leaf.singularities {
            if let Some(sing) = self.singularities.get_mut(s) {
                sing.leaf = Some(id);
            }
        }
        self.leaves.insert(id, leaf);
        id
    }

    /// A center ball hosting a fresh center of the given index.
    pub fn add_center_ball(&mut self, index: u8) -> BlockId {
        let b = self.alloc_block();
        let c = self.add_sing(index, Host::Block(b));
        self.blocks.insert(
            b,
            Block {
                kind: BlockKind::CenterBall { center: c },
            },
        );
        b
    }

    pub fn add_reeb(&mut self, flat: bool) -> BlockId {
        let b = self.alloc_block();
        self.blocks.insert(
            b,
            Block {
                kind: BlockKind::ReebSolidTorus { flat },
            },
        );
        b
    }

    /// A Morse component with a center and a conic point of opposite parity.
    pub fn add_morse(&mut self, center_index: u8, conic_index: u8) -> BlockId {
        let b = self.alloc_block();
        let center = self.add_sing(center_index, Host::Block(b));
        let conic = self.add_sing(conic_index, Host::Block(b));
        self.blocks.insert(
            b,
            Block {
                kind: BlockKind::MorseSolidTorus { center, conic },
            },
        );
        b
    }

    pub fn add_band(&mut self, genus: u32) -> BlockId {
        let b = self.alloc_block();
        self.blocks.insert(
            b,
            Block {
                kind: BlockKind::ProductBand { genus },
            },
        );
        b
    }

    pub fn block(&self, id: BlockId) -> Option<&BlockKind> {
        self.blocks.get(&id).map(|b| &b.kind)
    }

    pub fn block_mut(&mut self, id: BlockId) -> Option<&mut BlockKind> {
        self.blocks.get_mut(&id).map(|b| &mut b.kind)
    }

    /// Spots owned by a block, in id order.
    pub fn spots_of(&self, block: BlockId) -> Vec<SpotId> {
        self.spots
            .iter()
            .filter(|(_, s)| s.owner == block)
            .map(|(id, _)| *id)
            .collect()
    }

    /// The gluing that uses a spot, if any.
    pub fn gluing_of_spot(&self, spot: SpotId) -> Option<GluingId> {
        self.gluings
            .iter()
            .find(|(_, g)| matches!(g.kind.spots(), Some((a, b)) if a == spot || b == spot))
            .map(|(id, _)| *id)
    }

    /// The other end of the gluing through `spot`.
    pub fn spot_partner(&self, spot: SpotId) -> Option<(GluingId, SpotId)> {
        let gid = self.gluing_of_spot(spot)?;
        let (a, b) = self.gluings[&gid].kind.spots()?;
        Some((gid, if a == spot { b } else { a }))
    }

    /// Tangent gluing with an endpoint on the given port.
    pub fn tangent_gluings_at(&self, port: Port) -> Vec<GluingId> {
        self.gluings
            .iter()
            .filter(|(_, g)| matches!(g.kind, GluingKind::Tangent { a, b, .. } if a == port || b == port))
            .map(|(id, _)| *id)
            .collect()
    }

    /// Adds a tangent gluing between the boundary components of two ports,
    /// with the genus taken from the component of `a`.
    pub fn glue_tangent(&mut self, a: Port, b: Port) -> GluingId {
        let genus = boundary_components(self)
            .into_iter()
            .find(|c| c.ports.contains(&a))
            .map(|c| c.genus)
            .unwrap_or(0);
        self.add_gluing(GluingKind::Tangent { a, b, genus })
    }

    /// Joins two spots by a transverse gluing; the spots get opposite directions.
    pub fn glue_transverse(&mut self, a: SpotId, b: SpotId) -> GluingId {
        let dir = self.spots[&a].direction;
        if let Some(spot) = self.spots.get_mut(&b) {
            spot.direction = dir.opposite();
        }
        self.add_gluing(GluingKind::SpotTransverse { a, b })
    }

    /// Removes a singularity from the table and from any declared leaf.
    pub(crate) fn drop_sing(&mut self, id: SingId) {
        if let Some(sing) = self.singularities.remove(&id) {
            if let Some(l) = sing.leaf {
                if let Some(leaf) = self.leaves.get_mut(&l) {
                    leaf.singularities.retain(|s| *s != id);
                }
            }
        }
        for leaf in self.leaves.values_mut() {
            leaf.singularities.retain(|s| *s != id);
        }
        let charts: Vec<BlockId> = self
            .blocks
            .iter()
            .filter(|(_, b)| matches!(b.kind, BlockKind::DoubleConeChart { around, .. } if around == id))
            .map(|(id, _)| *id)
            .collect();
        for c in charts {
            self.blocks.remove(&c);
        }
    }

    /// Removes a spot together with the gluing that uses it (and the partner
    /// spot if `with_partner`). Returns the removed gluing.
    pub(crate) fn drop_spot(
        &mut self,
        id: SpotId,
        with_partner: bool,
    ) -> Option<(GluingId, Gluing)> {
        let partner = self.spot_partner(id);
        self.spots.remove(&id);
        let (gid, other) = partner?;
        let gluing = self.gluings.remove(&gid)?;
        if with_partner {
            self.spots.remove(&other);
        }
        Some((gid, gluing))
    }

    /// Points every tangent gluing endpoint on `from` at `to` instead.
    pub(crate) fn repoint_port(&mut self, from: Port, to: Port) {
        for g in self.gluings.values_mut() {
            if let GluingKind::Tangent { a, b, .. } = &mut g.kind {
                if *a == from {
                    *a = to;
                }
                if *b == from {
                    *b = to;
                }
            }
        }
    }

    /// Declared leaves carrying two or more conic singularities.
    pub fn multi_singular_leaves(&self) -> Vec<LeafId> {
        self.leaves
            .iter()
            .filter(|(_, l)| {
                l.singularities
                    .iter()
                    .filter(|s| self.singularities.get(s).is_some_and(|x| x.is_conic()))
                    .count()
                    >= 2
            })
            .map(|(id, _)| *id)
            .collect()
    }

    /// Total number of singularities, bubble interiors included.
    pub fn total_singularities(&self) -> i64 {
        counts(self).total()
    }
}
