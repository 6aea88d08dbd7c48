//! Symbolic leaf census and singularity bookkeeping.

use std::collections::{BTreeMap, BTreeSet};

use super::{Assembly, BlockKind, GluingKind, Host, LeafShape, Port};
use crate::ids::{BlockId, GluingId, LeafId, SingId, SpotId};

/// Identifies a census leaf. Synthesized leaves are keyed by their source
/// block (with a per-kind slot) or gluing; leaves of bubble interiors are
/// wrapped in `Nested`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeafKey {
    Declared(LeafId),
    Block(BlockId, u32),
    Gluing(GluingId),
    Nested(BlockId, Box<LeafKey>),
}

impl LeafKey {
    /// Top-level block or gluing this leaf belongs to.
    pub fn top_host(&self, a: &Assembly) -> Option<Host> {
        match self {
            LeafKey::Declared(l) => a.leaves.get(l).map(|d| d.owner),
            LeafKey::Block(b, _) | LeafKey::Nested(b, _) => Some(Host::Block(*b)),
            LeafKey::Gluing(g) => Some(Host::Gluing(*g)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusLeaf {
    pub key: LeafKey,
    pub shape: LeafShape,
    pub compact: bool,
    pub simply_connected: bool,
    pub singularities: Vec<SingId>,
    /// Conic singularities among `singularities`.
    pub conics: usize,
}

impl CensusLeaf {
    fn new(
        key: LeafKey,
        shape: LeafShape,
        compact: bool,
        simply_connected: bool,
        sings: Vec<SingId>,
    ) -> Self {
        CensusLeaf {
            key,
            shape,
            compact,
            simply_connected,
            singularities: sings,
            conics: 0,
        }
    }

    /// Compact, simply connected, and at most one conic singularity.
    pub fn is_tame(&self) -> bool {
        self.compact && self.simply_connected && self.conics <= 1
    }
}

/// Singularity counts by Morse index, bubble interiors included and the
/// caps standing for their exteriors excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SingularityCounts {
    pub by_index: [i64; 4],
}

impl SingularityCounts {
    pub fn centers(&self) -> i64 {
        self.by_index[0] + self.by_index[3]
    }

    pub fn conics(&self) -> i64 {
        self.by_index[1] + self.by_index[2]
    }

    pub fn total(&self) -> i64 {
        self.by_index.iter().sum()
    }

    pub fn signed_sum(&self) -> i64 {
        self.by_index[0] - self.by_index[1] + self.by_index[2] - self.by_index[3]
    }

    /// `other - self`, by index, keeping only non-zero entries.
    pub fn delta_to(&self, other: &SingularityCounts) -> BTreeMap<u8, i64> {
        (0..4u8)
            .filter_map(|i| {
                let d = other.by_index[i as usize] - self.by_index[i as usize];
                (d != 0).then_some((i, d))
            })
            .collect()
    }
}

pub fn counts(a: &Assembly) -> SingularityCounts {
    let mut c = SingularityCounts::default();
    for s in a.singularities.values() {
        if let Some(slot) = c.by_index.get_mut(s.index as usize) {
            *slot += 1;
        }
    }
    for block in a.blocks.values() {
        if let BlockKind::Bubble { cap, inner, .. } = &block.kind {
            let nested = counts(inner);
            for i in 0..4 {
                c.by_index[i] += nested.by_index[i];
            }
            if let Some(BlockKind::CenterBall { center }) = inner.block(*cap) {
                if let Some(s) = inner.singularities.get(center) {
                    if let Some(slot) = c.by_index.get_mut(s.index as usize) {
                        *slot -= 1;
                    }
                }
            }
        }
    }
    c
}

/// Σ (−1)^index over all singularities of the foliation.
pub fn index_sum(a: &Assembly) -> i64 {
    counts(a).signed_sum()
}

/// A connected component of the tangential boundary surface, formed by
/// interfaces joined through spot gluings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub ports: Vec<Port>,
    pub spots: Vec<SpotId>,
    pub genus: u32,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false when `x` and `y` were already joined.
    pub(crate) fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx.max(ry)] = rx.min(ry);
        true
    }
}

pub fn boundary_components(a: &Assembly) -> Vec<BoundaryComponent> {
    let mut ports = Vec::new();
    let mut genus_of = Vec::new();
    for (id, block) in &a.blocks {
        for (i, g) in block.kind.interfaces().into_iter().enumerate() {
            ports.push(Port {
                block: *id,
                interface: i as u8,
            });
            genus_of.push(g);
        }
    }
    let index: BTreeMap<Port, usize> = ports.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let node_of_spot = |s: SpotId| -> Option<usize> {
        let spot = a.spots.get(&s)?;
        index
            .get(&Port {
                block: spot.owner,
                interface: spot.interface?,
            })
            .copied()
    };
    let mut uf = UnionFind::new(ports.len());
    let mut cycles = vec![0u32; ports.len()];
    let mut pending = Vec::new();
    for g in a.gluings.values() {
        if let Some((s, t)) = g.kind.spots() {
            if let (Some(x), Some(y)) = (node_of_spot(s), node_of_spot(t)) {
                if !uf.union(x, y) {
                    pending.push(x);
                }
            }
        }
    }
    for x in pending {
        let r = uf.find(x);
        cycles[r] += 1;
    }
    let mut groups: BTreeMap<usize, BoundaryComponent> = BTreeMap::new();
    for (i, port) in ports.iter().enumerate() {
        let r = uf.find(i);
        let entry = groups.entry(r).or_insert_with(|| BoundaryComponent {
            ports: vec![],
            spots: vec![],
            genus: cycles[r],
        });
        entry.ports.push(*port);
        entry.genus += genus_of[i];
    }
    for sid in a.spots.keys() {
        if let Some(x) = node_of_spot(*sid) {
            let r = uf.find(x);
            if let Some(c) = groups.get_mut(&r) {
                c.spots.push(*sid);
            }
        }
    }
    groups.into_values().collect()
}

/// Genus of the boundary component containing `port`.
pub fn component_genus(a: &Assembly, port: Port) -> Option<u32> {
    boundary_components(a)
        .into_iter()
        .find(|c| c.ports.contains(&port))
        .map(|c| c.genus)
}

fn on_declared_leaf(a: &Assembly, s: SingId) -> bool {
    a.singularities
        .get(&s)
        .is_some_and(|x| x.leaf.is_some_and(|l| a.leaves.contains_key(&l)))
}

/// Full leaf census: declared leaves, leaf families synthesized per block
/// kind, gluing leaves, and the leaves of bubble interiors.
pub fn leaves(a: &Assembly) -> Vec<CensusLeaf> {
    let mut out = Vec::new();
    for (id, d) in &a.leaves {
        out.push(CensusLeaf::new(
            LeafKey::Declared(*id),
            d.shape,
            d.compact,
            d.simply_connected,
            d.singularities.clone(),
        ));
    }
    let claimed: BTreeSet<Host> = a.leaves.values().map(|d| d.owner).collect();
    for (id, block) in &a.blocks {
        block_leaves(a, *id, &block.kind, &mut out);
    }
    for (id, g) in &a.gluings {
        match &g.kind {
            GluingKind::Tangent { genus, .. } => {
                if !claimed.contains(&Host::Gluing(*id)) {
                    out.push(CensusLeaf::new(
                        LeafKey::Gluing(*id),
                        LeafShape::for_genus(*genus),
                        true,
                        *genus == 0,
                        vec![],
                    ));
                }
            }
            GluingKind::ConnectedSum { a: s, b: t, conic } => {
                if !on_declared_leaf(a, *conic) {
                    let flat = |sp: SpotId| {
                        a.spots
                            .get(&sp)
                            .and_then(|x| {
                                let i = x.interface?;
                                a.block(x.owner)?.interfaces().get(i as usize).copied()
                            })
                            .unwrap_or(0)
                            == 0
                    };
                    out.push(CensusLeaf::new(
                        LeafKey::Gluing(*id),
                        LeafShape::DoubleCone,
                        true,
                        flat(*s) && flat(*t),
                        vec![*conic],
                    ));
                }
            }
            GluingKind::SpotTransverse { .. } => {}
        }
    }
    for leaf in &mut out {
        if !matches!(leaf.key, LeafKey::Nested(..)) {
            leaf.conics = leaf
                .singularities
                .iter()
                .filter(|s| a.singularities.get(s).is_some_and(|x| x.is_conic()))
                .count();
        }
    }
    out
}

fn block_leaves(a: &Assembly, id: BlockId, kind: &BlockKind, out: &mut Vec<CensusLeaf>) {
    let key = |slot: u32| LeafKey::Block(id, slot);
    let rims = |out: &mut Vec<CensusLeaf>| {
        for i in 0..a.spots_of(id).len() {
            out.push(CensusLeaf::new(
                key(200 + i as u32),
                LeafShape::Generic,
                false,
                false,
                vec![],
            ));
        }
    };
    let free_cones = |out: &mut Vec<CensusLeaf>, conics: &[SingId], compact: bool, sc: bool| {
        for (j, c) in conics.iter().enumerate() {
            if !on_declared_leaf(a, *c) {
                out.push(CensusLeaf::new(
                    key(100 + j as u32),
                    LeafShape::DoubleCone,
                    compact,
                    sc,
                    vec![*c],
                ));
            }
        }
    };
    match kind {
        BlockKind::CenterBall { center } | BlockKind::TrivialBubble { center, .. } => {
            out.push(CensusLeaf::new(
                key(0),
                LeafShape::Sphere,
                true,
                true,
                vec![],
            ));
            out.push(CensusLeaf::new(
                key(1),
                LeafShape::Center,
                true,
                true,
                vec![*center],
            ));
            if let BlockKind::TrivialBubble { conic, .. } = kind {
                free_cones(out, &[*conic], true, true);
            }
        }
        BlockKind::ReebSolidTorus { .. } => {
            out.push(CensusLeaf::new(
                key(0),
                LeafShape::Plane,
                false,
                true,
                vec![],
            ));
        }
        BlockKind::TruncatedReeb => {
            out.push(CensusLeaf::new(
                key(0),
                LeafShape::Plane,
                false,
                true,
                vec![],
            ));
            rims(out);
        }
        BlockKind::MorseSolidTorus { center, conic }
        | BlockKind::TruncatedMorse { center, conic } => {
            out.push(CensusLeaf::new(
                key(0),
                LeafShape::Sphere,
                true,
                true,
                vec![],
            ));
            out.push(CensusLeaf::new(
                key(1),
                LeafShape::Center,
                true,
                true,
                vec![*center],
            ));
            if !on_declared_leaf(a, *conic) {
                out.push(CensusLeaf::new(
                    key(2),
                    LeafShape::PseudoTorus,
                    true,
                    false,
                    vec![*conic],
                ));
            }
            out.push(CensusLeaf::new(
                key(3),
                LeafShape::Torus,
                true,
                false,
                vec![],
            ));
            if matches!(kind, BlockKind::TruncatedMorse { .. }) {
                rims(out);
            }
        }
        BlockKind::ProductBand { genus } => {
            out.push(CensusLeaf::new(
                key(0),
                LeafShape::for_genus(*genus),
                true,
                *genus == 0,
                vec![],
            ));
        }
        BlockKind::BallWithSpots { conics } => {
            rims(out);
            free_cones(out, conics, false, false);
        }
        BlockKind::TruncatedBubble { conics, .. } | BlockKind::SpecialBubble { conics, .. } => {
            rims(out);
            free_cones(out, conics, true, true);
        }
        BlockKind::Bubble {
            conic, cap, inner, ..
        } => {
            free_cones(out, &[*conic], true, true);
            for leaf in leaves(inner) {
                let from_cap = match &leaf.key {
                    LeafKey::Block(b, _) | LeafKey::Nested(b, _) => b == cap,
                    LeafKey::Declared(l) => inner
                        .leaves
                        .get(l)
                        .is_some_and(|d| d.owner == Host::Block(*cap)),
                    LeafKey::Gluing(_) => false,
                };
                if !from_cap {
                    out.push(CensusLeaf {
                        key: LeafKey::Nested(id, Box::new(leaf.key.clone())),
                        ..leaf
                    });
                }
            }
        }
        BlockKind::DoubleConeChart { .. } => {}
    }
}
