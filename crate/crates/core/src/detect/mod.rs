//! Pattern detectors: trivial pairs, bubbles, truncated bubbles, cycle
//! witnesses, spot classification and component location.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ids::{BlockId, GluingId, LeafId, SingId, SpotId};
use crate::model::{Assembly, BlockKind, GluingKind, Host, LeafKey, LeafShape};

mod expand;

pub use expand::{
    completely_expand, expand_ball, initial_state, BallRef, ExpansionCase, ExpansionState,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("leaf {0} carries several conic singularities; split it first")]
    MultiSingularLeaf(LeafId),
    #[error("spot {0} is not a free essential spot of the ball")]
    CannotExpand(SpotId),
    #[error("expansion along {spot} changed free spots by {free_delta} and conic singularities by {conic_delta}")]
    TrichotomyViolation {
        spot: SpotId,
        free_delta: i64,
        conic_delta: i64,
    },
    #[error("assembly still has trivial pairs, bubbles or truncated bubbles")]
    NotNormalized,
}

/// Every (center, conic) pair that cancels: a trivial bubble, or a center
/// ball joined to the rest only through one connected sum whose conic point
/// has the opposite parity.
pub fn find_trivial_pairs(a: &Assembly) -> Vec<(SingId, SingId)> {
    let mut out = Vec::new();
    for (id, block) in &a.blocks {
        match &block.kind {
            BlockKind::TrivialBubble { center, conic, .. } => out.push((*center, *conic)),
            BlockKind::CenterBall { center } => {
                let spots = a.spots_of(*id);
                if spots.len() != 1 {
                    continue;
                }
                let Some((g, partner)) = a.spot_partner(spots[0]) else {
                    continue;
                };
                let GluingKind::ConnectedSum { conic, .. } = a.gluings[&g].kind else {
                    continue;
                };
                let cancels = match (a.singularities.get(center), a.singularities.get(&conic)) {
                    (Some(c), Some(k)) => c.sign() != k.sign(),
                    _ => false,
                };
                let partner_owner = a.spots.get(&partner).map(|s| s.owner);
                if cancels
                    && partner_owner.is_some_and(|o| {
                        o != *id && a.block(o).is_some_and(|k| k.interfaces().len() == 1)
                    })
                {
                    out.push((*center, conic));
                }
            }
            _ => {}
        }
    }
    out.sort();
    out
}

/// Paths to every bubble (and special bubble), nested ones included,
/// innermost first and then by id.
pub fn find_bubbles(a: &Assembly) -> Vec<Vec<BlockId>> {
    fn walk(a: &Assembly, prefix: &mut Vec<BlockId>, out: &mut Vec<Vec<BlockId>>) {
        for (id, block) in &a.blocks {
            match &block.kind {
                BlockKind::Bubble { inner, .. } => {
                    prefix.push(*id);
                    walk(inner, prefix, out);
                    out.push(prefix.clone());
                    prefix.pop();
                }
                BlockKind::SpecialBubble { .. } => {
                    prefix.push(*id);
                    out.push(prefix.clone());
                    prefix.pop();
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(a, &mut Vec::new(), &mut out);
    out.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    out
}

/// Truncated bubbles satisfying their defining conditions: distinct
/// perfect-disc singularities, no conic point on the tangent boundary, no
/// bubble inside.
pub fn find_truncated_bubbles(a: &Assembly) -> Vec<BlockId> {
    a.blocks
        .iter()
        .filter_map(|(id, b)| match &b.kind {
            BlockKind::TruncatedBubble { conics, .. } => {
                let spots = a.spots_of(*id);
                let assoc: BTreeSet<SingId> = spots.iter().map(|s| a.spots[s].associated).collect();
                let distinct = assoc.len() == spots.len() && spots.len() >= 2;
                let clean = conics
                    .iter()
                    .all(|c| a.singularities.get(c).is_some_and(|s| s.leaf.is_none()));
                (distinct && clean).then_some(*id)
            }
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleKind {
    Vanishing,
    AntiVanishing,
}

/// Parameter value at which the nullhomotopy status of the curves flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Zero,
    Half,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub kind: CycleKind,
    pub base_leaf: LeafKey,
    pub transition: Transition,
    /// `(leaf, nullhomotopic)` for consecutive segments of the family.
    pub segments: Vec<(LeafKey, bool)>,
    pub determined: Option<SingId>,
    pub implies_truncated_morse: bool,
    /// Index of the first witness determining the same singularity.
    pub class: usize,
}

impl CycleWitness {
    /// Nullhomotopy flips exactly once, in the direction the kind demands.
    pub fn is_well_formed(&self) -> bool {
        let flags: Vec<bool> = self.segments.iter().map(|(_, n)| *n).collect();
        let Some((first, rest)) = flags.split_first() else {
            return false;
        };
        match self.kind {
            CycleKind::Vanishing => !first && !rest.is_empty() && rest.iter().all(|n| *n),
            CycleKind::AntiVanishing => {
                let flip = flags.iter().position(|n| !n);
                match flip {
                    Some(k) if k > 0 => flags[k..].iter().all(|n| !n) && self.determined.is_some(),
                    _ => false,
                }
            }
        }
    }
}

fn boundary_leaf(a: &Assembly, block: BlockId) -> LeafKey {
    for (id, g) in &a.gluings {
        if let GluingKind::Tangent { a: p, b: q, .. } = g.kind {
            if p.block == block || q.block == block {
                return match a.leaves.iter().find(|(_, l)| l.owner == Host::Gluing(*id)) {
                    Some((l, _)) => LeafKey::Declared(*l),
                    None => LeafKey::Gluing(*id),
                };
            }
        }
    }
    LeafKey::Block(block, 0)
}

/// One witness per Reeb pattern: the boundary torus curve is essential and
/// bounds discs in the plane leaves inside.
pub fn find_vanishing_cycles(a: &Assembly) -> Vec<CycleWitness> {
    a.blocks
        .iter()
        .filter(|(_, b)| {
            matches!(
                b.kind,
                BlockKind::ReebSolidTorus { .. } | BlockKind::TruncatedReeb
            )
        })
        .enumerate()
        .map(|(i, (id, _))| {
            let base = boundary_leaf(a, *id);
            CycleWitness {
                kind: CycleKind::Vanishing,
                base_leaf: base.clone(),
                transition: Transition::Zero,
                segments: vec![(base, false), (LeafKey::Block(*id, 0), true)],
                determined: None,
                implies_truncated_morse: false,
                class: i,
            }
        })
        .collect()
}

/// One witness per perfect disc (each spot of a ball with spots) and per
/// pseudo-disc leaf.
pub fn find_anti_vanishing_cycles(a: &Assembly) -> Result<Vec<CycleWitness>, DetectError> {
    if let Some(l) = a.multi_singular_leaves().first() {
        return Err(DetectError::MultiSingularLeaf(*l));
    }
    let mut out: Vec<CycleWitness> = Vec::new();
    for (id, b) in &a.blocks {
        if !matches!(b.kind, BlockKind::BallWithSpots { .. }) {
            continue;
        }
        for (i, s) in a.spots_of(*id).into_iter().enumerate() {
            let assoc = a.spots[&s].associated;
            let rim = LeafKey::Block(*id, 200 + i as u32);
            let cone = match a.singularities.get(&assoc).and_then(|x| x.leaf) {
                Some(l) => LeafKey::Declared(l),
                None => LeafKey::Block(*id, 100),
            };
            out.push(CycleWitness {
                kind: CycleKind::AntiVanishing,
                base_leaf: rim.clone(),
                transition: Transition::Half,
                segments: vec![(cone, true), (rim, false)],
                determined: Some(assoc),
                implies_truncated_morse: false,
                class: 0,
            });
        }
    }
    for (id, l) in &a.leaves {
        if l.shape != LeafShape::PseudoDiscLeaf {
            continue;
        }
        let determined = l
            .singularities
            .iter()
            .copied()
            .find(|s| a.singularities.get(s).is_some_and(|x| x.is_conic()));
        out.push(CycleWitness {
            kind: CycleKind::AntiVanishing,
            base_leaf: LeafKey::Declared(*id),
            transition: Transition::Half,
            segments: vec![
                (LeafKey::Declared(*id), true),
                (LeafKey::Declared(*id), false),
            ],
            determined,
            implies_truncated_morse: true,
            class: 0,
        });
    }
    let mut first: BTreeMap<Option<SingId>, usize> = BTreeMap::new();
    for (i, w) in out.iter_mut().enumerate() {
        w.class = *first.entry(w.determined).or_insert(i);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpotStatus {
    Free,
    Captured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpotClassification {
    pub spot: SpotId,
    pub status: SpotStatus,
    pub capture_partner: Option<SpotId>,
    /// Only set for free spots.
    pub essential: Option<bool>,
}

/// Classifies `spots` relative to the region formed by `blocks`.
pub(crate) fn classify_in(
    a: &Assembly,
    blocks: &BTreeSet<BlockId>,
    spots: &[SpotId],
) -> Vec<SpotClassification> {
    spots
        .iter()
        .map(|s| {
            let link = a
                .spot_partner(*s)
                .filter(|(g, _)| matches!(a.gluings[g].kind, GluingKind::SpotTransverse { .. }));
            let partner_owner = link.and_then(|(_, p)| a.spots.get(&p).map(|x| x.owner));
            match (link, partner_owner) {
                (Some((_, p)), Some(o)) if blocks.contains(&o) => SpotClassification {
                    spot: *s,
                    status: SpotStatus::Captured,
                    capture_partner: Some(p),
                    essential: None,
                },
                (_, owner) => {
                    let essential = owner.is_some_and(|o| {
                        matches!(a.block(o), Some(BlockKind::BallWithSpots { .. }))
                            && a.spots_of(o).len() == 3
                    });
                    SpotClassification {
                        spot: *s,
                        status: SpotStatus::Free,
                        capture_partner: None,
                        essential: Some(essential),
                    }
                }
            }
        })
        .collect()
}

pub fn classify_spots(a: &Assembly, ball: BlockId) -> Result<Vec<SpotClassification>, DetectError> {
    match a.block(ball) {
        Some(BlockKind::BallWithSpots { .. }) => {
            Ok(classify_in(a, &BTreeSet::from([ball]), &a.spots_of(ball)))
        }
        _ => Err(DetectError::InvalidSite(format!(
            "{ball} is not a ball_with_spots"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    Morse,
    TruncatedMorse,
    Reeb,
    TruncatedReeb,
}

impl ComponentKind {
    pub fn token(self) -> &'static str {
        match self {
            ComponentKind::Morse => "morse",
            ComponentKind::TruncatedMorse => "truncated_morse",
            ComponentKind::Reeb => "reeb",
            ComponentKind::TruncatedReeb => "truncated_reeb",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        [
            ComponentKind::Morse,
            ComponentKind::TruncatedMorse,
            ComponentKind::Reeb,
            ComponentKind::TruncatedReeb,
        ]
        .into_iter()
        .find(|k| k.token() == token)
    }

    pub fn is_morse_family(self) -> bool {
        matches!(self, ComponentKind::Morse | ComponentKind::TruncatedMorse)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub kind: ComponentKind,
    /// Morse-type component whose singular leaf is a pseudo-torus or
    /// pseudo-disc found outside a component block.
    pub pseudo: bool,
    /// Some leaf of the component carries a trivial bubble.
    pub singular: bool,
    pub blocks: Vec<BlockId>,
    pub gluings: Vec<GluingId>,
}

impl Component {
    pub fn same_site(&self, other: &Component) -> bool {
        self.kind == other.kind && self.blocks == other.blocks && self.pseudo == other.pseudo
    }

    /// The blocks and gluings of the component together with the
    /// singularities, spots and leaves they reference.
    pub fn sub_assembly(&self, a: &Assembly) -> Assembly {
        let mut out = Assembly::new(
            format!("{}-{}", a.name, self.kind.token()),
            a.ambient.clone(),
        );
        let blocks: BTreeSet<BlockId> = self.blocks.iter().copied().collect();
        for b in &blocks {
            if let Some(x) = a.blocks.get(b) {
                out.blocks.insert(*b, x.clone());
                for s in x.kind.hosted() {
                    if let Some(sing) = a.singularities.get(&s) {
                        out.singularities.insert(s, sing.clone());
                    }
                }
            }
        }
        for g in &self.gluings {
            if let Some(x) = a.gluings.get(g) {
                out.gluings.insert(*g, x.clone());
            }
        }
        for (id, s) in &a.spots {
            if blocks.contains(&s.owner) {
                out.spots.insert(*id, s.clone());
            }
        }
        for (id, l) in &a.leaves {
            let owned = match l.owner {
                Host::Block(b) => blocks.contains(&b),
                Host::Gluing(g) => self.gluings.contains(&g),
            };
            if owned {
                out.leaves.insert(*id, l.clone());
            }
        }
        out.next = a.next;
        out
    }
}

fn touching_gluings(a: &Assembly, blocks: &BTreeSet<BlockId>) -> Vec<GluingId> {
    a.gluings
        .iter()
        .filter(|(_, g)| match &g.kind {
            GluingKind::Tangent { a: p, b: q, .. } => {
                blocks.contains(&p.block) || blocks.contains(&q.block)
            }
            GluingKind::SpotTransverse { a: s, b: t }
            | GluingKind::ConnectedSum { a: s, b: t, .. } => [s, t]
                .iter()
                .any(|x| a.spots.get(x).is_some_and(|sp| blocks.contains(&sp.owner))),
        })
        .map(|(id, _)| *id)
        .collect()
}

fn carries_trivial_bubble(a: &Assembly, blocks: &BTreeSet<BlockId>, gluings: &[GluingId]) -> bool {
    a.blocks.values().any(|b| match &b.kind {
        BlockKind::TrivialBubble { host, .. } => {
            a.leaves.get(host).is_some_and(|l| match l.owner {
                Host::Block(o) => blocks.contains(&o),
                Host::Gluing(g) => gluings.contains(&g),
            })
        }
        _ => false,
    })
}

/// Every Reeb or Morse component instance, truncated and pseudo variants
/// included, ordered Morse first.
pub fn find_components(a: &Assembly) -> Vec<Component> {
    let mut found: Vec<(ComponentKind, bool, BTreeSet<BlockId>, Vec<GluingId>)> = Vec::new();
    for (id, b) in &a.blocks {
        let kind = match b.kind {
            BlockKind::ReebSolidTorus { .. } => ComponentKind::Reeb,
            BlockKind::MorseSolidTorus { .. } => ComponentKind::Morse,
            BlockKind::TruncatedReeb => ComponentKind::TruncatedReeb,
            BlockKind::TruncatedMorse { .. } => ComponentKind::TruncatedMorse,
            _ => continue,
        };
        let set = BTreeSet::from([*id]);
        let gl = touching_gluings(a, &set);
        found.push((kind, false, set, gl));
    }
    for l in a.leaves.values() {
        let kind = match l.shape {
            LeafShape::PseudoTorus => ComponentKind::Morse,
            LeafShape::PseudoDiscLeaf => ComponentKind::TruncatedMorse,
            _ => continue,
        };
        let (set, gl) = match l.owner {
            Host::Block(b) => {
                if matches!(
                    a.block(b),
                    Some(BlockKind::MorseSolidTorus { .. } | BlockKind::TruncatedMorse { .. })
                ) {
                    continue;
                }
                (BTreeSet::from([b]), vec![])
            }
            Host::Gluing(g) => (BTreeSet::new(), vec![g]),
        };
        found.push((kind, true, set, gl));
    }
    let states = completely_expand(a).ok();
    match states {
        Some(states) => {
            for st in states {
                let BallRef::Block(_) = st.ball else { continue };
                if st.spots.iter().any(|c| c.status == SpotStatus::Captured) {
                    let set: BTreeSet<BlockId> = st.blocks.iter().copied().collect();
                    let gl = touching_gluings(a, &set);
                    found.push((ComponentKind::TruncatedReeb, false, set, gl));
                }
            }
        }
        None => {
            for (id, b) in &a.blocks {
                if !matches!(b.kind, BlockKind::BallWithSpots { .. }) {
                    continue;
                }
                let set = BTreeSet::from([*id]);
                let captured = classify_in(a, &set, &a.spots_of(*id))
                    .iter()
                    .any(|c| c.status == SpotStatus::Captured);
                if captured {
                    let gl = touching_gluings(a, &set);
                    found.push((ComponentKind::TruncatedReeb, false, set, gl));
                }
            }
        }
    }
    let mut out: Vec<Component> = found
        .into_iter()
        .map(|(kind, pseudo, set, gluings)| Component {
            kind,
            pseudo,
            singular: carries_trivial_bubble(a, &set, &gluings),
            blocks: set.into_iter().collect(),
            gluings,
        })
        .collect();
    out.sort_by(|x, y| (x.kind, &x.blocks, &x.gluings).cmp(&(y.kind, &y.blocks, &y.gluings)));
    out
}
