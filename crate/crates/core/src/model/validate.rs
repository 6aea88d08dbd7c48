//! Structural validity rules for assemblies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::census::{boundary_components, index_sum, UnionFind};
use super::{Ambient, Assembly, BlockKind, Direction, GluingKind, Host, Port};
use crate::ids::{BlockId, SingId, SpotId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    Empty,
    BadIndex,
    DanglingReference,
    HostMismatch,
    OpenInterface,
    MultiplyGlued,
    GenusMismatch,
    DirectionMismatch,
    Disconnected,
    IndexSum,
    LeafShape,
    SpotPlacement,
    TruncatedBubble,
    Bubble,
}

impl ViolationKind {
    pub fn token(self) -> &'static str {
        match self {
            ViolationKind::Empty => "empty assembly",
            ViolationKind::BadIndex => "bad index",
            ViolationKind::DanglingReference => "dangling reference",
            ViolationKind::HostMismatch => "host mismatch",
            ViolationKind::OpenInterface => "open interface",
            ViolationKind::MultiplyGlued => "multiply glued",
            ViolationKind::GenusMismatch => "genus mismatch",
            ViolationKind::DirectionMismatch => "direction mismatch",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::IndexSum => "index sum ≠ 0",
            ViolationKind::LeafShape => "leaf shape",
            ViolationKind::SpotPlacement => "spot placement",
            ViolationKind::TruncatedBubble => "truncated bubble",
            ViolationKind::Bubble => "bubble",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Ids of the offending objects, e.g. `b3.t0` or `g2`.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.token(), self.subject)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    /// True when the only problems are unglued or doubly glued boundary.
    pub fn only_openness(&self) -> bool {
        !self.is_valid()
            && self.violations.iter().all(|v| {
                matches!(
                    v.kind,
                    ViolationKind::OpenInterface
                        | ViolationKind::MultiplyGlued
                        | ViolationKind::IndexSum
                )
            })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, kind: ViolationKind, subject: impl fmt::Display, detail: impl Into<String>) {
        self.0.push(Violation {
            kind,
            subject: subject.to_string(),
            detail: detail.into(),
        });
    }
}

pub fn validate(a: &Assembly) -> ValidationReport {
    let mut r = Report(Vec::new());
    if a.blocks.is_empty() {
        r.push(ViolationKind::Empty, &a.name, "no blocks");
    }
    check_singularities(a, &mut r);
    check_spots(a, &mut r);
    check_gluings(a, &mut r);
    check_leaves(a, &mut r);
    check_special_blocks(a, &mut r);
    check_connected(a, &mut r);
    if a.ambient == Ambient::S3 {
        let sum = index_sum(a);
        if sum != 0 {
            r.push(ViolationKind::IndexSum, &a.name, format!("sum is {sum}"));
        }
    }
    let mut violations = r.0;
    violations.sort();
    violations.dedup();
    ValidationReport { violations }
}

fn check_singularities(a: &Assembly, r: &mut Report) {
    let mut hosted: BTreeMap<SingId, Vec<Host>> = BTreeMap::new();
    for (id, block) in &a.blocks {
        for s in block.kind.hosted() {
            hosted.entry(s).or_default().push(Host::Block(*id));
        }
    }
    for (id, g) in &a.gluings {
        if let GluingKind::ConnectedSum { conic, .. } = g.kind {
            hosted.entry(conic).or_default().push(Host::Gluing(*id));
        }
    }
    for (s, hosts) in &hosted {
        if !a.singularities.contains_key(s) {
            r.push(
                ViolationKind::DanglingReference,
                s,
                format!("referenced by {}", hosts[0]),
            );
        }
        if hosts.len() > 1 {
            r.push(ViolationKind::HostMismatch, s, "hosted more than once");
        }
    }
    for (id, s) in &a.singularities {
        if s.index > 3 {
            r.push(ViolationKind::BadIndex, id, format!("index {}", s.index));
        }
        match hosted.get(id) {
            None => r.push(
                ViolationKind::HostMismatch,
                id,
                "not hosted by any block or gluing",
            ),
            Some(hosts) if hosts[0] != s.host => r.push(
                ViolationKind::HostMismatch,
                id,
                format!("declares host {} but lives in {}", s.host, hosts[0]),
            ),
            _ => {}
        }
        if let Some(l) = s.leaf {
            match a.leaves.get(&l) {
                None => r.push(ViolationKind::DanglingReference, id, format!("leaf {l}")),
                Some(d) if !d.singularities.contains(id) => r.push(
                    ViolationKind::LeafShape,
                    id,
                    format!("leaf {l} does not list it"),
                ),
                _ => {}
            }
        }
    }
    let want = |r: &mut Report, s: SingId, center: bool, owner: BlockId| {
        if let Some(x) = a.singularities.get(&s) {
            if center != x.is_center() {
                let role = if center { "center" } else { "conic" };
                r.push(
                    ViolationKind::BadIndex,
                    s,
                    format!("{role} slot of {owner} has index {}", x.index),
                );
            }
        }
    };
    for (id, block) in &a.blocks {
        match &block.kind {
            BlockKind::CenterBall { center } => want(r, *center, true, *id),
            BlockKind::MorseSolidTorus { center, conic }
            | BlockKind::TruncatedMorse { center, conic }
            | BlockKind::TrivialBubble { center, conic, .. } => {
                want(r, *center, true, *id);
                want(r, *conic, false, *id);
                if let (Some(c), Some(k)) =
                    (a.singularities.get(center), a.singularities.get(conic))
                {
                    if c.sign() == k.sign() {
                        r.push(
                            ViolationKind::BadIndex,
                            id,
                            "center and conic have equal parity",
                        );
                    }
                }
            }
            BlockKind::BallWithSpots { conics }
            | BlockKind::TruncatedBubble { conics, .. }
            | BlockKind::SpecialBubble { conics, .. } => {
                for c in conics {
                    want(r, *c, false, *id);
                }
            }
            BlockKind::Bubble { conic, .. } => want(r, *conic, false, *id),
            BlockKind::DoubleConeChart { around, .. } => match a.singularities.get(around) {
                None => r.push(
                    ViolationKind::DanglingReference,
                    id,
                    format!("chart around {around}"),
                ),
                Some(x) if !x.is_conic() => {
                    r.push(ViolationKind::BadIndex, id, "chart around a center")
                }
                _ => {}
            },
            _ => {}
        }
    }
    for (id, g) in &a.gluings {
        if let GluingKind::ConnectedSum { conic, .. } = g.kind {
            if a.singularities.get(&conic).is_some_and(|x| !x.is_conic()) {
                r.push(ViolationKind::BadIndex, id, "sum singularity is not conic");
            }
        }
    }
}

fn check_spots(a: &Assembly, r: &mut Report) {
    for (id, spot) in &a.spots {
        let Some(owner) = a.block(spot.owner) else {
            r.push(
                ViolationKind::DanglingReference,
                id,
                format!("owner {}", spot.owner),
            );
            continue;
        };
        if !owner.admits_spots() {
            r.push(
                ViolationKind::SpotPlacement,
                id,
                format!("{} carries no spots", owner.token()),
            );
        }
        let n = owner.interfaces().len();
        match spot.interface {
            Some(i) if (i as usize) >= n => r.push(
                ViolationKind::SpotPlacement,
                id,
                format!("interface t{i} out of range"),
            ),
            None if n > 0 => r.push(ViolationKind::SpotPlacement, id, "missing interface"),
            _ => {}
        }
        match a.singularities.get(&spot.associated) {
            None => r.push(
                ViolationKind::DanglingReference,
                id,
                format!("associated {}", spot.associated),
            ),
            Some(s) if !s.is_conic() => r.push(
                ViolationKind::SpotPlacement,
                id,
                "associated singularity is a center",
            ),
            _ => {}
        }
        if matches!(owner, BlockKind::BallWithSpots { .. }) && !spot.holonomy_trivial {
            r.push(
                ViolationKind::SpotPlacement,
                id,
                "perfect disc with non-trivial holonomy",
            );
        }
    }
}

fn check_gluings(a: &Assembly, r: &mut Report) {
    let mut spot_uses: BTreeMap<SpotId, usize> = BTreeMap::new();
    for (id, g) in &a.gluings {
        match &g.kind {
            GluingKind::Tangent { a: p, b: q, .. } => {
                for port in [p, q] {
                    let ok = a
                        .block(port.block)
                        .is_some_and(|k| (port.interface as usize) < k.interfaces().len());
                    if !ok {
                        r.push(ViolationKind::DanglingReference, id, format!("port {port}"));
                    }
                }
            }
            GluingKind::SpotTransverse { a: s, b: t }
            | GluingKind::ConnectedSum { a: s, b: t, .. } => {
                *spot_uses.entry(*s).or_default() += 1;
                *spot_uses.entry(*t).or_default() += 1;
                match (a.spots.get(s), a.spots.get(t)) {
                    (Some(x), Some(y)) => {
                        if x.direction == y.direction {
                            r.push(
                                ViolationKind::DirectionMismatch,
                                id,
                                format!("{s} and {t} both {}", x.direction.token()),
                            );
                        }
                        if s == t {
                            r.push(ViolationKind::MultiplyGlued, id, "spot glued to itself");
                        }
                    }
                    _ => r.push(
                        ViolationKind::DanglingReference,
                        id,
                        format!("spots {s}, {t}"),
                    ),
                }
            }
        }
    }
    for id in a.spots.keys() {
        match spot_uses.get(id).copied().unwrap_or(0) {
            0 => r.push(ViolationKind::OpenInterface, id, "spot not glued"),
            1 => {}
            _ => r.push(ViolationKind::MultiplyGlued, id, "spot in several gluings"),
        }
    }
    let comps = boundary_components(a);
    let mut comp_of: BTreeMap<Port, usize> = BTreeMap::new();
    for (i, c) in comps.iter().enumerate() {
        for p in &c.ports {
            comp_of.insert(*p, i);
        }
    }
    let mut covered = vec![0usize; comps.len()];
    for (id, g) in &a.gluings {
        if let GluingKind::Tangent { a: p, b: q, genus } = g.kind {
            let (Some(&ci), Some(&cj)) = (comp_of.get(&p), comp_of.get(&q)) else {
                continue;
            };
            covered[ci] += 1;
            if ci != cj {
                covered[cj] += 1;
            } else {
                r.push(
                    ViolationKind::MultiplyGlued,
                    id,
                    "tangent gluing of a component to itself",
                );
            }
            if comps[ci].genus != genus || comps[cj].genus != genus {
                r.push(
                    ViolationKind::GenusMismatch,
                    id,
                    format!(
                        "declared {genus}, sides {} and {}",
                        comps[ci].genus, comps[cj].genus
                    ),
                );
            }
        }
    }
    for (c, n) in comps.iter().zip(&covered) {
        match n {
            0 => r.push(
                ViolationKind::OpenInterface,
                c.ports[0],
                "interface not glued",
            ),
            1 => {}
            _ => r.push(
                ViolationKind::MultiplyGlued,
                c.ports[0],
                "interface glued more than once",
            ),
        }
    }
}

fn check_leaves(a: &Assembly, r: &mut Report) {
    for (id, leaf) in &a.leaves {
        let owner_ok = match leaf.owner {
            Host::Block(b) => a.blocks.contains_key(&b),
            Host::Gluing(g) => a.gluings.contains_key(&g),
        };
        if !owner_ok {
            r.push(
                ViolationKind::DanglingReference,
                id,
                format!("owner {}", leaf.owner),
            );
        }
        if leaf.shape.requires_singularity() && leaf.singularities.is_empty() {
            r.push(
                ViolationKind::LeafShape,
                id,
                format!("{} without singularity", leaf.shape),
            );
        }
        if let Some(sc) = leaf.shape.forced_simply_connected() {
            if sc != leaf.simply_connected {
                r.push(
                    ViolationKind::LeafShape,
                    id,
                    format!(
                        "{} with simply_connected={}",
                        leaf.shape, leaf.simply_connected
                    ),
                );
            }
        }
        let mut seen = BTreeSet::new();
        for s in &leaf.singularities {
            match a.singularities.get(s) {
                None => r.push(
                    ViolationKind::DanglingReference,
                    id,
                    format!("singularity {s}"),
                ),
                Some(x) if x.leaf != Some(*id) => r.push(
                    ViolationKind::LeafShape,
                    id,
                    format!("{s} points at another leaf"),
                ),
                _ => {}
            }
            if !seen.insert(*s) {
                r.push(ViolationKind::LeafShape, id, format!("{s} listed twice"));
            }
        }
    }
}

fn check_special_blocks(a: &Assembly, r: &mut Report) {
    for (id, block) in &a.blocks {
        if let Some(host) = block.kind.host_leaf() {
            if !a.leaves.contains_key(&host) {
                r.push(
                    ViolationKind::DanglingReference,
                    id,
                    format!("host leaf {host}"),
                );
            }
        }
        match &block.kind {
            BlockKind::Bubble {
                conic,
                host,
                cap,
                inner,
            } => {
                if a.singularities
                    .get(conic)
                    .is_some_and(|s| s.leaf != Some(*host))
                {
                    r.push(
                        ViolationKind::Bubble,
                        id,
                        format!("{conic} is not on host leaf {host}"),
                    );
                }
                let Some(BlockKind::CenterBall { center }) = inner.block(*cap) else {
                    r.push(
                        ViolationKind::Bubble,
                        id,
                        format!("cap {cap} is not a center ball"),
                    );
                    continue;
                };
                if inner.singularities.len() < 2 {
                    r.push(ViolationKind::Bubble, id, "trivial interior");
                }
                if let (Some(c), Some(k)) =
                    (inner.singularities.get(center), a.singularities.get(conic))
                {
                    if c.sign() != k.sign() {
                        r.push(
                            ViolationKind::Bubble,
                            id,
                            "boundary conic parity disagrees with cap",
                        );
                    }
                }
                for v in validate(inner).violations {
                    r.push(v.kind, format!("{id}/{}", v.subject), v.detail);
                }
            }
            BlockKind::TrivialBubble { conic, host, .. } => {
                if a.singularities
                    .get(conic)
                    .is_some_and(|s| s.leaf != Some(*host))
                {
                    r.push(
                        ViolationKind::Bubble,
                        id,
                        format!("{conic} is not on host leaf {host}"),
                    );
                }
            }
            BlockKind::TruncatedBubble {
                conics,
                inward,
                outward,
                ..
            } => {
                check_truncated_bubble(a, *id, conics, *inward, *outward, r);
            }
            _ => {}
        }
    }
}

fn check_truncated_bubble(
    a: &Assembly,
    id: BlockId,
    conics: &[SingId],
    inward: SpotId,
    outward: SpotId,
    r: &mut Report,
) {
    let spots = a.spots_of(id);
    if spots.len() < 2 {
        r.push(ViolationKind::TruncatedBubble, id, "fewer than two spots");
    }
    let dirs: BTreeSet<Direction> = spots.iter().map(|s| a.spots[s].direction).collect();
    if dirs.len() < 2 {
        r.push(
            ViolationKind::TruncatedBubble,
            id,
            "spots do not have both directions",
        );
    }
    let mut assoc = BTreeSet::new();
    for s in &spots {
        let sp = &a.spots[s];
        if !assoc.insert(sp.associated) {
            r.push(
                ViolationKind::TruncatedBubble,
                id,
                format!("{} shared by several spots", sp.associated),
            );
        }
        if !conics.contains(&sp.associated) {
            r.push(
                ViolationKind::TruncatedBubble,
                id,
                format!("{s} associated outside the block"),
            );
        }
        if let Some((g, p)) = a.spot_partner(*s) {
            let transverse = matches!(a.gluings[&g].kind, GluingKind::SpotTransverse { .. });
            if !transverse || a.spots.get(&p).map(|x| x.owner) != Some(id) {
                r.push(
                    ViolationKind::TruncatedBubble,
                    id,
                    format!("{s} not paired inside the block"),
                );
            }
        }
    }
    for c in conics {
        if a.singularities.get(c).is_some_and(|x| x.leaf.is_some()) {
            r.push(
                ViolationKind::TruncatedBubble,
                id,
                format!("{c} lies on the tangent boundary"),
            );
        }
    }
    let designated = [inward, outward];
    for (s, want) in designated
        .iter()
        .zip([Direction::Inward, Direction::Outward])
    {
        match a.spots.get(s) {
            Some(sp) if sp.owner == id && sp.direction == want => {}
            _ => r.push(
                ViolationKind::TruncatedBubble,
                id,
                format!("designated spot {s} invalid"),
            ),
        }
    }
    if a.spot_partner(inward).map(|(_, p)| p) != Some(outward) {
        r.push(
            ViolationKind::TruncatedBubble,
            id,
            "designated spots are not joined",
        );
    }
}

fn check_connected(a: &Assembly, r: &mut Report) {
    let ids: Vec<BlockId> = a.blocks.keys().copied().collect();
    if ids.is_empty() {
        return;
    }
    let pos: BTreeMap<BlockId, usize> = ids.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    let join = |uf: &mut UnionFind, x: BlockId, y: BlockId| {
        if let (Some(&i), Some(&j)) = (pos.get(&x), pos.get(&y)) {
            uf.union(i, j);
        }
    };
    let gluing_blocks = |g: &GluingKind| -> Vec<BlockId> {
        match g {
            GluingKind::Tangent { a: p, b: q, .. } => vec![p.block, q.block],
            GluingKind::SpotTransverse { a: s, b: t }
            | GluingKind::ConnectedSum { a: s, b: t, .. } => [s, t]
                .iter()
                .filter_map(|x| a.spots.get(x).map(|sp| sp.owner))
                .collect(),
        }
    };
    let host_blocks = |h: Host| -> Vec<BlockId> {
        match h {
            Host::Block(b) => vec![b],
            Host::Gluing(g) => a
                .gluings
                .get(&g)
                .map(|x| gluing_blocks(&x.kind))
                .unwrap_or_default(),
        }
    };
    for g in a.gluings.values() {
        let bs = gluing_blocks(&g.kind);
        for w in bs.windows(2) {
            join(&mut uf, w[0], w[1]);
        }
    }
    for (id, block) in &a.blocks {
        let anchor = match &block.kind {
            BlockKind::DoubleConeChart { around, .. } => {
                a.singularities.get(around).map(|s| s.host)
            }
            kind => kind
                .host_leaf()
                .and_then(|l| a.leaves.get(&l))
                .map(|d| d.owner),
        };
        if let Some(h) = anchor {
            for b in host_blocks(h) {
                join(&mut uf, *id, b);
            }
        }
    }
    for leaf in a.leaves.values() {
        let bs = host_blocks(leaf.owner);
        for w in bs.windows(2) {
            join(&mut uf, w[0], w[1]);
        }
    }
    let roots: BTreeSet<usize> = (0..ids.len()).map(|i| uf.find(i)).collect();
    if roots.len() > 1 {
        let stray: Vec<String> = (0..ids.len())
            .filter(|&i| uf.find(i) != uf.find(0))
            .map(|i| ids[i].to_string())
            .collect();
        r.push(
            ViolationKind::Disconnected,
            stray.join(","),
            format!("{} pieces", roots.len()),
        );
    }
}
