//! Canonical relabelling, used as the isomorphism test between assemblies.
//!
//! Every object (block, gluing, singularity, leaf, spot) becomes a node of a
//! labelled graph. Colour refinement with individualization orders the nodes
//! by structure, and each identifier kind is then compacted to `1..=n` in
//! that order. Names and allocator state are ignored.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use super::{
    Assembly, Block, BlockKind, Gluing, GluingKind, Host, IdAlloc, LeafDescriptor, Port,
    Singularity, Spot,
};
use crate::ids::{BlockId, GluingId, LeafId, SingId, SpotId};

struct Relabel {
    recurse: bool,
    block: BTreeMap<BlockId, BlockId>,
    gluing: BTreeMap<GluingId, GluingId>,
    sing: BTreeMap<SingId, SingId>,
    leaf: BTreeMap<LeafId, LeafId>,
    spot: BTreeMap<SpotId, SpotId>,
}

fn compact<K: Ord + Copy, V>(
    keys: impl Iterator<Item = K>,
    make: impl Fn(u32) -> V,
) -> BTreeMap<K, V> {
    keys.enumerate()
        .map(|(i, k)| (k, make(i as u32 + 1)))
        .collect()
}

impl Relabel {
    fn of(a: &Assembly) -> Self {
        let g = Graph::of(a);
        let colour = g.discrete();
        let order = |kind: u8| -> Vec<u32> {
            let mut v: Vec<(u64, u32)> = g
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.0 == kind)
                .map(|(i, n)| (colour[i], n.1))
                .collect();
            v.sort();
            v.into_iter().map(|(_, id)| id).collect()
        };
        Relabel {
            recurse: true,
            block: compact(order(0).into_iter().map(BlockId), BlockId),
            gluing: compact(order(1).into_iter().map(GluingId), GluingId),
            sing: compact(order(2).into_iter().map(SingId), SingId),
            leaf: compact(order(3).into_iter().map(LeafId), LeafId),
            spot: compact(order(4).into_iter().map(SpotId), SpotId),
        }
    }

    fn shift(a: &Assembly, off: IdAlloc) -> Self {
        Relabel {
            recurse: false,
            block: a
                .blocks
                .keys()
                .map(|k| (*k, BlockId(k.0 + off.block)))
                .collect(),
            gluing: a
                .gluings
                .keys()
                .map(|k| (*k, GluingId(k.0 + off.gluing)))
                .collect(),
            sing: a
                .singularities
                .keys()
                .map(|k| (*k, SingId(k.0 + off.sing)))
                .collect(),
            leaf: a
                .leaves
                .keys()
                .map(|k| (*k, LeafId(k.0 + off.leaf)))
                .collect(),
            spot: a
                .spots
                .keys()
                .map(|k| (*k, SpotId(k.0 + off.spot)))
                .collect(),
        }
    }

    fn b(&self, x: BlockId) -> BlockId {
        self.block.get(&x).copied().unwrap_or(x)
    }
    fn g(&self, x: GluingId) -> GluingId {
        self.gluing.get(&x).copied().unwrap_or(x)
    }
    fn s(&self, x: SingId) -> SingId {
        self.sing.get(&x).copied().unwrap_or(x)
    }
    fn l(&self, x: LeafId) -> LeafId {
        self.leaf.get(&x).copied().unwrap_or(x)
    }
    fn p(&self, x: SpotId) -> SpotId {
        self.spot.get(&x).copied().unwrap_or(x)
    }
    fn host(&self, h: Host) -> Host {
        match h {
            Host::Block(b) => Host::Block(self.b(b)),
            Host::Gluing(g) => Host::Gluing(self.g(g)),
        }
    }
    fn port(&self, p: Port) -> Port {
        Port {
            block: self.b(p.block),
            interface: p.interface,
        }
    }
    fn sings(&self, v: &[SingId]) -> Vec<SingId> {
        v.iter().map(|s| self.s(*s)).collect()
    }

    fn kind(&self, k: &BlockKind) -> BlockKind {
        match k {
            BlockKind::CenterBall { center } => BlockKind::CenterBall {
                center: self.s(*center),
            },
            BlockKind::ReebSolidTorus { flat } => BlockKind::ReebSolidTorus { flat: *flat },
            BlockKind::MorseSolidTorus { center, conic } => BlockKind::MorseSolidTorus {
                center: self.s(*center),
                conic: self.s(*conic),
            },
            BlockKind::ProductBand { genus } => BlockKind::ProductBand { genus: *genus },
            BlockKind::BallWithSpots { conics } => BlockKind::BallWithSpots {
                conics: self.sings(conics),
            },
            BlockKind::Bubble {
                conic,
                host,
                cap,
                inner,
            } if !self.recurse => BlockKind::Bubble {
                conic: self.s(*conic),
                host: self.l(*host),
                cap: *cap,
                inner: inner.clone(),
            },
            BlockKind::Bubble {
                conic,
                host,
                cap,
                inner,
            } => {
                let inner_map = Relabel::of(inner);
                BlockKind::Bubble {
                    conic: self.s(*conic),
                    host: self.l(*host),
                    cap: inner_map.b(*cap),
                    inner: Box::new(inner_map.apply(inner)),
                }
            }
            BlockKind::TrivialBubble {
                center,
                conic,
                host,
            } => BlockKind::TrivialBubble {
                center: self.s(*center),
                conic: self.s(*conic),
                host: self.l(*host),
            },
            BlockKind::TruncatedBubble {
                conics,
                host,
                inward,
                outward,
            } => BlockKind::TruncatedBubble {
                conics: self.sings(conics),
                host: self.l(*host),
                inward: self.p(*inward),
                outward: self.p(*outward),
            },
            BlockKind::SpecialBubble { conics, host } => BlockKind::SpecialBubble {
                conics: self.sings(conics),
                host: self.l(*host),
            },
            BlockKind::DoubleConeChart { around, cone } => BlockKind::DoubleConeChart {
                around: self.s(*around),
                cone: *cone,
            },
            BlockKind::TruncatedReeb => BlockKind::TruncatedReeb,
            BlockKind::TruncatedMorse { center, conic } => BlockKind::TruncatedMorse {
                center: self.s(*center),
                conic: self.s(*conic),
            },
        }
    }

    fn apply(&self, a: &Assembly) -> Assembly {
        let blocks = a
            .blocks
            .iter()
            .map(|(id, b)| {
                (
                    self.b(*id),
                    Block {
                        kind: self.kind(&b.kind),
                    },
                )
            })
            .collect();
        let gluings = a
            .gluings
            .iter()
            .map(|(id, g)| {
                let kind = match &g.kind {
                    GluingKind::Tangent { a: p, b: q, genus } => GluingKind::Tangent {
                        a: self.port(*p),
                        b: self.port(*q),
                        genus: *genus,
                    },
                    GluingKind::SpotTransverse { a: s, b: t } => GluingKind::SpotTransverse {
                        a: self.p(*s),
                        b: self.p(*t),
                    },
                    GluingKind::ConnectedSum { a: s, b: t, conic } => GluingKind::ConnectedSum {
                        a: self.p(*s),
                        b: self.p(*t),
                        conic: self.s(*conic),
                    },
                };
                (self.g(*id), Gluing { kind })
            })
            .collect();
        let singularities = a
            .singularities
            .iter()
            .map(|(id, s)| {
                (
                    self.s(*id),
                    Singularity {
                        index: s.index,
                        host: self.host(s.host),
                        leaf: s.leaf.map(|l| self.l(l)),
                    },
                )
            })
            .collect();
        let leaves = a
            .leaves
            .iter()
            .map(|(id, d)| {
                (
                    self.l(*id),
                    LeafDescriptor {
                        owner: self.host(d.owner),
                        compact: d.compact,
                        shape: d.shape,
                        singularities: self.sings(&d.singularities),
                        simply_connected: d.simply_connected,
                    },
                )
            })
            .collect();
        let spots = a
            .spots
            .iter()
            .map(|(id, s)| {
                (
                    self.p(*id),
                    Spot {
                        owner: self.b(s.owner),
                        interface: s.interface,
                        direction: s.direction,
                        associated: self.s(s.associated),
                        holonomy_trivial: s.holonomy_trivial,
                    },
                )
            })
            .collect();
        let top = |it: Option<u32>| it.map_or(1, |v| v + 1);
        let next = IdAlloc {
            block: top(self.block.values().map(|v| v.0).max()),
            gluing: top(self.gluing.values().map(|v| v.0).max()),
            sing: top(self.sing.values().map(|v| v.0).max()),
            leaf: top(self.leaf.values().map(|v| v.0).max()),
            spot: top(self.spot.values().map(|v| v.0).max()),
        };
        Assembly {
            name: if self.recurse {
                String::new()
            } else {
                a.name.clone()
            },
            ambient: a.ambient.clone(),
            blocks,
            gluings,
            singularities,
            leaves,
            spots,
            next,
        }
    }
}

fn hash_of(x: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Objects of an assembly as a graph with labelled nodes and role-labelled
/// edges. A node is `(kind, raw id)` with kinds block, gluing, singularity,
/// leaf, spot numbered 0 to 4.
struct Graph {
    nodes: Vec<(u8, u32)>,
    labels: Vec<u64>,
    out: Vec<Vec<(String, usize)>>,
    inc: Vec<Vec<(String, usize)>>,
}

impl Graph {
    fn of(a: &Assembly) -> Self {
        let mut nodes = Vec::new();
        let mut labels = Vec::new();
        for (id, b) in &a.blocks {
            nodes.push((0, id.0));
            let extra = match &b.kind {
                BlockKind::Bubble { cap, inner, .. } => {
                    let m = Relabel::of(inner);
                    format!("{:?}{:?}", m.apply(inner), m.b(*cap))
                }
                BlockKind::ReebSolidTorus { flat } => flat.to_string(),
                BlockKind::ProductBand { genus } => genus.to_string(),
                BlockKind::DoubleConeChart { cone, .. } => cone.to_string(),
                _ => String::new(),
            };
            labels.push(hash_of((0u8, b.kind.token(), extra)));
        }
        for (id, g) in &a.gluings {
            nodes.push((1, id.0));
            let extra = match g.kind {
                GluingKind::Tangent { a: p, b: q, genus } => (genus, p.interface, q.interface),
                _ => (0, 0, 0),
            };
            labels.push(hash_of((1u8, g.kind.token(), extra)));
        }
        for (id, s) in &a.singularities {
            nodes.push((2, id.0));
            labels.push(hash_of((2u8, s.index)));
        }
        for (id, l) in &a.leaves {
            nodes.push((3, id.0));
            labels.push(hash_of((3u8, l.compact, l.shape, l.simply_connected)));
        }
        for (id, s) in &a.spots {
            nodes.push((4, id.0));
            labels.push(hash_of((4u8, s.interface, s.direction, s.holonomy_trivial)));
        }
        let index: BTreeMap<(u8, u32), usize> =
            nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut out = vec![Vec::new(); nodes.len()];
        let mut inc = vec![Vec::new(); nodes.len()];
        let mut edge = |from: (u8, u32), role: String, to: (u8, u32)| {
            if let (Some(&x), Some(&y)) = (index.get(&from), index.get(&to)) {
                out[x].push((role.clone(), y));
                inc[y].push((role, x));
            }
        };
        let host = |h: Host| match h {
            Host::Block(b) => (0, b.0),
            Host::Gluing(g) => (1, g.0),
        };
        for (id, b) in &a.blocks {
            let me = (0, id.0);
            let sings: Vec<(&str, SingId)> = match &b.kind {
                BlockKind::CenterBall { center } => vec![("center", *center)],
                BlockKind::MorseSolidTorus { center, conic }
                | BlockKind::TruncatedMorse { center, conic }
                | BlockKind::TrivialBubble { center, conic, .. } => {
                    vec![("center", *center), ("conic", *conic)]
                }
                BlockKind::Bubble { conic, .. } => vec![("conic", *conic)],
                BlockKind::DoubleConeChart { around, .. } => vec![("around", *around)],
                BlockKind::BallWithSpots { conics }
                | BlockKind::TruncatedBubble { conics, .. }
                | BlockKind::SpecialBubble { conics, .. } => {
                    conics.iter().map(|c| ("conics", *c)).collect()
                }
                _ => vec![],
            };
            for (i, (role, s)) in sings.into_iter().enumerate() {
                let role = if role == "conics" {
                    format!("conics{i}")
                } else {
                    role.to_string()
                };
                edge(me, role, (2, s.0));
            }
            if let Some(l) = b.kind.host_leaf() {
                edge(me, "host".into(), (3, l.0));
            }
            if let BlockKind::TruncatedBubble {
                inward, outward, ..
            } = &b.kind
            {
                edge(me, "inward".into(), (4, inward.0));
                edge(me, "outward".into(), (4, outward.0));
            }
        }
        for (id, g) in &a.gluings {
            let me = (1, id.0);
            match g.kind {
                GluingKind::Tangent { a: p, b: q, .. } => {
                    edge(me, "a".into(), (0, p.block.0));
                    edge(me, "b".into(), (0, q.block.0));
                }
                GluingKind::SpotTransverse { a: s, b: t } => {
                    edge(me, "a".into(), (4, s.0));
                    edge(me, "b".into(), (4, t.0));
                }
                GluingKind::ConnectedSum { a: s, b: t, conic } => {
                    edge(me, "a".into(), (4, s.0));
                    edge(me, "b".into(), (4, t.0));
                    edge(me, "conic".into(), (2, conic.0));
                }
            }
        }
        for (id, s) in &a.singularities {
            edge((2, id.0), "host".into(), host(s.host));
            if let Some(l) = s.leaf {
                edge((2, id.0), "leaf".into(), (3, l.0));
            }
        }
        for (id, l) in &a.leaves {
            edge((3, id.0), "owner".into(), host(l.owner));
            for (i, s) in l.singularities.iter().enumerate() {
                edge((3, id.0), format!("s{i}"), (2, s.0));
            }
        }
        for (id, s) in &a.spots {
            edge((4, id.0), "owner".into(), (0, s.owner.0));
            edge((4, id.0), "associated".into(), (2, s.associated.0));
        }
        Graph {
            nodes,
            labels,
            out,
            inc,
        }
    }

    fn refine(&self, mut colour: Vec<u64>) -> Vec<u64> {
        let classes = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
        let mut n = classes(&colour);
        loop {
            let next: Vec<u64> = (0..colour.len())
                .map(|i| {
                    let mut o: Vec<(&str, u64)> = self.out[i]
                        .iter()
                        .map(|(r, t)| (r.as_str(), colour[*t]))
                        .collect();
                    let mut p: Vec<(&str, u64)> = self.inc[i]
                        .iter()
                        .map(|(r, t)| (r.as_str(), colour[*t]))
                        .collect();
                    o.sort();
                    p.sort();
                    hash_of((colour[i], o, p))
                })
                .collect();
            let m = classes(&next);
            colour = next;
            if m == n {
                return colour;
            }
            n = m;
        }
    }

    /// Refines until every node has its own colour, individualizing the
    /// lowest raw id of the first tied class whenever refinement stalls.
    fn discrete(&self) -> Vec<u64> {
        let mut colour = self.refine(self.labels.clone());
        loop {
            let mut by: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (i, c) in colour.iter().enumerate() {
                by.entry(*c).or_default().push(i);
            }
            let Some(tied) = by.values().find(|v| v.len() > 1) else {
                return colour;
            };
            let pick = *tied.iter().min_by_key(|i| self.nodes[**i]).unwrap();
            colour[pick] = hash_of((colour[pick], "individual"));
            colour = self.refine(colour);
        }
    }
}

/// The canonical representative of the isomorphism class of `a`.
pub fn canonical(a: &Assembly) -> Assembly {
    Relabel::of(a).apply(a)
}

pub fn isomorphic(a: &Assembly, b: &Assembly) -> bool {
    canonical(a) == canonical(b)
}

/// `a` with every identifier moved up by the matching offset; bubble
/// interiors keep their own numbering.
pub(crate) fn shifted(a: &Assembly, off: IdAlloc) -> Assembly {
    let mut out = Relabel::shift(a, off).apply(a);
    out.next = IdAlloc {
        block: out.next.block.max(a.next.block + off.block),
        gluing: out.next.gluing.max(a.next.gluing + off.gluing),
        sing: out.next.sing.max(a.next.sing + off.sing),
        leaf: out.next.leaf.max(a.next.leaf + off.leaf),
        spot: out.next.spot.max(a.next.spot + off.spot),
    };
    out
}
