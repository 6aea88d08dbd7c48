use super::{DiscSite, Item, Ref, RewriteError, RewriteOp, RewriteStep};
use crate::detect::find_trivial_pairs;
use crate::ids::{BlockId, LeafId, Level, SingId};
use crate::model::canon::shifted;
use crate::model::{
    Ambient, Assembly, Block, BlockKind, GluingKind, Host, IdAlloc, LeafDescriptor, LeafShape,
    Port, Spot,
};

type Outcome = Result<(Assembly, RewriteStep), RewriteError>;

fn invalid(msg: impl Into<String>) -> RewriteError {
    RewriteError::InvalidSite(msg.into())
}

fn chart_cone(a: &Assembly, chart: BlockId) -> Result<Level, RewriteError> {
    match a.block(chart) {
        Some(BlockKind::DoubleConeChart { cone, .. }) => Ok(*cone),
        Some(k) => Err(invalid(format!(
            "{chart} is a {}, not a double_cone_chart",
            k.token()
        ))),
        None => Err(invalid(format!("no block {chart}"))),
    }
}

fn set_cone(a: &Assembly, chart: BlockId, level: Level, op: RewriteOp) -> Outcome {
    let mut out = a.clone();
    if let Some(BlockKind::DoubleConeChart { cone, .. }) = out.block_mut(chart) {
        *cone = level;
    }
    let step = RewriteStep::record(op, a, &out);
    Ok((out, step))
}

/// Modification (A): the two disc leaves below the cone are joined at a
/// lower level, moving the singular level down.
pub fn morse_mod_a(a: &Assembly, chart: BlockId, level: Level) -> Outcome {
    let cone = chart_cone(a, chart)?;
    if level >= cone {
        return Err(RewriteError::InvalidLevel { level, cone });
    }
    set_cone(a, chart, level, RewriteOp::MorseModA { chart, level })
}

/// Modification (B): an essential curve of a cylindrical leaf above the cone
/// is pinched, moving the singular level up.
pub fn morse_mod_b(a: &Assembly, chart: BlockId, level: Level) -> Outcome {
    let cone = chart_cone(a, chart)?;
    if level <= cone {
        return Err(RewriteError::InvalidLevel { level, cone });
    }
    set_cone(a, chart, level, RewriteOp::MorseModB { chart, level })
}

pub fn split_singular_leaf(a: &Assembly, leaf: LeafId) -> Outcome {
    let desc = a
        .leaves
        .get(&leaf)
        .ok_or_else(|| invalid(format!("no leaf {leaf}")))?;
    let conics: Vec<SingId> = desc
        .singularities
        .iter()
        .copied()
        .filter(|s| a.singularities.get(s).is_some_and(|x| x.is_conic()))
        .collect();
    if conics.len() < 2 {
        return Err(RewriteError::NothingToSplit(leaf));
    }
    let mut out = a.clone();
    for c in &conics[1..] {
        let fresh = out.alloc_leaf();
        out.leaves.insert(
            fresh,
            LeafDescriptor {
                singularities: vec![*c],
                ..desc.clone()
            },
        );
        if let Some(l) = out.leaves.get_mut(&leaf) {
            l.singularities.retain(|s| s != c);
        }
        if let Some(s) = out.singularities.get_mut(c) {
            s.leaf = Some(fresh);
        }
        for block in out.blocks.values_mut() {
            match &mut block.kind {
                BlockKind::Bubble { conic, host, .. }
                | BlockKind::TrivialBubble { conic, host, .. }
                    if *conic == *c && *host == leaf =>
                {
                    *host = fresh
                }
                _ => {}
            }
        }
    }
    let step = RewriteStep::record(RewriteOp::SplitSingularLeaf { leaf }, a, &out);
    Ok((out, step))
}

fn check_disc_site(a: &Assembly, site: DiscSite) -> Result<(), RewriteError> {
    let kind = a
        .block(site.block)
        .ok_or_else(|| invalid(format!("no block {}", site.block)))?;
    if !kind.admits_spots()
        || matches!(
            kind,
            BlockKind::TruncatedBubble { .. } | BlockKind::SpecialBubble { .. }
        )
    {
        return Err(invalid(format!(
            "{} ({}) has no free disc site",
            site.block,
            kind.token()
        )));
    }
    let n = kind.interfaces().len();
    match site.interface {
        Some(i) if (i as usize) < n => Ok(()),
        _ => Err(invalid(format!(
            "{} has no interface {:?}",
            site.block, site.interface
        ))),
    }
}

/// Connected sum of `a1` and `a2` through disc sites on their boundaries.
/// The ids of `a2` are shifted past those of `a1`.
pub fn connected_sum(
    a1: &Assembly,
    a2: &Assembly,
    first: DiscSite,
    second: DiscSite,
    index: u8,
) -> Outcome {
    check_disc_site(a1, first)?;
    check_disc_site(a2, second)?;
    if first.direction == second.direction {
        return Err(RewriteError::OrientationMismatch);
    }
    if !matches!(index, 1 | 2) {
        return Err(invalid(format!(
            "sum singularity index {index} is not conic"
        )));
    }
    let off = IdAlloc {
        block: a1.next.block - 1,
        gluing: a1.next.gluing - 1,
        sing: a1.next.sing - 1,
        leaf: a1.next.leaf - 1,
        spot: a1.next.spot - 1,
    };
    let b = shifted(a2, off);
    let mut out = a1.clone();
    out.name = format!("{}#{}", a1.name, a2.name);
    out.blocks.extend(b.blocks);
    out.gluings.extend(b.gluings);
    out.singularities.extend(b.singularities);
    out.leaves.extend(b.leaves);
    out.spots.extend(b.spots);
    out.next = b.next;
    let g = out.alloc_gluing();
    let conic = out.alloc_sing();
    out.singularities.insert(
        conic,
        crate::model::Singularity {
            index,
            host: Host::Gluing(g),
            leaf: None,
        },
    );
    let s1 = out.add_spot(first.block, first.interface, first.direction, conic);
    let s2 = out.add_spot(
        BlockId(second.block.0 + off.block),
        second.interface,
        second.direction,
        conic,
    );
    out.gluings.insert(
        g,
        crate::model::Gluing {
            kind: GluingKind::ConnectedSum {
                a: s1,
                b: s2,
                conic,
            },
        },
    );
    let op = RewriteOp::ConnectedSum {
        other: Box::new(a2.clone()),
        first,
        second,
        index,
    };
    let step = RewriteStep::record(op, a1, &out);
    Ok((out, step))
}

/// Removes a block with everything that only exists because of it: hosted
/// singularities, its spots and their gluings, leaves it owns and blocks
/// attached to those leaves. Spots on other blocks are left open.
pub(crate) fn remove_block(a: &mut Assembly, id: BlockId) {
    let Some(block) = a.blocks.remove(&id) else {
        return;
    };
    for s in block.kind.hosted() {
        a.drop_sing(s);
    }
    for s in a.spots_of(id) {
        if let Some((_, g)) = a.drop_spot(s, false) {
            if let GluingKind::ConnectedSum { conic, .. } = g.kind {
                a.drop_sing(conic);
            }
            if let Some((x, y)) = g.kind.spots() {
                for other in [x, y] {
                    if a.spots.get(&other).is_some_and(|sp| sp.owner == id) {
                        a.spots.remove(&other);
                    }
                }
            }
        }
    }
    a.gluings.retain(|_, g| !matches!(g.kind, GluingKind::Tangent { a: p, b: q, .. } if p.block == id || q.block == id));
    let owned: Vec<LeafId> = a
        .leaves
        .iter()
        .filter(|(_, l)| l.owner == Host::Block(id))
        .map(|(k, _)| *k)
        .collect();
    for l in owned {
        remove_leaf(a, l);
    }
}

fn remove_leaf(a: &mut Assembly, leaf: LeafId) {
    let Some(desc) = a.leaves.remove(&leaf) else {
        return;
    };
    for s in desc.singularities {
        if let Some(x) = a.singularities.get_mut(&s) {
            x.leaf = None;
        }
    }
    let attached: Vec<BlockId> = a
        .blocks
        .iter()
        .filter(|(_, b)| b.kind.host_leaf() == Some(leaf))
        .map(|(k, _)| *k)
        .collect();
    for b in attached {
        remove_block(a, b);
    }
}

pub fn eliminate_trivial_pair(a: &Assembly, center: SingId, conic: SingId) -> Outcome {
    if !find_trivial_pairs(a).contains(&(center, conic)) {
        return Err(RewriteError::NotATrivialPair(center, conic));
    }
    let mut out = a.clone();
    let Some(Host::Block(owner)) = a.singularities.get(&center).map(|s| s.host) else {
        return Err(RewriteError::NotATrivialPair(center, conic));
    };
    match a.block(owner) {
        Some(BlockKind::TrivialBubble { .. }) => remove_block(&mut out, owner),
        Some(BlockKind::CenterBall { .. }) => {
            let spot = a.spots_of(owner)[0];
            let (gid, partner) = a
                .spot_partner(spot)
                .ok_or(RewriteError::NotATrivialPair(center, conic))?;
            let Spot {
                owner: to_block,
                interface,
                ..
            } = a.spots[&partner].clone();
            let target = Port {
                block: to_block,
                interface: interface.unwrap_or(0),
            };
            out.repoint_port(
                Port {
                    block: owner,
                    interface: 0,
                },
                target,
            );
            for l in out.leaves.values_mut() {
                if l.owner == Host::Block(owner) || l.owner == Host::Gluing(gid) {
                    l.owner = Host::Block(to_block);
                }
            }
            out.spots.remove(&partner);
            remove_block(&mut out, owner);
        }
        _ => return Err(RewriteError::NotATrivialPair(center, conic)),
    }
    let step = RewriteStep::record(RewriteOp::EliminateTrivialPair { center, conic }, a, &out);
    Ok((out, step))
}

/// Runs `f` on the interior of the bubble reached through `prefix`.
fn within(
    a: &Assembly,
    prefix: &[BlockId],
    f: &dyn Fn(&Assembly) -> Result<Assembly, RewriteError>,
) -> Result<Assembly, RewriteError> {
    let Some((&head, rest)) = prefix.split_first() else {
        return f(a);
    };
    let mut out = a.clone();
    match out.block_mut(head) {
        Some(BlockKind::Bubble { inner, .. }) => {
            let replaced = within(inner, rest, f)?;
            **inner = replaced;
            Ok(out)
        }
        _ => Err(invalid(format!("{head} is not a bubble"))),
    }
}

fn split_path(path: &[BlockId]) -> Result<(&[BlockId], BlockId), RewriteError> {
    path.split_last()
        .map(|(last, prefix)| (prefix, *last))
        .ok_or_else(|| invalid("empty bubble path"))
}

fn fill_top(a: &Assembly, bubble: BlockId) -> Result<Assembly, RewriteError> {
    let (conic, host, cap_index) = match a.block(bubble) {
        Some(BlockKind::Bubble {
            conic,
            host,
            cap,
            inner,
        }) => {
            let cap_index = match inner.block(*cap) {
                Some(BlockKind::CenterBall { center }) => {
                    inner.singularities.get(center).map_or(0, |s| s.index)
                }
                _ => 0,
            };
            (*conic, *host, cap_index)
        }
        Some(k) => {
            return Err(invalid(format!(
                "{bubble} is a {}, not a bubble",
                k.token()
            )))
        }
        None => return Err(invalid(format!("no block {bubble}"))),
    };
    let mut out = a.clone();
    let center = out.add_sing(3 - cap_index, Host::Block(bubble));
    out.blocks.insert(
        bubble,
        Block {
            kind: BlockKind::TrivialBubble {
                center,
                conic,
                host,
            },
        },
    );
    Ok(out)
}

/// Replaces the interior of a bubble by concentric spheres around a new
/// center, turning it into a trivial bubble.
pub fn fill_with_center(a: &Assembly, path: &[BlockId]) -> Outcome {
    let (prefix, bubble) = split_path(path)?;
    let out = within(a, prefix, &|x| fill_top(x, bubble))?;
    let step = RewriteStep::record(
        RewriteOp::FillWithCenter {
            path: path.to_vec(),
        },
        a,
        &out,
    );
    Ok((out, step))
}

fn eliminate_special(a: &Assembly, bubble: BlockId) -> Result<Assembly, RewriteError> {
    let mut out = a.clone();
    remove_block(&mut out, bubble);
    Ok(out)
}

/// Fills the bubble at `path` with a center and cancels the resulting
/// trivial pair. A special bubble is removed in one stroke.
pub fn eliminate_bubble(a: &Assembly, path: &[BlockId]) -> Outcome {
    let (prefix, bubble) = split_path(path)?;
    let target = {
        let mut cur = a;
        for b in prefix {
            match cur.block(*b) {
                Some(BlockKind::Bubble { inner, .. }) => cur = inner,
                _ => return Err(invalid(format!("{b} is not a bubble"))),
            }
        }
        cur.block(bubble).cloned()
    };
    let op = RewriteOp::EliminateBubble {
        path: path.to_vec(),
    };
    match target {
        Some(BlockKind::SpecialBubble { .. }) => {
            let out = within(a, prefix, &|x| eliminate_special(x, bubble))?;
            let step = RewriteStep::record(op, a, &out);
            Ok((out, step))
        }
        Some(BlockKind::Bubble { conic, .. }) => {
            let (filled, fill) = fill_with_center(a, path)?;
            let center = {
                let mut cur = &filled;
                for b in prefix {
                    if let Some(BlockKind::Bubble { inner, .. }) = cur.block(*b) {
                        cur = inner;
                    }
                }
                match cur.block(bubble) {
                    Some(BlockKind::TrivialBubble { center, .. }) => *center,
                    _ => return Err(invalid("fill did not produce a trivial bubble")),
                }
            };
            let out = within(&filled, prefix, &|x| {
                eliminate_trivial_pair(x, center, conic).map(|r| r.0)
            })?;
            let pair = RewriteStep::record(
                RewriteOp::EliminateTrivialPair { center, conic },
                &filled,
                &out,
            );
            let step = RewriteStep::record(op, a, &out).with_substeps(vec![fill, pair]);
            Ok((out, step))
        }
        Some(k) => Err(invalid(format!(
            "{bubble} is a {}, not a bubble",
            k.token()
        ))),
        None => Err(invalid(format!("no block {bubble}"))),
    }
}

fn truncated_parts(
    a: &Assembly,
    tb: BlockId,
) -> Result<(Vec<SingId>, LeafId, crate::ids::SpotId, crate::ids::SpotId), RewriteError> {
    match a.block(tb) {
        Some(BlockKind::TruncatedBubble {
            conics,
            host,
            inward,
            outward,
        }) => Ok((conics.clone(), *host, *inward, *outward)),
        Some(k) => Err(invalid(format!(
            "{tb} is a {}, not a truncated_bubble",
            k.token()
        ))),
        None => Err(invalid(format!("no block {tb}"))),
    }
}

/// Fits the designated inward and outward discs together, closing a sphere
/// leaf through both of their conic singularities.
pub fn corrective_movement(a: &Assembly, tb: BlockId) -> Outcome {
    let (conics, host, inward, outward) = truncated_parts(a, tb)?;
    let mut out = a.clone();
    let pair = [a.spots[&inward].associated, a.spots[&outward].associated];
    out.drop_spot(inward, true);
    out.spots.remove(&outward);
    out.blocks.insert(
        tb,
        Block {
            kind: BlockKind::SpecialBubble { conics, host },
        },
    );
    out.add_leaf(LeafDescriptor {
        owner: Host::Block(tb),
        compact: true,
        shape: LeafShape::Sphere,
        singularities: pair.to_vec(),
        simply_connected: true,
    });
    let step = RewriteStep::record(RewriteOp::CorrectiveMovement { tb }, a, &out);
    Ok((out, step))
}

/// Morse modifications around the perfect-disc singularities of a truncated
/// bubble: it is replaced by a bubble through the inward disc's singularity
/// whose interior holds the remaining singularities as nested bubbles.
pub fn truncated_to_bubbles(a: &Assembly, tb: BlockId) -> Outcome {
    let (conics, host, inward, _) = truncated_parts(a, tb)?;
    let first = a.spots[&inward].associated;
    let first_index = a.singularities[&first].index;
    let mut inner = Assembly::new(format!("{}-{tb}", a.name), Ambient::S3);
    let cap_index = if first_index == 1 { 3 } else { 0 };
    let cap = inner.add_center_ball(cap_index);
    let core = inner.add_center_ball(3 - cap_index);
    let wall = inner.add_gluing(GluingKind::Tangent {
        a: Port {
            block: cap,
            interface: 0,
        },
        b: Port {
            block: core,
            interface: 0,
        },
        genus: 0,
    });
    for c in conics.iter().filter(|c| **c != first) {
        let index = a.singularities[c].index;
        let b = inner.alloc_block();
        let conic = inner.add_sing(index, Host::Block(b));
        let leaf = inner.add_leaf(LeafDescriptor {
            owner: Host::Gluing(wall),
            compact: true,
            shape: LeafShape::Sphere,
            singularities: vec![conic],
            simply_connected: true,
        });
        let center = inner.add_sing(if index == 1 { 0 } else { 3 }, Host::Block(b));
        inner.blocks.insert(
            b,
            Block {
                kind: BlockKind::TrivialBubble {
                    center,
                    conic,
                    host: leaf,
                },
            },
        );
    }
    let mut out = a.clone();
    for s in a.spots_of(tb) {
        out.drop_spot(s, true);
    }
    out.blocks.remove(&tb);
    for c in &conics {
        if *c != first {
            out.drop_sing(*c);
        }
    }
    let bubble = out.alloc_block();
    out.blocks.insert(
        bubble,
        Block {
            kind: BlockKind::Bubble {
                conic: first,
                host,
                cap,
                inner: Box::new(inner),
            },
        },
    );
    if let Some(s) = out.singularities.get_mut(&first) {
        s.host = Host::Block(bubble);
        s.leaf = Some(host);
    }
    if let Some(l) = out.leaves.get_mut(&host) {
        l.singularities.push(first);
    }
    let step = RewriteStep::record(RewriteOp::TruncatedToBubbles { tb }, a, &out);
    Ok((out, step))
}

pub fn eliminate_truncated_bubble(a: &Assembly, tb: BlockId) -> Outcome {
    let (mid, open) = truncated_to_bubbles(a, tb)?;
    let bubble = match open
        .produced
        .iter()
        .find(|r| r.path.is_empty() && matches!(r.item, Item::Block(_)))
    {
        Some(Ref {
            item: Item::Block(b),
            ..
        }) => *b,
        _ => return Err(invalid("no bubble produced")),
    };
    let (out, close) = eliminate_bubble(&mid, &[bubble])?;
    let step = RewriteStep::record(RewriteOp::EliminateTruncatedBubble { tb }, a, &out)
        .with_substeps(vec![open, close]);
    Ok((out, step))
}

/// Turns a truncated Reeb or Morse component back into a full one when its
/// spot is capped by a one-spot trivially foliated ball.
pub fn complete_truncated_component(a: &Assembly, block: BlockId) -> Outcome {
    let full = match a.block(block) {
        Some(BlockKind::TruncatedReeb) => BlockKind::ReebSolidTorus { flat: false },
        Some(BlockKind::TruncatedMorse { center, conic }) => BlockKind::MorseSolidTorus {
            center: *center,
            conic: *conic,
        },
        Some(k) => {
            return Err(invalid(format!(
                "{block} is a {}, not a truncated component",
                k.token()
            )))
        }
        None => return Err(invalid(format!("no block {block}"))),
    };
    let spots = a.spots_of(block);
    let [spot] = spots[..] else {
        return Err(RewriteError::CannotComplete(block));
    };
    let (gid, partner) = a
        .spot_partner(spot)
        .ok_or(RewriteError::CannotComplete(block))?;
    if !matches!(a.gluings[&gid].kind, GluingKind::SpotTransverse { .. }) {
        return Err(RewriteError::CannotComplete(block));
    }
    let cap = a.spots[&partner].owner;
    if !matches!(a.block(cap), Some(BlockKind::BallWithSpots { .. })) || a.spots_of(cap).len() != 1
    {
        return Err(RewriteError::CannotComplete(block));
    }
    let mut out = a.clone();
    out.drop_spot(spot, true);
    remove_block(&mut out, cap);
    out.blocks.insert(block, Block { kind: full });
    let step = RewriteStep::record(RewriteOp::CompleteTruncatedComponent { block }, a, &out);
    Ok((out, step))
}

/// Replaces the foliation outside a bubble by concentric spheres: the result
/// is the bubble's interior, its cap becoming an ordinary center ball.
pub fn restrict_to_bubble(a: &Assembly, block: BlockId) -> Outcome {
    let inner = match a.block(block) {
        Some(BlockKind::Bubble { inner, .. }) => inner.as_ref().clone(),
        Some(k) => return Err(invalid(format!("{block} is a {}, not a bubble", k.token()))),
        None => return Err(invalid(format!("no block {block}"))),
    };
    let mut out = inner;
    out.name = a.name.clone();
    let items = |x: &Assembly, path: Vec<BlockId>| -> Vec<Ref> {
        let mut v: Vec<Item> = x.blocks.keys().map(|k| Item::Block(*k)).collect();
        v.extend(x.gluings.keys().map(|k| Item::Gluing(*k)));
        v.extend(x.singularities.keys().map(|k| Item::Sing(*k)));
        v.extend(x.leaves.keys().map(|k| Item::Leaf(*k)));
        v.extend(x.spots.keys().map(|k| Item::Spot(*k)));
        v.into_iter()
            .map(|item| Ref {
                path: path.clone(),
                item,
            })
            .collect()
    };
    let step = RewriteStep {
        op: RewriteOp::RestrictToBubble { block },
        site: vec![],
        consumed: items(a, vec![]),
        produced: items(&out, vec![block]),
        singularity_delta: crate::model::counts(a).delta_to(&crate::model::counts(&out)),
        substeps: vec![],
    };
    Ok((out, step))
}
