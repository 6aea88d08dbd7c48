#![allow(dead_code)]

use morsefol::gen::{generate, GenSpec};
use morsefol::{
    Ambient, Assembly, Block, BlockId, BlockKind, Direction, Gluing, GluingKind, Host,
    LeafDescriptor, LeafId, LeafShape, Level, Port, SingId,
};

/// Singularities per Morse index, walked straight off the tables. Bubble
/// interiors are included without their cap center.
pub fn recount(a: &Assembly) -> [i64; 4] {
    let mut out = [0i64; 4];
    for s in a.singularities.values() {
        out[s.index as usize] += 1;
    }
    for b in a.blocks.values() {
        if let BlockKind::Bubble { cap, inner, .. } = &b.kind {
            let nested = recount(inner);
            for i in 0..4 {
                out[i] += nested[i];
            }
            if let Some(BlockKind::CenterBall { center }) = inner.block(*cap) {
                out[inner.singularities[center].index as usize] -= 1;
            }
        }
    }
    out
}

pub fn centers(c: &[i64; 4]) -> i64 {
    c[0] + c[3]
}

pub fn conics(c: &[i64; 4]) -> i64 {
    c[1] + c[2]
}

pub fn total(c: &[i64; 4]) -> i64 {
    c.iter().sum()
}

/// Σ (−1)^index over the recount.
pub fn signed(c: &[i64; 4]) -> i64 {
    c[0] - c[1] + c[2] - c[3]
}

pub fn port(block: BlockId) -> Port {
    Port {
        block,
        interface: 0,
    }
}

pub fn s3(name: &str) -> Assembly {
    Assembly::new(name, Ambient::S3)
}

/// Two center balls glued along their boundary sphere.
pub fn two_centers() -> Assembly {
    let mut a = s3("two_centers");
    let x = a.add_center_ball(0);
    let y = a.add_center_ball(3);
    a.add_gluing(GluingKind::Tangent {
        a: port(x),
        b: port(y),
        genus: 0,
    });
    a
}

pub fn leaf(a: &mut Assembly, owner: Host, shape: LeafShape, sings: Vec<SingId>) -> LeafId {
    let sc = matches!(
        shape,
        LeafShape::Sphere | LeafShape::Plane | LeafShape::Disc | LeafShape::Center
    );
    let compact = !matches!(shape, LeafShape::Plane | LeafShape::Generic);
    a.add_leaf(LeafDescriptor {
        owner,
        compact,
        shape,
        singularities: sings,
        simply_connected: sc,
    })
}

/// A trivial bubble (center 0, conic 1) on `host`.
pub fn add_trivial_bubble(a: &mut Assembly, host: LeafId) -> BlockId {
    let b = a.alloc_block();
    let center = a.add_sing(0, Host::Block(b));
    let conic = a.add_sing(1, Host::Block(b));
    a.singularities.get_mut(&conic).unwrap().leaf = Some(host);
    a.leaves.get_mut(&host).unwrap().singularities.push(conic);
    a.blocks.insert(
        b,
        Block {
            kind: BlockKind::TrivialBubble {
                center,
                conic,
                host,
            },
        },
    );
    b
}

/// Two centers with a trivial bubble on the glued sphere and a double-cone
/// chart around the bubble's conic point, cone at level 0.
pub fn charted() -> (Assembly, BlockId) {
    let mut a = two_centers();
    let g = *a.gluings.keys().next().unwrap();
    let l = leaf(&mut a, Host::Gluing(g), LeafShape::Sphere, vec![]);
    let tb = add_trivial_bubble(&mut a, l);
    let conic = match a.block(tb) {
        Some(BlockKind::TrivialBubble { conic, .. }) => *conic,
        _ => unreachable!(),
    };
    let chart = a.alloc_block();
    a.blocks.insert(
        chart,
        Block {
            kind: BlockKind::DoubleConeChart {
                around: conic,
                cone: Level(0),
            },
        },
    );
    (a, chart)
}

/// Joins two blocks by a connected sum with a conic point of `index`.
pub fn sum(a: &mut Assembly, x: BlockId, y: BlockId, index: u8) {
    let g = a.alloc_gluing();
    let conic = a.add_sing(index, Host::Gluing(g));
    let s = a.add_spot(x, Some(0), Direction::Outward, conic);
    let t = a.add_spot(y, Some(0), Direction::Inward, conic);
    a.gluings.insert(
        g,
        Gluing {
            kind: GluingKind::ConnectedSum { a: s, b: t, conic },
        },
    );
}

/// The double pretzel built by hand: two Reeb pairs summed with conic
/// indices 1 and 2, glued along the genus-2 boundary.
pub fn double_pretzel() -> Assembly {
    let mut a = s3("double_pretzel");
    let r = [
        a.add_reeb(false),
        a.add_reeb(false),
        a.add_reeb(false),
        a.add_reeb(false),
    ];
    sum(&mut a, r[0], r[1], 1);
    sum(&mut a, r[2], r[3], 2);
    a.add_gluing(GluingKind::Tangent {
        a: port(r[0]),
        b: port(r[2]),
        genus: 2,
    });
    a
}

/// A truncated bubble with `pairs` joined in/out spot pairs sitting on the
/// genus-2 leaf of the double pretzel.
pub fn with_truncated_bubble(mut a: Assembly, pairs: usize) -> (Assembly, BlockId) {
    let g = *a
        .gluings
        .iter()
        .find(|(_, g)| matches!(g.kind, GluingKind::Tangent { .. }))
        .unwrap()
        .0;
    let genus = match a.gluings[&g].kind {
        GluingKind::Tangent { genus, .. } => genus,
        _ => 0,
    };
    let host = a.add_leaf(LeafDescriptor {
        owner: Host::Gluing(g),
        compact: true,
        shape: LeafShape::for_genus(genus),
        singularities: vec![],
        simply_connected: genus == 0,
    });
    let tb = a.alloc_block();
    let mut conics = vec![];
    let mut first = None;
    for _ in 0..pairs {
        let cin = a.add_sing(1, Host::Block(tb));
        let cout = a.add_sing(2, Host::Block(tb));
        conics.extend([cin, cout]);
        let sin = a.add_spot(tb, None, Direction::Inward, cin);
        let sout = a.add_spot(tb, None, Direction::Outward, cout);
        a.glue_transverse(sin, sout);
        first.get_or_insert((sin, sout));
    }
    let (inward, outward) = first.unwrap();
    a.blocks.insert(
        tb,
        Block {
            kind: BlockKind::TruncatedBubble {
                conics,
                host,
                inward,
                outward,
            },
        },
    );
    (a, tb)
}

/// Random closed assembly from the generator, spread over the parameter
/// space by the seed.
pub fn random(seed: u64) -> Assembly {
    let size = (seed % 8) as u32;
    let depth = (seed / 8 % 3) as u32;
    let pants = if seed.is_multiple_of(5) {
        (seed / 5 % 3) as u32
    } else {
        0
    };
    generate(&GenSpec::random(seed, size, depth, pants)).expect("random spec is valid")
}

pub fn bubble_count(a: &Assembly) -> usize {
    a.blocks
        .values()
        .map(|b| match &b.kind {
            BlockKind::Bubble { inner, .. } => 1 + bubble_count(inner),
            BlockKind::SpecialBubble { .. } => 1,
            _ => 0,
        })
        .sum()
}
