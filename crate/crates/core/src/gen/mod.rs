//! Seeded generators for the example families and for random closed
//! assemblies of S³.

mod pants;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ids::{BlockId, GluingId, LeafId, Level, SingId};
use crate::model::{
    Ambient, Assembly, Block, BlockKind, Direction, Gluing, GluingKind, Host, LeafDescriptor,
    LeafShape, Port,
};

pub use pants::{pants_attachments, PantsCase};

const MAX_CHAIN: u32 = 4096;
const MAX_SIZE: u32 = 256;
const MAX_DEPTH: u32 = 4;
const MAX_PANTS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    TwoCenters,
    SimplyConnectedChain(u32),
    DoublePretzel,
    NoCompactLeafVariant,
    MorsePair,
    Random {
        size: u32,
        bubble_depth: u32,
        pants_count: u32,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::TwoCenters => f.write_str("two_centers"),
            Family::SimplyConnectedChain(k) => write!(f, "simply_connected_chain({k})"),
            Family::DoublePretzel => f.write_str("double_pretzel"),
            Family::NoCompactLeafVariant => f.write_str("no_compact_leaf_variant"),
            Family::MorsePair => f.write_str("morse_pair"),
            Family::Random {
                size,
                bubble_depth,
                pants_count,
            } => {
                write!(f, "random({size},{bubble_depth},{pants_count})")
            }
        }
    }
}

impl FromStr for Family {
    type Err = GenError;

    /// Accepts `name` or `name(args)`; omitted arguments take small defaults.
    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::InvalidSpec(format!("unknown family `{s}`"));
        let s = s.trim();
        let (name, args) = match s.split_once('(') {
            Some((n, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                let args = inner
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<u32>, _>>()?;
                (n, args)
            }
            None => (s, vec![]),
        };
        let arity = |max: usize| if args.len() > max { Err(bad()) } else { Ok(()) };
        match name {
            "two_centers" => arity(0).map(|_| Family::TwoCenters),
            "simply_connected_chain" | "chain" => {
                arity(1).map(|_| Family::SimplyConnectedChain(args.first().copied().unwrap_or(1)))
            }
            "double_pretzel" => arity(0).map(|_| Family::DoublePretzel),
            "no_compact_leaf_variant" => arity(0).map(|_| Family::NoCompactLeafVariant),
            "morse_pair" => arity(0).map(|_| Family::MorsePair),
            "random" => arity(3).map(|_| Family::Random {
                size: args.first().copied().unwrap_or(5),
                bubble_depth: args.get(1).copied().unwrap_or(0),
                pants_count: args.get(2).copied().unwrap_or(0),
            }),
            _ => Err(bad()),
        }
    }
}

/// Decorations added on top of a family.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GenOptions {
    /// Trivial bubbles sitting on compact leaves (singular components).
    pub trivial_bubbles: u32,
    /// Product bands inserted into tangent gluings.
    pub extra_bands: u32,
    /// Double-cone charts around conic singularities.
    pub charts: u32,
    /// Put all the trivial bubbles on one leaf.
    pub multi_singular: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenSpec {
    pub seed: u64,
    pub family: Family,
    pub options: GenOptions,
}

impl GenSpec {
    pub fn new(seed: u64, family: Family) -> Self {
        GenSpec {
            seed,
            family,
            options: GenOptions::default(),
        }
    }

    pub fn random(seed: u64, size: u32, bubble_depth: u32, pants_count: u32) -> Self {
        GenSpec::new(
            seed,
            Family::Random {
                size,
                bubble_depth,
                pants_count,
            },
        )
    }

    pub fn with_options(mut self, options: GenOptions) -> Self {
        self.options = options;
        self
    }

    fn check(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        match self.family {
            Family::SimplyConnectedChain(k) if k > MAX_CHAIN => {
                return bad(format!("chain length {k} exceeds {MAX_CHAIN}"))
            }
            Family::Random {
                size,
                bubble_depth,
                pants_count,
            } => {
                if size > MAX_SIZE {
                    return bad(format!("size {size} exceeds {MAX_SIZE}"));
                }
                if bubble_depth > MAX_DEPTH {
                    return bad(format!("bubble depth {bubble_depth} exceeds {MAX_DEPTH}"));
                }
                if pants_count > MAX_PANTS {
                    return bad(format!("pants count {pants_count} exceeds {MAX_PANTS}"));
                }
            }
            _ => {}
        }
        let o = &self.options;
        if o.multi_singular && o.trivial_bubbles < 2 {
            return bad("multi_singular needs at least two trivial bubbles".into());
        }
        if o.trivial_bubbles > MAX_SIZE || o.extra_bands > MAX_SIZE || o.charts > MAX_SIZE {
            return bad(format!("option counts exceed {MAX_SIZE}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Plus,
    Minus,
}

impl Side {
    fn center(self) -> u8 {
        match self {
            Side::Plus => 0,
            Side::Minus => 3,
        }
    }

    fn conic(self) -> u8 {
        match self {
            Side::Plus => 1,
            Side::Minus => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Torus {
    Reeb(bool),
    Morse,
    TruncatedReeb,
    TruncatedMorse,
}

#[derive(Debug, Clone)]
enum Shape {
    Ball,
    Tori(Vec<Torus>),
    Cluster { direct: u32, pants: u32 },
}

impl Shape {
    fn genus(&self) -> u32 {
        match self {
            Shape::Ball => 0,
            Shape::Tori(t) => t.len() as u32,
            Shape::Cluster { direct, pants } => direct + 2 * pants,
        }
    }
}

/// Joins `x` and `y` by a connected sum through a fresh conic point.
fn sum(a: &mut Assembly, x: BlockId, y: BlockId, index: u8) -> GluingId {
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
    g
}

fn torus(a: &mut Assembly, side: Side, t: Torus) -> BlockId {
    match t {
        Torus::Reeb(flat) => a.add_reeb(flat),
        Torus::Morse => a.add_morse(side.center(), side.conic()),
        Torus::TruncatedReeb => {
            let b = a.alloc_block();
            a.blocks.insert(
                b,
                Block {
                    kind: BlockKind::TruncatedReeb,
                },
            );
            b
        }
        Torus::TruncatedMorse => {
            let b = a.alloc_block();
            let center = a.add_sing(side.center(), Host::Block(b));
            let conic = a.add_sing(side.conic(), Host::Block(b));
            a.blocks.insert(
                b,
                Block {
                    kind: BlockKind::TruncatedMorse { center, conic },
                },
            );
            b
        }
    }
}

/// A trivially foliated ball with `direct` pairs of its own spots glued
/// together and `pants` solid pairs of pants glued to it along all three of
/// their spots. Its boundary sphere plus the tubes has genus
/// `direct + 2 * pants`.
fn cluster(a: &mut Assembly, side: Side, direct: u32, pants: u32) -> BlockId {
    let genus = direct + 2 * pants;
    let b0 = a.alloc_block();
    let conics: Vec<SingId> = if genus == 1 {
        vec![
            a.add_sing(1, Host::Block(b0)),
            a.add_sing(2, Host::Block(b0)),
        ]
    } else {
        (1..genus)
            .map(|_| a.add_sing(side.conic(), Host::Block(b0)))
            .collect()
    };
    a.blocks.insert(
        b0,
        Block {
            kind: BlockKind::BallWithSpots {
                conics: conics.clone(),
            },
        },
    );
    for _ in 0..direct {
        let s = a.add_spot(b0, Some(0), Direction::Outward, conics[0]);
        let t = a.add_spot(
            b0,
            Some(0),
            Direction::Inward,
            *conics.last().unwrap_or(&conics[0]),
        );
        a.glue_transverse(s, t);
    }
    for _ in 0..pants {
        let p = a.alloc_block();
        a.blocks.insert(
            p,
            Block {
                kind: BlockKind::BallWithSpots { conics: vec![] },
            },
        );
        for _ in 0..3 {
            let s = a.add_spot(b0, Some(0), Direction::Outward, conics[0]);
            let t = a.add_spot(p, Some(0), Direction::Inward, conics[0]);
            a.glue_transverse(s, t);
        }
    }
    b0
}

fn side(a: &mut Assembly, side: Side, shape: &Shape) -> Port {
    let block = match shape {
        Shape::Ball => a.add_center_ball(side.center()),
        Shape::Tori(kinds) => {
            let blocks: Vec<BlockId> = kinds.iter().map(|t| torus(a, side, *t)).collect();
            for w in blocks.windows(2) {
                sum(a, w[0], w[1], side.conic());
            }
            blocks[0]
        }
        Shape::Cluster { direct, pants } => cluster(a, side, *direct, *pants),
    };
    Port {
        block,
        interface: 0,
    }
}

/// Glues a σ=+ side and a σ=− side along their boundary.
fn closed(name: &str, plus: &Shape, minus: &Shape) -> (Assembly, GluingId) {
    let mut a = Assembly::new(name, Ambient::S3);
    let p = side(&mut a, Side::Plus, plus);
    let q = side(&mut a, Side::Minus, minus);
    let g = a.glue_tangent(p, q);
    (a, g)
}

fn reeb_pair() -> Shape {
    Shape::Tori(vec![Torus::Reeb(false), Torus::Reeb(false)])
}

pub fn generate(spec: &GenSpec) -> Result<Assembly, GenError> {
    spec.check()?;
    let name = spec.family.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut a = match spec.family {
        Family::TwoCenters => closed(&name, &Shape::Ball, &Shape::Ball).0,
        Family::SimplyConnectedChain(k) => {
            let (mut a, _) = closed(&name, &Shape::Ball, &Shape::Ball);
            let mut prev = BlockId(1);
            for _ in 0..k {
                let c = a.add_center_ball(0);
                sum(&mut a, prev, c, 1);
                prev = c;
            }
            a
        }
        Family::DoublePretzel => closed(&name, &reeb_pair(), &reeb_pair()).0,
        Family::NoCompactLeafVariant => {
            let (mut a, g) = closed(&name, &reeb_pair(), &reeb_pair());
            a.add_leaf(LeafDescriptor {
                owner: Host::Gluing(g),
                compact: false,
                shape: LeafShape::Generic,
                singularities: vec![],
                simply_connected: false,
            });
            a
        }
        Family::MorsePair => {
            closed(
                &name,
                &Shape::Tori(vec![Torus::Morse, Torus::Morse]),
                &reeb_pair(),
            )
            .0
        }
        Family::Random {
            size,
            bubble_depth,
            pants_count,
        } => random(&name, &mut rng, size, bubble_depth, pants_count),
    };
    apply_options(&mut a, &mut rng, &spec.options)?;
    Ok(a)
}

/// Like [`generate`], but only for the random family.
pub fn generate_random(spec: &GenSpec) -> Result<Assembly, GenError> {
    match spec.family {
        Family::Random { .. } => generate(spec),
        ref f => Err(GenError::InvalidSpec(format!(
            "{f} is not the random family"
        ))),
    }
}

fn apply_options(a: &mut Assembly, rng: &mut ChaCha8Rng, o: &GenOptions) -> Result<(), GenError> {
    for _ in 0..o.extra_bands {
        let g = pick_tangent(a, rng);
        insert_band(a, g);
    }
    let shared = if o.multi_singular {
        Some(leaf_site(a, rng))
    } else {
        None
    };
    for _ in 0..o.trivial_bubbles {
        let leaf = match shared {
            Some(l) => l,
            None => leaf_site(a, rng),
        };
        trivial_bubble(a, rng, leaf);
    }
    for _ in 0..o.charts {
        if !chart(a, rng) {
            return Err(GenError::InvalidSpec(
                "no conic singularity to place a chart around".into(),
            ));
        }
    }
    Ok(())
}

fn tangent_gluings(a: &Assembly) -> Vec<GluingId> {
    a.gluings
        .iter()
        .filter(|(_, g)| matches!(g.kind, GluingKind::Tangent { .. }))
        .map(|(k, _)| *k)
        .collect()
}

fn pick_tangent(a: &Assembly, rng: &mut ChaCha8Rng) -> GluingId {
    *tangent_gluings(a)
        .choose(rng)
        .expect("closed assemblies have a tangent gluing")
}

/// Splits a tangent gluing by a product band of the same genus.
fn insert_band(a: &mut Assembly, g: GluingId) {
    let GluingKind::Tangent { a: p, b: q, genus } = a.gluings[&g].kind else {
        return;
    };
    let band = a.add_band(genus);
    a.gluings.insert(
        g,
        Gluing {
            kind: GluingKind::Tangent {
                a: p,
                b: Port {
                    block: band,
                    interface: 0,
                },
                genus,
            },
        },
    );
    a.add_gluing(GluingKind::Tangent {
        a: Port {
            block: band,
            interface: 1,
        },
        b: q,
        genus,
    });
}

/// Declares a fresh compact leaf, either the glued leaf of a tangent
/// gluing or a sphere inside a center ball.
fn leaf_site(a: &mut Assembly, rng: &mut ChaCha8Rng) -> LeafId {
    let balls: Vec<BlockId> = a
        .blocks
        .iter()
        .filter(|(_, b)| matches!(b.kind, BlockKind::CenterBall { .. }))
        .map(|(k, _)| *k)
        .collect();
    let (owner, genus) = if !balls.is_empty() && rng.gen_bool(0.3) {
        (Host::Block(*balls.choose(rng).expect("non-empty")), 0)
    } else {
        let g = pick_tangent(a, rng);
        let GluingKind::Tangent { genus, .. } = a.gluings[&g].kind else {
            unreachable!()
        };
        (Host::Gluing(g), genus)
    };
    a.add_leaf(LeafDescriptor {
        owner,
        compact: true,
        shape: LeafShape::for_genus(genus),
        singularities: vec![],
        simply_connected: genus == 0,
    })
}

fn attach_to_leaf(a: &mut Assembly, leaf: LeafId, s: SingId) {
    if let Some(x) = a.singularities.get_mut(&s) {
        x.leaf = Some(leaf);
    }
    if let Some(l) = a.leaves.get_mut(&leaf) {
        l.singularities.push(s);
    }
}

fn trivial_bubble(a: &mut Assembly, rng: &mut ChaCha8Rng, leaf: LeafId) -> BlockId {
    let (ci, ki) = if rng.gen_bool(0.5) { (0, 1) } else { (3, 2) };
    let b = a.alloc_block();
    let center = a.add_sing(ci, Host::Block(b));
    let conic = a.add_sing(ki, Host::Block(b));
    attach_to_leaf(a, leaf, conic);
    a.blocks.insert(
        b,
        Block {
            kind: BlockKind::TrivialBubble {
                center,
                conic,
                host: leaf,
            },
        },
    );
    b
}

fn chart(a: &mut Assembly, rng: &mut ChaCha8Rng) -> bool {
    let conics: Vec<SingId> = a
        .singularities
        .iter()
        .filter(|(_, s)| s.is_conic())
        .map(|(k, _)| *k)
        .collect();
    let Some(&around) = conics.choose(rng) else {
        return false;
    };
    let b = a.alloc_block();
    let cone = Level(rng.gen_range(-5000..=5000));
    a.blocks.insert(
        b,
        Block {
            kind: BlockKind::DoubleConeChart { around, cone },
        },
    );
    true
}

/// A center ball summed onto a block with a single tangential interface:
/// a trivial pair.
fn summed_ball(a: &mut Assembly, rng: &mut ChaCha8Rng) -> bool {
    let targets: Vec<BlockId> = a
        .blocks
        .iter()
        .filter(|(_, b)| {
            matches!(
                b.kind,
                BlockKind::CenterBall { .. }
                    | BlockKind::ReebSolidTorus { .. }
                    | BlockKind::MorseSolidTorus { .. }
            )
        })
        .map(|(k, _)| *k)
        .collect();
    let Some(&target) = targets.choose(rng) else {
        return false;
    };
    let (ci, ki) = if rng.gen_bool(0.5) { (0, 1) } else { (3, 2) };
    let c = a.add_center_ball(ci);
    sum(a, target, c, ki);
    true
}

/// A truncated bubble on a fresh leaf with `pairs` joined spot pairs.
fn truncated_bubble(a: &mut Assembly, rng: &mut ChaCha8Rng, pairs: u32) -> BlockId {
    let host = leaf_site(a, rng);
    let b = a.alloc_block();
    let mut conics = Vec::new();
    let mut designated = None;
    for _ in 0..pairs {
        let cin = a.add_sing(1, Host::Block(b));
        let cout = a.add_sing(2, Host::Block(b));
        conics.extend([cin, cout]);
        let sin = a.add_spot(b, None, Direction::Inward, cin);
        let sout = a.add_spot(b, None, Direction::Outward, cout);
        a.glue_transverse(sin, sout);
        designated.get_or_insert((sin, sout));
    }
    let (inward, outward) = designated.expect("at least one pair");
    a.blocks.insert(
        b,
        Block {
            kind: BlockKind::TruncatedBubble {
                conics,
                host,
                inward,
                outward,
            },
        },
    );
    b
}

/// A non-trivial bubble on a fresh leaf whose interior is itself a random
/// closed assembly, with a cap center ball summed onto it.
fn bubble(a: &mut Assembly, rng: &mut ChaCha8Rng, depth: u32, size: u32) -> BlockId {
    let host = leaf_site(a, rng);
    let b = a.alloc_block();
    let mut inner = random(
        &format!("{}/{b}", a.name),
        rng,
        size / 2,
        depth.saturating_sub(1),
        0,
    );
    let (cap_index, sum_index, conic_index) = if rng.gen_bool(0.5) {
        (0, 1, 2)
    } else {
        (3, 2, 1)
    };
    let targets: Vec<BlockId> = inner
        .blocks
        .iter()
        .filter(|(_, x)| {
            matches!(
                x.kind,
                BlockKind::CenterBall { .. }
                    | BlockKind::ReebSolidTorus { .. }
                    | BlockKind::MorseSolidTorus { .. }
                    | BlockKind::BallWithSpots { .. }
            )
        })
        .map(|(k, _)| *k)
        .collect();
    let target = *targets
        .choose(rng)
        .expect("every skeleton has a one-interface block");
    let cap = inner.add_center_ball(cap_index);
    sum(&mut inner, target, cap, sum_index);
    let conic = a.add_sing(conic_index, Host::Block(b));
    attach_to_leaf(a, host, conic);
    a.blocks.insert(
        b,
        Block {
            kind: BlockKind::Bubble {
                conic,
                host,
                cap,
                inner: Box::new(inner),
            },
        },
    );
    b
}

fn random_torus(rng: &mut ChaCha8Rng) -> Torus {
    if rng.gen_bool(0.6) {
        Torus::Reeb(rng.gen_bool(0.5))
    } else {
        Torus::Morse
    }
}

fn random_side(rng: &mut ChaCha8Rng, genus: u32) -> Shape {
    if genus == 0 {
        return Shape::Ball;
    }
    if rng.gen_bool(0.3) {
        let pants = if genus >= 2 && rng.gen_bool(0.5) {
            1
        } else {
            0
        };
        return Shape::Cluster {
            direct: genus - 2 * pants,
            pants,
        };
    }
    let mut tori: Vec<Torus> = (0..genus).map(|_| random_torus(rng)).collect();
    if genus >= 2 && rng.gen_bool(0.25) {
        let t = if rng.gen_bool(0.5) {
            Torus::TruncatedReeb
        } else {
            Torus::TruncatedMorse
        };
        let last = tori.len() - 1;
        tori[last] = t;
    }
    Shape::Tori(tori)
}

fn random(name: &str, rng: &mut ChaCha8Rng, size: u32, depth: u32, pants_count: u32) -> Assembly {
    let (plus, minus) = if pants_count > 0 {
        let m = pants_count.min(3);
        let k = rng.gen_range(0..=1);
        let c = Shape::Cluster {
            direct: k,
            pants: m,
        };
        let other = random_side(rng, k + 2 * m);
        if rng.gen_bool(0.5) {
            (c, other)
        } else {
            (other, c)
        }
    } else {
        let genus = [0, 0, 1, 1, 2, 3][rng.gen_range(0..6)];
        (random_side(rng, genus), random_side(rng, genus))
    };
    let (mut a, _) = closed(name, &plus, &minus);
    let toral = plus.genus() > 0;
    if depth > 0 {
        bubble(&mut a, rng, depth, size.max(2));
    }
    for _ in 0..size {
        match rng.gen_range(0..6) {
            0 => {
                summed_ball(&mut a, rng);
            }
            1 => {
                let g = pick_tangent(&a, rng);
                insert_band(&mut a, g);
            }
            2 => {
                let leaf = leaf_site(&mut a, rng);
                trivial_bubble(&mut a, rng, leaf);
            }
            3 => {
                chart(&mut a, rng);
            }
            4 if toral => {
                let pairs = rng.gen_range(1..=2);
                truncated_bubble(&mut a, rng, pairs);
            }
            5 if depth > 0 && rng.gen_bool(0.3) => {
                bubble(&mut a, rng, depth, size / 2);
            }
            _ => {
                let leaf = leaf_site(&mut a, rng);
                trivial_bubble(&mut a, rng, leaf);
            }
        }
    }
    a
}
