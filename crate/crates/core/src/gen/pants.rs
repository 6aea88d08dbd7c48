use crate::detect::{initial_state, ExpansionCase, ExpansionState};
use crate::ids::{BlockId, SingId, SpotId};
use crate::model::{Ambient, Assembly, Block, BlockKind, Direction, Host};

/// One way of gluing a solid pair of pants to a trivially foliated ball,
/// with the outcome the spot-count rule predicts.
#[derive(Debug, Clone)]
pub struct PantsCase {
    pub label: String,
    pub assembly: Assembly,
    pub ball: BlockId,
    pub along: SpotId,
    pub expected: ExpansionCase,
}

impl PantsCase {
    pub fn state(&self) -> ExpansionState {
        initial_state(&self.assembly, self.ball).expect("the case ball is a ball with spots")
    }
}

#[derive(Debug, Clone, Copy)]
enum Ends {
    /// First end captured by ball spot `i`, second end leaves the ball.
    One(usize),
    /// Ends captured by the distinct ball spots `i` and `j`.
    Two(usize, usize),
    /// The two ends glued to each other.
    Loop,
    /// Both ends leave; the pants carries a new conic point and the ends
    /// are associated to (old, new) or (new, new).
    Out { both_new: bool },
}

fn external(a: &mut Assembly, from: SpotId) {
    let q = a.alloc_block();
    let c = a.add_sing(2, Host::Block(q));
    a.blocks.insert(
        q,
        Block {
            kind: BlockKind::BallWithSpots { conics: vec![c] },
        },
    );
    let t = a.add_spot(q, Some(0), Direction::Inward, c);
    a.glue_transverse(from, t);
}

fn build(n: usize, d: usize, ends: Ends) -> PantsCase {
    let mut a = Assembly::new(format!("pants-{n}-{d}-{ends:?}"), Ambient::S3);
    let ball = a.alloc_block();
    let s0 = a.add_sing(1, Host::Block(ball));
    a.blocks.insert(
        ball,
        Block {
            kind: BlockKind::BallWithSpots { conics: vec![s0] },
        },
    );
    let spots: Vec<SpotId> = (0..n)
        .map(|_| a.add_spot(ball, Some(0), Direction::Outward, s0))
        .collect();
    let along = spots[d];
    let others: Vec<SpotId> = spots.iter().copied().filter(|s| *s != along).collect();
    let p = a.alloc_block();
    let new_conic: Option<SingId> = match ends {
        Ends::Out { .. } => Some(a.add_sing(2, Host::Block(p))),
        _ => None,
    };
    a.blocks.insert(
        p,
        Block {
            kind: BlockKind::BallWithSpots {
                conics: new_conic.into_iter().collect(),
            },
        },
    );
    let dp = a.add_spot(p, Some(0), Direction::Inward, s0);
    a.glue_transverse(along, dp);
    let (a1, a2) = match (ends, new_conic) {
        (Ends::Out { both_new: true }, Some(c)) => (c, c),
        (Ends::Out { both_new: false }, Some(c)) => (s0, c),
        _ => (s0, s0),
    };
    let e1 = a.add_spot(p, Some(0), Direction::Inward, a1);
    let e2 = a.add_spot(p, Some(0), Direction::Inward, a2);
    let mut used = Vec::new();
    let expected = match ends {
        Ends::One(i) => {
            a.glue_transverse(others[i], e1);
            external(&mut a, e2);
            used.push(i);
            ExpansionCase::FreeMinusOne
        }
        Ends::Two(i, j) => {
            a.glue_transverse(others[i], e1);
            a.glue_transverse(others[j], e2);
            used.extend([i, j]);
            ExpansionCase::FreeMinusThree
        }
        Ends::Loop => {
            if let Some(s) = a.spots.get_mut(&e2) {
                s.direction = Direction::Outward;
            }
            a.glue_transverse(e1, e2);
            ExpansionCase::FreeMinusOne
        }
        Ends::Out { .. } => {
            if let Some(s) = a.spots.get_mut(&e1) {
                s.direction = Direction::Outward;
            }
            if let Some(s) = a.spots.get_mut(&e2) {
                s.direction = Direction::Outward;
            }
            external(&mut a, e1);
            external(&mut a, e2);
            ExpansionCase::ConicPlusOne
        }
    };
    for (i, s) in others.iter().enumerate() {
        if !used.contains(&i) {
            external(&mut a, *s);
        }
    }
    PantsCase {
        label: a.name.clone(),
        assembly: a,
        ball,
        along,
        expected,
    }
}

/// Every pants attachment to a ball with one to four spots that the
/// generators can build, over all choices of the attaching spot and of the
/// ball spots capturing the pants ends.
pub fn pants_attachments() -> Vec<PantsCase> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        for d in 0..n {
            let m = n - 1;
            for i in 0..m {
                out.push(build(n, d, Ends::One(i)));
                for j in 0..m {
                    if i != j {
                        out.push(build(n, d, Ends::Two(i, j)));
                    }
                }
            }
            out.push(build(n, d, Ends::Loop));
            out.push(build(n, d, Ends::Out { both_new: false }));
            out.push(build(n, d, Ends::Out { both_new: true }));
        }
    }
    out
}
