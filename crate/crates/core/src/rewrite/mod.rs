//! Trace-recording rewrites of the foliation calculus.
//!
//! Every rewrite is a pure function `&Assembly -> (Assembly, RewriteStep)`.
//! A [`RewriteStep`] carries its [`RewriteOp`] with all parameters, so a
//! trace can be replayed with [`apply`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ids::{BlockId, GluingId, LeafId, Level, SingId, SpotId};
use crate::model::{counts, Assembly, BlockKind, Direction};

mod normalize;
mod ops;

pub use normalize::{normalize, OrderPolicy};
pub use ops::{
    complete_truncated_component, connected_sum, corrective_movement, eliminate_bubble,
    eliminate_trivial_pair, eliminate_truncated_bubble, fill_with_center, morse_mod_a, morse_mod_b,
    restrict_to_bubble, split_singular_leaf, truncated_to_bubbles,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("level {level} is on the wrong side of the cone at {cone}")]
    InvalidLevel { level: Level, cone: Level },
    #[error("leaf {0} carries at most one conic singularity")]
    NothingToSplit(LeafId),
    #[error("spots have the same direction")]
    OrientationMismatch,
    #[error("({0}, {1}) is not a trivial pair")]
    NotATrivialPair(SingId, SingId),
    #[error("cannot complete {0}: spot is not capped by a trivially foliated ball")]
    CannotComplete(BlockId),
    #[error("assembly is not closed: {0}")]
    NotClosed(String),
    #[error("invalid assembly: {0}")]
    Invalid(String),
    #[error("normalization exceeded {0} elimination rounds")]
    NoFixpoint(i64),
}

/// A transverse disc site on which a connected sum is performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscSite {
    pub block: BlockId,
    pub interface: Option<u8>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RewriteOp {
    MorseModA {
        chart: BlockId,
        level: Level,
    },
    MorseModB {
        chart: BlockId,
        level: Level,
    },
    SplitSingularLeaf {
        leaf: LeafId,
    },
    ConnectedSum {
        other: Box<Assembly>,
        first: DiscSite,
        second: DiscSite,
        index: u8,
    },
    EliminateTrivialPair {
        center: SingId,
        conic: SingId,
    },
    FillWithCenter {
        path: Vec<BlockId>,
    },
    EliminateBubble {
        path: Vec<BlockId>,
    },
    CorrectiveMovement {
        tb: BlockId,
    },
    TruncatedToBubbles {
        tb: BlockId,
    },
    EliminateTruncatedBubble {
        tb: BlockId,
    },
    CompleteTruncatedComponent {
        block: BlockId,
    },
    RestrictToBubble {
        block: BlockId,
    },
}

impl RewriteOp {
    pub fn name(&self) -> &'static str {
        match self {
            RewriteOp::MorseModA { .. } => "morse_mod_a",
            RewriteOp::MorseModB { .. } => "morse_mod_b",
            RewriteOp::SplitSingularLeaf { .. } => "split_singular_leaf",
            RewriteOp::ConnectedSum { .. } => "connected_sum",
            RewriteOp::EliminateTrivialPair { .. } => "eliminate_trivial_pair",
            RewriteOp::FillWithCenter { .. } => "fill_with_center",
            RewriteOp::EliminateBubble { .. } => "eliminate_bubble",
            RewriteOp::CorrectiveMovement { .. } => "corrective_movement",
            RewriteOp::TruncatedToBubbles { .. } => "truncated_to_bubbles",
            RewriteOp::EliminateTruncatedBubble { .. } => "eliminate_truncated_bubble",
            RewriteOp::CompleteTruncatedComponent { .. } => "complete_truncated_component",
            RewriteOp::RestrictToBubble { .. } => "restrict_to_bubble",
        }
    }

    /// Whether the op removes singularities (counts toward normalization rounds).
    pub fn is_elimination(&self) -> bool {
        matches!(
            self,
            RewriteOp::EliminateTrivialPair { .. }
                | RewriteOp::EliminateBubble { .. }
                | RewriteOp::EliminateTruncatedBubble { .. }
        )
    }
}

/// One object reference inside an assembly. `path` lists the bubble blocks
/// to descend through (empty at top level).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ref {
    pub path: Vec<BlockId>,
    pub item: Item,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Block(BlockId),
    Gluing(GluingId),
    Sing(SingId),
    Leaf(LeafId),
    Spot(SpotId),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Block(x) => x.fmt(f),
            Item::Gluing(x) => x.fmt(f),
            Item::Sing(x) => x.fmt(f),
            Item::Leaf(x) => x.fmt(f),
            Item::Spot(x) => x.fmt(f),
        }
    }
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.path {
            write!(f, "{b}/")?;
        }
        self.item.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub op: RewriteOp,
    /// Objects kept but modified in place.
    pub site: Vec<Ref>,
    pub consumed: Vec<Ref>,
    pub produced: Vec<Ref>,
    pub singularity_delta: BTreeMap<u8, i64>,
    pub substeps: Vec<RewriteStep>,
}

impl RewriteStep {
    pub(crate) fn record(op: RewriteOp, before: &Assembly, after: &Assembly) -> Self {
        let mut step = RewriteStep {
            op,
            site: vec![],
            consumed: vec![],
            produced: vec![],
            singularity_delta: counts(before).delta_to(&counts(after)),
            substeps: vec![],
        };
        diff(before, after, &mut Vec::new(), &mut step);
        step
    }

    pub(crate) fn with_substeps(mut self, substeps: Vec<RewriteStep>) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn delta(&self, index: u8) -> i64 {
        self.singularity_delta.get(&index).copied().unwrap_or(0)
    }

    pub fn center_delta(&self) -> i64 {
        self.delta(0) + self.delta(3)
    }

    pub fn conic_delta(&self) -> i64 {
        self.delta(1) + self.delta(2)
    }
}

fn diff_table<K: Ord + Copy, V: PartialEq>(
    before: &BTreeMap<K, V>,
    after: &BTreeMap<K, V>,
    wrap: impl Fn(K) -> Item,
    path: &[BlockId],
    step: &mut RewriteStep,
) {
    let r = |k: K| Ref {
        path: path.to_vec(),
        item: wrap(k),
    };
    for (k, v) in before {
        match after.get(k) {
            None => step.consumed.push(r(*k)),
            Some(w) if w != v => step.site.push(r(*k)),
            _ => {}
        }
    }
    for k in after.keys() {
        if !before.contains_key(k) {
            step.produced.push(r(*k));
        }
    }
}

fn diff(before: &Assembly, after: &Assembly, path: &mut Vec<BlockId>, step: &mut RewriteStep) {
    let nested: BTreeSet<BlockId> = before
        .blocks
        .iter()
        .filter(|(id, b)| {
            matches!(
                (&b.kind, after.block(**id)),
                (BlockKind::Bubble { .. }, Some(BlockKind::Bubble { .. }))
            ) && after.blocks.get(id) != Some(b)
        })
        .map(|(id, _)| *id)
        .collect();
    diff_table(&before.blocks, &after.blocks, Item::Block, path, step);
    diff_table(&before.gluings, &after.gluings, Item::Gluing, path, step);
    diff_table(
        &before.singularities,
        &after.singularities,
        Item::Sing,
        path,
        step,
    );
    diff_table(&before.leaves, &after.leaves, Item::Leaf, path, step);
    diff_table(&before.spots, &after.spots, Item::Spot, path, step);
    for id in nested {
        if let (
            Some(BlockKind::Bubble { inner: x, .. }),
            Some(BlockKind::Bubble { inner: y, .. }),
        ) = (before.block(id), after.block(id))
        {
            path.push(id);
            diff(x, y, path, step);
            path.pop();
        }
    }
}

/// Applies a recorded op. Replaying a trace step by step reproduces the
/// assemblies the trace was recorded on.
pub fn apply(a: &Assembly, op: &RewriteOp) -> Result<(Assembly, RewriteStep), RewriteError> {
    match op {
        RewriteOp::MorseModA { chart, level } => morse_mod_a(a, *chart, *level),
        RewriteOp::MorseModB { chart, level } => morse_mod_b(a, *chart, *level),
        RewriteOp::SplitSingularLeaf { leaf } => split_singular_leaf(a, *leaf),
        RewriteOp::ConnectedSum {
            other,
            first,
            second,
            index,
        } => connected_sum(a, other, *first, *second, *index),
        RewriteOp::EliminateTrivialPair { center, conic } => {
            eliminate_trivial_pair(a, *center, *conic)
        }
        RewriteOp::FillWithCenter { path } => fill_with_center(a, path),
        RewriteOp::EliminateBubble { path } => eliminate_bubble(a, path),
        RewriteOp::CorrectiveMovement { tb } => corrective_movement(a, *tb),
        RewriteOp::TruncatedToBubbles { tb } => truncated_to_bubbles(a, *tb),
        RewriteOp::EliminateTruncatedBubble { tb } => eliminate_truncated_bubble(a, *tb),
        RewriteOp::CompleteTruncatedComponent { block } => complete_truncated_component(a, *block),
        RewriteOp::RestrictToBubble { block } => restrict_to_bubble(a, *block),
    }
}

/// Replays a sequence of ops, returning the final assembly.
pub fn replay<'a>(
    a: &Assembly,
    ops: impl IntoIterator<Item = &'a RewriteOp>,
) -> Result<Assembly, RewriteError> {
    let mut cur = a.clone();
    for op in ops {
        cur = apply(&cur, op)?.0;
    }
    Ok(cur)
}
