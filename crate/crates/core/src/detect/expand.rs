use std::collections::BTreeSet;

use super::{
    classify_in, find_bubbles, find_trivial_pairs, find_truncated_bubbles, DetectError,
    SpotClassification, SpotStatus,
};
use crate::ids::{BlockId, SingId, SpotId};
use crate::model::{Assembly, BlockKind};

/// The representative of a trivially foliated ball: a ball-with-spots block
/// (possibly grown by pants), or the trivial neighborhood of a conic point
/// not covered by any such block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BallRef {
    Block(BlockId),
    Neighborhood(SingId),
}

/// Which of the three spot-count outcomes an expansion produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionCase {
    /// One new spot captured by an old free spot: `n1 - 1` free spots.
    FreeMinusOne,
    /// Both new spots captured by distinct old free spots: `n1 - 3`.
    FreeMinusThree,
    /// Both new spots free: one more conic singularity.
    ConicPlusOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionState {
    pub ball: BallRef,
    /// Blocks merged into the ball so far.
    pub blocks: Vec<BlockId>,
    pub spots: Vec<SpotClassification>,
    pub free_count: usize,
    pub captured_count: usize,
    pub conic_ids: BTreeSet<SingId>,
    pub last_case: Option<ExpansionCase>,
}

impl ExpansionState {
    fn build(
        a: &Assembly,
        ball: BallRef,
        blocks: Vec<BlockId>,
        spots: &[SpotId],
        conic_ids: BTreeSet<SingId>,
    ) -> Self {
        let set: BTreeSet<BlockId> = blocks.iter().copied().collect();
        let spots = classify_in(a, &set, spots);
        let captured_count = spots
            .iter()
            .filter(|c| c.status == SpotStatus::Captured)
            .count();
        ExpansionState {
            ball,
            blocks,
            free_count: spots.len() - captured_count,
            captured_count,
            spots,
            conic_ids,
            last_case: None,
        }
    }

    pub fn essential_free_spots(&self) -> Vec<SpotId> {
        self.spots
            .iter()
            .filter(|c| c.status == SpotStatus::Free && c.essential == Some(true))
            .map(|c| c.spot)
            .collect()
    }
}

fn ball_conics(a: &Assembly, block: BlockId) -> BTreeSet<SingId> {
    let mut set: BTreeSet<SingId> = a
        .block(block)
        .map(|k| k.hosted())
        .unwrap_or_default()
        .into_iter()
        .collect();
    set.extend(
        a.spots_of(block)
            .into_iter()
            .map(|s| a.spots[&s].associated),
    );
    set
}

pub fn initial_state(a: &Assembly, ball: BlockId) -> Result<ExpansionState, DetectError> {
    if !matches!(a.block(ball), Some(BlockKind::BallWithSpots { .. })) {
        return Err(DetectError::InvalidSite(format!(
            "{ball} is not a ball_with_spots"
        )));
    }
    Ok(ExpansionState::build(
        a,
        BallRef::Block(ball),
        vec![ball],
        &a.spots_of(ball),
        ball_conics(a, ball),
    ))
}

/// Adds the solid pair of pants glued along `along` to the ball and checks
/// that the spot counts land in exactly one of the three admissible cases.
pub fn expand_ball(
    a: &Assembly,
    state: &ExpansionState,
    along: SpotId,
) -> Result<ExpansionState, DetectError> {
    if !state.essential_free_spots().contains(&along) {
        return Err(DetectError::CannotExpand(along));
    }
    let (_, partner) = a
        .spot_partner(along)
        .ok_or(DetectError::CannotExpand(along))?;
    let pants = a.spots[&partner].owner;
    if state.blocks.contains(&pants) {
        return Err(DetectError::CannotExpand(along));
    }
    let mut blocks = state.blocks.clone();
    blocks.push(pants);
    let mut spots: Vec<SpotId> = state
        .spots
        .iter()
        .map(|c| c.spot)
        .filter(|s| *s != along)
        .collect();
    spots.extend(a.spots_of(pants).into_iter().filter(|s| *s != partner));
    let mut conics = state.conic_ids.clone();
    conics.extend(ball_conics(a, pants));
    let mut next = ExpansionState::build(a, state.ball, blocks, &spots, conics);
    let free_delta = next.free_count as i64 - state.free_count as i64;
    let conic_delta = next.conic_ids.len() as i64 - state.conic_ids.len() as i64;
    next.last_case = match (free_delta, conic_delta) {
        (-1, 0) => Some(ExpansionCase::FreeMinusOne),
        (-3, 0) => Some(ExpansionCase::FreeMinusThree),
        (1, 1) => Some(ExpansionCase::ConicPlusOne),
        _ => None,
    };
    if next.last_case.is_none() {
        return Err(DetectError::TrichotomyViolation {
            spot: along,
            free_delta,
            conic_delta,
        });
    }
    Ok(next)
}

fn grow(
    a: &Assembly,
    mut st: ExpansionState,
    claimed: &BTreeSet<BlockId>,
) -> Result<ExpansionState, DetectError> {
    loop {
        let candidate = st.essential_free_spots().into_iter().find(|s| {
            a.spot_partner(*s)
                .and_then(|(_, p)| a.spots.get(&p))
                .is_some_and(|p| !claimed.contains(&p.owner) && !st.blocks.contains(&p.owner))
        });
        match candidate {
            Some(s) => st = expand_ball(a, &st, s)?,
            None => return Ok(st),
        }
    }
}

/// Grows every ball with spots by pants until no further pants can be
/// added, then covers the remaining conic points by trivial neighborhoods.
pub fn completely_expand(a: &Assembly) -> Result<Vec<ExpansionState>, DetectError> {
    let normalized = find_trivial_pairs(a).is_empty()
        && find_bubbles(a).is_empty()
        && find_truncated_bubbles(a).is_empty();
    if !normalized
        || a.blocks
            .values()
            .any(|b| matches!(b.kind, BlockKind::TruncatedBubble { .. }))
    {
        return Err(DetectError::NotNormalized);
    }
    let mut balls: Vec<(usize, BlockId)> = a
        .blocks
        .iter()
        .filter(|(_, b)| matches!(b.kind, BlockKind::BallWithSpots { .. }))
        .map(|(id, _)| (a.spots_of(*id).len(), *id))
        .collect();
    balls.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut claimed: BTreeSet<BlockId> = BTreeSet::new();
    let mut states: Vec<ExpansionState> = Vec::new();
    for (_, ball) in balls {
        if claimed.contains(&ball) {
            continue;
        }
        let st = grow(a, initial_state(a, ball)?, &claimed)?;
        claimed.extend(st.blocks.iter().copied());
        states.push(st);
    }
    loop {
        let mut merged = false;
        'outer: for i in 0..states.len() {
            for s in states[i].essential_free_spots() {
                let Some(owner) = a
                    .spot_partner(s)
                    .and_then(|(_, p)| a.spots.get(&p))
                    .map(|p| p.owner)
                else {
                    continue;
                };
                let j = states.iter().position(|t| t.blocks == vec![owner]);
                if let Some(j) = j.filter(|j| *j != i) {
                    let grown = expand_ball(a, &states[i], s)?;
                    states[i] = grown;
                    states.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let covered: BTreeSet<SingId> = states
        .iter()
        .flat_map(|s| s.conic_ids.iter().copied())
        .collect();
    for (id, s) in &a.singularities {
        if s.is_conic() && !covered.contains(id) {
            states.push(ExpansionState {
                ball: BallRef::Neighborhood(*id),
                blocks: vec![],
                spots: vec![],
                free_count: 0,
                captured_count: 0,
                conic_ids: BTreeSet::from([*id]),
                last_case: None,
            });
        }
    }
    Ok(states)
}
