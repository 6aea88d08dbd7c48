use super::ops::{
    eliminate_bubble, eliminate_trivial_pair, eliminate_truncated_bubble, split_singular_leaf,
};
use super::{RewriteError, RewriteStep};
use crate::detect::{find_bubbles, find_trivial_pairs, find_truncated_bubbles};
use crate::ids::BlockId;
use crate::model::{counts, validate, Assembly, ViolationKind};

/// Order in which bubbles are eliminated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// Innermost first, ties broken by ascending block id.
    #[default]
    InnermostThenId,
    /// The listed bubble paths first (skipping any that no longer exist),
    /// then the default order for whatever remains.
    Explicit(Vec<Vec<BlockId>>),
}

/// Splits every leaf carrying several conic singularities.
pub(crate) fn split_all(
    a: &Assembly,
    trace: &mut Vec<RewriteStep>,
) -> Result<Assembly, RewriteError> {
    let mut cur = a.clone();
    for leaf in a.multi_singular_leaves() {
        let (next, step) = split_singular_leaf(&cur, leaf)?;
        trace.push(step);
        cur = next;
    }
    Ok(cur)
}

pub(crate) fn eliminate_all_pairs(
    a: &Assembly,
    trace: &mut Vec<RewriteStep>,
) -> Result<Assembly, RewriteError> {
    let mut cur = a.clone();
    while let Some(&(center, conic)) = find_trivial_pairs(&cur).first() {
        let (next, step) = eliminate_trivial_pair(&cur, center, conic)?;
        trace.push(step);
        cur = next;
    }
    Ok(cur)
}

pub(crate) fn refuse_open(a: &Assembly) -> Result<(), RewriteError> {
    let report = validate(a);
    if report.is_valid() {
        return Ok(());
    }
    if report.has(ViolationKind::OpenInterface) || report.has(ViolationKind::MultiplyGlued) {
        return Err(RewriteError::NotClosed(
            report.to_string().trim_end().replace('\n', "; "),
        ));
    }
    Err(RewriteError::Invalid(
        report.to_string().trim_end().replace('\n', "; "),
    ))
}

/// Splits singular leaves, then eliminates trivial pairs, bubbles and
/// truncated bubbles until none is left.
pub fn normalize(
    a: &Assembly,
    policy: &OrderPolicy,
) -> Result<(Assembly, Vec<RewriteStep>), RewriteError> {
    refuse_open(a)?;
    let budget = counts(a).total();
    let mut trace = Vec::new();
    let mut cur = split_all(a, &mut trace)?;
    let mut explicit: Vec<Vec<BlockId>> = match policy {
        OrderPolicy::InnermostThenId => vec![],
        OrderPolicy::Explicit(paths) => paths.clone(),
    };
    explicit.reverse();
    loop {
        cur = eliminate_all_pairs(&cur, &mut trace)?;
        let bubbles = find_bubbles(&cur);
        if !bubbles.is_empty() {
            let mut chosen = None;
            while let Some(p) = explicit.pop() {
                if bubbles.contains(&p) {
                    chosen = Some(p);
                    break;
                }
            }
            let path = chosen.unwrap_or_else(|| bubbles[0].clone());
            let (next, step) = eliminate_bubble(&cur, &path)?;
            trace.push(step);
            cur = next;
        } else if let Some(&tb) = find_truncated_bubbles(&cur).first() {
            let (next, step) = eliminate_truncated_bubble(&cur, tb)?;
            trace.push(step);
            cur = next;
        } else {
            break;
        }
        let rounds = trace.iter().filter(|s| s.op.is_elimination()).count() as i64;
        if rounds > budget {
            return Err(RewriteError::NoFixpoint(budget));
        }
        cur = split_all(&cur, &mut trace)?;
    }
    Ok((cur, trace))
}
