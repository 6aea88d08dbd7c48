//! Classification driver, certificate checking and the stability decision.

use std::fmt;

use thiserror::Error;

use crate::detect::{find_components, Component, ComponentKind};
use crate::ids::{BlockId, GluingId, LeafId};
use crate::model::canon::isomorphic;
use crate::model::{leaves, validate, Ambient, Assembly, BlockKind, Host, LeafKey, ViolationKind};
use crate::rewrite::{self, apply, OrderPolicy, RewriteError, RewriteOp, RewriteStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("assembly is not closed: {0}")]
    NotClosed(String),
    #[error("unsupported ambient manifold `{0}`")]
    UnsupportedAmbient(String),
    #[error("invalid assembly: {0}")]
    Invalid(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    AllSimplyConnected,
    Component(ComponentKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub singular: bool,
}

impl Verdict {
    pub fn token(&self) -> String {
        let base = match self.kind {
            VerdictKind::AllSimplyConnected => "all_simply_connected",
            VerdictKind::Component(k) => k.token(),
        };
        if self.singular {
            format!("{base}+singular")
        } else {
            base.to_string()
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        let (base, singular) = match token.strip_suffix("+singular") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let kind = if base == "all_simply_connected" {
            VerdictKind::AllSimplyConnected
        } else {
            VerdictKind::Component(ComponentKind::parse(base)?)
        };
        Some(Verdict { kind, singular })
    }

    pub fn is_morse_family(&self) -> bool {
        matches!(self.kind, VerdictKind::Component(k) if k.is_morse_family())
    }

    pub fn is_reeb_family(&self) -> bool {
        matches!(self.kind, VerdictKind::Component(k) if !k.is_morse_family())
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub trace: Vec<RewriteStep>,
    pub component: Option<Component>,
    pub final_assembly: Assembly,
}

fn check_input(a: &Assembly) -> Result<(), ClassifyError> {
    if let Ambient::Other(tag) = &a.ambient {
        return Err(ClassifyError::UnsupportedAmbient(tag.clone()));
    }
    let report = validate(a);
    if report.is_valid() {
        return Ok(());
    }
    let text = report.to_string().trim_end().replace('\n', "; ");
    if report.has(ViolationKind::OpenInterface) || report.has(ViolationKind::MultiplyGlued) {
        Err(ClassifyError::NotClosed(text))
    } else {
        Err(ClassifyError::Invalid(text))
    }
}

fn step(
    cur: &mut Assembly,
    trace: &mut Vec<RewriteStep>,
    op: RewriteOp,
) -> Result<(), ClassifyError> {
    let (next, s) = apply(cur, &op)?;
    trace.push(s);
    *cur = next;
    Ok(())
}

/// Leaves of `a` (bubble interiors included) that are all compact and
/// simply connected.
fn all_leaves_simply_connected(a: &Assembly) -> bool {
    leaves(a).iter().all(|l| l.compact && l.simply_connected)
}

fn pick_bubble(a: &Assembly) -> Option<BlockId> {
    a.blocks.iter().find_map(|(id, b)| match &b.kind {
        BlockKind::Bubble { inner, .. } if !all_leaves_simply_connected(inner) => Some(*id),
        _ => None,
    })
}

fn run(
    a: &Assembly,
    trace: &mut Vec<RewriteStep>,
) -> Result<(Assembly, Option<Component>), ClassifyError> {
    let mut cur = a.clone();
    for leaf in cur.multi_singular_leaves() {
        step(&mut cur, trace, RewriteOp::SplitSingularLeaf { leaf })?;
    }
    while let Some(&(center, conic)) = crate::detect::find_trivial_pairs(&cur).first() {
        step(
            &mut cur,
            trace,
            RewriteOp::EliminateTrivialPair { center, conic },
        )?;
    }
    let tbs: Vec<BlockId> = cur
        .blocks
        .iter()
        .filter(|(_, b)| matches!(b.kind, BlockKind::TruncatedBubble { .. }))
        .map(|(k, _)| *k)
        .collect();
    for tb in tbs {
        step(&mut cur, trace, RewriteOp::CorrectiveMovement { tb })?;
    }
    for leaf in cur.multi_singular_leaves() {
        step(&mut cur, trace, RewriteOp::SplitSingularLeaf { leaf })?;
    }
    let (normal, steps) = rewrite::normalize(&cur, &OrderPolicy::InnermostThenId)?;
    if let Some(c) = find_components(&normal).into_iter().next() {
        trace.extend(steps);
        return Ok((normal, Some(c)));
    }
    if let Some(b) = pick_bubble(&cur) {
        step(&mut cur, trace, RewriteOp::RestrictToBubble { block: b })?;
        return run(&cur, trace);
    }
    trace.extend(steps);
    Ok((normal, None))
}

/// Normalizes `a` and names a Reeb or Morse component of the result, or
/// certifies that every leaf is simply connected.
pub fn classify(a: &Assembly) -> Result<Certificate, ClassifyError> {
    check_input(a)?;
    let mut trace = Vec::new();
    let (final_assembly, component) = run(a, &mut trace)?;
    let verdict = match &component {
        Some(c) => {
            let singular = c.singular
                || find_components(a)
                    .iter()
                    .any(|s| s.kind == c.kind && s.blocks == c.blocks && s.singular)
                || trace.iter().any(|s| singular_pair_removed(a, s, c));
            Verdict {
                kind: VerdictKind::Component(c.kind),
                singular,
            }
        }
        None => {
            if !all_leaves_simply_connected(a) {
                return Err(ClassifyError::TheoremViolation(format!(
                    "{} has a leaf that is not compact and simply connected but no component was found",
                    a.name
                )));
            }
            let leftover = crate::model::counts(&final_assembly).conics();
            if leftover != 0 {
                return Err(ClassifyError::TheoremViolation(format!(
                    "{leftover} conic singularities survive normalization of {}",
                    a.name
                )));
            }
            Verdict {
                kind: VerdictKind::AllSimplyConnected,
                singular: false,
            }
        }
    };
    Ok(Certificate {
        verdict,
        trace,
        component,
        final_assembly,
    })
}

/// Whether `step` removed a trivial bubble sitting on a leaf of `c`.
fn singular_pair_removed(a: &Assembly, step: &RewriteStep, c: &Component) -> bool {
    let RewriteOp::EliminateTrivialPair { center, .. } = step.op else {
        return false;
    };
    let Some(Host::Block(b)) = a.singularities.get(&center).map(|s| s.host) else {
        return false;
    };
    let Some(BlockKind::TrivialBubble { host, .. }) = a.block(b) else {
        return false;
    };
    a.leaves.get(host).is_some_and(|l| match l.owner {
        Host::Block(o) => c.blocks.contains(&o),
        Host::Gluing(g) => c.gluings.contains(&g),
    })
}

/// Replays the certificate's trace from `a` and checks that it ends in the
/// recorded final assembly, with the recorded component present there.
pub fn verify_certificate(a: &Assembly, cert: &Certificate) -> bool {
    let mut cur = a.clone();
    for recorded in &cert.trace {
        match apply(&cur, &recorded.op) {
            Ok((next, s)) if s == *recorded => cur = next,
            _ => return false,
        }
    }
    if !isomorphic(&cur, &cert.final_assembly) {
        return false;
    }
    let found = find_components(&cur);
    match (&cert.component, cert.verdict.kind) {
        (Some(c), VerdictKind::Component(k)) => k == c.kind && found.iter().any(|f| f.same_site(c)),
        (None, VerdictKind::AllSimplyConnected) => {
            found.is_empty()
                && crate::model::counts(&cur).conics() == 0
                && all_leaves_simply_connected(&cur)
        }
        _ => false,
    }
}

/// Where a stability witness points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteRef {
    Block(BlockId),
    Leaf(LeafId),
    Gluing(GluingId),
}

impl SiteRef {
    pub fn exists_in(&self, a: &Assembly) -> bool {
        match self {
            SiteRef::Block(b) => a.blocks.contains_key(b),
            SiteRef::Leaf(l) => a.leaves.contains_key(l),
            SiteRef::Gluing(g) => a.gluings.contains_key(g),
        }
    }

    fn of_host(h: Host) -> Self {
        match h {
            Host::Block(b) => SiteRef::Block(b),
            Host::Gluing(g) => SiteRef::Gluing(g),
        }
    }
}

impl fmt::Display for SiteRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteRef::Block(x) => x.fmt(f),
            SiteRef::Leaf(x) => x.fmt(f),
            SiteRef::Gluing(x) => x.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    /// A leaf with two or more conic singularities; a Morse modification
    /// separates them by an arbitrarily small perturbation.
    MultiSingularLeaf,
    /// A band of non-simply-connected leaves, approximable relative to its
    /// boundary by foliations without compact leaves.
    BandOfLeaves,
    /// A flat toral leaf bounding a Reeb component, thickened into a band.
    FlatTorusThickening,
}

impl WitnessKind {
    pub fn token(self) -> &'static str {
        match self {
            WitnessKind::MultiSingularLeaf => "multi_singular_leaf",
            WitnessKind::BandOfLeaves => "band_of_leaves",
            WitnessKind::FlatTorusThickening => "flat_torus_thickening",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub kind: WitnessKind,
    pub site: SiteRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub witness: Option<Witness>,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.witness {
            None => f.write_str("stable"),
            Some(w) => write!(f, "unstable {} {}", w.kind.token(), w.site),
        }
    }
}

fn leaf_site(a: &Assembly, key: &LeafKey) -> Option<SiteRef> {
    match key {
        LeafKey::Declared(l) => Some(SiteRef::Leaf(*l)),
        other => other.top_host(a).map(SiteRef::of_host),
    }
}

/// Stable exactly when every leaf is compact, simply connected and carries
/// at most one conic singularity; otherwise a witness locates the
/// perturbation.
pub fn is_stable(a: &Assembly) -> Result<StabilityVerdict, ClassifyError> {
    check_input(a)?;
    let census = leaves(a);
    let unstable = |kind, site| {
        Ok(StabilityVerdict {
            stable: false,
            witness: Some(Witness { kind, site }),
        })
    };
    if let Some(l) = census.iter().find(|l| l.conics >= 2) {
        if let Some(site) = leaf_site(a, &l.key) {
            return unstable(WitnessKind::MultiSingularLeaf, site);
        }
    }
    let Some(offender) = census.iter().find(|l| !(l.compact && l.simply_connected)) else {
        return Ok(StabilityVerdict {
            stable: true,
            witness: None,
        });
    };
    let find = |pred: &dyn Fn(&BlockKind) -> bool| {
        a.blocks
            .iter()
            .find(|(_, b)| pred(&b.kind))
            .map(|(k, _)| *k)
    };
    if let Some(b) = find(&|k| matches!(k, BlockKind::ProductBand { genus } if *genus >= 1)) {
        return unstable(WitnessKind::BandOfLeaves, SiteRef::Block(b));
    }
    if let Some(b) = find(&|k| {
        matches!(
            k,
            BlockKind::MorseSolidTorus { .. } | BlockKind::TruncatedMorse { .. }
        )
    }) {
        return unstable(WitnessKind::BandOfLeaves, SiteRef::Block(b));
    }
    let flat = find(&|k| matches!(k, BlockKind::ReebSolidTorus { flat: true }));
    if let Some(b) = flat.or_else(|| {
        find(&|k| {
            matches!(
                k,
                BlockKind::ReebSolidTorus { .. } | BlockKind::TruncatedReeb
            )
        })
    }) {
        return unstable(WitnessKind::FlatTorusThickening, SiteRef::Block(b));
    }
    let site = leaf_site(a, &offender.key)
        .unwrap_or(SiteRef::Block(*a.blocks.keys().next().expect("validated")));
    unstable(WitnessKind::BandOfLeaves, site)
}
