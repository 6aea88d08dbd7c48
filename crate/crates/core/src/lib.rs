//! Combinatorial kernel for Morse foliations of codimension one on S³.
//!
//! Foliations are modelled as decorated block graphs ([`Assembly`]). The
//! [`rewrite`] module implements the modifications and eliminations of the
//! calculus, [`detect`] finds the patterns they act on, and [`classify`]
//! drives them to a certificate naming a Reeb or Morse component, or
//! certifying that every leaf is simply connected.

pub mod classify;
pub mod detect;
pub mod gen;
pub mod ids;
pub mod io;
pub mod model;
pub mod rewrite;

pub use classify::{
    classify, is_stable, verify_certificate, Certificate, ClassifyError, SiteRef, StabilityVerdict,
    Verdict, VerdictKind, Witness, WitnessKind,
};
pub use ids::{BlockId, GluingId, LeafId, Level, SingId, SpotId};
pub use model::canon::{canonical, isomorphic};
pub use model::{
    Ambient, Assembly, Block, BlockKind, Direction, Gluing, GluingKind, Host, IdAlloc,
    LeafDescriptor, LeafShape, Port, Singularity, Spot,
};
pub use rewrite::{normalize, OrderPolicy, RewriteError, RewriteOp, RewriteStep};
