mod common;

use common::*;
use morsefol::detect::{find_bubbles, ComponentKind};
use morsefol::gen::{generate, Family, GenOptions, GenSpec};
use morsefol::model::leaves;
use morsefol::{
    classify, is_stable, verify_certificate, Ambient, Assembly, BlockKind, ClassifyError,
    OrderPolicy, VerdictKind, WitnessKind,
};
use proptest::prelude::*;

fn family(f: Family) -> Assembly {
    generate(&GenSpec::new(0, f)).unwrap()
}

#[test]
fn two_centers_are_simply_connected() {
    let a = family(Family::TwoCenters);
    let cert = classify(&a).unwrap();
    assert_eq!(cert.verdict.kind, VerdictKind::AllSimplyConnected);
    assert_eq!(cert.verdict.token(), "all_simply_connected");
    assert!(cert.component.is_none());
    assert!(verify_certificate(&a, &cert));
    assert!(classify(&two_centers()).is_ok());
}

#[test]
fn double_pretzel_has_a_reeb_component() {
    let a = family(Family::DoublePretzel);
    let cert = classify(&a).unwrap();
    assert!(cert.verdict.is_reeb_family(), "{}", cert.verdict);
    let comp = cert.component.as_ref().unwrap();
    let b = comp.blocks[0];
    assert!(matches!(
        cert.final_assembly.block(b),
        Some(BlockKind::ReebSolidTorus { .. } | BlockKind::TruncatedReeb)
    ));
    assert!(verify_certificate(&a, &cert));
}

#[test]
fn morse_pair_has_a_morse_component() {
    let a = family(Family::MorsePair);
    let cert = classify(&a).unwrap();
    assert!(cert.verdict.is_morse_family(), "{}", cert.verdict);
    let f = &cert.final_assembly;
    let mut on_morse = [0i64; 4];
    for b in f.blocks.values() {
        if let BlockKind::MorseSolidTorus { center, conic } = b.kind {
            on_morse[f.singularities[&center].index as usize] += 1;
            on_morse[f.singularities[&conic].index as usize] += 1;
        }
    }
    assert_eq!((centers(&on_morse), conics(&on_morse)), (2, 2));
    assert_eq!(centers(&recount(f)), 2);
    assert!(verify_certificate(&a, &cert));
}

#[test]
fn chain_trace_covers_every_pair() {
    for k in [1u32, 3, 7] {
        let a = family(Family::SimplyConnectedChain(k));
        let cert = classify(&a).unwrap();
        assert_eq!(cert.verdict.kind, VerdictKind::AllSimplyConnected);
        let removed = cert.trace.iter().filter(|s| s.op.is_elimination()).count();
        assert!(removed >= k as usize, "k={k} removed={removed}");
        assert_eq!(
            counts_total(&a) - counts_total(&cert.final_assembly),
            2 * k as i64
        );
    }
}

fn counts_total(a: &Assembly) -> i64 {
    total(&recount(a))
}

#[test]
fn deleted_step_breaks_the_certificate() {
    let a = family(Family::SimplyConnectedChain(3));
    let mut cert = classify(&a).unwrap();
    assert!(cert.trace.len() >= 2);
    cert.trace.remove(1);
    assert!(!verify_certificate(&a, &cert));
}

#[test]
fn component_on_a_band_breaks_the_certificate() {
    let opts = GenOptions {
        extra_bands: 1,
        ..Default::default()
    };
    let a = generate(&GenSpec::new(0, Family::MorsePair).with_options(opts)).unwrap();
    let mut cert = classify(&a).unwrap();
    assert!(verify_certificate(&a, &cert));
    let band = *cert
        .final_assembly
        .blocks
        .iter()
        .find(|(_, b)| matches!(b.kind, BlockKind::ProductBand { .. }))
        .expect("band kept")
        .0;
    cert.component.as_mut().unwrap().blocks = vec![band];
    assert!(!verify_certificate(&a, &cert));
}

#[test]
fn wrong_verdict_breaks_the_certificate() {
    let a = family(Family::MorsePair);
    let mut cert = classify(&a).unwrap();
    cert.verdict.kind = VerdictKind::Component(ComponentKind::Reeb);
    assert!(!verify_certificate(&a, &cert));
}

#[test]
fn open_and_foreign_inputs_are_refused() {
    let mut open = s3("open");
    open.add_reeb(false);
    assert!(matches!(classify(&open), Err(ClassifyError::NotClosed(_))));
    assert!(matches!(is_stable(&open), Err(ClassifyError::NotClosed(_))));
    let mut other = two_centers();
    other.ambient = Ambient::Other("T3".into());
    assert_eq!(
        classify(&other).unwrap_err(),
        ClassifyError::UnsupportedAmbient("T3".into())
    );
}

#[test]
fn two_centers_are_stable() {
    let v = is_stable(&two_centers()).unwrap();
    assert!(v.stable);
    assert!(v.witness.is_none());
    assert_eq!(v.to_string(), "stable");
}

#[test]
fn doubly_singular_leaf_is_unstable() {
    let opts = GenOptions {
        trivial_bubbles: 2,
        multi_singular: true,
        ..Default::default()
    };
    let a = generate(&GenSpec::new(0, Family::TwoCenters).with_options(opts)).unwrap();
    let v = is_stable(&a).unwrap();
    let w = v.witness.unwrap();
    assert!(!v.stable);
    assert_eq!(w.kind, WitnessKind::MultiSingularLeaf);
    assert!(w.site.exists_in(&a));
}

#[test]
fn morse_with_band_is_unstable() {
    let opts = GenOptions {
        extra_bands: 1,
        ..Default::default()
    };
    let a = generate(&GenSpec::new(0, Family::MorsePair).with_options(opts)).unwrap();
    let v = is_stable(&a).unwrap();
    let w = v.witness.unwrap();
    assert_eq!(w.kind, WitnessKind::BandOfLeaves);
    assert!(w.site.exists_in(&a));
    assert!(v.to_string().starts_with("unstable band_of_leaves "));
}

#[test]
fn reeb_only_is_a_flat_torus_thickening() {
    let v = is_stable(&family(Family::DoublePretzel)).unwrap();
    assert_eq!(v.witness.unwrap().kind, WitnessKind::FlatTorusThickening);
}

#[test]
fn verdict_tokens_round_trip() {
    for t in [
        "all_simply_connected",
        "reeb",
        "truncated_reeb+singular",
        "morse",
        "truncated_morse+singular",
    ] {
        assert_eq!(morsefol::Verdict::parse(t).unwrap().token(), t);
    }
    assert!(morsefol::Verdict::parse("pretzel").is_none());
}

fn tame(a: &Assembly) -> bool {
    leaves(a).iter().all(|l| l.compact && l.simply_connected)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_verify(seed in 0u64..5000) {
        let a = random(seed);
        let cert = classify(&a).unwrap();
        prop_assert!(verify_certificate(&a, &cert), "seed {}", seed);
    }

    #[test]
    fn tame_iff_all_simply_connected(seed in 0u64..5000) {
        let a = random(seed);
        let cert = classify(&a).unwrap();
        prop_assert_eq!(tame(&a), cert.verdict.kind == VerdictKind::AllSimplyConnected);
        if cert.verdict.kind != VerdictKind::AllSimplyConnected {
            prop_assert!(cert.component.is_some());
        }
    }

    #[test]
    fn stability_dichotomy(seed in 0u64..5000) {
        let a = random(seed);
        let v = is_stable(&a).unwrap();
        let census = leaves(&a);
        let expect = census.iter().all(|l| l.compact && l.simply_connected && l.conics <= 1);
        prop_assert_eq!(v.stable, expect);
        prop_assert_eq!(v.stable, v.witness.is_none());
        if let Some(w) = v.witness {
            prop_assert!(w.site.exists_in(&a));
        }
        if v.stable {
            prop_assert_eq!(classify(&a).unwrap().verdict.kind, VerdictKind::AllSimplyConnected);
        }
    }

    #[test]
    fn verdict_ignores_order_policy(seed in 0u64..5000) {
        let a = random(seed);
        let mut paths = find_bubbles(&a);
        paths.reverse();
        let (x, _) = morsefol::normalize(&a, &OrderPolicy::InnermostThenId).unwrap();
        let (y, _) = morsefol::normalize(&a, &OrderPolicy::Explicit(paths)).unwrap();
        let vx = classify(&x).unwrap().verdict.kind;
        let vy = classify(&y).unwrap().verdict.kind;
        prop_assert_eq!(vx, vy);
    }
}
