mod common;

use std::path::PathBuf;

use common::*;
use morsefol::detect::find_bubbles;
use morsefol::gen::{generate, Family, GenError, GenOptions, GenSpec};
use morsefol::io::{export_dot, parse, serialize, write_certificate, ParseError};
use morsefol::model::{counts, index_sum, validate};
use morsefol::{classify, isomorphic, normalize, Assembly, BlockKind, GluingKind, OrderPolicy};
use proptest::prelude::*;

fn family(f: Family) -> Assembly {
    generate(&GenSpec::new(0, f)).unwrap()
}

fn tally(a: &Assembly, token: &str) -> usize {
    a.blocks
        .values()
        .filter(|b| b.kind.token() == token)
        .count()
}

#[test]
fn two_centers_family() {
    let a = family(Family::TwoCenters);
    assert_eq!(tally(&a, "center_ball"), 2);
    assert_eq!(a.blocks.len(), 2);
    assert_eq!(a.gluings.len(), 1);
    assert!(matches!(
        a.gluings.values().next().unwrap().kind,
        GluingKind::Tangent { genus: 0, .. }
    ));
    let c = recount(&a);
    assert_eq!((centers(&c), conics(&c)), (2, 0));
    assert!(isomorphic(&a, &two_centers()));
}

#[test]
fn morse_pair_family() {
    let a = family(Family::MorsePair);
    assert_eq!(tally(&a, "morse_solid_torus"), 2);
    let sums = a
        .gluings
        .values()
        .filter(|g| matches!(g.kind, GluingKind::ConnectedSum { .. }))
        .count();
    assert!(sums >= 1);
    let c = recount(&a);
    assert_eq!(centers(&c), 2);
    let joining = a.gluings.values().find_map(|g| match g.kind {
        GluingKind::ConnectedSum { a: s, b: t, conic } => {
            let owners = [a.spots[&s].owner, a.spots[&t].owner];
            owners
                .iter()
                .all(|o| matches!(a.block(*o), Some(BlockKind::MorseSolidTorus { .. })))
                .then_some(conic)
        }
        _ => None,
    });
    assert!(joining.is_some());
    let internal: i64 = a
        .blocks
        .values()
        .filter(|b| b.kind.token() == "morse_solid_torus")
        .map(|b| b.kind.hosted().len() as i64)
        .sum();
    assert_eq!(internal - 2 + 1, 3);
    assert_eq!(index_sum(&a), 0);
}

#[test]
fn empty_chain_is_two_centers() {
    assert_eq!(
        serialize(&family(Family::SimplyConnectedChain(0)))
            .lines()
            .skip(2)
            .collect::<Vec<_>>(),
        serialize(&family(Family::TwoCenters))
            .lines()
            .skip(2)
            .collect::<Vec<_>>()
    );
    assert!(isomorphic(
        &family(Family::SimplyConnectedChain(0)),
        &family(Family::TwoCenters)
    ));
}

#[test]
fn double_pretzel_family() {
    let a = family(Family::DoublePretzel);
    assert_eq!(tally(&a, "reeb_solid_torus"), 4);
    assert!(a
        .gluings
        .values()
        .any(|g| matches!(g.kind, GluingKind::Tangent { genus: 2, .. })));
    assert!(isomorphic(&a, &double_pretzel()));
}

#[test]
fn variant_has_no_compact_glued_leaf() {
    let a = family(Family::NoCompactLeafVariant);
    let g = *a
        .gluings
        .iter()
        .find(|(_, g)| matches!(g.kind, GluingKind::Tangent { genus: 2, .. }))
        .unwrap()
        .0;
    let declared: Vec<_> = a
        .leaves
        .values()
        .filter(|l| l.owner == morsefol::Host::Gluing(g))
        .collect();
    assert!(!declared.is_empty());
    assert!(declared.iter().all(|l| !l.compact));
    assert!(validate(&a).is_valid());
}

#[test]
fn seed_one_size_five_classifies() {
    let a = generate(&GenSpec::random(1, 5, 0, 0)).unwrap();
    assert!(validate(&a).is_valid());
    classify(&a).unwrap();
}

#[test]
fn same_spec_same_bytes() {
    for spec in [
        GenSpec::random(7, 6, 2, 1),
        GenSpec::new(3, Family::DoublePretzel),
        GenSpec::random(99, 4, 1, 0),
    ] {
        assert_eq!(
            serialize(&generate(&spec).unwrap()),
            serialize(&generate(&spec).unwrap())
        );
    }
}

#[test]
fn depth_two_nests_and_shrinks() {
    let mut hits = 0;
    for seed in 0..40u64 {
        let a = generate(&GenSpec::random(seed, 3, 2, 0)).unwrap();
        if find_bubbles(&a).iter().any(|p| p.len() >= 2) {
            hits += 1;
        }
        let (b, _) = normalize(&a, &OrderPolicy::InnermostThenId).unwrap();
        assert!(total(&recount(&b)) < total(&recount(&a)), "seed {seed}");
    }
    assert!(hits >= 20, "{hits}");
}

#[test]
fn bad_specs_are_refused() {
    let bad = |s: GenSpec| matches!(generate(&s), Err(GenError::InvalidSpec(_)));
    assert!(bad(GenSpec::random(0, 100_000, 0, 0)));
    assert!(bad(GenSpec::random(0, 1, 99, 0)));
    assert!(bad(GenSpec::new(0, Family::TwoCenters).with_options(
        GenOptions {
            trivial_bubbles: 1,
            multi_singular: true,
            ..Default::default()
        }
    )));
    assert!(bad(GenSpec::new(0, Family::TwoCenters).with_options(
        GenOptions {
            charts: 1,
            ..Default::default()
        }
    )));
}

#[test]
fn family_names_parse() {
    for f in [
        "two_centers",
        "double_pretzel",
        "morse_pair",
        "no_compact_leaf_variant",
        "simply_connected_chain(3)",
        "random(5,1,0)",
    ] {
        let fam: Family = f.parse().unwrap();
        assert_eq!(fam.to_string(), f);
    }
    assert_eq!(
        "chain(2)".parse::<Family>().unwrap(),
        Family::SimplyConnectedChain(2)
    );
    assert!("pretzel".parse::<Family>().is_err());
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const GOLDEN: [(&str, Family); 3] = [
    ("two_centers", Family::TwoCenters),
    ("double_pretzel", Family::DoublePretzel),
    ("morse_pair", Family::MorsePair),
];

#[test]
fn golden_files_match() {
    for (name, fam) in GOLDEN {
        let path = golden_dir().join(format!("{name}.fol"));
        let text = serialize(&family(fam.clone()));
        if std::env::var_os("MORSEFOL_BLESS").is_some() {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let stored =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stored, text, "{name}");
        assert_eq!(parse(&stored).unwrap(), family(fam));
    }
}

#[test]
fn two_centers_text() {
    let text = serialize(&family(Family::TwoCenters));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("block ") && l.contains("kind=center_ball"))
            .count(),
        2
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("glue ") && l.contains(" tangent ") && l.ends_with("genus=0"))
            .count(),
        1
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("sing ")).count(), 2);
}

fn parse_err(text: &str) -> ParseError {
    parse(text).unwrap_err()
}

#[test]
fn parse_errors_name_the_line() {
    assert_eq!(parse_err("").reason, "missing header");
    assert_eq!(parse_err("# nothing\n").reason, "missing header");
    let e = parse_err("version 2\nassembly name=x ambient=S3\n");
    assert_eq!(
        (e.line, e.reason.as_str()),
        (1, "version mismatch: found 2, expected 1")
    );
    let e = parse_err("version 1\nassembly name=x ambient=S3\nwobble b1\n");
    assert_eq!(e.line, 3);
    assert!(e.reason.contains("unknown directive"));
    let e = parse_err(
        "version 1\nassembly name=x ambient=S3\nblock b1 kind=center_ball center=s1 colour=red\n",
    );
    assert!(e.reason.contains("unknown field"), "{e}");
    let dup = "version 1\nassembly name=x ambient=S3\nblock b1 kind=center_ball center=s1\nblock b1 kind=center_ball center=s2\nsing s1 index=0 host=b1 leaf=-\nsing s2 index=3 host=b1 leaf=-\n";
    let e = parse_err(dup);
    assert_eq!(e.line, 4);
    assert!(e.reason.contains("duplicate id b1"));
    let dangling = "version 1\nassembly name=x ambient=S3\nblock b1 kind=center_ball center=s1\nsing s1 index=0 host=b1 leaf=-\nglue g1 tangent a=b1.t0 b=b9.t0 genus=0\n";
    let e = parse_err(dangling);
    assert_eq!(e.line, 5);
    assert!(e.reason.contains("dangling reference b9"), "{e}");
    assert_eq!(e.to_string(), format!("line 5: {}", e.reason));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = serialize(&family(Family::TwoCenters));
    let noisy: String = text.lines().map(|l| format!("{l}   # note\n\n")).collect();
    assert_eq!(parse(&noisy).unwrap(), parse(&text).unwrap());
}

/// A small checker for the subset of the DOT language the exporter uses:
/// `graph ID { stmt* }` with node, edge, attribute and subgraph statements.
mod dot {
    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Id(String),
        Edge,
        Sym(char),
    }

    fn lex(s: &str) -> Result<Vec<Tok>, String> {
        let mut out = vec![];
        let mut it = s.chars().peekable();
        while let Some(&c) = it.peek() {
            if c.is_whitespace() {
                it.next();
            } else if c == '"' {
                it.next();
                let mut id = String::new();
                loop {
                    match it.next() {
                        Some('\\') => {
                            id.push('\\');
                            id.push(it.next().ok_or("dangling escape")?);
                        }
                        Some('"') => break,
                        Some(x) => id.push(x),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(Tok::Id(id));
            } else if c == '-' {
                it.next();
                if it.next() != Some('-') {
                    return Err("lone `-`".into());
                }
                out.push(Tok::Edge);
            } else if "{}[]=,;".contains(c) {
                it.next();
                out.push(Tok::Sym(c));
            } else if c.is_alphanumeric() || c == '_' || c == '.' {
                let mut id = String::new();
                while let Some(&x) = it.peek() {
                    if x.is_alphanumeric() || x == '_' || x == '.' {
                        id.push(x);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Id(id));
            } else {
                return Err(format!("unexpected `{c}`"));
            }
        }
        Ok(out)
    }

    pub struct Summary {
        pub nodes: usize,
        pub edges: usize,
        pub clusters: usize,
        pub highlighted: usize,
    }

    struct P {
        t: Vec<Tok>,
        i: usize,
        s: Summary,
    }

    impl P {
        fn peek(&self) -> Option<&Tok> {
            self.t.get(self.i)
        }
        fn eat(&mut self, t: Tok) -> Result<(), String> {
            if self.peek() == Some(&t) {
                self.i += 1;
                Ok(())
            } else {
                Err(format!(
                    "expected {t:?} at token {}, found {:?}",
                    self.i,
                    self.peek()
                ))
            }
        }
        fn id(&mut self) -> Result<String, String> {
            match self.peek().cloned() {
                Some(Tok::Id(s)) => {
                    self.i += 1;
                    Ok(s)
                }
                other => Err(format!("expected id at token {}, found {other:?}", self.i)),
            }
        }
        fn attrs(&mut self) -> Result<Vec<(String, String)>, String> {
            let mut v = vec![];
            if self.peek() != Some(&Tok::Sym('[')) {
                return Ok(v);
            }
            self.eat(Tok::Sym('['))?;
            while self.peek() != Some(&Tok::Sym(']')) {
                let k = self.id()?;
                self.eat(Tok::Sym('='))?;
                let val = self.id()?;
                v.push((k, val));
                if self.peek() == Some(&Tok::Sym(',')) || self.peek() == Some(&Tok::Sym(';')) {
                    self.i += 1;
                }
            }
            self.eat(Tok::Sym(']'))?;
            Ok(v)
        }
        fn stmts(&mut self) -> Result<(), String> {
            self.eat(Tok::Sym('{'))?;
            while self.peek() != Some(&Tok::Sym('}')) {
                let head = self.id()?;
                match head.as_str() {
                    "subgraph" => {
                        let name = self.id()?;
                        if !name.starts_with("cluster") {
                            return Err(format!("subgraph `{name}` is not a cluster"));
                        }
                        self.s.clusters += 1;
                        self.stmts()?;
                    }
                    "node" | "edge" | "graph" => {
                        self.attrs()?;
                    }
                    _ if self.peek() == Some(&Tok::Sym('=')) => {
                        self.i += 1;
                        self.id()?;
                    }
                    _ if self.peek() == Some(&Tok::Edge) => {
                        self.i += 1;
                        self.id()?;
                        self.attrs()?;
                        self.s.edges += 1;
                    }
                    _ => {
                        let a = self.attrs()?;
                        self.s.nodes += 1;
                        if a.iter().any(|(k, v)| k == "fillcolor" && v == "gold") {
                            self.s.highlighted += 1;
                        }
                    }
                }
                if self.peek() == Some(&Tok::Sym(';')) {
                    self.i += 1;
                }
            }
            self.eat(Tok::Sym('}'))
        }
    }

    pub fn check(text: &str) -> Result<Summary, String> {
        let mut p = P {
            t: lex(text)?,
            i: 0,
            s: Summary {
                nodes: 0,
                edges: 0,
                clusters: 0,
                highlighted: 0,
            },
        };
        if p.id()? != "graph" {
            return Err("not an undirected graph".into());
        }
        if matches!(p.peek(), Some(Tok::Id(_))) {
            p.id()?;
        }
        p.stmts()?;
        if p.i != p.t.len() {
            return Err("trailing tokens".into());
        }
        Ok(p.s)
    }
}

fn all_blocks(a: &Assembly) -> usize {
    a.blocks
        .values()
        .map(|b| match &b.kind {
            BlockKind::Bubble { inner, .. } => 1 + all_blocks(inner),
            _ => 1,
        })
        .sum()
}

fn all_gluings(a: &Assembly) -> usize {
    a.gluings.len()
        + a.blocks
            .values()
            .map(|b| match &b.kind {
                BlockKind::Bubble { inner, .. } => all_gluings(inner),
                _ => 0,
            })
            .sum::<usize>()
}

#[test]
fn dot_two_centers() {
    let s = dot::check(&export_dot(&family(Family::TwoCenters), None)).unwrap();
    assert_eq!((s.nodes, s.edges, s.clusters, s.highlighted), (2, 1, 0, 0));
}

#[test]
fn dot_highlights_the_component() {
    let a = family(Family::MorsePair);
    let cert = classify(&a).unwrap();
    let s = dot::check(&export_dot(&a, Some(&cert))).unwrap();
    assert_eq!(s.highlighted, cert.component.unwrap().blocks.len());
    assert!(s.highlighted >= 1);
}

#[test]
fn dot_clusters_per_bubble() {
    let a = (0..500u64)
        .map(|s| generate(&GenSpec::random(s, 2, 2, 0)).unwrap())
        .find(|a| find_bubbles(a).iter().any(|p| p.len() == 2))
        .unwrap();
    let s = dot::check(&export_dot(&a, None)).unwrap();
    assert_eq!(s.clusters, bubble_count(&a));
    assert_eq!(s.nodes, all_blocks(&a));
    assert_eq!(s.edges, all_gluings(&a));
}

#[test]
fn dot_checker_rejects_garbage() {
    assert!(dot::check("graph fol { \"a\" -- }").is_err());
    assert!(dot::check("digraph fol { }").is_err());
    assert!(dot::check("graph fol { \"a\" [label=\"x] }").is_err());
}

#[test]
fn certificate_text_shape() {
    let a = family(Family::SimplyConnectedChain(2));
    let cert = classify(&a).unwrap();
    let text = write_certificate(&cert);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "certificate version=1");
    assert_eq!(lines[1], "verdict all_simply_connected");
    assert_eq!(lines[2], "component -");
    assert_eq!(lines[3], format!("trace steps={}", cert.trace.len()));
    let fin = lines.iter().position(|l| *l == "final").unwrap();
    let body = lines[fin + 1..].join("\n") + "\n";
    assert!(isomorphic(&parse(&body).unwrap(), &cert.final_assembly));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_is_isomorphic(seed in 0u64..5000) {
        let a = random(seed);
        let text = serialize(&a);
        let b = parse(&text).unwrap();
        prop_assert!(isomorphic(&a, &b));
        prop_assert_eq!(&serialize(&b), &text);
    }

    #[test]
    fn generated_is_deterministic_and_valid(seed in 0u64..5000, size in 0u32..8, depth in 0u32..3, pants in 0u32..3) {
        let spec = GenSpec::random(seed, size, depth, pants);
        let a = generate(&spec).unwrap();
        prop_assert_eq!(serialize(&a), serialize(&generate(&spec).unwrap()));
        prop_assert!(validate(&a).is_valid(), "{}", validate(&a));
        prop_assert_eq!(index_sum(&a), 0);
        prop_assert_eq!(counts(&a).signed_sum(), 0);
    }

    #[test]
    fn dot_is_well_formed(seed in 0u64..5000) {
        let a = random(seed);
        let cert = classify(&a).unwrap();
        let s = dot::check(&export_dot(&a, Some(&cert))).unwrap();
        prop_assert_eq!(s.nodes, all_blocks(&a));
        prop_assert_eq!(s.edges, all_gluings(&a));
    }
}
