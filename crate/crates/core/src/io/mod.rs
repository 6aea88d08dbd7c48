//! The FOL text format for assemblies, DOT export and certificate text.
//!
//! A document starts with `version 1`, followed by one `assembly` section.
//! Each declaration is a directive, an id and `key=value` fields:
//!
//! ```text
//! version 1
//! assembly name=two_centers ambient=S3
//! alloc block=3 gluing=2 sing=3 leaf=1 spot=1
//! block b1 kind=center_ball center=s1
//! block b2 kind=center_ball center=s2
//! sing s1 index=0 host=b1 leaf=-
//! sing s2 index=3 host=b2 leaf=-
//! glue g1 tangent a=b1.t0 b=b2.t0 genus=0
//! ```
//!
//! A bubble line ends with `{`; its interior follows as a nested
//! `assembly` section closed by `}`.

mod cert;
mod dot;

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::ids::{BlockId, GluingId, LeafId, Level, SingId, SpotId};
use crate::model::{
    Ambient, Assembly, Block, BlockKind, Direction, Gluing, GluingKind, Host, IdAlloc,
    LeafDescriptor, LeafShape, Port, Singularity, Spot,
};
use crate::rewrite::Item;

pub use cert::{write_certificate, write_step, write_trace};
pub use dot::export_dot;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn list<T: ToString>(xs: &[T]) -> String {
    if xs.is_empty() {
        "-".to_string()
    } else {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn word(s: &str) -> String {
    if s.is_empty() {
        "-".to_string()
    } else {
        s.split_whitespace().collect::<Vec<_>>().join("_")
    }
}

pub fn serialize(a: &Assembly) -> String {
    let mut out = format!("version {VERSION}\n");
    write_assembly(&mut out, a, 0);
    out
}

fn block_fields(kind: &BlockKind) -> String {
    match kind {
        BlockKind::CenterBall { center } => format!("center={center}"),
        BlockKind::ReebSolidTorus { flat } => format!("flat={flat}"),
        BlockKind::MorseSolidTorus { center, conic }
        | BlockKind::TruncatedMorse { center, conic } => {
            format!("center={center} conic={conic}")
        }
        BlockKind::ProductBand { genus } => format!("genus={genus}"),
        BlockKind::BallWithSpots { conics } => format!("conics={}", list(conics)),
        BlockKind::Bubble {
            conic, host, cap, ..
        } => format!("conic={conic} host={host} cap={cap} {{"),
        BlockKind::TrivialBubble {
            center,
            conic,
            host,
        } => format!("center={center} conic={conic} host={host}"),
        BlockKind::TruncatedBubble {
            conics,
            host,
            inward,
            outward,
        } => {
            format!(
                "conics={} host={host} inward={inward} outward={outward}",
                list(conics)
            )
        }
        BlockKind::SpecialBubble { conics, host } => format!("conics={} host={host}", list(conics)),
        BlockKind::DoubleConeChart { around, cone } => format!("around={around} cone={cone}"),
        BlockKind::TruncatedReeb => String::new(),
    }
}

fn write_assembly(out: &mut String, a: &Assembly, depth: usize) {
    let pad = "  ".repeat(depth);
    let n = a.next;
    let _ = writeln!(
        out,
        "{pad}assembly name={} ambient={}",
        word(&a.name),
        word(&a.ambient.to_string())
    );
    let _ = writeln!(
        out,
        "{pad}alloc block={} gluing={} sing={} leaf={} spot={}",
        n.block, n.gluing, n.sing, n.leaf, n.spot
    );
    for (id, b) in &a.blocks {
        let fields = block_fields(&b.kind);
        let sep = if fields.is_empty() { "" } else { " " };
        let _ = writeln!(out, "{pad}block {id} kind={}{sep}{fields}", b.kind.token());
        if let BlockKind::Bubble { inner, .. } = &b.kind {
            write_assembly(out, inner, depth + 1);
            let _ = writeln!(out, "{pad}}}");
        }
    }
    for (id, s) in &a.spots {
        let iface = s.interface.map_or("-".to_string(), |i| format!("t{i}"));
        let hol = if s.holonomy_trivial {
            "trivial"
        } else {
            "nontrivial"
        };
        let _ = writeln!(
            out,
            "{pad}spot {id} owner={} iface={iface} dir={} assoc={} holonomy={hol}",
            s.owner,
            s.direction.token(),
            s.associated
        );
    }
    for (id, s) in &a.singularities {
        let leaf = s.leaf.map_or("-".to_string(), |l| l.to_string());
        let _ = writeln!(
            out,
            "{pad}sing {id} index={} host={} leaf={leaf}",
            s.index, s.host
        );
    }
    for (id, g) in &a.gluings {
        let _ = match &g.kind {
            GluingKind::Tangent { a, b, genus } => {
                writeln!(out, "{pad}glue {id} tangent a={a} b={b} genus={genus}")
            }
            GluingKind::SpotTransverse { a, b } => {
                writeln!(out, "{pad}glue {id} transverse a={a} b={b}")
            }
            GluingKind::ConnectedSum { a, b, conic } => {
                writeln!(out, "{pad}glue {id} sum a={a} b={b} conic={conic}")
            }
        };
    }
    for (id, l) in &a.leaves {
        let _ = writeln!(
            out,
            "{pad}leaf {id} owner={} shape={} compact={} sc={} sings={}",
            l.owner,
            l.shape,
            l.compact,
            l.simply_connected,
            list(&l.singularities)
        );
    }
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        reason: reason.into(),
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = body.split_whitespace().collect();
            (!words.is_empty()).then_some(Line { no: i + 1, words })
        })
        .collect()
}

struct Fields<'a> {
    line: usize,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, words: &[&'a str], allowed: &[&str]) -> Result<Self, ParseError> {
        let mut map = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key=value, found `{w}`")))?;
            if !allowed.contains(&k) {
                return Err(err(line, format!("unknown field `{k}`")));
            }
            if map.insert(k, v).is_some() {
                return Err(err(line, format!("field `{k}` given twice")));
            }
        }
        for k in allowed {
            if !map.contains_key(k) {
                return Err(err(line, format!("missing field `{k}`")));
            }
        }
        Ok(Fields { line, map })
    }

    fn raw(&self, key: &str) -> &'a str {
        self.map[key]
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T, ParseError> {
        let v = self.raw(key);
        v.parse()
            .map_err(|_| err(self.line, format!("bad value `{v}` for `{key}`")))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ParseError> {
        if self.raw(key) == "-" {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, ParseError> {
        let v = self.raw(key);
        if v == "-" {
            return Ok(vec![]);
        }
        v.split(',')
            .map(|x| {
                x.parse()
                    .map_err(|_| err(self.line, format!("bad list item `{x}` for `{key}`")))
            })
            .collect()
    }

    fn bool(&self, key: &str) -> Result<bool, ParseError> {
        match self.raw(key) {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(err(self.line, format!("bad boolean `{v}` for `{key}`"))),
        }
    }

    fn host(&self, key: &str) -> Result<Host, ParseError> {
        let v = self.raw(key);
        if let Ok(b) = v.parse::<BlockId>() {
            Ok(Host::Block(b))
        } else if let Ok(g) = v.parse::<GluingId>() {
            Ok(Host::Gluing(g))
        } else {
            Err(err(self.line, format!("bad host `{v}`")))
        }
    }

    fn port(&self, key: &str) -> Result<Port, ParseError> {
        let v = self.raw(key);
        let bad = || err(self.line, format!("bad port `{v}`"));
        let (b, t) = v.split_once('.').ok_or_else(bad)?;
        let block = b.parse().map_err(|_| bad())?;
        let interface = t
            .strip_prefix('t')
            .and_then(|i| i.parse().ok())
            .ok_or_else(bad)?;
        Ok(Port { block, interface })
    }
}

pub fn parse_shape(s: &str) -> Option<LeafShape> {
    Some(match s {
        "sphere" => LeafShape::Sphere,
        "torus" => LeafShape::Torus,
        "pseudo_torus" => LeafShape::PseudoTorus,
        "double_cone" => LeafShape::DoubleCone,
        "pseudo_disc_leaf" => LeafShape::PseudoDiscLeaf,
        "plane" => LeafShape::Plane,
        "disc" => LeafShape::Disc,
        "annulus" => LeafShape::Annulus,
        "generic" => LeafShape::Generic,
        "center" => LeafShape::Center,
        _ => LeafShape::Genus(s.strip_prefix("genus")?.parse().ok().filter(|g| *g >= 2)?),
    })
}

fn direction(line: usize, v: &str) -> Result<Direction, ParseError> {
    match v {
        "in" => Ok(Direction::Inward),
        "out" => Ok(Direction::Outward),
        _ => Err(err(line, format!("bad direction `{v}`"))),
    }
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

#[derive(Default)]
struct Refs(Vec<(usize, Item)>);

impl Refs {
    fn host(&mut self, line: usize, h: Host) {
        self.0.push((
            line,
            match h {
                Host::Block(b) => Item::Block(b),
                Host::Gluing(g) => Item::Gluing(g),
            },
        ));
    }
}

impl<'a> Parser<'a> {
    fn parse_block(
        &mut self,
        a: &mut Assembly,
        refs: &mut Refs,
        no: usize,
        words: &[&'a str],
    ) -> Result<(), ParseError> {
        let id: BlockId = words[1]
            .parse()
            .map_err(|_| err(no, format!("bad block id `{}`", words[1])))?;
        let rest = &words[2..];
        let kind_word = rest
            .first()
            .and_then(|w| w.strip_prefix("kind="))
            .ok_or_else(|| err(no, "missing field `kind`"))?;
        let mut fields = &rest[1..];
        let opens = fields.last() == Some(&"{");
        if opens {
            fields = &fields[..fields.len() - 1];
        }
        let f = |allowed: &[&str]| Fields::new(no, fields, allowed);
        let sing = |refs: &mut Refs, s: SingId| refs.0.push((no, Item::Sing(s)));
        let kind = match kind_word {
            "center_ball" => {
                let f = f(&["center"])?;
                let center = f.get("center")?;
                sing(refs, center);
                BlockKind::CenterBall { center }
            }
            "reeb_solid_torus" => BlockKind::ReebSolidTorus {
                flat: f(&["flat"])?.bool("flat")?,
            },
            "morse_solid_torus" | "truncated_morse" => {
                let f = f(&["center", "conic"])?;
                let (center, conic) = (f.get("center")?, f.get("conic")?);
                sing(refs, center);
                sing(refs, conic);
                if kind_word == "truncated_morse" {
                    BlockKind::TruncatedMorse { center, conic }
                } else {
                    BlockKind::MorseSolidTorus { center, conic }
                }
            }
            "product_band" => BlockKind::ProductBand {
                genus: f(&["genus"])?.get("genus")?,
            },
            "ball_with_spots" => {
                let conics: Vec<SingId> = f(&["conics"])?.list("conics")?;
                conics.iter().for_each(|c| sing(refs, *c));
                BlockKind::BallWithSpots { conics }
            }
            "bubble" => {
                if !opens {
                    return Err(err(no, "bubble without `{`"));
                }
                let f = f(&["conic", "host", "cap"])?;
                let (conic, host) = (f.get("conic")?, f.get("host")?);
                sing(refs, conic);
                refs.0.push((no, Item::Leaf(host)));
                let inner = self.parse_assembly(true)?;
                let cap: BlockId = f.get("cap")?;
                if !inner.blocks.contains_key(&cap) {
                    return Err(err(no, format!("dangling reference {cap}")));
                }
                BlockKind::Bubble {
                    conic,
                    host,
                    cap,
                    inner: Box::new(inner),
                }
            }
            "trivial_bubble" => {
                let f = f(&["center", "conic", "host"])?;
                let (center, conic, host) = (f.get("center")?, f.get("conic")?, f.get("host")?);
                sing(refs, center);
                sing(refs, conic);
                refs.0.push((no, Item::Leaf(host)));
                BlockKind::TrivialBubble {
                    center,
                    conic,
                    host,
                }
            }
            "truncated_bubble" => {
                let f = f(&["conics", "host", "inward", "outward"])?;
                let conics: Vec<SingId> = f.list("conics")?;
                let (host, inward, outward) = (f.get("host")?, f.get("inward")?, f.get("outward")?);
                conics.iter().for_each(|c| sing(refs, *c));
                refs.0.extend([
                    (no, Item::Leaf(host)),
                    (no, Item::Spot(inward)),
                    (no, Item::Spot(outward)),
                ]);
                BlockKind::TruncatedBubble {
                    conics,
                    host,
                    inward,
                    outward,
                }
            }
            "special_bubble" => {
                let f = f(&["conics", "host"])?;
                let conics: Vec<SingId> = f.list("conics")?;
                let host = f.get("host")?;
                conics.iter().for_each(|c| sing(refs, *c));
                refs.0.push((no, Item::Leaf(host)));
                BlockKind::SpecialBubble { conics, host }
            }
            "double_cone_chart" => {
                let f = f(&["around", "cone"])?;
                let around = f.get("around")?;
                sing(refs, around);
                BlockKind::DoubleConeChart {
                    around,
                    cone: f.get::<Level>("cone")?,
                }
            }
            "truncated_reeb" => {
                f(&[])?;
                BlockKind::TruncatedReeb
            }
            other => return Err(err(no, format!("unknown block kind `{other}`"))),
        };
        if opens && !matches!(kind, BlockKind::Bubble { .. }) {
            return Err(err(no, "only bubbles open a nested section"));
        }
        if a.blocks.insert(id, Block { kind }).is_some() {
            return Err(err(no, format!("duplicate id {id}")));
        }
        Ok(())
    }

    fn parse_assembly(&mut self, nested: bool) -> Result<Assembly, ParseError> {
        let last_line = self.lines.last().map_or(1, |l| l.no);
        let head = self
            .lines
            .get(self.pos)
            .ok_or_else(|| err(last_line, "missing assembly section"))?;
        if head.words[0] != "assembly" {
            return Err(err(
                head.no,
                format!("expected `assembly`, found `{}`", head.words[0]),
            ));
        }
        let f = Fields::new(head.no, &head.words[1..], &["name", "ambient"])?;
        let name = match f.raw("name") {
            "-" => String::new(),
            n => n.to_string(),
        };
        let ambient = match f.raw("ambient") {
            "S3" => Ambient::S3,
            t => Ambient::Other(t.to_string()),
        };
        let mut a = Assembly::new(name, ambient);
        self.pos += 1;
        let mut refs = Refs::default();
        let mut alloc: Option<IdAlloc> = None;
        let mut closed = false;
        while self.pos < self.lines.len() {
            let no = self.lines[self.pos].no;
            let words = self.lines[self.pos].words.clone();
            self.pos += 1;
            let directive = words[0];
            if directive == "}" {
                if !nested || words.len() > 1 {
                    return Err(err(no, "unexpected `}`"));
                }
                closed = true;
                break;
            }
            let need_id = |n: usize| {
                if words.len() < n {
                    Err(err(no, format!("`{directive}` needs an id")))
                } else {
                    Ok(())
                }
            };
            match directive {
                "alloc" => {
                    let f = Fields::new(
                        no,
                        &words[1..],
                        &["block", "gluing", "sing", "leaf", "spot"],
                    )?;
                    if alloc.is_some() {
                        return Err(err(no, "duplicate `alloc`"));
                    }
                    alloc = Some(IdAlloc {
                        block: f.get("block")?,
                        gluing: f.get("gluing")?,
                        sing: f.get("sing")?,
                        leaf: f.get("leaf")?,
                        spot: f.get("spot")?,
                    });
                }
                "block" => {
                    need_id(3)?;
                    self.parse_block(&mut a, &mut refs, no, &words)?;
                }
                "spot" => {
                    need_id(2)?;
                    let id: SpotId = words[1]
                        .parse()
                        .map_err(|_| err(no, format!("bad spot id `{}`", words[1])))?;
                    let f = Fields::new(
                        no,
                        &words[2..],
                        &["owner", "iface", "dir", "assoc", "holonomy"],
                    )?;
                    let owner: BlockId = f.get("owner")?;
                    let interface = match f.raw("iface") {
                        "-" => None,
                        t => Some(
                            t.strip_prefix('t')
                                .and_then(|i| i.parse().ok())
                                .ok_or_else(|| err(no, format!("bad interface `{t}`")))?,
                        ),
                    };
                    let holonomy_trivial = match f.raw("holonomy") {
                        "trivial" => true,
                        "nontrivial" => false,
                        v => return Err(err(no, format!("bad holonomy `{v}`"))),
                    };
                    let associated: SingId = f.get("assoc")?;
                    refs.0
                        .extend([(no, Item::Block(owner)), (no, Item::Sing(associated))]);
                    let spot = Spot {
                        owner,
                        interface,
                        direction: direction(no, f.raw("dir"))?,
                        associated,
                        holonomy_trivial,
                    };
                    if a.spots.insert(id, spot).is_some() {
                        return Err(err(no, format!("duplicate id {id}")));
                    }
                }
                "sing" => {
                    need_id(2)?;
                    let id: SingId = words[1]
                        .parse()
                        .map_err(|_| err(no, format!("bad singularity id `{}`", words[1])))?;
                    let f = Fields::new(no, &words[2..], &["index", "host", "leaf"])?;
                    let host = f.host("host")?;
                    let leaf: Option<LeafId> = f.opt("leaf")?;
                    refs.host(no, host);
                    if let Some(l) = leaf {
                        refs.0.push((no, Item::Leaf(l)));
                    }
                    let s = Singularity {
                        index: f.get("index")?,
                        host,
                        leaf,
                    };
                    if a.singularities.insert(id, s).is_some() {
                        return Err(err(no, format!("duplicate id {id}")));
                    }
                }
                "glue" => {
                    need_id(3)?;
                    let id: GluingId = words[1]
                        .parse()
                        .map_err(|_| err(no, format!("bad gluing id `{}`", words[1])))?;
                    let kind = match words[2] {
                        "tangent" => {
                            let f = Fields::new(no, &words[3..], &["a", "b", "genus"])?;
                            let (p, q) = (f.port("a")?, f.port("b")?);
                            refs.0
                                .extend([(no, Item::Block(p.block)), (no, Item::Block(q.block))]);
                            GluingKind::Tangent {
                                a: p,
                                b: q,
                                genus: f.get("genus")?,
                            }
                        }
                        "transverse" => {
                            let f = Fields::new(no, &words[3..], &["a", "b"])?;
                            let (s, t) = (f.get("a")?, f.get("b")?);
                            refs.0.extend([(no, Item::Spot(s)), (no, Item::Spot(t))]);
                            GluingKind::SpotTransverse { a: s, b: t }
                        }
                        "sum" => {
                            let f = Fields::new(no, &words[3..], &["a", "b", "conic"])?;
                            let (s, t, conic) = (f.get("a")?, f.get("b")?, f.get("conic")?);
                            refs.0.extend([
                                (no, Item::Spot(s)),
                                (no, Item::Spot(t)),
                                (no, Item::Sing(conic)),
                            ]);
                            GluingKind::ConnectedSum { a: s, b: t, conic }
                        }
                        other => return Err(err(no, format!("unknown gluing kind `{other}`"))),
                    };
                    if a.gluings.insert(id, Gluing { kind }).is_some() {
                        return Err(err(no, format!("duplicate id {id}")));
                    }
                }
                "leaf" => {
                    need_id(2)?;
                    let id: LeafId = words[1]
                        .parse()
                        .map_err(|_| err(no, format!("bad leaf id `{}`", words[1])))?;
                    let f = Fields::new(
                        no,
                        &words[2..],
                        &["owner", "shape", "compact", "sc", "sings"],
                    )?;
                    let owner = f.host("owner")?;
                    let shape = parse_shape(f.raw("shape"))
                        .ok_or_else(|| err(no, format!("bad shape `{}`", f.raw("shape"))))?;
                    let singularities: Vec<SingId> = f.list("sings")?;
                    refs.host(no, owner);
                    refs.0
                        .extend(singularities.iter().map(|s| (no, Item::Sing(*s))));
                    let leaf = LeafDescriptor {
                        owner,
                        compact: f.bool("compact")?,
                        shape,
                        singularities,
                        simply_connected: f.bool("sc")?,
                    };
                    if a.leaves.insert(id, leaf).is_some() {
                        return Err(err(no, format!("duplicate id {id}")));
                    }
                }
                "version" => return Err(err(no, "`version` only allowed on the first line")),
                other => return Err(err(no, format!("unknown directive `{other}`"))),
            }
        }
        if nested && !closed {
            return Err(err(last_line, "unterminated bubble section"));
        }
        for (no, item) in refs.0 {
            let present = match item {
                Item::Block(b) => a.blocks.contains_key(&b),
                Item::Gluing(g) => a.gluings.contains_key(&g),
                Item::Sing(s) => a.singularities.contains_key(&s),
                Item::Leaf(l) => a.leaves.contains_key(&l),
                Item::Spot(p) => a.spots.contains_key(&p),
            };
            if !present {
                return Err(err(no, format!("dangling reference {item}")));
            }
        }
        a.next = match alloc {
            Some(n) => n,
            None => fresh_alloc(&a),
        };
        Ok(a)
    }
}

/// Smallest allocator state that hands out no id already in use.
fn fresh_alloc(a: &Assembly) -> IdAlloc {
    fn after<K: Copy>(keys: impl Iterator<Item = K>, val: impl Fn(K) -> u32) -> u32 {
        keys.map(val).max().map_or(1, |m| m + 1)
    }
    IdAlloc {
        block: after(a.blocks.keys().copied(), |k| k.0),
        gluing: after(a.gluings.keys().copied(), |k| k.0),
        sing: after(a.singularities.keys().copied(), |k| k.0),
        leaf: after(a.leaves.keys().copied(), |k| k.0),
        spot: after(a.spots.keys().copied(), |k| k.0),
    }
}

pub fn parse(text: &str) -> Result<Assembly, ParseError> {
    let lines = tokenize(text);
    let Some(first) = lines.first() else {
        return Err(err(1, "missing header"));
    };
    match first.words.as_slice() {
        ["version", v] => {
            if v.parse::<u32>().ok() != Some(VERSION) {
                return Err(err(
                    first.no,
                    format!("version mismatch: found {v}, expected {VERSION}"),
                ));
            }
        }
        _ => return Err(err(first.no, "missing header")),
    }
    let mut p = Parser { lines, pos: 1 };
    let a = p.parse_assembly(false)?;
    if let Some(extra) = p.lines.get(p.pos) {
        return Err(err(extra.no, "trailing content after assembly"));
    }
    Ok(a)
}
