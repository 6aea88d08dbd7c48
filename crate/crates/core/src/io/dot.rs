use std::collections::BTreeSet;
use std::fmt::Write;

use crate::classify::Certificate;
use crate::ids::BlockId;
use crate::model::{Assembly, BlockKind, GluingKind};

fn node(prefix: &str, b: BlockId) -> String {
    format!("\"{prefix}{b}\"")
}

fn write_graph(
    out: &mut String,
    a: &Assembly,
    prefix: &str,
    depth: usize,
    highlight: &BTreeSet<BlockId>,
) {
    let pad = "  ".repeat(depth + 1);
    for (id, b) in &a.blocks {
        let sings: Vec<String> = b.kind.hosted().iter().map(|s| s.to_string()).collect();
        let mut label = format!("{id} {}", b.kind.token());
        if !sings.is_empty() {
            label.push_str("\\n");
            label.push_str(&sings.join(" "));
        }
        let extra = if highlight.contains(id) {
            ", style=filled, fillcolor=gold"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{pad}{} [label=\"{label}\"{extra}];",
            node(prefix, *id)
        );
    }
    for (id, g) in &a.gluings {
        let owner = |s| a.spots.get(s).map(|x| x.owner);
        let (x, y, style, label) = match &g.kind {
            GluingKind::Tangent { a: p, b: q, genus } => (
                Some(p.block),
                Some(q.block),
                "solid",
                format!("{id} genus {genus}"),
            ),
            GluingKind::SpotTransverse { a: s, b: t } => {
                (owner(s), owner(t), "dashed", id.to_string())
            }
            GluingKind::ConnectedSum { a: s, b: t, conic } => {
                (owner(s), owner(t), "bold", format!("{id} {conic}"))
            }
        };
        if let (Some(x), Some(y)) = (x, y) {
            let _ = writeln!(
                out,
                "{pad}{} -- {} [label=\"{label}\", style={style}];",
                node(prefix, x),
                node(prefix, y)
            );
        }
    }
    for (id, b) in &a.blocks {
        if let BlockKind::Bubble { inner, .. } = &b.kind {
            let inner_prefix = format!("{prefix}{id}/");
            let cluster = inner_prefix.replace('/', "_");
            let _ = writeln!(out, "{pad}subgraph \"cluster_{cluster}\" {{");
            let _ = writeln!(out, "{pad}  label=\"{id} interior\";");
            write_graph(out, inner, &inner_prefix, depth + 1, &BTreeSet::new());
            let _ = writeln!(out, "{pad}}}");
        }
    }
}

/// Block graph in DOT: one node per block, one edge per gluing, one
/// cluster per bubble interior. Component blocks of `cert` are filled.
pub fn export_dot(a: &Assembly, cert: Option<&Certificate>) -> String {
    let highlight: BTreeSet<BlockId> = cert
        .and_then(|c| c.component.as_ref())
        .map(|c| c.blocks.iter().copied().collect())
        .unwrap_or_default();
    let mut out = String::from("graph fol {\n  node [shape=box];\n");
    write_graph(&mut out, a, "", 0, &highlight);
    out.push_str("}\n");
    out
}
