use std::fmt::Write;

use super::serialize;
use crate::classify::Certificate;
use crate::rewrite::{Ref, RewriteOp, RewriteStep};

fn refs(xs: &[Ref]) -> String {
    if xs.is_empty() {
        "-".to_string()
    } else {
        xs.iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn path(p: &[crate::ids::BlockId]) -> String {
    p.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

fn op_text(op: &RewriteOp) -> String {
    let args = match op {
        RewriteOp::MorseModA { chart, level } | RewriteOp::MorseModB { chart, level } => {
            format!("chart={chart} level={level}")
        }
        RewriteOp::SplitSingularLeaf { leaf } => format!("leaf={leaf}"),
        RewriteOp::ConnectedSum {
            other,
            first,
            second,
            index,
        } => {
            let site = |d: &crate::rewrite::DiscSite| {
                let iface = d.interface.map_or("-".to_string(), |i| format!("t{i}"));
                format!("{}.{iface}/{}", d.block, d.direction.token())
            };
            format!(
                "other={} first={} second={} index={index}",
                other.name,
                site(first),
                site(second)
            )
        }
        RewriteOp::EliminateTrivialPair { center, conic } => {
            format!("center={center} conic={conic}")
        }
        RewriteOp::FillWithCenter { path: p } | RewriteOp::EliminateBubble { path: p } => {
            format!("path={}", path(p))
        }
        RewriteOp::CorrectiveMovement { tb }
        | RewriteOp::TruncatedToBubbles { tb }
        | RewriteOp::EliminateTruncatedBubble { tb } => format!("tb={tb}"),
        RewriteOp::CompleteTruncatedComponent { block } | RewriteOp::RestrictToBubble { block } => {
            format!("block={block}")
        }
    };
    format!("{} {args}", op.name())
}

fn write_into(out: &mut String, step: &RewriteStep, depth: usize) {
    let pad = "  ".repeat(depth);
    let delta: Vec<String> = step
        .singularity_delta
        .iter()
        .filter(|(_, d)| **d != 0)
        .map(|(i, d)| format!("i{i}:{d:+}"))
        .collect();
    let delta = if delta.is_empty() {
        "-".to_string()
    } else {
        delta.join(",")
    };
    let _ = writeln!(
        out,
        "{pad}{} site={} consumed={} produced={} delta={delta}",
        op_text(&step.op),
        refs(&step.site),
        refs(&step.consumed),
        refs(&step.produced)
    );
    for s in &step.substeps {
        write_into(out, s, depth + 1);
    }
}

/// One step as text, substeps indented below it.
pub fn write_step(step: &RewriteStep) -> String {
    let mut out = String::new();
    write_into(&mut out, step, 0);
    out
}

pub fn write_trace(steps: &[RewriteStep]) -> String {
    let mut out = String::new();
    for (i, s) in steps.iter().enumerate() {
        let _ = write!(out, "step {} ", i + 1);
        write_into(&mut out, s, 0);
    }
    out
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = String::from("certificate version=1\n");
    let _ = writeln!(out, "verdict {}", cert.verdict);
    match &cert.component {
        Some(c) => {
            let blocks: Vec<String> = c.blocks.iter().map(|b| b.to_string()).collect();
            let gluings: Vec<String> = c.gluings.iter().map(|g| g.to_string()).collect();
            let _ = writeln!(
                out,
                "component kind={} pseudo={} singular={} blocks={} gluings={}",
                c.kind.token(),
                c.pseudo,
                c.singular,
                if blocks.is_empty() {
                    "-".into()
                } else {
                    blocks.join(",")
                },
                if gluings.is_empty() {
                    "-".into()
                } else {
                    gluings.join(",")
                }
            );
        }
        None => out.push_str("component -\n"),
    }
    let _ = writeln!(out, "trace steps={}", cert.trace.len());
    out.push_str(&write_trace(&cert.trace));
    out.push_str("final\n");
    out.push_str(&serialize(&cert.final_assembly));
    out
}
