//! Graphviz output.

use std::fmt::Write;

use super::engine::ActionEngine;
use super::volcano::{EdgeKind, VolcanoInstance};

/// Nodes are the canonical level structures in enumeration order; one edge per
/// generator and node.
pub fn action_dot(engine: &ActionEngine) -> String {
    let mut s = String::from("digraph action {\n  node [shape=circle];\n");
    let mut per_curve = std::collections::BTreeMap::new();
    for (i, x) in engine.set.iter().enumerate() {
        let k = per_curve.entry((x.oc.curve.a, x.oc.curve.b)).or_insert(0);
        *k += 1;
        let _ = writeln!(s, "  n{i} [label=\"j={} #{}\"];", x.oc.curve.j_invariant(), k);
    }
    for (g, (p, _)) in engine.generators.iter().enumerate() {
        for (i, t) in engine.transitions[g].iter().enumerate() {
            if let Some(j) = t {
                let _ = writeln!(s, "  n{i} -> n{j} [label=\"({}, {} + {}w)\"];", p.a, p.b, p.c);
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Surface nodes on top, floor nodes below, one edge per `f`-isogeny out of the surface.
pub fn volcano_dot(vi: &VolcanoInstance) -> String {
    let mut s = String::from("digraph volcano {\n  rankdir=TB;\n");
    s.push_str("  { rank=same;");
    for i in 0..vi.surface.len() {
        let _ = write!(s, " s{i};");
    }
    s.push_str(" }\n  { rank=same;");
    for i in 0..vi.floor.len() {
        let _ = write!(s, " f{i};");
    }
    s.push_str(" }\n");
    for (i, x) in vi.surface.iter().enumerate() {
        let _ = writeln!(s, "  s{i} [label=\"j={} D={}\"];", x.curve.j_invariant(), vi.surface_order.disc);
    }
    for (i, x) in vi.floor.iter().enumerate() {
        let _ = writeln!(s, "  f{i} [label=\"j={} D={}\"];", x.curve.j_invariant(), vi.floor_order.disc);
    }
    for e in &vi.edges {
        match e.kind {
            EdgeKind::Horizontal => {
                let _ = writeln!(s, "  s{} -> s{} [style=solid];", e.from, e.to);
            }
            EdgeKind::Descending => {
                let _ = writeln!(s, "  s{} -> f{} [style=dashed];", e.from, e.to);
            }
        }
    }
    s.push_str("}\n");
    s
}
