//! Graphviz export of a space's face lattice.

use super::{Provenance, Space};
use std::fmt::Write;

/// Faces as nodes, meeting pairs as solid edges, and front faces linked to
/// the faces of their center by dashed edges labelled `(center, order)`.
pub fn to_dot(space: &Space) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph \"{}\" {{", space.name);
    let _ = writeln!(s, "  node [shape=box];");
    for f in space.faces() {
        let shape = match f.provenance {
            Provenance::Base { .. } => "box",
            Provenance::Front { .. } => "ellipse",
        };
        let _ = writeln!(s, "  \"{}\" [shape={}];", f.name, shape);
    }
    let n = space.face_count();
    for i in 0..n {
        for j in i + 1..n {
            if space.meets(&[i, j]) {
                let _ = writeln!(s, "  \"{}\" -- \"{}\";", space.face_name(i), space.face_name(j));
            }
        }
    }
    for step in space.history() {
        let ff = space.face_name(step.ff);
        let label = format!("({}, {})", step.center, step.order);
        for &g in &step.faces {
            let _ = writeln!(
                s,
                "  \"{}\" -- \"{}\" [style=dashed, label=\"{}\"];",
                ff,
                space.face_name(g),
                label.replace('"', "'")
            );
        }
    }
    s.push_str("}\n");
    s
}
