//! Graphviz rendering of a target model.
//!
//! One node per element labelled `Type: name`, one edge per relation
//! labelled with its type. Dummies are dashed. Output order follows the
//! model's identifier order, so equal models give byte-equal files.

use crate::transform::TargetModel;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(target: &TargetModel) -> String {
    let mut out = String::new();
    out.push_str("digraph model {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");
    for elem in target.elements.values() {
        let style = if elem.dummy { ", style=dashed" } else { "" };
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\"{style}];\n",
            esc(&elem.id),
            esc(&format!("{}: {}", elem.type_name, elem.name)),
        ));
    }
    for rel in target.relations.values() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            esc(&rel.source),
            esc(&rel.target),
            esc(&rel.type_name),
        ));
    }
    out.push_str("}\n");
    out
}
