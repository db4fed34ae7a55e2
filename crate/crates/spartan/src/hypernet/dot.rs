//! Graphviz export. Vertices are drawn as points, edges as circled nodes,
//! boxes as nested clusters annotated with their type. Numbering follows the
//! canonical traversal so identical nets print identically.

use super::{EdgeLabel, Hypernet, TokenKind};
use std::fmt::Write;

impl Hypernet {
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph hypernet {\n");
        out.push_str("  rankdir=TB;\n  node [fontsize=10];\n");
        self.dot_body(&mut out, "", "  ");
        out.push_str("}\n");
        out
    }

    fn dot_body(&self, out: &mut String, prefix: &str, indent: &str) {
        let (vorder, eorder) = self.traversal_order();
        let vnum = |v: super::VertexId| vorder.iter().position(|&x| x == v).unwrap();

        for (i, &v) in vorder.iter().enumerate() {
            let _ = writeln!(
                out,
                "{indent}{prefix}v{i} [shape=point, xlabel=\"v{i}:{}\"];",
                self.vertex_label(v)
            );
        }
        for (k, &e) in eorder.iter().enumerate() {
            let edge = self.edge(e);
            match &edge.label {
                EdgeLabel::Box { content, binders } => {
                    let _ = writeln!(out, "{indent}subgraph cluster_{prefix}e{k} {{");
                    let _ = writeln!(
                        out,
                        "{indent}  label=\"box T{binders}(*) => {}\";",
                        type_list(&content.output_labels()[*binders as usize..])
                    );
                    let _ = writeln!(
                        out,
                        "{indent}  {prefix}e{k} [shape=circle, label=\"box\"];"
                    );
                    content.dot_body(out, &format!("{prefix}e{k}_"), &format!("{indent}  "));
                    let _ = writeln!(out, "{indent}}}");
                }
                label => {
                    let _ = writeln!(
                        out,
                        "{indent}{prefix}e{k} [shape=circle, label=\"{}\"];",
                        edge_name(label)
                    );
                }
            }
            for &s in &edge.sources {
                let _ = writeln!(out, "{indent}{prefix}v{} -> {prefix}e{k};", vnum(s));
            }
            for &t in &edge.targets {
                let _ = writeln!(out, "{indent}{prefix}e{k} -> {prefix}v{};", vnum(t));
            }
        }
        for (i, &v) in self.inputs().iter().enumerate() {
            let _ = writeln!(
                out,
                "{indent}{prefix}in{i} [shape=none, label=\"in{i}\"]; {prefix}in{i} -> {prefix}v{};",
                vnum(v)
            );
        }
        for (i, &v) in self.outputs().iter().enumerate() {
            let _ = writeln!(
                out,
                "{indent}{prefix}out{i} [shape=none, label=\"out{i}\"]; {prefix}v{} -> {prefix}out{i};",
                vnum(v)
            );
        }
    }
}

fn type_list(labels: &[super::VertexLabel]) -> String {
    if labels.is_empty() {
        return "e".to_string();
    }
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" x ")
}

fn edge_name(label: &EdgeLabel) -> String {
    match label {
        EdgeLabel::Operation(op) => op.name.clone(),
        EdgeLabel::Instance => "I".to_string(),
        EdgeLabel::Atom => "o".to_string(),
        EdgeLabel::Contraction(w) => format!("C.{}", w.vertex_label()),
        EdgeLabel::Weakening(w) => format!("W.{}", w.vertex_label()),
        EdgeLabel::Token(TokenKind::Search) => "?".to_string(),
        EdgeLabel::Token(TokenKind::Value) => "ok".to_string(),
        EdgeLabel::Token(TokenKind::Rewrite) => "rw".to_string(),
        EdgeLabel::Box { .. } => "box".to_string(),
        EdgeLabel::Hole(name) => format!("[{name}]"),
    }
}
