//! Canonical forms for isomorphism checking.
//!
//! Two hypernets are isomorphic when a label-, interface-order- and
//! incidence-preserving bijection of vertices and edges exists, recursing
//! into box contents. We decide this by renumbering both nets with a
//! deterministic traversal (inputs in order, then outputs, then breadth-first
//! over outgoing edges, label keys breaking ties for unreached components)
//! and comparing the results lexicographically.

use super::{Edge, EdgeId, EdgeLabel, Hypernet, TokenKind, VertexId, VertexLabel, Wire};
use std::collections::VecDeque;

/// A hypernet renumbered into traversal order. Equality on `CanonNet` is
/// isomorphism of the original nets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonNet {
    verts: Vec<VertexLabel>,
    edges: Vec<(CanonLabel, Vec<usize>, Vec<usize>)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CanonLabel {
    Op(String, usize, Vec<usize>, bool),
    Instance,
    Atom,
    Contraction(Wire),
    Weakening(Wire),
    Token(TokenKind),
    Boxed(u32, Box<CanonNet>),
    Hole(String),
}

fn canon_label(label: &EdgeLabel) -> CanonLabel {
    match label {
        EdgeLabel::Operation(op) => CanonLabel::Op(
            op.name.clone(),
            op.sig.eager,
            op.sig.deferred.clone(),
            op.sig.is_active(),
        ),
        EdgeLabel::Instance => CanonLabel::Instance,
        EdgeLabel::Atom => CanonLabel::Atom,
        EdgeLabel::Contraction(w) => CanonLabel::Contraction(*w),
        EdgeLabel::Weakening(w) => CanonLabel::Weakening(*w),
        EdgeLabel::Token(k) => CanonLabel::Token(*k),
        EdgeLabel::Box { content, binders } => {
            CanonLabel::Boxed(*binders, Box::new(content.canonical()))
        }
        EdgeLabel::Hole(name) => CanonLabel::Hole(name.clone()),
    }
}

impl Hypernet {
    pub(super) fn raw_verts_len(&self) -> usize {
        self.vertices().map(|(v, _)| v.0 as usize + 1).max().unwrap_or(0)
    }

    /// Deterministic traversal order of vertices and edges; the basis for
    /// canonical numbering, DOT output and trace summaries.
    pub fn traversal_order(&self) -> (Vec<VertexId>, Vec<EdgeId>) {
        let n = self.raw_verts_len();
        let mut vnum: Vec<Option<usize>> = vec![None; n];
        let mut vorder: Vec<VertexId> = Vec::new();
        let mut eorder: Vec<EdgeId> = Vec::new();
        let mut edone: Vec<bool> = vec![false; self.raw_edges_len()];
        let mut queue: VecDeque<VertexId> = VecDeque::new();

        let mut touch = |v: VertexId,
                         vnum: &mut Vec<Option<usize>>,
                         vorder: &mut Vec<VertexId>,
                         queue: &mut VecDeque<VertexId>| {
            if vnum[v.0 as usize].is_none() {
                vnum[v.0 as usize] = Some(vorder.len());
                vorder.push(v);
                queue.push_back(v);
            }
        };

        for &v in self.inputs() {
            touch(v, &mut vnum, &mut vorder, &mut queue);
        }
        for &v in self.outputs() {
            touch(v, &mut vnum, &mut vorder, &mut queue);
        }

        loop {
            while let Some(v) = queue.pop_front() {
                if let Some(e) = self.out_edge(v) {
                    if !edone[e.0 as usize] {
                        edone[e.0 as usize] = true;
                        eorder.push(e);
                        let edge = self.edge(e);
                        for &s in edge.sources.iter().chain(edge.targets.iter()) {
                            touch(s, &mut vnum, &mut vorder, &mut queue);
                        }
                    }
                }
                // Also walk upward so weakenings and feeding structure above
                // an anchor get numbered.
                if let Some(e) = self.in_edge(v) {
                    if !edone[e.0 as usize] {
                        edone[e.0 as usize] = true;
                        eorder.push(e);
                        let edge = self.edge(e);
                        for &s in edge.sources.iter().chain(edge.targets.iter()) {
                            touch(s, &mut vnum, &mut vorder, &mut queue);
                        }
                    }
                }
            }
            // Unreached components (e.g. detached store garbage): anchor at
            // the edge with the smallest label key among the unvisited.
            let mut best: Option<(CanonLabel, EdgeId)> = None;
            for e in self.edge_ids() {
                if edone[e.0 as usize] {
                    continue;
                }
                let key = canon_label(&self.edge(e).label);
                if best.as_ref().map_or(true, |(k, _)| key < *k) {
                    best = Some((key, e));
                }
            }
            match best {
                Some((_, e)) => {
                    edone[e.0 as usize] = true;
                    eorder.push(e);
                    let edge = self.edge(e);
                    for &s in edge.sources.iter().chain(edge.targets.iter()) {
                        touch(s, &mut vnum, &mut vorder, &mut queue);
                    }
                }
                None => break,
            }
        }
        // Isolated vertices, if any, come last in id order.
        for (v, _) in self.vertices() {
            if vnum[v.0 as usize].is_none() {
                vnum[v.0 as usize] = Some(vorder.len());
                vorder.push(v);
            }
        }
        (vorder, eorder)
    }

    /// The canonical renumbering of this net.
    pub fn canonical(&self) -> CanonNet {
        let (vorder, eorder) = self.traversal_order();
        let n = self.raw_verts_len();
        let mut vnum: Vec<usize> = vec![usize::MAX; n];
        for (i, v) in vorder.iter().enumerate() {
            vnum[v.0 as usize] = i;
        }
        let mut edges: Vec<(CanonLabel, Vec<usize>, Vec<usize>)> = eorder
            .iter()
            .map(|&e| {
                let Edge {
                    label,
                    sources,
                    targets,
                } = self.edge(e);
                (
                    canon_label(label),
                    sources.iter().map(|v| vnum[v.0 as usize]).collect(),
                    targets.iter().map(|v| vnum[v.0 as usize]).collect(),
                )
            })
            .collect();
        // The traversal can reach sibling edges in insertion-dependent order
        // only through the unanchored-component rule; sorting edge records by
        // their canonical content makes the comparison order-insensitive.
        edges.sort();
        CanonNet {
            verts: vorder.iter().map(|&v| self.vertex_label(v)).collect(),
            edges,
            inputs: self.inputs().iter().map(|v| vnum[v.0 as usize]).collect(),
            outputs: self.outputs().iter().map(|v| vnum[v.0 as usize]).collect(),
        }
    }

    pub(super) fn raw_edges_len(&self) -> usize {
        self.edge_ids().map(|e| e.0 as usize + 1).max().unwrap_or(0)
    }
}
