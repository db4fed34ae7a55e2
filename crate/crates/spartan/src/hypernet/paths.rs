//! Path classifications over hypernets: accessible, stable and active paths,
//! copyable sub-nets, and the one-way property.
//!
//! An accessible path consists of edges whose sources all have type `*`.
//! A stable path stays within instance and passive-operation edges; an active
//! path starts with one active operation edge followed by a stable path. Box
//! and atom edges never lie on an accessible path.

use super::{EdgeId, EdgeLabel, Hypernet, Polarity, VertexId, VertexLabel};

/// Per-vertex outcome of [`Hypernet::classify_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathClass {
    /// Every accessible path from the vertex is stable.
    AllStable,
    /// Every accessible path starts with one active operation edge possibly
    /// followed by a stable path.
    AllActive,
    /// Some accessible path is neither stable nor an active prefix.
    Mixed,
    /// No accessible path leaves the vertex.
    NoAccessiblePath,
}

/// A copyable sub-net: a single instance edge, or one operation edge together
/// with the box edges on its deferred targets. The unit a copy transition
/// duplicates.
#[derive(Debug, Clone)]
pub struct CopyableNet {
    pub input: VertexId,
    pub edges: Vec<EdgeId>,
    /// Frontier vertices where the sub-net connects to the rest of the graph.
    pub outputs: Vec<VertexId>,
}

/// A maximal stable sub-net rooted at a vertex: the union of all stable paths
/// from its input. Outputs have type `◆` or `T^n(★)`.
#[derive(Debug, Clone)]
pub struct StableNet {
    pub input: VertexId,
    pub edges: Vec<EdgeId>,
    pub outputs: Vec<VertexId>,
}

impl StableNet {
    /// The stable part plus the box edge attached to each thunk output. Used
    /// by rewrites that duplicate a stored or bound value wholesale.
    pub fn with_boxes(&self, net: &Hypernet) -> Option<CopyableNet> {
        let mut edges = self.edges.clone();
        let mut outputs = Vec::new();
        for &o in &self.outputs {
            match net.vertex_label(o) {
                VertexLabel::Thunk(_) => {
                    let b = net.out_edge(o)?;
                    if !matches!(net.edge(b).label, EdgeLabel::Box { .. }) {
                        return None;
                    }
                    edges.push(b);
                    outputs.extend(net.edge(b).targets.iter().copied());
                }
                _ => outputs.push(o),
            }
        }
        Some(CopyableNet {
            input: self.input,
            edges,
            outputs,
        })
    }
}

impl Hypernet {
    /// The copyable sub-net rooted at `v`, if `v`'s outgoing edge starts one:
    /// a lone instance edge, or an operation edge plus one box per deferred
    /// target. Returns `None` for anything else (contractions in particular).
    pub fn find_copyable_at(&self, v: VertexId) -> Option<CopyableNet> {
        let e = self.out_edge(v)?;
        match &self.edge(e).label {
            EdgeLabel::Instance => Some(CopyableNet {
                input: v,
                edges: vec![e],
                outputs: self.edge(e).targets.clone(),
            }),
            EdgeLabel::Operation(op) => {
                let mut edges = vec![e];
                let mut outputs = Vec::new();
                let targets = self.edge(e).targets.clone();
                let eager = op.sig.eager;
                for (i, &t) in targets.iter().enumerate() {
                    if i < eager {
                        outputs.push(t);
                    } else {
                        // Deferred target: must carry a box edge.
                        let b = self.out_edge(t)?;
                        if !matches!(self.edge(b).label, EdgeLabel::Box { .. }) {
                            return None;
                        }
                        edges.push(b);
                        outputs.extend(self.edge(b).targets.iter().copied());
                    }
                }
                Some(CopyableNet {
                    input: v,
                    edges,
                    outputs,
                })
            }
            _ => None,
        }
    }

    /// The unique maximal stable sub-net with input `v`, or `None` if some
    /// accessible path from `v` is not stable. Edge set is the union of all
    /// stable paths from `v`.
    pub fn max_stable_from(&self, v: VertexId) -> Option<StableNet> {
        if self.vertex_label(v) != VertexLabel::Star {
            return None;
        }
        let mut edges = Vec::new();
        let mut outputs = Vec::new();
        let mut visited = vec![false; self.verts_len()];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if visited[u.0 as usize] {
                // Stable nets are trees; a revisit means a cycle or sharing.
                return None;
            }
            visited[u.0 as usize] = true;
            match self.vertex_label(u) {
                VertexLabel::Star => {
                    let e = self.out_edge(u)?;
                    match &self.edge(e).label {
                        EdgeLabel::Instance => {
                            edges.push(e);
                            outputs.push(self.edge(e).targets[0]);
                        }
                        EdgeLabel::Operation(op) if op.sig.polarity == Polarity::Passive => {
                            edges.push(e);
                            for &t in self.edge(e).targets.iter().rev() {
                                stack.push(t);
                            }
                        }
                        _ => return None,
                    }
                }
                // ◆ and thunk vertices end the stable paths; they are outputs.
                _ => outputs.push(u),
            }
        }
        Some(StableNet {
            input: v,
            edges,
            outputs,
        })
    }

    /// Classifies all accessible paths from `v` (which must be a `*` vertex).
    pub fn classify_paths(&self, v: VertexId) -> PathClass {
        let first = match self.out_edge(v) {
            Some(e) => e,
            None => return PathClass::NoAccessiblePath,
        };
        if !self.accessible(first) {
            return PathClass::NoAccessiblePath;
        }
        if self.max_stable_from(v).is_some() {
            return PathClass::AllStable;
        }
        if let EdgeLabel::Operation(op) = &self.edge(first).label {
            if op.sig.polarity == Polarity::Active {
                // Active start: every continuation must be all-stable.
                let eager = op.sig.eager;
                let all_stable = self
                    .edge(first)
                    .targets
                    .iter()
                    .take(eager)
                    .all(|&t| !matches!(self.classify_paths(t), PathClass::Mixed | PathClass::AllActive));
                if all_stable {
                    return PathClass::AllActive;
                }
            }
        }
        PathClass::Mixed
    }

    fn accessible(&self, e: EdgeId) -> bool {
        self.edge(e)
            .sources
            .iter()
            .all(|&s| self.vertex_label(s) == VertexLabel::Star)
    }

    /// True iff no path from a `*` input to a `*` output is an operation path.
    pub fn is_one_way(&self) -> bool {
        let star_outputs: Vec<VertexId> = self
            .outputs()
            .iter()
            .copied()
            .filter(|&v| self.vertex_label(v) == VertexLabel::Star)
            .collect();
        if star_outputs.is_empty() {
            return true;
        }
        for &inp in self.inputs() {
            if self.vertex_label(inp) != VertexLabel::Star {
                continue;
            }
            // Walk operation paths only.
            let mut seen = vec![false; self.verts_len()];
            let mut stack = vec![inp];
            seen[inp.0 as usize] = true;
            while let Some(u) = stack.pop() {
                if let Some(e) = self.out_edge(u) {
                    if matches!(self.edge(e).label, EdgeLabel::Operation(_)) {
                        for &t in &self.edge(e).targets {
                            if star_outputs.contains(&t) {
                                return false;
                            }
                            if !seen[t.0 as usize] {
                                seen[t.0 as usize] = true;
                                stack.push(t);
                            }
                        }
                    }
                }
            }
        }
        true
    }

    pub(super) fn verts_len(&self) -> usize {
        self.raw_verts_len()
    }
}
