//! Interfaced labelled monoidal hypergraphs with nesting (hypernets).
//!
//! A hypernet is a hypergraph whose edges carry ordered source and target
//! lists, together with an ordered input/output interface. Box edges carry a
//! whole hypernet as their label, giving finite nesting. Every vertex is the
//! source of at most one edge and the target of at most one edge, so a
//! hypernet is a wiring of edges rather than a general graph.

mod iso;
mod paths;
mod dot;

pub use iso::CanonNet;
pub use paths::{CopyableNet, PathClass, StableNet};

use std::fmt;

/// Index of a vertex within one hypernet. Not stable across nets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of an edge within one hypernet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Vertex labels: eager wires, name wires, and thunk wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    /// The eager type, drawn as a plain wire.
    Star,
    /// The name (atom) type.
    Diamond,
    /// Thunk wire binding `n` variables. `Thunk(0)` is distinct from `Star`.
    Thunk(u32),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Star => write!(f, "*"),
            VertexLabel::Diamond => write!(f, "<>"),
            VertexLabel::Thunk(n) => write!(f, "T{}", n),
        }
    }
}

/// The two wire sorts contraction and weakening edges range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wire {
    Star,
    Diamond,
}

impl Wire {
    pub fn vertex_label(self) -> VertexLabel {
        match self {
            Wire::Star => VertexLabel::Star,
            Wire::Diamond => VertexLabel::Diamond,
        }
    }
}

/// Token states: `?` searches, `✓` signals a value, `⚡` triggers a rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenKind {
    Search,
    Value,
    Rewrite,
}

impl TokenKind {
    /// Short form used in traces.
    pub fn short(self) -> &'static str {
        match self {
            TokenKind::Search => "q",
            TokenKind::Value => "v",
            TokenKind::Rewrite => "rw",
        }
    }
}

/// Whether an operation is inspected for a value or for a rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Passive,
    Active,
}

/// Arity and polarity of an operation: `eager` arguments evaluated in order,
/// one deferred (boxed) argument per entry of `deferred`, each binding that
/// many variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpSignature {
    pub eager: usize,
    pub deferred: Vec<usize>,
    pub polarity: Polarity,
}

impl OpSignature {
    pub fn new(eager: usize, deferred: Vec<usize>, polarity: Polarity) -> Self {
        OpSignature {
            eager,
            deferred,
            polarity,
        }
    }

    pub fn is_active(&self) -> bool {
        self.polarity == Polarity::Active
    }
}

/// Label of an operation edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpLabel {
    pub name: String,
    pub sig: OpSignature,
}

impl OpLabel {
    /// Numerals are operations whose name is a decimal integer.
    pub fn as_numeral(&self) -> Option<i64> {
        self.name.parse::<i64>().ok()
    }
}

/// Edge labels. `Box` carries its content net by value, so copying a box edge
/// copies the whole nested net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeLabel {
    /// An operation `φ : ★ ⇒ ★^eager ⊗ T^{n_1}(★) ⊗ … ⊗ T^{n_p}(★)`.
    Operation(OpLabel),
    /// Instance of a name, `I : ★ ⇒ ◆`.
    Instance,
    /// The store edge `∘ : ◆ ⇒ ★`; its target roots the stored net.
    Atom,
    /// Sharing `⊗_C : ℓ ⊗ ℓ ⇒ ℓ`.
    Contraction(Wire),
    /// Discarding `⊗_W : ε ⇒ ℓ`.
    Weakening(Wire),
    /// The focus, `★ ⇒ ★`. A state has exactly one, shallow.
    Token(TokenKind),
    /// A nested net `content : ★ ⇒ ★^{binders+k} ⊗ ◆^{h}` boxed as an edge of
    /// type `T^binders(★) ⇒ ★^{k} ⊗ ◆^{h}`.
    Box {
        content: Box<Hypernet>,
        binders: u32,
    },
    /// A hole in a context. Each hole name occurs at most once at any depth.
    Hole(String),
}

impl EdgeLabel {
    pub fn is_token(&self) -> bool {
        matches!(self, EdgeLabel::Token(_))
    }

    pub fn op(&self) -> Option<&OpLabel> {
        match self {
            EdgeLabel::Operation(op) => Some(op),
            _ => None,
        }
    }

    /// Expected source/target vertex labels, when the label pins them down.
    /// Holes are typed by their use site, so they yield `None`.
    pub fn expected_arity(&self) -> Option<(Vec<VertexLabel>, Vec<VertexLabel>)> {
        use EdgeLabel::*;
        match self {
            Operation(op) => {
                let mut targets = vec![VertexLabel::Star; op.sig.eager];
                for n in &op.sig.deferred {
                    targets.push(VertexLabel::Thunk(*n as u32));
                }
                Some((vec![VertexLabel::Star], targets))
            }
            Instance => Some((vec![VertexLabel::Star], vec![VertexLabel::Diamond])),
            Atom => Some((vec![VertexLabel::Diamond], vec![VertexLabel::Star])),
            Contraction(w) => Some((
                vec![w.vertex_label(), w.vertex_label()],
                vec![w.vertex_label()],
            )),
            Weakening(w) => Some((vec![], vec![w.vertex_label()])),
            Token(_) => Some((vec![VertexLabel::Star], vec![VertexLabel::Star])),
            Box { content, binders } => {
                let outs = content.output_labels();
                if outs.len() < *binders as usize {
                    return None;
                }
                Some((
                    vec![VertexLabel::Thunk(*binders)],
                    outs[*binders as usize..].to_vec(),
                ))
            }
            Hole(_) => None,
        }
    }
}

/// A hyperedge: ordered sources, ordered targets, one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: EdgeLabel,
    pub sources: Vec<VertexId>,
    pub targets: Vec<VertexId>,
}

/// One invariant violation found by [`Hypernet::validate`]. Violations are
/// data, not errors: an invalid net is still a value that can be inspected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateSource(EdgeId),
    DuplicateTarget(EdgeId),
    MultipleOutgoing(VertexId),
    MultipleIncoming(VertexId),
    LabelMismatch(EdgeId, String),
    InputHasIncoming(VertexId),
    OutputHasOutgoing(VertexId),
    UndeclaredInput(VertexId),
    UndeclaredOutput(VertexId),
    DuplicateInterface(VertexId),
    InputIsOutput(VertexId),
    DanglingEndpoint(EdgeId),
    InBox(EdgeId, Box<Violation>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateSource(e) => write!(f, "{e}: repeated vertex in source list"),
            DuplicateTarget(e) => write!(f, "{e}: repeated vertex in target list"),
            MultipleOutgoing(v) => write!(f, "{v}: source of more than one edge"),
            MultipleIncoming(v) => write!(f, "{v}: target of more than one edge"),
            LabelMismatch(e, what) => write!(f, "{e}: {what}"),
            InputHasIncoming(v) => write!(f, "input {v} has an incoming edge"),
            OutputHasOutgoing(v) => write!(f, "output {v} has an outgoing edge"),
            UndeclaredInput(v) => write!(f, "{v} has no incoming edge but is not an input"),
            UndeclaredOutput(v) => write!(f, "{v} has no outgoing edge but is not an output"),
            DuplicateInterface(v) => write!(f, "{v} listed twice in the interface"),
            InputIsOutput(v) => write!(f, "sealed net has {v} both input and output"),
            DanglingEndpoint(e) => write!(f, "{e} refers to a deleted vertex"),
            InBox(e, inner) => write!(f, "inside box {e}: {inner}"),
        }
    }
}

/// An interfaced labelled monoidal hypernet. Vertices and edges are slab
/// allocated; deletion leaves a hole so ids stay stable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypernet {
    verts: Vec<Option<VertexLabel>>,
    edges: Vec<Option<Edge>>,
    inputs: Vec<VertexId>,
    outputs: Vec<VertexId>,
    // Incidence acceleration, kept in sync by the mutators below. validate()
    // recomputes incidence from the edge lists and never trusts these.
    in_of: Vec<Option<EdgeId>>,
    out_of: Vec<Option<EdgeId>>,
}

impl Hypernet {
    pub fn new() -> Self {
        Hypernet::default()
    }

    pub fn add_vertex(&mut self, label: VertexLabel) -> VertexId {
        let id = VertexId(self.verts.len() as u32);
        self.verts.push(Some(label));
        self.in_of.push(None);
        self.out_of.push(None);
        id
    }

    pub fn add_edge(
        &mut self,
        label: EdgeLabel,
        sources: Vec<VertexId>,
        targets: Vec<VertexId>,
    ) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        for &v in &sources {
            self.out_of[v.0 as usize] = Some(id);
        }
        for &v in &targets {
            self.in_of[v.0 as usize] = Some(id);
        }
        self.edges.push(Some(Edge {
            label,
            sources,
            targets,
        }));
        id
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Edge {
        let edge = self.edges[e.0 as usize].take().expect("edge already removed");
        for &v in &edge.sources {
            if self.out_of[v.0 as usize] == Some(e) {
                self.out_of[v.0 as usize] = None;
            }
        }
        for &v in &edge.targets {
            if self.in_of[v.0 as usize] == Some(e) {
                self.in_of[v.0 as usize] = None;
            }
        }
        edge
    }

    /// Removes an isolated vertex. The caller must have detached it first.
    pub fn remove_vertex(&mut self, v: VertexId) {
        debug_assert!(self.in_of[v.0 as usize].is_none());
        debug_assert!(self.out_of[v.0 as usize].is_none());
        self.verts[v.0 as usize] = None;
    }

    /// Identifies `gone` with `keep`: every edge endpoint and interface entry
    /// naming `gone` is rewritten to `keep`, then `gone` is deleted.
    pub fn fuse(&mut self, keep: VertexId, gone: VertexId) {
        if keep == gone {
            return;
        }
        for slot in self.edges.iter_mut() {
            if let Some(edge) = slot {
                for v in edge.sources.iter_mut().chain(edge.targets.iter_mut()) {
                    if *v == gone {
                        *v = keep;
                    }
                }
            }
        }
        if let Some(e) = self.in_of[gone.0 as usize].take() {
            self.in_of[keep.0 as usize] = Some(e);
        }
        if let Some(e) = self.out_of[gone.0 as usize].take() {
            self.out_of[keep.0 as usize] = Some(e);
        }
        for v in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            if *v == gone {
                *v = keep;
            }
        }
        self.verts[gone.0 as usize] = None;
    }

    pub fn set_interface(&mut self, inputs: Vec<VertexId>, outputs: Vec<VertexId>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    /// Rewrites one source entry of `e` from `old` to `new`.
    pub fn swap_source(&mut self, e: EdgeId, old: VertexId, new: VertexId) {
        let edge = self.edges[e.0 as usize].as_mut().expect("deleted edge");
        let pos = edge
            .sources
            .iter()
            .position(|&v| v == old)
            .expect("old vertex is a source of the edge");
        edge.sources[pos] = new;
        if self.out_of[old.0 as usize] == Some(e) {
            self.out_of[old.0 as usize] = None;
        }
        self.out_of[new.0 as usize] = Some(e);
    }

    /// Rewrites one target entry of `e` from `old` to `new`.
    pub fn swap_target(&mut self, e: EdgeId, old: VertexId, new: VertexId) {
        let edge = self.edges[e.0 as usize].as_mut().expect("deleted edge");
        let pos = edge
            .targets
            .iter()
            .position(|&v| v == old)
            .expect("old vertex is a target of the edge");
        edge.targets[pos] = new;
        if self.in_of[old.0 as usize] == Some(e) {
            self.in_of[old.0 as usize] = None;
        }
        self.in_of[new.0 as usize] = Some(e);
    }

    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    pub fn vertex_label(&self, v: VertexId) -> VertexLabel {
        self.verts[v.0 as usize].expect("deleted vertex")
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        self.edges[e.0 as usize].as_ref().expect("deleted edge")
    }

    pub fn edge_mut(&mut self, e: EdgeId) -> &mut Edge {
        self.edges[e.0 as usize].as_mut().expect("deleted edge")
    }

    /// The unique edge having `v` among its targets, if any.
    pub fn in_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.in_of[v.0 as usize]
    }

    /// The unique edge having `v` among its sources, if any.
    pub fn out_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.out_of[v.0 as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, VertexLabel)> + '_ {
        self.verts
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|l| (VertexId(i as u32), l)))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|_| EdgeId(i as u32)))
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.iter().filter(|v| v.is_some()).count()
    }

    /// Number of shallow edges.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }

    /// Number of edges at all depths. Finite by construction; the recursion
    /// carries an explicit depth guard so runaway nesting fails loudly.
    pub fn deep_edge_count(&self) -> usize {
        self.deep_edge_count_bounded(64)
    }

    fn deep_edge_count_bounded(&self, depth: usize) -> usize {
        assert!(depth > 0, "box nesting deeper than supported");
        let mut n = 0;
        for e in self.edges.iter().flatten() {
            n += 1;
            if let EdgeLabel::Box { content, .. } = &e.label {
                n += content.deep_edge_count_bounded(depth - 1);
            }
        }
        n
    }

    /// Vertex labels of the input list, in order.
    pub fn input_labels(&self) -> Vec<VertexLabel> {
        self.inputs.iter().map(|&v| self.vertex_label(v)).collect()
    }

    /// Vertex labels of the output list, in order.
    pub fn output_labels(&self) -> Vec<VertexLabel> {
        self.outputs.iter().map(|&v| self.vertex_label(v)).collect()
    }

    /// All shallow token edges.
    pub fn token_edges(&self) -> Vec<EdgeId> {
        self.edge_ids()
            .filter(|&e| self.edge(e).label.is_token())
            .collect()
    }

    /// Token edges at any depth (a focussed net must have none deep).
    pub fn deep_token_count(&self) -> usize {
        let mut n = 0;
        for e in self.edges.iter().flatten() {
            match &e.label {
                EdgeLabel::Token(_) => n += 1,
                EdgeLabel::Box { content, .. } => n += content.deep_token_count(),
                _ => {}
            }
        }
        n
    }

    /// Checks the hypernet invariants, recursing into box contents. With
    /// `sealed` set, additionally rejects vertices that are simultaneously an
    /// input and an output. An empty report means the net is valid.
    pub fn validate(&self, sealed: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.verts.len();
        let mut seen_in: Vec<Option<EdgeId>> = vec![None; n];
        let mut seen_out: Vec<Option<EdgeId>> = vec![None; n];

        for id in self.edge_ids() {
            let edge = self.edge(id);
            let live = |v: &VertexId| self.verts[v.0 as usize].is_some();
            if !edge.sources.iter().all(live) || !edge.targets.iter().all(live) {
                out.push(Violation::DanglingEndpoint(id));
                continue;
            }
            let mut srcs = edge.sources.clone();
            srcs.sort();
            srcs.dedup();
            if srcs.len() != edge.sources.len() {
                out.push(Violation::DuplicateSource(id));
            }
            let mut tgts = edge.targets.clone();
            tgts.sort();
            tgts.dedup();
            if tgts.len() != edge.targets.len() {
                out.push(Violation::DuplicateTarget(id));
            }
            for &v in &edge.sources {
                match seen_out[v.0 as usize] {
                    Some(prev) if prev != id => out.push(Violation::MultipleOutgoing(v)),
                    _ => seen_out[v.0 as usize] = Some(id),
                }
            }
            for &v in &edge.targets {
                match seen_in[v.0 as usize] {
                    Some(prev) if prev != id => out.push(Violation::MultipleIncoming(v)),
                    _ => seen_in[v.0 as usize] = Some(id),
                }
            }
            if let Some((src_l, tgt_l)) = edge.label.expected_arity() {
                let got_src: Vec<_> = edge.sources.iter().map(|&v| self.vertex_label(v)).collect();
                let got_tgt: Vec<_> = edge.targets.iter().map(|&v| self.vertex_label(v)).collect();
                if got_src != src_l {
                    out.push(Violation::LabelMismatch(
                        id,
                        format!("source labels {got_src:?}, label requires {src_l:?}"),
                    ));
                }
                if got_tgt != tgt_l {
                    out.push(Violation::LabelMismatch(
                        id,
                        format!("target labels {got_tgt:?}, label requires {tgt_l:?}"),
                    ));
                }
            }
            if let EdgeLabel::Box { content, .. } = &edge.label {
                if content.inputs.len() != 1
                    || content.input_labels() != vec![VertexLabel::Star]
                {
                    out.push(Violation::LabelMismatch(
                        id,
                        "box content must have a single * input".to_string(),
                    ));
                }
                for v in content.validate(sealed) {
                    out.push(Violation::InBox(id, Box::new(v)));
                }
            }
        }

        // Interface: declared lists must name exactly the edge-free vertices.
        let mut declared_in = vec![false; n];
        for &v in &self.inputs {
            if declared_in[v.0 as usize] {
                out.push(Violation::DuplicateInterface(v));
            }
            declared_in[v.0 as usize] = true;
            if seen_in[v.0 as usize].is_some() {
                out.push(Violation::InputHasIncoming(v));
            }
        }
        let mut declared_out = vec![false; n];
        for &v in &self.outputs {
            if declared_out[v.0 as usize] {
                out.push(Violation::DuplicateInterface(v));
            }
            declared_out[v.0 as usize] = true;
            if seen_out[v.0 as usize].is_some() {
                out.push(Violation::OutputHasOutgoing(v));
            }
            if sealed && declared_in[v.0 as usize] {
                out.push(Violation::InputIsOutput(v));
            }
        }
        for (v, _) in self.vertices() {
            if seen_in[v.0 as usize].is_none() && !declared_in[v.0 as usize] {
                out.push(Violation::UndeclaredInput(v));
            }
            if seen_out[v.0 as usize].is_none() && !declared_out[v.0 as usize] {
                out.push(Violation::UndeclaredOutput(v));
            }
        }
        out
    }

    pub fn is_valid(&self, sealed: bool) -> bool {
        self.validate(sealed).is_empty()
    }

    /// Reindexes the interface: input `i` of the result is input `rho_in[i]`
    /// of `self`, and likewise for outputs.
    pub fn permute_interface(
        &self,
        rho_in: &[usize],
        rho_out: &[usize],
    ) -> Result<Hypernet, String> {
        let check = |rho: &[usize], len: usize, what: &str| -> Result<(), String> {
            if rho.len() != len {
                return Err(format!(
                    "{what} permutation has length {}, interface has {len}",
                    rho.len()
                ));
            }
            let mut seen = vec![false; len];
            for &i in rho {
                if i >= len || seen[i] {
                    return Err(format!("{what} permutation is not a bijection"));
                }
                seen[i] = true;
            }
            Ok(())
        };
        check(rho_in, self.inputs.len(), "input")?;
        check(rho_out, self.outputs.len(), "output")?;
        let mut net = self.clone();
        net.inputs = rho_in.iter().map(|&i| self.inputs[i]).collect();
        net.outputs = rho_out.iter().map(|&i| self.outputs[i]).collect();
        Ok(net)
    }

    /// Disjoint union, interfaces concatenated in argument order.
    pub fn tensor(nets: &[Hypernet]) -> Hypernet {
        let mut out = Hypernet::new();
        for net in nets {
            let base = out.absorb(net);
            let ins: Vec<_> = net.inputs.iter().map(|v| base(*v)).collect();
            let outs: Vec<_> = net.outputs.iter().map(|v| base(*v)).collect();
            out.inputs.extend(ins);
            out.outputs.extend(outs);
        }
        out
    }

    /// Copies all vertices and edges of `other` into `self` (interface of
    /// `self` unchanged) and returns the vertex renaming.
    pub fn absorb(&mut self, other: &Hypernet) -> impl Fn(VertexId) -> VertexId {
        let mut map: Vec<Option<VertexId>> = vec![None; other.verts.len()];
        for (v, l) in other.vertices() {
            map[v.0 as usize] = Some(self.add_vertex(l));
        }
        let rename = {
            let map = map.clone();
            move |v: VertexId| map[v.0 as usize].expect("absorbed a deleted vertex")
        };
        for e in other.edge_ids() {
            let edge = other.edge(e);
            self.add_edge(
                edge.label.clone(),
                edge.sources.iter().map(|&v| rename(v)).collect(),
                edge.targets.iter().map(|&v| rename(v)).collect(),
            );
        }
        rename
    }

    /// The hole edge labelled `name`, searched shallow only.
    pub fn find_hole(&self, name: &str) -> Option<EdgeId> {
        self.edge_ids().find(|&e| match &self.edge(e).label {
            EdgeLabel::Hole(h) => h == name,
            _ => false,
        })
    }

    /// Hole names at any depth, in deterministic order.
    pub fn hole_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in self.edge_ids() {
            match &self.edge(e).label {
                EdgeLabel::Hole(h) => out.push(h.clone()),
                EdgeLabel::Box { content, .. } => out.extend(content.hole_names()),
                _ => {}
            }
        }
        out
    }

    /// Plugs `filler` into the shallow hole named `hole`: the hole edge is
    /// removed and the filler's i-th input (resp. output) is identified with
    /// the hole's i-th source (resp. target), keeping this net's vertices.
    /// The outer interface is unchanged.
    pub fn plug(&self, hole: &str, filler: &Hypernet) -> Result<Hypernet, String> {
        let mut out = self.clone();
        let hole_edge = match out.find_hole(hole) {
            Some(e) => e,
            None => {
                // The hole may sit inside a box; recurse into contents.
                return self.plug_deep(hole, filler);
            }
        };
        let mut ctx_holes = self.hole_names();
        ctx_holes.retain(|h| h != hole);
        for h in filler.hole_names() {
            if ctx_holes.contains(&h) {
                return Err(format!("hole {h} occurs in both context and filler"));
            }
        }
        let removed = out.remove_edge(hole_edge);
        let hole_src_labels: Vec<_> = removed.sources.iter().map(|&v| out.vertex_label(v)).collect();
        let hole_tgt_labels: Vec<_> = removed.targets.iter().map(|&v| out.vertex_label(v)).collect();
        if hole_src_labels != filler.input_labels() || hole_tgt_labels != filler.output_labels() {
            return Err(format!(
                "hole type {hole_src_labels:?} => {hole_tgt_labels:?} differs from filler type {:?} => {:?}",
                filler.input_labels(),
                filler.output_labels()
            ));
        }
        let rename = out.absorb(filler);
        for (i, &inp) in filler.inputs.iter().enumerate() {
            out.fuse(removed.sources[i], rename(inp));
        }
        for (i, &o) in filler.outputs.iter().enumerate() {
            out.fuse(removed.targets[i], rename(o));
        }
        Ok(out)
    }

    fn plug_deep(&self, hole: &str, filler: &Hypernet) -> Result<Hypernet, String> {
        let mut out = self.clone();
        for e in out.edge_ids().collect::<Vec<_>>() {
            let has = match &out.edge(e).label {
                EdgeLabel::Box { content, .. } => content.hole_names().iter().any(|h| h == hole),
                _ => false,
            };
            if has {
                let (new_content, binders) = match &out.edge(e).label {
                    EdgeLabel::Box { content, binders } => (content.plug(hole, filler)?, *binders),
                    _ => unreachable!(),
                };
                out.edge_mut(e).label = EdgeLabel::Box {
                    content: Box::new(new_content),
                    binders,
                };
                return Ok(out);
            }
        }
        Err(format!("no hole named {hole}"))
    }

    /// Builds the distributor `D_{k,m} : ℓ^{km} ⇒ ℓ^k`, the canonical
    /// interleaved bundle of contraction trees. `D_{1,m}` is a contraction
    /// tree containing exactly one weakening edge; `D_{0,m}` is empty.
    pub fn distributor(wire: Wire, k: usize, m: usize) -> Hypernet {
        if k == 0 {
            return Hypernet::new();
        }
        if k == 1 {
            let mut net = Hypernet::new();
            // D_{1,0} is a single weakening; D_{1,m+1} chains a contraction
            // whose first source is the next input and whose second source is
            // fed by the rest of the tree.
            let l = wire.vertex_label();
            let w = net.add_vertex(l);
            net.add_edge(EdgeLabel::Weakening(wire), vec![], vec![w]);
            let mut below = w;
            let mut inputs = Vec::new();
            for _ in 0..m {
                let inp = net.add_vertex(l);
                let tgt = net.add_vertex(l);
                net.add_edge(EdgeLabel::Contraction(wire), vec![inp, below], vec![tgt]);
                inputs.push(inp);
                below = tgt;
            }
            inputs.reverse();
            net.set_interface(inputs, vec![below]);
            return net;
        }
        // D_{k+1,m} = Π_ρ(D_{k,m} ⊗ D_{1,m}) with ρ interleaving the input
        // bundles: new position j+(k+1)(i-1) takes old input j+k(i-1), and new
        // position (k+1)i takes old input km+i.
        let prev = Hypernet::distributor(wire, k - 1, m);
        let one = Hypernet::distributor(wire, 1, m);
        let tens = Hypernet::tensor(&[prev, one]);
        let kk = k - 1; // the recursion's k
        let mut rho = vec![0usize; (kk + 1) * m];
        for i in 1..=m {
            for j in 1..=kk {
                rho[j + (kk + 1) * (i - 1) - 1] = j + kk * (i - 1) - 1;
            }
            rho[(kk + 1) * i - 1] = kk * m + i - 1;
        }
        let id_out: Vec<usize> = (0..tens.outputs.len()).collect();
        tens.permute_interface(&rho, &id_out)
            .expect("distributor permutation is a bijection")
    }

    /// True iff all edges are contractions/weakenings of one wire sort, there
    /// is exactly one output, and the output is reachable from every vertex.
    pub fn is_contraction_tree(&self) -> bool {
        if self.outputs.len() != 1 {
            return false;
        }
        let mut wire: Option<Wire> = None;
        for e in self.edge_ids() {
            match self.edge(e).label {
                EdgeLabel::Contraction(w) | EdgeLabel::Weakening(w) => {
                    if *wire.get_or_insert(w) != w {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        let out = self.outputs[0];
        self.vertices().all(|(v, _)| self.reaches(v, out))
    }

    /// Reachability along edge direction (v' reachable from v if equal or a
    /// path leads from v to v').
    pub fn reaches(&self, from: VertexId, to: VertexId) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.verts.len()];
        let mut stack = vec![from];
        seen[from.0 as usize] = true;
        while let Some(v) = stack.pop() {
            if let Some(e) = self.out_edge(v) {
                for &t in &self.edge(e).targets {
                    if t == to {
                        return true;
                    }
                    if !seen[t.0 as usize] {
                        seen[t.0 as usize] = true;
                        stack.push(t);
                    }
                }
            }
        }
        false
    }

    /// Structural isomorphism: a label-, interface-order- and incidence-
    /// preserving bijection exists. Decided by canonical form comparison.
    pub fn iso(&self, other: &Hypernet) -> bool {
        self.canonical() == other.canonical()
    }
}

#[cfg(test)]
mod tests;
