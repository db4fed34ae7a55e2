//! The focussed-rewriting abstract machine.
//!
//! A state is a hypernet of type `* ⇒ ε` carrying exactly one shallow token
//! edge. Search transitions move the token without changing the underlying
//! net; copy transitions duplicate a copyable sub-net reached through a
//! contraction chain; compute transitions apply the local rewrite of an
//! active operation. Copy and compute fire only from a rewrite token and
//! always leave a search token behind.

use crate::hypernet::{
    CopyableNet, EdgeId, EdgeLabel, Hypernet, OpLabel, OpSignature, Polarity, TokenKind,
    VertexId, VertexLabel, Wire,
};
use std::fmt;
use thiserror::Error;

/// Identifier of an interaction (search) rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchRule {
    R1a,
    R1b,
    R2,
    R3,
    R4,
    R5a,
    R5b,
}

impl fmt::Display for SearchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SearchRule::R1a => "1a",
            SearchRule::R1b => "1b",
            SearchRule::R2 => "2",
            SearchRule::R3 => "3",
            SearchRule::R4 => "4",
            SearchRule::R5a => "5a",
            SearchRule::R5b => "5b",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transition {
    Search(SearchRule),
    Copy,
    Compute(String),
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Search(r) => write!(f, "search:{r}"),
            Transition::Copy => write!(f, "copy"),
            Transition::Compute(op) => write!(f, "compute:{op}"),
        }
    }
}

/// Why a state cannot make a transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StuckReason {
    /// The token target has no outgoing edge.
    NoRedex,
    /// Search ran into an edge no rule covers (hole, store edge, token).
    SearchBlocked,
    /// A value token is not below an operation's eager target.
    ValueBlocked,
    /// A rewrite token faces neither a contraction nor an active operation.
    RewriteBlocked,
    /// The contraction chain does not end in a copyable net.
    NotCopyable,
    /// The contraction chain loops.
    CyclicShare,
    /// An eager argument does not root a stable net.
    ArgNotStable(usize),
    /// Application expects an abstraction as its first argument.
    NotAbstraction,
    /// A name-accessing operation was given a non-name.
    ExpectedName(usize),
    /// Following a name's sharing tree found no store edge.
    NoStore,
    /// The stored net is not stable (or lacks a box).
    StoredNotStable,
    /// Arithmetic expects numerals.
    ExpectedNumeral(usize),
    /// Arithmetic left the integer range.
    Overflow,
    /// An active operation without registered behaviour.
    NoBehaviour(String),
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StuckReason::*;
        match self {
            NoRedex => write!(f, "no-redex"),
            SearchBlocked => write!(f, "search-blocked"),
            ValueBlocked => write!(f, "value-blocked"),
            RewriteBlocked => write!(f, "rewrite-blocked"),
            NotCopyable => write!(f, "not-copyable"),
            CyclicShare => write!(f, "cyclic-share"),
            ArgNotStable(i) => write!(f, "arg{i}-not-stable"),
            NotAbstraction => write!(f, "not-abstraction"),
            ExpectedName(i) => write!(f, "arg{i}-not-name"),
            NoStore => write!(f, "no-store"),
            StoredNotStable => write!(f, "stored-not-stable"),
            ExpectedNumeral(i) => write!(f, "arg{i}-not-numeral"),
            Overflow => write!(f, "arith-overflow"),
            NoBehaviour(op) => write!(f, "no-behaviour:{op}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Transition),
    Final,
    Stuck(StuckReason),
}

/// Result of driving a state to quiescence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Final { steps: usize },
    Stuck { steps: usize, reason: StuckReason },
    FuelExhausted { fuel: usize },
}

impl Outcome {
    pub fn final_steps(&self) -> Option<usize> {
        match self {
            Outcome::Final { steps } => Some(*steps),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("net is not a sealed * => e hypernet: {0}")]
    InvalidNet(String),
    #[error("net already contains a token")]
    AlreadyFocussed,
}

/// One line of an execution trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub step: usize,
    pub transition: Transition,
    pub token: TokenKind,
    pub vertices: usize,
    pub edges: usize,
}

impl TraceEntry {
    /// The machine-readable line format: one JSON object per transition.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"step\":{},\"kind\":\"{}\",\"token\":\"{}\",\"vertices\":{},\"edges\":{}}}",
            self.step,
            self.transition,
            self.token.short(),
            self.vertices,
            self.edges
        )
    }
}

/// A machine state: the net plus its unique shallow token edge.
#[derive(Debug, Clone)]
pub struct Machine {
    net: Hypernet,
    token: EdgeId,
}

impl Machine {
    /// Focuses a focus-free sealed net of type `* ⇒ ε` with a `?` token at
    /// its input.
    pub fn init(net: Hypernet) -> Result<Machine, MachineError> {
        if net.deep_token_count() > 0 {
            return Err(MachineError::AlreadyFocussed);
        }
        let report = net.validate(true);
        if !report.is_empty() {
            return Err(MachineError::InvalidNet(report[0].to_string()));
        }
        if net.input_labels() != vec![VertexLabel::Star] || !net.outputs().is_empty() {
            return Err(MachineError::InvalidNet(format!(
                "interface {:?} => {:?}",
                net.input_labels(),
                net.output_labels()
            )));
        }
        let mut net = net;
        let root = net.inputs()[0];
        let token = insert_token(&mut net, TokenKind::Search, root);
        Ok(Machine { net, token })
    }

    pub fn net(&self) -> &Hypernet {
        &self.net
    }

    pub fn token_kind(&self) -> TokenKind {
        match self.net.edge(self.token).label {
            EdgeLabel::Token(k) => k,
            _ => unreachable!("token id tracks a token edge"),
        }
    }

    pub fn token_source(&self) -> VertexId {
        self.net.edge(self.token).sources[0]
    }

    pub fn token_target(&self) -> VertexId {
        self.net.edge(self.token).targets[0]
    }

    pub fn is_initial(&self) -> bool {
        self.token_kind() == TokenKind::Search && self.net.inputs() == [self.token_source()]
    }

    pub fn is_final(&self) -> bool {
        self.token_kind() == TokenKind::Value && self.net.inputs() == [self.token_source()]
    }

    /// The focus-free net obtained by removing the token and identifying its
    /// endpoints.
    pub fn underlying(&self) -> Hypernet {
        let mut net = self.net.clone();
        let edge = net.remove_edge(self.token);
        net.fuse(edge.targets[0], edge.sources[0]);
        net
    }

    /// Classifies the transition the state admits, without applying it.
    pub fn peek(&self) -> StepResult {
        if self.is_final() {
            return StepResult::Final;
        }
        match self.token_kind() {
            TokenKind::Search => {
                let t = self.token_target();
                let e = match self.net.out_edge(t) {
                    Some(e) => e,
                    None => return StepResult::Stuck(StuckReason::NoRedex),
                };
                match &self.net.edge(e).label {
                    EdgeLabel::Contraction(_) => {
                        let pos = self.net.edge(e).sources.iter().position(|&v| v == t);
                        match pos {
                            Some(0) => StepResult::Stepped(Transition::Search(SearchRule::R1a)),
                            _ => StepResult::Stepped(Transition::Search(SearchRule::R1b)),
                        }
                    }
                    EdgeLabel::Instance => StepResult::Stepped(Transition::Search(SearchRule::R2)),
                    EdgeLabel::Operation(op) => {
                        if op.sig.eager >= 1 {
                            StepResult::Stepped(Transition::Search(SearchRule::R3))
                        } else {
                            StepResult::Stepped(Transition::Search(SearchRule::R5b))
                        }
                    }
                    _ => StepResult::Stuck(StuckReason::SearchBlocked),
                }
            }
            TokenKind::Value => {
                let s = self.token_source();
                let e = match self.net.in_edge(s) {
                    Some(e) => e,
                    None => return StepResult::Stuck(StuckReason::ValueBlocked),
                };
                let op = match self.net.edge(e).label.op() {
                    Some(op) => op.clone(),
                    None => return StepResult::Stuck(StuckReason::ValueBlocked),
                };
                let pos = self
                    .net
                    .edge(e)
                    .targets
                    .iter()
                    .position(|&v| v == s)
                    .expect("token source is a target of its feeding edge");
                if pos >= op.sig.eager {
                    return StepResult::Stuck(StuckReason::ValueBlocked);
                }
                if pos + 1 < op.sig.eager {
                    StepResult::Stepped(Transition::Search(SearchRule::R4))
                } else {
                    StepResult::Stepped(Transition::Search(SearchRule::R5a))
                }
            }
            TokenKind::Rewrite => {
                let t = self.token_target();
                let e = match self.net.out_edge(t) {
                    Some(e) => e,
                    None => return StepResult::Stuck(StuckReason::NoRedex),
                };
                match &self.net.edge(e).label {
                    EdgeLabel::Contraction(_) => match self.copy_plan(t) {
                        Ok(_) => StepResult::Stepped(Transition::Copy),
                        Err(reason) => StepResult::Stuck(reason),
                    },
                    EdgeLabel::Operation(op) if op.sig.is_active() => {
                        match self.compute_check(e, &op.clone()) {
                            Ok(()) => StepResult::Stepped(Transition::Compute(op.name.clone())),
                            Err(reason) => StepResult::Stuck(reason),
                        }
                    }
                    _ => StepResult::Stuck(StuckReason::RewriteBlocked),
                }
            }
        }
    }

    /// Applies exactly one transition. At most one rule matches any state.
    pub fn step(&mut self) -> StepResult {
        let planned = self.peek();
        let transition = match &planned {
            StepResult::Stepped(t) => t.clone(),
            _ => return planned,
        };
        match transition {
            Transition::Search(rule) => self.apply_search(rule),
            Transition::Copy => self.apply_copy(),
            Transition::Compute(_) => self.apply_compute(),
        }
        planned
    }

    fn set_kind(&mut self, kind: TokenKind) {
        self.net.edge_mut(self.token).label = EdgeLabel::Token(kind);
    }

    /// Removes the token and re-inserts it with `kind` above `dest`.
    fn move_token(&mut self, kind: TokenKind, dest: VertexId) {
        let edge = self.net.remove_edge(self.token);
        let (src, tgt) = (edge.sources[0], edge.targets[0]);
        debug_assert_ne!(dest, src, "destination must survive token removal");
        self.net.fuse(tgt, src);
        self.token = insert_token(&mut self.net, kind, dest);
    }

    fn apply_search(&mut self, rule: SearchRule) {
        match rule {
            SearchRule::R1a | SearchRule::R1b => self.set_kind(TokenKind::Rewrite),
            SearchRule::R2 => self.set_kind(TokenKind::Value),
            SearchRule::R3 => {
                let e = self.net.out_edge(self.token_target()).expect("peeked");
                let dest = self.net.edge(e).targets[0];
                self.move_token(TokenKind::Search, dest);
            }
            SearchRule::R4 => {
                let s = self.token_source();
                let e = self.net.in_edge(s).expect("peeked");
                let pos = self
                    .net
                    .edge(e)
                    .targets
                    .iter()
                    .position(|&v| v == s)
                    .expect("peeked");
                let dest = self.net.edge(e).targets[pos + 1];
                self.move_token(TokenKind::Search, dest);
            }
            SearchRule::R5a => {
                let s = self.token_source();
                let e = self.net.in_edge(s).expect("peeked");
                let op = self.net.edge(e).label.op().expect("peeked").clone();
                let dest = self.net.edge(e).sources[0];
                let kind = polar_token(op.sig.polarity);
                self.move_token(kind, dest);
            }
            SearchRule::R5b => {
                let e = self.net.out_edge(self.token_target()).expect("peeked");
                let op = self.net.edge(e).label.op().expect("peeked");
                self.set_kind(polar_token(op.sig.polarity));
            }
        }
    }

    /// Undoes a search transition: reconstructs the predecessor state from
    /// the rule that produced this one. The inverse rules are deterministic.
    pub fn invert_search(&mut self, rule: SearchRule) {
        match rule {
            SearchRule::R1a | SearchRule::R1b | SearchRule::R5b => self.set_kind(TokenKind::Search),
            SearchRule::R2 => self.set_kind(TokenKind::Search),
            SearchRule::R3 => {
                // Token sits above the first eager target; return above the
                // operation edge.
                let s = self.token_source();
                let e = self.net.in_edge(s).expect("result of rule 3");
                let dest = self.net.edge(e).sources[0];
                self.move_token(TokenKind::Search, dest);
            }
            SearchRule::R4 => {
                let s = self.token_source();
                let e = self.net.in_edge(s).expect("result of rule 4");
                let pos = self
                    .net
                    .edge(e)
                    .targets
                    .iter()
                    .position(|&v| v == s)
                    .expect("token source is an eager target");
                // The value token sat below the previous argument: inserting
                // above that argument's root splits the wire between the
                // operation edge and the value, leaving the token's source as
                // the operation's target.
                let holder = self.net.edge(e).targets[pos - 1];
                self.move_token(TokenKind::Value, holder);
            }
            SearchRule::R5a => {
                let t = self.token_target();
                let e = self.net.out_edge(t).expect("result of rule 5a");
                let op = self.net.edge(e).label.op().expect("rule 5a").clone();
                let last = self.net.edge(e).targets[op.sig.eager - 1];
                self.move_token(TokenKind::Value, last);
            }
        }
    }

    // -- copy transitions ---------------------------------------------------

    /// From the token-adjacent contraction, walks the chain of contraction
    /// targets to the vertex that must root a copyable net.
    fn copy_plan(&self, token_target: VertexId) -> Result<(EdgeId, CopyableNet), StuckReason> {
        let c0 = self.net.out_edge(token_target).expect("peeked");
        let mut cur = self.net.edge(c0).targets[0];
        let mut guard = self.net.edge_count() + 1;
        loop {
            match self.net.out_edge(cur) {
                Some(e) if matches!(self.net.edge(e).label, EdgeLabel::Contraction(_)) => {
                    cur = self.net.edge(e).targets[0];
                }
                _ => break,
            }
            guard -= 1;
            if guard == 0 {
                return Err(StuckReason::CyclicShare);
            }
        }
        match self.net.find_copyable_at(cur) {
            Some(h) => Ok((c0, h)),
            None => Err(StuckReason::NotCopyable),
        }
    }

    fn apply_copy(&mut self) {
        let t = self.token_target();
        let (c0, h) = self.copy_plan(t).expect("peeked");
        // Duplicate the copyable net first; the original stays in place for
        // later uses of the share.
        let map = self.duplicate(&h);
        // Detach the token's leaf: delete the token-adjacent contraction and
        // fuse its remaining source with its target.
        let removed = self.net.remove_edge(c0);
        let sibling = if removed.sources[0] == t {
            removed.sources[1]
        } else {
            removed.sources[0]
        };
        self.net.fuse(sibling, removed.targets[0]);
        // The token turns into a query of the fresh copy.
        self.set_kind(TokenKind::Search);
        self.net.fuse(t, map(h.input));
        // Share each output of the original with its copy through a fresh
        // contraction; the contraction's target takes over the original's
        // external connection.
        for &o in &h.outputs {
            let o2 = map(o);
            self.share_outputs(o, o2);
        }
    }

    /// Clones the edges of a copyable net; returns the vertex renaming.
    fn duplicate(&mut self, h: &CopyableNet) -> impl Fn(VertexId) -> VertexId {
        let mut involved: Vec<VertexId> = Vec::new();
        for &e in &h.edges {
            let edge = self.net.edge(e);
            for &v in edge.sources.iter().chain(edge.targets.iter()) {
                if !involved.contains(&v) {
                    involved.push(v);
                }
            }
        }
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for &v in &involved {
            let label = self.net.vertex_label(v);
            let fresh = self.net.add_vertex(label);
            pairs.push((v, fresh));
        }
        let lookup = move |v: VertexId| {
            pairs
                .iter()
                .find(|(old, _)| *old == v)
                .map(|(_, new)| *new)
                .expect("vertex belongs to the copied net")
        };
        for &e in &h.edges {
            let edge = self.net.edge(e).clone();
            self.net.add_edge(
                edge.label,
                edge.sources.iter().map(|&v| lookup(v)).collect(),
                edge.targets.iter().map(|&v| lookup(v)).collect(),
            );
        }
        lookup
    }

    /// Inserts `⊗_C(o, o2) → u` where `u` takes over `o`'s former outgoing
    /// connection.
    fn share_outputs(&mut self, o: VertexId, o2: VertexId) {
        let wire = match self.net.vertex_label(o) {
            VertexLabel::Star => Wire::Star,
            VertexLabel::Diamond => Wire::Diamond,
            VertexLabel::Thunk(_) => unreachable!("copyable outputs are * or ◆"),
        };
        let ext = self.net.out_edge(o);
        let u = self.net.add_vertex(wire.vertex_label());
        self.net
            .add_edge(EdgeLabel::Contraction(wire), vec![o, o2], vec![u]);
        if let Some(ext) = ext {
            self.net.swap_source(ext, o, u);
        }
    }

    // -- compute transitions ------------------------------------------------

    /// Pattern checks for the rewrite of `op` at edge `e`, with no mutation.
    fn compute_check(&self, e: EdgeId, op: &OpLabel) -> Result<(), StuckReason> {
        let targets = self.net.edge(e).targets.clone();
        match op.name.as_str() {
            "app" => {
                let lam = self.stable_rooted_op(targets[0], 1)?;
                if lam.as_deref() != Some("lambda") {
                    return Err(StuckReason::NotAbstraction);
                }
                let tau = self.net.edge(self.net.out_edge(targets[0]).unwrap()).targets[0];
                match self.net.out_edge(tau) {
                    Some(b) if matches!(self.net.edge(b).label, EdgeLabel::Box { .. }) => {}
                    _ => return Err(StuckReason::NotAbstraction),
                }
                if self.net.max_stable_from(targets[1]).is_none() {
                    return Err(StuckReason::ArgNotStable(2));
                }
                Ok(())
            }
            "ref" => {
                if self.net.max_stable_from(targets[0]).is_none() {
                    return Err(StuckReason::ArgNotStable(1));
                }
                Ok(())
            }
            "eq" => {
                self.expect_name(targets[0], 1)?;
                self.expect_name(targets[1], 2)?;
                Ok(())
            }
            "assign" => {
                self.expect_name(targets[0], 1)?;
                if self.net.max_stable_from(targets[1]).is_none() {
                    return Err(StuckReason::ArgNotStable(2));
                }
                Ok(())
            }
            "deref" => {
                self.expect_name(targets[0], 1)?;
                let store = self.locate_store(targets[0])?;
                let root = self.net.edge(store).targets[0];
                match self.net.max_stable_from(root) {
                    Some(stable) => match stable.with_boxes(&self.net) {
                        Some(_) => Ok(()),
                        None => Err(StuckReason::StoredNotStable),
                    },
                    None => Err(StuckReason::StoredNotStable),
                }
            }
            "add" | "sub" => {
                let m = self.expect_numeral(targets[0], 1)?;
                let n = self.expect_numeral(targets[1], 2)?;
                let p = if op.name == "add" {
                    m.checked_add(n)
                } else {
                    m.checked_sub(n)
                };
                p.map(|_| ()).ok_or(StuckReason::Overflow)
            }
            "neg" => {
                let m = self.expect_numeral(targets[0], 1)?;
                m.checked_neg().map(|_| ()).ok_or(StuckReason::Overflow)
            }
            other => Err(StuckReason::NoBehaviour(other.to_string())),
        }
    }

    /// The maximal stable net at `v` must exist; returns the name of the
    /// operation rooting it, if the root edge is an operation.
    fn stable_rooted_op(&self, v: VertexId, which: usize) -> Result<Option<String>, StuckReason> {
        if self.net.max_stable_from(v).is_none() {
            return Err(StuckReason::ArgNotStable(which));
        }
        Ok(self.net.out_edge(v).and_then(|e| {
            self.net.edge(e).label.op().map(|op| op.name.clone())
        }))
    }

    fn expect_name(&self, v: VertexId, which: usize) -> Result<EdgeId, StuckReason> {
        match self.net.out_edge(v) {
            Some(e) if matches!(self.net.edge(e).label, EdgeLabel::Instance) => Ok(e),
            _ => Err(StuckReason::ExpectedName(which)),
        }
    }

    fn expect_numeral(&self, v: VertexId, which: usize) -> Result<i64, StuckReason> {
        match self.net.out_edge(v) {
            Some(e) => match self.net.edge(e).label.op() {
                Some(op) if op.sig.eager == 0 && op.sig.deferred.is_empty() => {
                    op.as_numeral().ok_or(StuckReason::ExpectedNumeral(which))
                }
                _ => Err(StuckReason::ExpectedNumeral(which)),
            },
            None => Err(StuckReason::ExpectedNumeral(which)),
        }
    }

    /// Follows a name instance's ◆ target through its sharing tree down to
    /// the store edge it feeds.
    fn locate_store(&self, name_root: VertexId) -> Result<EdgeId, StuckReason> {
        let i = self.expect_name(name_root, 0).map_err(|_| StuckReason::NoStore)?;
        let mut cur = self.net.edge(i).targets[0];
        let mut guard = self.net.edge_count() + 1;
        loop {
            match self.net.out_edge(cur) {
                Some(e) => match self.net.edge(e).label {
                    EdgeLabel::Contraction(Wire::Diamond) => {
                        cur = self.net.edge(e).targets[0];
                    }
                    EdgeLabel::Atom => return Ok(e),
                    _ => return Err(StuckReason::NoStore),
                },
                None => return Err(StuckReason::NoStore),
            }
            guard -= 1;
            if guard == 0 {
                return Err(StuckReason::NoStore);
            }
        }
    }

    fn apply_compute(&mut self) {
        let t = self.token_target();
        let e = self.net.out_edge(t).expect("peeked");
        let op = self.net.edge(e).label.op().expect("peeked").clone();
        match op.name.as_str() {
            "app" => self.rewrite_beta(t, e),
            "ref" => self.rewrite_ref(t, e),
            "eq" => self.rewrite_eq(t, e),
            "assign" => self.rewrite_assign(t, e),
            "deref" => self.rewrite_deref(t, e),
            "add" | "sub" | "neg" => self.rewrite_arith(t, e, &op),
            _ => unreachable!("checked by peek"),
        }
        self.set_kind(TokenKind::Search);
    }

    /// Beta: consume the application, the abstraction edge and its box;
    /// splice the box content. The content's input takes the application's
    /// root, its first output takes the argument, its remaining outputs take
    /// the box's former targets.
    fn rewrite_beta(&mut self, t: VertexId, e: EdgeId) {
        let targets = self.net.edge(e).targets.clone();
        let (v1, v2) = (targets[0], targets[1]);
        let lam = self.net.out_edge(v1).expect("checked");
        let tau = self.net.edge(lam).targets[0];
        let box_e = self.net.out_edge(tau).expect("checked");
        let (content, box_targets) = match &self.net.edge(box_e).label {
            EdgeLabel::Box { content, .. } => {
                ((**content).clone(), self.net.edge(box_e).targets.clone())
            }
            _ => unreachable!("checked"),
        };
        self.net.remove_edge(e);
        self.net.remove_edge(lam);
        self.net.remove_edge(box_e);
        self.net.remove_vertex(v1);
        self.net.remove_vertex(tau);
        let rename = self.net.absorb(&content);
        self.net.fuse(t, rename(content.inputs()[0]));
        let outs = content.outputs();
        self.net.fuse(v2, rename(outs[0]));
        for (i, &w) in box_targets.iter().enumerate() {
            self.net.fuse(w, rename(outs[i + 1]));
        }
    }

    /// Reference creation: a fresh name instance above a fresh store edge
    /// holding the argument.
    fn rewrite_ref(&mut self, t: VertexId, e: EdgeId) {
        let v1 = self.net.edge(e).targets[0];
        self.net.remove_edge(e);
        let d = self.net.add_vertex(VertexLabel::Diamond);
        self.net.add_edge(EdgeLabel::Instance, vec![t], vec![d]);
        self.net.add_edge(EdgeLabel::Atom, vec![d], vec![v1]);
    }

    /// Name equality: locate both store edges; answer `tt` iff they
    /// coincide. Both instances are consumed; the pruned sharing-tree leaves
    /// are repaired with fresh ◆ weakenings.
    fn rewrite_eq(&mut self, t: VertexId, e: EdgeId) {
        let targets = self.net.edge(e).targets.clone();
        let (v1, v2) = (targets[0], targets[1]);
        let a1 = self.locate_store(v1).expect("checked");
        let a2 = self.locate_store(v2).expect("checked");
        let answer = if a1 == a2 { "tt" } else { "ff" };
        let i1 = self.net.out_edge(v1).unwrap();
        let i2 = self.net.out_edge(v2).unwrap();
        let d1 = self.net.edge(i1).targets[0];
        let d2 = self.net.edge(i2).targets[0];
        self.net.remove_edge(e);
        self.net.remove_edge(i1);
        self.net.remove_edge(i2);
        self.net.remove_vertex(v1);
        self.net.remove_vertex(v2);
        self.net
            .add_edge(EdgeLabel::Weakening(Wire::Diamond), vec![], vec![d1]);
        self.net
            .add_edge(EdgeLabel::Weakening(Wire::Diamond), vec![], vec![d2]);
        self.net.add_edge(
            EdgeLabel::Operation(OpLabel {
                name: answer.to_string(),
                sig: OpSignature::new(0, vec![], Polarity::Passive),
            }),
            vec![t],
            vec![],
        );
    }

    /// Assignment: retarget the store edge to the new value; the detached old
    /// root is capped by a fresh * weakening and stays as unreachable
    /// garbage. The operation returns the name.
    fn rewrite_assign(&mut self, t: VertexId, e: EdgeId) {
        let targets = self.net.edge(e).targets.clone();
        let (v1, v2) = (targets[0], targets[1]);
        let store = self.locate_store(v1).expect("checked");
        let old_root = self.net.edge(store).targets[0];
        self.net.remove_edge(e);
        self.net.swap_target(store, old_root, v2);
        self.net
            .add_edge(EdgeLabel::Weakening(Wire::Star), vec![], vec![old_root]);
        self.net.fuse(t, v1);
    }

    /// Dereference: duplicate the stored stable net (with its boxes), splice
    /// the copy at the operation's root, and share every output of the
    /// original with its copy. The name argument is discarded.
    fn rewrite_deref(&mut self, t: VertexId, e: EdgeId) {
        let v1 = self.net.edge(e).targets[0];
        let store = self.locate_store(v1).expect("checked");
        let root = self.net.edge(store).targets[0];
        let stored = self
            .net
            .max_stable_from(root)
            .and_then(|s| s.with_boxes(&self.net))
            .expect("checked");
        let map = self.duplicate(&stored);
        let i1 = self.net.out_edge(v1).unwrap();
        let d1 = self.net.edge(i1).targets[0];
        self.net.remove_edge(e);
        self.net.remove_edge(i1);
        self.net.remove_vertex(v1);
        self.net
            .add_edge(EdgeLabel::Weakening(Wire::Diamond), vec![], vec![d1]);
        self.net.fuse(t, map(stored.input));
        for &o in &stored.outputs {
            let o2 = map(o);
            self.share_outputs(o, o2);
        }
    }

    /// Arithmetic: replace the operation and its numeral arguments by the
    /// result numeral.
    fn rewrite_arith(&mut self, t: VertexId, e: EdgeId, op: &OpLabel) {
        let targets = self.net.edge(e).targets.clone();
        let m = self.expect_numeral(targets[0], 1).expect("checked");
        let p = match op.name.as_str() {
            "add" => {
                let n = self.expect_numeral(targets[1], 2).expect("checked");
                m + n
            }
            "sub" => {
                let n = self.expect_numeral(targets[1], 2).expect("checked");
                m - n
            }
            "neg" => -m,
            _ => unreachable!(),
        };
        self.net.remove_edge(e);
        for &v in &targets {
            let num = self.net.out_edge(v).expect("checked");
            self.net.remove_edge(num);
            self.net.remove_vertex(v);
        }
        self.net.add_edge(
            EdgeLabel::Operation(OpLabel {
                name: p.to_string(),
                sig: OpSignature::new(0, vec![], Polarity::Passive),
            }),
            vec![t],
            vec![],
        );
    }

    // -- driving ------------------------------------------------------------

    /// Runs until final, stuck or out of fuel.
    pub fn run(&mut self, fuel: usize) -> Outcome {
        let mut steps = 0;
        loop {
            if steps >= fuel {
                return Outcome::FuelExhausted { fuel };
            }
            match self.step() {
                StepResult::Stepped(_) => steps += 1,
                StepResult::Final => return Outcome::Final { steps },
                StepResult::Stuck(reason) => return Outcome::Stuck { steps, reason },
            }
        }
    }

    /// Runs like [`run`], recording one entry per transition.
    pub fn trace(&mut self, fuel: usize) -> (Vec<TraceEntry>, Outcome) {
        let mut entries = Vec::new();
        loop {
            if entries.len() >= fuel {
                return (entries, Outcome::FuelExhausted { fuel });
            }
            match self.step() {
                StepResult::Stepped(transition) => {
                    entries.push(TraceEntry {
                        step: entries.len(),
                        transition,
                        token: self.token_kind(),
                        vertices: self.net.vertex_count(),
                        edges: self.net.edge_count(),
                    });
                }
                StepResult::Final => {
                    let steps = entries.len();
                    return (entries, Outcome::Final { steps });
                }
                StepResult::Stuck(reason) => {
                    let steps = entries.len();
                    return (entries, Outcome::Stuck { steps, reason });
                }
            }
        }
    }

    /// A state is rooted if re-focusing its underlying net and searching
    /// reaches it again. Search transitions alone decide this; the walk is
    /// bounded by the net size times the maximum operation arity.
    pub fn is_rooted(&self) -> bool {
        let target = self.net.canonical();
        let mut probe = match Machine::init(self.underlying()) {
            Ok(p) => p,
            Err(_) => return false,
        };
        let max_arity = probe
            .net
            .edge_ids()
            .filter_map(|e| probe.net.edge(e).label.op().map(|op| op.sig.eager))
            .max()
            .unwrap_or(1)
            .max(1);
        let bound = (probe.net.deep_edge_count() + 2) * (max_arity + 2) + 8;
        for _ in 0..bound {
            if probe.net.canonical() == target {
                return true;
            }
            match probe.peek() {
                StepResult::Stepped(Transition::Search(_)) => {
                    probe.step();
                }
                _ => return false,
            }
        }
        false
    }

    /// The answer edge of a final state: the 0-ary operation under the token.
    pub fn answer(&self) -> Option<String> {
        if !self.is_final() {
            return None;
        }
        let e = self.net.out_edge(self.token_target())?;
        match self.net.edge(e).label.op() {
            Some(op) if op.sig.eager == 0 && op.sig.deferred.is_empty() => Some(op.name.clone()),
            _ => None,
        }
    }
}

fn polar_token(p: Polarity) -> TokenKind {
    match p {
        Polarity::Passive => TokenKind::Value,
        Polarity::Active => TokenKind::Rewrite,
    }
}

/// Splits the wire above `dest`: a fresh vertex takes over `dest`'s feeding
/// edge (or its input slot) and the token runs from it to `dest`.
fn insert_token(net: &mut Hypernet, kind: TokenKind, dest: VertexId) -> EdgeId {
    let v2 = net.add_vertex(VertexLabel::Star);
    if let Some(feed) = net.in_edge(dest) {
        net.swap_target(feed, dest, v2);
    } else {
        let inputs: Vec<VertexId> = net
            .inputs()
            .iter()
            .map(|&v| if v == dest { v2 } else { v })
            .collect();
        let outputs = net.outputs().to_vec();
        net.set_interface(inputs, outputs);
    }
    net.add_edge(EdgeLabel::Token(kind), vec![v2], vec![dest])
}
