//! The compositional translation from typed terms to focus-free hypernets.
//!
//! For a judgement `x1..xk | a1..ah ⊢ t : *` the result has type
//! `* ⇒ *^k ⊗ ◆^h`: one root input, one output per environment entry. A
//! program (empty environment) translates to `* ⇒ ε`.
//!
//! Wiring conventions:
//! - every variable use goes through a contraction padded with a weakening,
//!   so interfaces never degenerate to bare wires and copy behaviour is
//!   uniform at each use;
//! - `bind`/`new` merge the two copies of each environment output with one
//!   binary contraction; operation applications merge the `m+p` copies with
//!   a left-leaning contraction tree, or a weakening when `m+p = 0`;
//! - a thunk becomes a box edge whose content is the translation of its body
//!   under the extended environment; the bound-variable outputs stay inside
//!   the box, environment outputs become box targets.

use crate::hypernet::{EdgeLabel, Hypernet, OpLabel, VertexId, VertexLabel, Wire};
use crate::lang::{typecheck, Environment, Registry, Term, Type, TypeError};

/// A translated term, with the vertices that realise its interface.
#[derive(Debug, Clone)]
pub struct Translation {
    pub net: Hypernet,
    pub root: VertexId,
    pub var_outputs: Vec<VertexId>,
    pub atom_outputs: Vec<VertexId>,
}

/// Translates `env ⊢ term : *` into a hypernet of type `* ⇒ *^k ⊗ ◆^h`.
pub fn translate(reg: &Registry, env: &Environment, term: &Term) -> Result<Translation, TypeError> {
    match typecheck(reg, env, term)? {
        Type::Star => {}
        Type::Thunk(_) => return Err(TypeError::UnexpectedThunk),
    }
    let mut net = Hypernet::new();
    let piece = emit(reg, &mut net, env, term);
    let mut outputs = piece.var_outputs.clone();
    outputs.extend(piece.atom_outputs.iter().copied());
    net.set_interface(vec![piece.root], outputs);
    Ok(Translation {
        net,
        root: piece.root,
        var_outputs: piece.var_outputs,
        atom_outputs: piece.atom_outputs,
    })
}

/// Translates a program `- | - ⊢ term : *` to a sealed net of type `* ⇒ ε`.
pub fn translate_program(reg: &Registry, term: &Term) -> Result<Hypernet, TypeError> {
    let tr = translate(reg, &Environment::empty(), term)?;
    debug_assert!(tr.net.validate(true).is_empty(), "translation must seal");
    Ok(tr.net)
}

struct Piece {
    root: VertexId,
    var_outputs: Vec<VertexId>,
    atom_outputs: Vec<VertexId>,
}

fn weaken(net: &mut Hypernet, wire: Wire) -> VertexId {
    let v = net.add_vertex(wire.vertex_label());
    net.add_edge(EdgeLabel::Weakening(wire), vec![], vec![v]);
    v
}

/// Merges one vertex per copy into a single output of the given sort with a
/// left-leaning contraction tree; a weakening when there are no copies.
fn merge(net: &mut Hypernet, wire: Wire, copies: &[VertexId]) -> VertexId {
    match copies {
        [] => weaken(net, wire),
        [only] => *only,
        [first, rest @ ..] => {
            let mut acc = *first;
            for &next in rest {
                let tgt = net.add_vertex(wire.vertex_label());
                net.add_edge(EdgeLabel::Contraction(wire), vec![acc, next], vec![tgt]);
                acc = tgt;
            }
            acc
        }
    }
}

fn emit(reg: &Registry, net: &mut Hypernet, env: &Environment, term: &Term) -> Piece {
    let k = env.vars.len();
    let h = env.atoms.len();
    match term {
        Term::Var(x) => {
            let root = net.add_vertex(VertexLabel::Star);
            let i = env.vars.iter().position(|v| v == x).expect("typechecked");
            let mut var_outputs = Vec::with_capacity(k);
            for j in 0..k {
                if j == i {
                    let pad = weaken(net, Wire::Star);
                    let out = net.add_vertex(VertexLabel::Star);
                    net.add_edge(
                        EdgeLabel::Contraction(Wire::Star),
                        vec![root, pad],
                        vec![out],
                    );
                    var_outputs.push(out);
                } else {
                    var_outputs.push(weaken(net, Wire::Star));
                }
            }
            let atom_outputs = (0..h).map(|_| weaken(net, Wire::Diamond)).collect();
            Piece {
                root,
                var_outputs,
                atom_outputs,
            }
        }
        Term::Atom(a) => {
            let root = net.add_vertex(VertexLabel::Star);
            let j = env.atoms.iter().position(|b| b == a).expect("typechecked");
            let var_outputs = (0..k).map(|_| weaken(net, Wire::Star)).collect();
            let mut atom_outputs = Vec::with_capacity(h);
            for l in 0..h {
                if l == j {
                    let d = net.add_vertex(VertexLabel::Diamond);
                    net.add_edge(EdgeLabel::Instance, vec![root], vec![d]);
                    atom_outputs.push(d);
                } else {
                    atom_outputs.push(weaken(net, Wire::Diamond));
                }
            }
            Piece {
                root,
                var_outputs,
                atom_outputs,
            }
        }
        Term::Bind { var, bound, body } => {
            let mut body_env = env.clone();
            body_env.vars.push(var.clone());
            let t = emit(reg, net, &body_env, body);
            let u = emit(reg, net, env, bound);
            // The bound term hangs below the body's output for `var`.
            net.fuse(t.var_outputs[k], u.root);
            let var_outputs = (0..k)
                .map(|j| merge(net, Wire::Star, &[t.var_outputs[j], u.var_outputs[j]]))
                .collect();
            let atom_outputs = (0..h)
                .map(|l| merge(net, Wire::Diamond, &[t.atom_outputs[l], u.atom_outputs[l]]))
                .collect();
            Piece {
                root: t.root,
                var_outputs,
                atom_outputs,
            }
        }
        Term::New { atom, bound, body } => {
            let mut body_env = env.clone();
            body_env.atoms.insert(0, atom.clone());
            let t = emit(reg, net, &body_env, body);
            let u = emit(reg, net, env, bound);
            // One store edge: its ◆ source is the body's output for `atom`,
            // its * target roots the bound term.
            net.add_edge(EdgeLabel::Atom, vec![t.atom_outputs[0]], vec![u.root]);
            let var_outputs = (0..k)
                .map(|j| merge(net, Wire::Star, &[t.var_outputs[j], u.var_outputs[j]]))
                .collect();
            let atom_outputs = (0..h)
                .map(|l| merge(net, Wire::Diamond, &[t.atom_outputs[l + 1], u.atom_outputs[l]]))
                .collect();
            Piece {
                root: t.root,
                var_outputs,
                atom_outputs,
            }
        }
        Term::OpApp { name, eager, deferred } => {
            let sig = reg.lookup(name).expect("typechecked");
            let root = net.add_vertex(VertexLabel::Star);
            let mut targets = Vec::new();
            let mut pieces: Vec<Piece> = Vec::new();
            for arg in eager {
                let p = emit(reg, net, env, arg);
                targets.push(p.root);
                pieces.push(p);
            }
            for (arg, &n) in deferred.iter().zip(sig.deferred.iter()) {
                let (tau, box_piece) = emit_thunk(reg, net, env, arg, n);
                targets.push(tau);
                pieces.push(box_piece);
            }
            net.add_edge(
                EdgeLabel::Operation(OpLabel {
                    name: name.clone(),
                    sig: sig.clone(),
                }),
                vec![root],
                targets,
            );
            let var_outputs = (0..k)
                .map(|j| {
                    let copies: Vec<_> = pieces.iter().map(|p| p.var_outputs[j]).collect();
                    merge(net, Wire::Star, &copies)
                })
                .collect();
            let atom_outputs = (0..h)
                .map(|l| {
                    let copies: Vec<_> = pieces.iter().map(|p| p.atom_outputs[l]).collect();
                    merge(net, Wire::Diamond, &copies)
                })
                .collect();
            Piece {
                root,
                var_outputs,
                atom_outputs,
            }
        }
        Term::Thunk { .. } => unreachable!("thunks appear only under operations"),
        Term::Hole { vars, atoms } => {
            // A hole is a single hole edge wired to the environment entries
            // its annotation names; the remaining entries are weakened.
            let root = net.add_vertex(VertexLabel::Star);
            let mut hole_targets = Vec::new();
            let mut var_outputs = vec![VertexId(u32::MAX); k];
            let mut atom_outputs = vec![VertexId(u32::MAX); h];
            for x in vars {
                let j = env.vars.iter().position(|v| v == x).expect("typechecked");
                let out = net.add_vertex(VertexLabel::Star);
                hole_targets.push(out);
                var_outputs[j] = out;
            }
            for a in atoms {
                let l = env.atoms.iter().position(|b| b == a).expect("typechecked");
                let out = net.add_vertex(VertexLabel::Diamond);
                hole_targets.push(out);
                atom_outputs[l] = out;
            }
            for j in 0..k {
                if var_outputs[j] == VertexId(u32::MAX) {
                    var_outputs[j] = weaken(net, Wire::Star);
                }
            }
            for l in 0..h {
                if atom_outputs[l] == VertexId(u32::MAX) {
                    atom_outputs[l] = weaken(net, Wire::Diamond);
                }
            }
            let hole_name = format!("hole_{}", net.hole_names().len());
            net.add_edge(EdgeLabel::Hole(hole_name), vec![root], hole_targets);
            Piece {
                root,
                var_outputs,
                atom_outputs,
            }
        }
    }
}

/// Emits the box for a deferred argument: returns the box edge's source (a
/// thunk vertex) and the environment outputs carried by the box targets.
fn emit_thunk(
    reg: &Registry,
    net: &mut Hypernet,
    env: &Environment,
    arg: &Term,
    n: usize,
) -> (VertexId, Piece) {
    let (binders, body) = match arg {
        Term::Thunk { binders, body } => (binders.clone(), (**body).clone()),
        _ => unreachable!("deferred arguments are thunks after typechecking"),
    };
    debug_assert_eq!(binders.len(), n);
    let mut inner_env = env.clone();
    let mut vars = binders.clone();
    vars.extend(inner_env.vars);
    inner_env.vars = vars;

    let mut content = Hypernet::new();
    let piece = emit(reg, &mut content, &inner_env, &body);
    let mut outputs = piece.var_outputs.clone();
    outputs.extend(piece.atom_outputs.iter().copied());
    content.set_interface(vec![piece.root], outputs);

    let tau = net.add_vertex(VertexLabel::Thunk(n as u32));
    let k = env.vars.len();
    let h = env.atoms.len();
    let mut box_targets = Vec::with_capacity(k + h);
    let mut var_outputs = Vec::with_capacity(k);
    for _ in 0..k {
        let v = net.add_vertex(VertexLabel::Star);
        box_targets.push(v);
        var_outputs.push(v);
    }
    let mut atom_outputs = Vec::with_capacity(h);
    for _ in 0..h {
        let v = net.add_vertex(VertexLabel::Diamond);
        box_targets.push(v);
        atom_outputs.push(v);
    }
    net.add_edge(
        EdgeLabel::Box {
            content: Box::new(content),
            binders: n as u32,
        },
        vec![tau],
        box_targets,
    );
    (
        tau,
        Piece {
            root: tau,
            var_outputs,
            atom_outputs,
        },
    )
}

/// Translates a term-context (a term with one hole) to a graph context.
pub fn translate_context(
    reg: &Registry,
    env: &Environment,
    ctx: &Term,
) -> Result<Translation, TypeError> {
    translate(reg, env, ctx)
}

/// Graph-side binding-freeness: no path at any depth from a source of a
/// contraction, atom, box or hole edge to a source of a hole edge.
pub fn is_binding_free(net: &Hypernet) -> bool {
    fn level_ok(net: &Hypernet) -> bool {
        // Collect hole sources at this level.
        let hole_sources: Vec<_> = net
            .edge_ids()
            .filter(|&e| matches!(net.edge(e).label, EdgeLabel::Hole(_)))
            .flat_map(|e| net.edge(e).sources.clone())
            .collect();
        if !hole_sources.is_empty() {
            for e in net.edge_ids() {
                let binds = matches!(
                    net.edge(e).label,
                    EdgeLabel::Contraction(_)
                        | EdgeLabel::Atom
                        | EdgeLabel::Box { .. }
                        | EdgeLabel::Hole(_)
                );
                if !binds {
                    continue;
                }
                // A path from a source of e reaches a hole source iff some
                // target chain from e ends there; the edge e itself is the
                // first edge of the path, so start from its targets.
                for &t in &net.edge(e).targets {
                    for &hs in &hole_sources {
                        if t == hs || net.reaches(t, hs) {
                            return false;
                        }
                    }
                }
            }
        }
        net.edge_ids().all(|e| match &net.edge(e).label {
            EdgeLabel::Box { content, .. } => level_ok(content),
            _ => true,
        })
    }
    level_ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::builtin_ops;

    fn prog(src: &str) -> Hypernet {
        let reg = builtin_ops();
        let t = crate::lang::parse(&reg, src).unwrap();
        translate_program(&reg, &t).unwrap()
    }

    #[test]
    fn numeral_program() {
        let net = prog("1");
        assert_eq!(net.edge_count(), 1);
        assert_eq!(net.inputs().len(), 1);
        assert!(net.outputs().is_empty());
        assert!(net.validate(true).is_empty());
    }

    #[test]
    fn variable_in_context() {
        let reg = builtin_ops();
        let tr = translate(&reg, &Environment::of(&["x"], &[]), &Term::var("x")).unwrap();
        assert_eq!(tr.net.edge_count(), 2, "one contraction, one weakening");
        assert_eq!(tr.net.inputs().len(), 1);
        assert_eq!(tr.net.outputs().len(), 1);
        assert!(tr.net.validate(true).is_empty());
    }

    #[test]
    fn atom_in_context() {
        let reg = builtin_ops();
        let tr = translate(
            &reg,
            &Environment::of(&[], &["a"]),
            &Term::Atom("a".to_string()),
        )
        .unwrap();
        assert_eq!(tr.net.edge_count(), 1, "a single instance edge");
        assert_eq!(tr.net.output_labels(), vec![VertexLabel::Diamond]);
    }

    #[test]
    fn addition_program_shape() {
        let net = prog("1 + 2");
        assert_eq!(net.edge_count(), 3, "add edge plus two numerals");
        assert!(net.validate(true).is_empty());
    }

    #[test]
    fn lambda_is_box_over_padding() {
        let net = prog("lambda x. x");
        assert_eq!(net.edge_count(), 2, "lambda edge and its box");
        let boxes: Vec<_> = net
            .edge_ids()
            .filter(|&e| matches!(net.edge(e).label, EdgeLabel::Box { .. }))
            .collect();
        assert_eq!(boxes.len(), 1);
        match &net.edge(boxes[0]).label {
            EdgeLabel::Box { content, binders } => {
                assert_eq!(*binders, 1);
                assert_eq!(content.edge_count(), 2, "variable padding inside");
            }
            _ => unreachable!(),
        }
        assert_eq!(net.deep_edge_count(), 4);
    }

    #[test]
    fn ref_over_numeral() {
        let net = prog("ref 1");
        assert_eq!(net.edge_count(), 2);
        assert!(net.validate(true).is_empty());
    }

    #[test]
    fn translations_are_focus_free_and_sealed() {
        for src in [
            "bind x = 1 in x + x",
            "let y = ref 0 in (y := y); (!y = y)",
            "new a <= 3 in !a + !a",
            "lambda f. lambda x. (f x)",
        ] {
            let net = prog(src);
            assert_eq!(net.deep_token_count(), 0, "{src}: focus-free");
            assert!(net.validate(true).is_empty(), "{src}: sealed validity");
        }
    }

    #[test]
    fn compositionality_with_graph_plugging() {
        // Translating C[t] equals translating C and plugging t's translation
        // into the hole, for hole environments matching exactly.
        let reg = builtin_ops();
        let cases: Vec<(Term, Environment, Term)> = vec![
            (
                Term::op("add", vec![Term::hole_closed(), Term::num(2)], vec![]),
                Environment::empty(),
                Term::num(1),
            ),
            (
                Term::bind(
                    "x",
                    Term::num(5),
                    Term::op(
                        "add",
                        vec![
                            Term::Hole {
                                vars: vec!["x".to_string()],
                                atoms: vec![],
                            },
                            Term::var("x"),
                        ],
                        vec![],
                    ),
                ),
                Environment::of(&["x"], &[]),
                Term::var("x"),
            ),
            (
                Term::op(
                    "ref",
                    vec![Term::op("neg", vec![Term::hole_closed()], vec![])],
                    vec![],
                ),
                Environment::empty(),
                Term::op("add", vec![Term::num(1), Term::num(2)], vec![]),
            ),
        ];
        for (ctx, hole_env, filler) in cases {
            let plugged_term = ctx.plug_hole(&filler);
            let direct = translate(&reg, &Environment::empty(), &plugged_term)
                .unwrap()
                .net;
            let ctx_tr = translate(&reg, &Environment::empty(), &ctx).unwrap().net;
            let filler_tr = translate(&reg, &hole_env, &filler).unwrap().net;
            let hole = ctx_tr.hole_names().into_iter().next().unwrap();
            let via_plug = ctx_tr.plug(&hole, &filler_tr).unwrap();
            assert!(
                direct.iso(&via_plug),
                "compositionality failed for {ctx} around {filler}"
            );
        }
    }

    #[test]
    fn binding_free_predicate_on_graphs() {
        let reg = builtin_ops();
        // Hole under an operation argument: binding-free.
        let bf = Term::op("neg", vec![Term::hole_closed()], vec![]);
        let net = translate(&reg, &Environment::empty(), &bf).unwrap().net;
        assert!(is_binding_free(&net));

        // Hole in a bound position: a contraction feeds its input.
        let not_bf = Term::bind("x", Term::hole_closed(), Term::var("x"));
        let net = translate(&reg, &Environment::empty(), &not_bf).unwrap().net;
        assert!(!is_binding_free(&net));
    }

    #[test]
    fn value_translation_decomposes_with_stable_root() {
        // Every value's translation has a maximal stable net at its root.
        let reg = builtin_ops();
        for src in ["0", "tt", "lambda x. x", "()"] {
            let t = crate::lang::parse(&reg, src).unwrap();
            let tr = translate(&reg, &Environment::empty(), &t).unwrap();
            assert!(
                tr.net.max_stable_from(tr.root).is_some(),
                "{src} should root a stable net"
            );
        }
    }
}
