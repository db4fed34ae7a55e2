use super::*;

fn op(name: &str, eager: usize, deferred: Vec<usize>, polarity: Polarity) -> EdgeLabel {
    EdgeLabel::Operation(OpLabel {
        name: name.to_string(),
        sig: OpSignature::new(eager, deferred, polarity),
    })
}

fn numeral(n: i64) -> EdgeLabel {
    op(&n.to_string(), 0, vec![], Polarity::Passive)
}

/// `★ ⇒ ε` net holding a single numeral edge.
fn numeral_net(n: i64) -> Hypernet {
    let mut net = Hypernet::new();
    let r = net.add_vertex(VertexLabel::Star);
    net.add_edge(numeral(n), vec![r], vec![]);
    net.set_interface(vec![r], vec![]);
    net
}

/// The translation of a single variable use: a contraction padded with a
/// weakening, of type `★ ⇒ ★`.
fn var_net() -> Hypernet {
    let mut net = Hypernet::new();
    let root = net.add_vertex(VertexLabel::Star);
    let w = net.add_vertex(VertexLabel::Star);
    let out = net.add_vertex(VertexLabel::Star);
    net.add_edge(EdgeLabel::Weakening(Wire::Star), vec![], vec![w]);
    net.add_edge(EdgeLabel::Contraction(Wire::Star), vec![root, w], vec![out]);
    net.set_interface(vec![root], vec![out]);
    net
}

#[test]
fn validate_numeral_net_sealed() {
    assert!(numeral_net(1).validate(true).is_empty());
}

#[test]
fn validate_rejects_double_incoming() {
    let mut net = Hypernet::new();
    let a = net.add_vertex(VertexLabel::Star);
    let b = net.add_vertex(VertexLabel::Star);
    let v = net.add_vertex(VertexLabel::Star);
    net.add_edge(EdgeLabel::Token(TokenKind::Search), vec![a], vec![v]);
    net.add_edge(EdgeLabel::Token(TokenKind::Search), vec![b], vec![v]);
    net.set_interface(vec![a, b], vec![v]);
    let report = net.validate(false);
    assert!(
        report.iter().any(|x| matches!(x, Violation::MultipleIncoming(u) if *u == v)),
        "expected a multiple-incoming violation, got {report:?}"
    );
}

#[test]
fn validate_var_translation_net() {
    assert!(var_net().validate(false).is_empty());
    // Open term nets stay valid under the sealed check too: input != output.
    assert!(var_net().validate(true).is_empty());
}

#[test]
fn permute_identity_and_involution() {
    let net = var_net();
    let same = net.permute_interface(&[0], &[0]).unwrap();
    assert!(net.iso(&same));

    let two = Hypernet::tensor(&[var_net(), var_net()]);
    let swapped = two.permute_interface(&[1, 0], &[1, 0]).unwrap();
    let back = swapped.permute_interface(&[1, 0], &[1, 0]).unwrap();
    assert!(two.iso(&back));
    assert_eq!(two.inputs(), back.inputs());
}

#[test]
fn permute_rejects_bad_lengths() {
    let net = var_net();
    assert!(net.permute_interface(&[0, 1], &[0]).is_err());
    assert!(net.permute_interface(&[0], &[]).is_err());
}

#[test]
fn tensor_unit_and_pair() {
    assert_eq!(Hypernet::tensor(&[]).edge_count(), 0);
    let g = var_net();
    assert!(Hypernet::tensor(&[g.clone()]).iso(&g));

    let mut w = Hypernet::new();
    let v = w.add_vertex(VertexLabel::Star);
    w.add_edge(EdgeLabel::Weakening(Wire::Star), vec![], vec![v]);
    w.set_interface(vec![], vec![v]);
    let pair = Hypernet::tensor(&[w.clone(), w]);
    assert_eq!(pair.edge_count(), 2);
    assert_eq!(pair.outputs().len(), 2);
    assert!(pair.validate(true).is_empty());
}

#[test]
fn plug_identity_context_is_identity() {
    let g = var_net();
    let mut ctx = Hypernet::new();
    let i = ctx.add_vertex(VertexLabel::Star);
    let o = ctx.add_vertex(VertexLabel::Star);
    ctx.add_edge(EdgeLabel::Hole("x".into()), vec![i], vec![o]);
    ctx.set_interface(vec![i], vec![o]);
    let plugged = ctx.plug("x", &g).unwrap();
    assert!(plugged.iso(&g));
}

#[test]
fn plug_numeral_into_addition_context() {
    // Context for `[·] + 2` as a bare graph: add edge over a hole and a 2.
    let mut ctx = Hypernet::new();
    let r = ctx.add_vertex(VertexLabel::Star);
    let a1 = ctx.add_vertex(VertexLabel::Star);
    let a2 = ctx.add_vertex(VertexLabel::Star);
    ctx.add_edge(op("add", 2, vec![], Polarity::Active), vec![r], vec![a1, a2]);
    ctx.add_edge(EdgeLabel::Hole("x".into()), vec![a1], vec![]);
    ctx.add_edge(numeral(2), vec![a2], vec![]);
    ctx.set_interface(vec![r], vec![]);

    let plugged = ctx.plug("x", &numeral_net(1)).unwrap();

    let mut direct = Hypernet::new();
    let r = direct.add_vertex(VertexLabel::Star);
    let a1 = direct.add_vertex(VertexLabel::Star);
    let a2 = direct.add_vertex(VertexLabel::Star);
    direct.add_edge(op("add", 2, vec![], Polarity::Active), vec![r], vec![a1, a2]);
    direct.add_edge(numeral(1), vec![a1], vec![]);
    direct.add_edge(numeral(2), vec![a2], vec![]);
    direct.set_interface(vec![r], vec![]);

    assert!(plugged.iso(&direct));
    assert!(plugged.validate(true).is_empty());
}

#[test]
fn plug_nested_order_irrelevant() {
    // C has hole x; C' has hole y; plugging y-into-x first or G-into-y first
    // gives the same net.
    let mut c = Hypernet::new();
    let r = c.add_vertex(VertexLabel::Star);
    let m = c.add_vertex(VertexLabel::Star);
    c.add_edge(op("neg", 1, vec![], Polarity::Active), vec![r], vec![m]);
    c.add_edge(EdgeLabel::Hole("x".into()), vec![m], vec![]);
    c.set_interface(vec![r], vec![]);

    let mut c2 = Hypernet::new();
    let i = c2.add_vertex(VertexLabel::Star);
    let m2 = c2.add_vertex(VertexLabel::Star);
    c2.add_edge(op("neg", 1, vec![], Polarity::Active), vec![i], vec![m2]);
    c2.add_edge(EdgeLabel::Hole("y".into()), vec![m2], vec![]);
    c2.set_interface(vec![i], vec![]);

    let g = numeral_net(7);
    let lhs = c.plug("x", &c2).unwrap().plug("y", &g).unwrap();
    let rhs = c.plug("x", &c2.plug("y", &g).unwrap()).unwrap();
    assert!(lhs.iso(&rhs));
}

#[test]
fn plug_type_mismatch_rejected() {
    let mut ctx = Hypernet::new();
    let i = ctx.add_vertex(VertexLabel::Star);
    ctx.add_edge(EdgeLabel::Hole("x".into()), vec![i], vec![]);
    ctx.set_interface(vec![i], vec![]);
    // var_net has an output; the hole has none.
    assert!(ctx.plug("x", &var_net()).is_err());
}

#[test]
fn distributor_base_cases() {
    let empty = Hypernet::distributor(Wire::Star, 0, 5);
    assert_eq!(empty.edge_count(), 0);
    assert_eq!(empty.inputs().len(), 0);

    let w = Hypernet::distributor(Wire::Star, 1, 0);
    assert_eq!(w.edge_count(), 1);
    assert_eq!(w.inputs().len(), 0);
    assert_eq!(w.outputs().len(), 1);
    assert!(matches!(
        w.edge(w.edge_ids().next().unwrap()).label,
        EdgeLabel::Weakening(Wire::Star)
    ));

    let d30 = Hypernet::distributor(Wire::Diamond, 3, 0);
    assert_eq!(d30.edge_count(), 3);
    assert_eq!(d30.outputs().len(), 3);
    assert!(d30
        .edge_ids()
        .all(|e| matches!(d30.edge(e).label, EdgeLabel::Weakening(Wire::Diamond))));
}

#[test]
fn distributor_types_and_tree_shape() {
    for k in 0..4usize {
        for m in 0..4usize {
            let d = Hypernet::distributor(Wire::Star, k, m);
            assert_eq!(d.inputs().len(), k * m, "D_{{{k},{m}}} inputs");
            assert_eq!(d.outputs().len(), k, "D_{{{k},{m}}} outputs");
            assert!(d.validate(false).is_empty());
        }
    }
    for m in 0..4usize {
        let d = Hypernet::distributor(Wire::Star, 1, m);
        assert!(d.is_contraction_tree(), "D_{{1,{m}}} is a contraction tree");
        let weakenings = d
            .edge_ids()
            .filter(|&e| matches!(d.edge(e).label, EdgeLabel::Weakening(_)))
            .count();
        assert_eq!(weakenings, 1, "D_{{1,{m}}} has one weakening");
    }
}

#[test]
fn contraction_tree_recognition() {
    let w = Hypernet::distributor(Wire::Star, 1, 0);
    assert!(w.is_contraction_tree());
    assert!(Hypernet::distributor(Wire::Star, 1, 3).is_contraction_tree());

    let mut inet = Hypernet::new();
    let a = inet.add_vertex(VertexLabel::Star);
    let b = inet.add_vertex(VertexLabel::Diamond);
    inet.add_edge(EdgeLabel::Instance, vec![a], vec![b]);
    inet.set_interface(vec![a], vec![b]);
    assert!(!inet.is_contraction_tree());
}

#[test]
fn copyable_instance_and_lambda() {
    let mut inet = Hypernet::new();
    let a = inet.add_vertex(VertexLabel::Star);
    let b = inet.add_vertex(VertexLabel::Diamond);
    inet.add_edge(EdgeLabel::Instance, vec![a], vec![b]);
    inet.set_interface(vec![a], vec![b]);
    let h = inet.find_copyable_at(a).expect("instance is copyable");
    assert_eq!(h.edges.len(), 1);
    assert_eq!(h.outputs, vec![b]);

    // λ over a box.
    let mut lam = Hypernet::new();
    let r = lam.add_vertex(VertexLabel::Star);
    let t = lam.add_vertex(VertexLabel::Thunk(1));
    let content = var_net();
    lam.add_edge(op("lambda", 0, vec![1], Polarity::Passive), vec![r], vec![t]);
    lam.add_edge(
        EdgeLabel::Box {
            content: Box::new(content),
            binders: 1,
        },
        vec![t],
        vec![],
    );
    lam.set_interface(vec![r], vec![]);
    let h = lam.find_copyable_at(r).expect("lambda+box is copyable");
    assert_eq!(h.edges.len(), 2);

    // A contraction is not copyable.
    let v = var_net();
    assert!(v.find_copyable_at(v.inputs()[0]).is_none());
}

#[test]
fn one_way_checks() {
    assert!(numeral_net(0).is_one_way(), "no outputs is vacuously one-way");

    let mut through = Hypernet::new();
    let i = through.add_vertex(VertexLabel::Star);
    let o = through.add_vertex(VertexLabel::Star);
    through.add_edge(op("f", 1, vec![], Polarity::Active), vec![i], vec![o]);
    through.set_interface(vec![i], vec![o]);
    assert!(!through.is_one_way(), "operation spanning input to output");

    assert!(var_net().is_one_way(), "contraction path is not an operation path");
}

#[test]
fn stable_nets() {
    let num = numeral_net(3);
    let s = num.max_stable_from(num.inputs()[0]).expect("numeral is stable");
    assert_eq!(s.edges.len(), 1);
    assert!(s.outputs.is_empty());

    let mut inet = Hypernet::new();
    let a = inet.add_vertex(VertexLabel::Star);
    let b = inet.add_vertex(VertexLabel::Diamond);
    inet.add_edge(EdgeLabel::Instance, vec![a], vec![b]);
    inet.set_interface(vec![a], vec![b]);
    let s = inet.max_stable_from(a).expect("instance is stable");
    assert_eq!(s.outputs, vec![b]);

    let v = var_net();
    assert!(v.max_stable_from(v.inputs()[0]).is_none());
}

#[test]
fn path_classification() {
    // ref over a numeral: active edge + stable continuation.
    let mut net = Hypernet::new();
    let r = net.add_vertex(VertexLabel::Star);
    let a = net.add_vertex(VertexLabel::Star);
    net.add_edge(op("ref", 1, vec![], Polarity::Active), vec![r], vec![a]);
    net.add_edge(numeral(1), vec![a], vec![]);
    net.set_interface(vec![r], vec![]);
    assert_eq!(net.classify_paths(r), PathClass::AllActive);

    let num = numeral_net(1);
    assert_eq!(num.classify_paths(num.inputs()[0]), PathClass::AllStable);

    let v = var_net();
    assert_eq!(v.classify_paths(v.inputs()[0]), PathClass::Mixed);
}

#[test]
fn iso_basic() {
    let a = numeral_net(1);
    assert!(a.iso(&a.clone()));
    assert!(!numeral_net(1).iso(&numeral_net(2)));

    // Same net, different insertion order.
    let mut b = Hypernet::new();
    let out = b.add_vertex(VertexLabel::Star);
    let w = b.add_vertex(VertexLabel::Star);
    let root = b.add_vertex(VertexLabel::Star);
    b.add_edge(EdgeLabel::Contraction(Wire::Star), vec![root, w], vec![out]);
    b.add_edge(EdgeLabel::Weakening(Wire::Star), vec![], vec![w]);
    b.set_interface(vec![root], vec![out]);
    assert!(b.iso(&var_net()));
}

#[test]
fn deep_edge_count_terminates() {
    let mut lam = Hypernet::new();
    let r = lam.add_vertex(VertexLabel::Star);
    let t = lam.add_vertex(VertexLabel::Thunk(1));
    lam.add_edge(op("lambda", 0, vec![1], Polarity::Passive), vec![r], vec![t]);
    lam.add_edge(
        EdgeLabel::Box {
            content: Box::new(var_net()),
            binders: 1,
        },
        vec![t],
        vec![],
    );
    lam.set_interface(vec![r], vec![]);
    assert_eq!(lam.deep_edge_count(), 4);
}

#[test]
fn dot_is_deterministic() {
    let a = var_net().to_dot();
    let b = var_net().to_dot();
    assert_eq!(a, b);
    assert!(a.contains("digraph hypernet"));
}
