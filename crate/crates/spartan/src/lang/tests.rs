use super::*;
use crate::hypernet::Polarity;

fn reg() -> Registry {
    builtin_ops()
}

#[test]
fn registry_entries() {
    let r = reg();
    let lam = r.lookup("lambda").unwrap();
    assert_eq!(lam.polarity, Polarity::Passive);
    assert_eq!((lam.eager, lam.deferred.as_slice()), (0, &[1][..]));

    let app = r.lookup("app").unwrap();
    assert_eq!(app.polarity, Polarity::Active);
    assert_eq!((app.eager, app.deferred.len()), (2, 0));

    let unit = r.lookup("unit").unwrap();
    assert_eq!(unit.polarity, Polarity::Passive);
    assert_eq!((unit.eager, unit.deferred.len()), (0, 0));

    // Every integer numeral is a passive nullary operation.
    assert!(r.lookup("42").is_some());
    assert!(r.lookup("-17").is_some());
    assert!(r.lookup("nonsense").is_none());
}

#[test]
fn parse_bind() {
    let t = parse(&reg(), "bind x = 1 in x").unwrap();
    assert_eq!(t, Term::bind("x", Term::num(1), Term::var("x")));
}

#[test]
fn parse_lambda() {
    let t = parse(&reg(), "lambda x. x").unwrap();
    assert_eq!(
        t,
        Term::op("lambda", vec![], vec![Term::thunk(&["x"], Term::var("x"))])
    );
}

#[test]
fn parse_nu_desugars_to_ref_unit() {
    let t = parse(&reg(), "nu x. f").unwrap();
    let expected = Term::apply(
        Term::lambda("x", Term::var("f")),
        Term::op("ref", vec![Term::op0("unit")], vec![]),
    );
    assert_eq!(t, expected);
}

#[test]
fn parse_let_desugars() {
    let t = parse(&reg(), "let x = 2 in x + x").unwrap();
    let expected = Term::let_(
        "x",
        Term::num(2),
        Term::op("add", vec![Term::var("x"), Term::var("x")], vec![]),
    );
    assert_eq!(t, expected);
}

#[test]
fn parse_seq_uses_fresh_binder() {
    let t = parse(&reg(), "1; 2").unwrap();
    match &t {
        Term::OpApp { name, eager, .. } if name == "app" => {
            match &eager[0] {
                Term::OpApp { name, deferred, .. } if name == "lambda" => match &deferred[0] {
                    Term::Thunk { binders, body } => {
                        assert!(binders[0].starts_with("_s"));
                        assert_eq!(**body, Term::num(2));
                    }
                    other => panic!("unexpected {other:?}"),
                },
                other => panic!("unexpected {other:?}"),
            }
            assert_eq!(eager[1], Term::num(1));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn parse_precedence() {
    let r = reg();
    assert_eq!(
        parse(&r, "!x + 1").unwrap(),
        Term::op(
            "add",
            vec![Term::op("deref", vec![Term::var("x")], vec![]), Term::num(1)],
            vec![]
        )
    );
    // Application binds tighter than +, looser than prefix.
    assert_eq!(
        parse(&r, "f x + g y").unwrap(),
        Term::op(
            "add",
            vec![
                Term::apply(Term::var("f"), Term::var("x")),
                Term::apply(Term::var("g"), Term::var("y")),
            ],
            vec![]
        )
    );
    // `;` is loosest, `:=` next.
    assert_eq!(
        parse(&r, "x := 1; 2").unwrap().free_vars(),
        vec!["x".to_string()]
    );
    let t = parse(&r, "a = b = c").unwrap();
    match t {
        Term::OpApp { name, eager, .. } => {
            assert_eq!(name, "eq");
            assert!(matches!(&eager[0], Term::OpApp { name, .. } if name == "eq"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn parse_explicit_operation_form() {
    let r = reg();
    assert_eq!(
        parse(&r, "app(f, x;)").unwrap(),
        Term::apply(Term::var("f"), Term::var("x"))
    );
    assert_eq!(
        parse(&r, "lambda(; [x] x)").unwrap(),
        Term::lambda("x", Term::var("x"))
    );
    assert!(parse(&r, "add(1;)").is_err(), "arity mismatch is a parse error");
}

#[test]
fn parse_negative_literals() {
    let r = reg();
    assert_eq!(parse(&r, "-3").unwrap(), Term::num(-3));
    assert_eq!(
        parse(&r, "1 - -3").unwrap(),
        Term::op("sub", vec![Term::num(1), Term::num(-3)], vec![])
    );
}

#[test]
fn parse_error_has_position() {
    let err = parse(&reg(), "bind x 1 in x").unwrap_err();
    assert_eq!(err.line, 1);
    assert!(err.col > 1);
}

#[test]
fn atoms_resolved_by_binder_kind() {
    let t = parse(&reg(), "new a <= 0 in a").unwrap();
    assert_eq!(
        t,
        Term::new_atom("a", Term::num(0), Term::Atom("a".to_string()))
    );
}

#[test]
fn typecheck_rules() {
    let r = reg();
    assert_eq!(
        typecheck(&r, &Environment::of(&["x"], &[]), &Term::var("x")),
        Ok(Type::Star)
    );
    assert_eq!(
        typecheck(
            &r,
            &Environment::empty(),
            &Term::thunk(&["y"], Term::var("y"))
        ),
        Ok(Type::Thunk(1))
    );
    assert_eq!(
        typecheck(&r, &Environment::empty(), &Term::var("x")),
        Err(TypeError::UnboundVar("x".to_string()))
    );
    // Atoms type like variables against the atom environment.
    assert_eq!(
        typecheck(&r, &Environment::of(&[], &["a"]), &Term::Atom("a".to_string())),
        Ok(Type::Star)
    );
    // Shadowing is rejected.
    let shadow = Term::bind("x", Term::num(0), Term::bind("x", Term::num(1), Term::var("x")));
    assert!(matches!(
        typecheck(&r, &Environment::empty(), &shadow),
        Err(TypeError::ShadowedVar(_))
    ));
    // Thunk binders must avoid enclosing variables.
    let clash = Term::bind(
        "x",
        Term::num(0),
        Term::op("lambda", vec![], vec![Term::thunk(&["x"], Term::var("x"))]),
    );
    assert!(matches!(
        typecheck(&r, &Environment::empty(), &clash),
        Err(TypeError::BinderClash(_))
    ));
}

#[test]
fn typecheck_is_total_on_programs() {
    let r = reg();
    for src in [
        "1 + 2",
        "let x = ref 0 in (x := x); (!x = x)",
        "new a <= 7 in !a",
        "lambda x. lambda y. x",
    ] {
        let t = parse(&r, src).unwrap();
        assert_eq!(typecheck(&r, &Environment::empty(), &t), Ok(Type::Star), "{src}");
    }
}

#[test]
fn substitution_capture_avoiding() {
    // (lambda y. x)[y/x] must not capture: the binder is renamed.
    let t = Term::lambda("y", Term::var("x"));
    let s = t.subst("x", &Term::var("y"));
    match &s {
        Term::OpApp { deferred, .. } => match &deferred[0] {
            Term::Thunk { binders, body } => {
                assert_ne!(binders[0], "y");
                assert_eq!(**body, Term::var("y"));
            }
            other => panic!("unexpected {other:?}"),
        },
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn generative_terms() {
    let r = reg();
    assert!(parse(&r, "new a <= 0 in 1").unwrap().is_generative());
    assert!(!parse(&r, "ref 0").unwrap().is_generative(),
        "ref is an operation, not a name binder");
    assert!(!parse(&r, "lambda x. new a <= 0 in 1").unwrap().is_generative(),
        "name binders inside thunks do not count");
}

#[test]
fn print_parse_roundtrip_on_corpus() {
    let r = reg();
    for src in [
        "1",
        "1 + 2",
        "ref 1",
        "tt",
        "()",
        "lambda x. x",
        "bind x = 1 in x + x",
        "new a <= 7 in !a",
        "a := b := c",
        "(lambda x. x) tt",
        "!x + 1",
        "f x y",
        "neg 3 - -2",
    ] {
        let vars = ["x", "f", "g", "y", "a", "b", "c"].map(str::to_string);
        let t = parse_context(&r, src, &vars, &[]).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = t.to_string();
        let back = parse_context(&r, &printed, &vars, &[]).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(t, back, "roundtrip of {src} via {printed}");
    }
}

mod prop {
    use super::*;
    use proptest::prelude::*;

    /// Closed, well-typed terms by construction.
    fn term_gen() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-5i64..6).prop_map(Term::num),
            Just(Term::op0("tt")),
            Just(Term::op0("ff")),
            Just(Term::op0("unit")),
        ];
        leaf.prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::op("add", vec![a, b], vec![])),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::op("sub", vec![a, b], vec![])),
                inner.clone().prop_map(|a| Term::op("neg", vec![a], vec![])),
                inner.clone().prop_map(|a| Term::op("ref", vec![a], vec![])),
                inner.clone().prop_map(|a| Term::op("deref", vec![a], vec![])),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::apply(a, b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::op("assign", vec![a, b], vec![])),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::op("eq", vec![a, b], vec![])),
                inner.clone().prop_map(|b| Term::lambda("v", b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::bind("w", a, b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::new_atom("n", a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_print_roundtrip(t in term_gen()) {
            let r = builtin_ops();
            let printed = t.to_string();
            let back = parse(&r, &printed)
                .unwrap_or_else(|e| panic!("printed {printed}: {e}"));
            prop_assert_eq!(t, back);
        }
    }
}
