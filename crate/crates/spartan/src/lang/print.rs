//! Canonical text for terms. `let`, `nu` and `;` desugar to applications and
//! are not recovered; the direct operation notations (infix arithmetic,
//! juxtaposition, `lambda`, `!`, `ref`, `neg`) print in their surface form.

use super::Term;
use std::fmt;

// Precedence levels, matching the parser ladder:
// 0 binder forms, 1 assign, 2 equality, 3 additive, 4 application, 5 prefix.
const ATOM: u8 = 6;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let level = level_of(t);
    if level < min {
        write!(f, "(")?;
        write_at(f, t)?;
        write!(f, ")")
    } else {
        write_at(f, t)
    }
}

fn level_of(t: &Term) -> u8 {
    match t {
        Term::Var(_) | Term::Atom(_) | Term::Hole { .. } => ATOM,
        Term::Bind { .. } | Term::New { .. } => 0,
        Term::Thunk { .. } => ATOM,
        Term::OpApp { name, eager, deferred } => match (name.as_str(), eager.len(), deferred.len()) {
            ("assign", 2, 0) => 1,
            ("eq", 2, 0) => 2,
            ("add" | "sub", 2, 0) => 3,
            ("app", 2, 0) => 4,
            ("deref" | "neg" | "ref", 1, 0) => 5,
            ("lambda", 0, 1) => {
                if matches!(&deferred[0], Term::Thunk { binders, .. } if binders.len() == 1) {
                    0
                } else {
                    ATOM
                }
            }
            _ => ATOM,
        },
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::Var(x) | Term::Atom(x) => write!(f, "{x}"),
        Term::Hole { .. } => write!(f, "[.]"),
        Term::Bind { var, bound, body } => {
            write!(f, "bind {var} = ")?;
            write_term(f, bound, 1)?;
            write!(f, " in ")?;
            write_term(f, body, 0)
        }
        Term::New { atom, bound, body } => {
            write!(f, "new {atom} <= ")?;
            write_term(f, bound, 1)?;
            write!(f, " in ")?;
            write_term(f, body, 0)
        }
        Term::Thunk { binders, body } => {
            write!(f, "[{}] ", binders.join(" "))?;
            write_term(f, body, 1)
        }
        Term::OpApp { name, eager, deferred } => {
            match (name.as_str(), eager.len(), deferred.len()) {
                ("unit", 0, 0) => write!(f, "()"),
                ("assign", 2, 0) => {
                    write_term(f, &eager[0], 2)?;
                    write!(f, " := ")?;
                    write_term(f, &eager[1], 1)
                }
                ("eq", 2, 0) => {
                    write_term(f, &eager[0], 2)?;
                    write!(f, " = ")?;
                    write_term(f, &eager[1], 3)
                }
                ("add", 2, 0) => {
                    write_term(f, &eager[0], 3)?;
                    write!(f, " + ")?;
                    write_term(f, &eager[1], 4)
                }
                ("sub", 2, 0) => {
                    write_term(f, &eager[0], 3)?;
                    write!(f, " - ")?;
                    write_term(f, &eager[1], 4)
                }
                ("app", 2, 0) => {
                    write_term(f, &eager[0], 4)?;
                    write!(f, " ")?;
                    write_term(f, &eager[1], 5)
                }
                ("deref", 1, 0) => {
                    write!(f, "!")?;
                    write_term(f, &eager[0], 5)
                }
                ("neg", 1, 0) => {
                    write!(f, "neg ")?;
                    write_term(f, &eager[0], 5)
                }
                ("ref", 1, 0) => {
                    write!(f, "ref ")?;
                    write_term(f, &eager[0], 5)
                }
                ("lambda", 0, 1) => {
                    if let Term::Thunk { binders, body } = &deferred[0] {
                        if binders.len() == 1 {
                            write!(f, "lambda {}. ", binders[0])?;
                            return write_term(f, body, 0);
                        }
                    }
                    write_explicit(f, name, eager, deferred)
                }
                _ => {
                    if eager.is_empty() && deferred.is_empty() {
                        write!(f, "{name}")
                    } else {
                        write_explicit(f, name, eager, deferred)
                    }
                }
            }
        }
    }
}

fn write_explicit(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    eager: &[Term],
    deferred: &[Term],
) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, t) in eager.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_term(f, t, 1)?;
    }
    if !deferred.is_empty() {
        write!(f, "; ")?;
        for (i, t) in deferred.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_term(f, t, 1)?;
        }
    }
    write!(f, ")")
}
